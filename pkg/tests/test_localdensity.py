from fractions import Fraction

import pytest

from oracles import ALPHA, BETA_GAMMA, UNDEF, lemma31, theorem1
from qfiso.localdensity import (
    UNDEFINED,
    UndefinedEntryError,
    case_densities,
    recursion_residuals,
    rho_local,
    rho_local_at,
    solve_alpha,
    solve_beta_gamma,
)
from qfiso.primes import primes_up_to
from qfiso.symbolic import ONE, P, RationalFunction

p = P


@pytest.mark.parametrize("n", range(1, 9))
def test_rho_matches_closed_form(n):
    assert rho_local(n) == theorem1(n)


def test_rho_examples():
    assert rho_local(2) == RationalFunction(Fraction(1, 2))
    assert rho_local(7) == ONE
    assert rho_local_at(4, 2) == Fraction(277, 279)
    assert rho_local_at(3, 3) == Fraction(29, 32)
    for q in (2, 3, 5, 101):
        assert rho_local_at(1, q) == 0


def test_rho_at_rejects_composite():
    with pytest.raises(ValueError):
        rho_local_at(4, 9)


@pytest.mark.parametrize("n", range(1, 7))
def test_case_densities_match_closed_forms(n):
    cd = case_densities(n)
    xi1, xi2, eta1, eta2, nu1, nu2 = lemma31(n)
    assert cd.xi1 == xi1 and cd.xi2 == xi2
    assert cd.eta1 == eta1 and cd.eta2 == eta2
    if nu1 is not None:
        assert cd.nu1 == nu1
    assert cd.nu2 == nu2


@pytest.mark.parametrize("n", range(1, 9))
def test_case_density_identities(n):
    cd = case_densities(n)
    N = n * (n + 1) // 2
    assert cd.eta0 + cd.eta1 + cd.eta2 == ONE
    assert cd.nu0 + cd.nu1 + cd.nu2 == ONE
    assert cd.xi0 == ONE - cd.xi1 - cd.xi2 - ONE / p**N


def test_case_density_examples():
    assert case_densities(2).xi1(3) == Fraction(2, 9)
    assert case_densities(1).xi1 == RationalFunction(0)
    assert case_densities(4).nu1 == ONE / p**3


@pytest.mark.parametrize("n", [2, 3, 4])
def test_beta_gamma_table(n):
    sol = solve_beta_gamma(n)
    for got, want in zip((sol.beta1, sol.beta2, sol.gamma1, sol.gamma2), BETA_GAMMA[n]):
        if want == UNDEF:
            assert got is UNDEFINED
        else:
            assert got == want


@pytest.mark.parametrize("n", [5, 6, 8])
def test_beta_gamma_large_n_all_one(n):
    sol = solve_beta_gamma(n)
    assert (sol.beta1, sol.beta2, sol.gamma1, sol.gamma2) == (ONE, ONE, ONE, ONE)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_alpha_table(n):
    sol = solve_alpha(n)
    assert (sol.alpha1, sol.alpha2) == ALPHA[n]


@pytest.mark.parametrize("n", [5, 6, 7])
def test_alpha_large_n_all_one(n):
    sol = solve_alpha(n)
    assert (sol.alpha1, sol.alpha2) == (ONE, ONE)


def test_base_cases():
    assert solve_alpha(2).alpha1 == 0
    assert solve_alpha(1).alpha2 == 0
    assert solve_beta_gamma(4).beta1 == 0
    assert solve_beta_gamma(3).beta2 == 0
    assert solve_beta_gamma(3).gamma1 == 0
    assert solve_beta_gamma(2).gamma2 == 0


def test_undefined_entries_refuse_arithmetic():
    assert solve_beta_gamma(3).beta1 is UNDEFINED
    assert solve_beta_gamma(2).gamma1 is UNDEFINED
    with pytest.raises(UndefinedEntryError):
        UNDEFINED + ONE
    with pytest.raises(UndefinedEntryError):
        ONE * UNDEFINED
    with pytest.raises(UndefinedEntryError):
        UNDEFINED(3)


@pytest.mark.parametrize("n", range(2, 9))
def test_recursion_residuals_vanish(n):
    for name, r in recursion_residuals(n).items():
        assert r == 0, name


def test_large_n_forced_to_one():
    for n in (5, 6, 9):
        cd = case_densities(n)
        N = n * (n + 1) // 2
        assert cd.xi0 + cd.xi1 + cd.xi2 == ONE - ONE / p**N
        assert rho_local(n) == ONE


def test_densities_lie_in_unit_interval():
    for n in range(1, 7):
        cd = case_densities(n)
        fns = [rho_local(n), cd.xi0, cd.xi1, cd.xi2, cd.eta0, cd.eta1, cd.eta2, cd.nu0, cd.nu1]
        if n >= 2:
            fns += [v for v in solve_beta_gamma(n).as_dict().values() if v is not None and v is not UNDEFINED]
        fns += [v for v in (solve_alpha(n).alpha1, solve_alpha(n).alpha2) if v is not None and v is not UNDEFINED]
        for q in primes_up_to(101):
            for f in fns:
                assert 0 <= f(q) <= 1


def test_n_cap():
    with pytest.raises(ValueError):
        rho_local(0)
    with pytest.raises(ValueError):
        solve_beta_gamma(1)
