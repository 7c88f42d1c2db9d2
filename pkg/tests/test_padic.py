import itertools
import random
from fractions import Fraction

import pytest

from oracles import liftable_zero_mod, vp
from qfiso.forms import CaseKind, QuadraticForm, VerdictKind, num_coeffs
from qfiso.padic import (
    BASE_CASES,
    DigitSource,
    PAdicForm,
    classify_mod_p,
    decide_hasse,
    decide_recursive,
    diagonalize,
    hilbert_symbol,
    is_square_qp,
    sample_local_density,
    verify_witness,
)
from qfiso.padic.modp import legendre, sqrt_mod


def exact(coeffs, p, n=None):
    n = n or {1: 1, 3: 2, 6: 3, 10: 4, 15: 5, 21: 6}[len(coeffs)]
    return PAdicForm.exact(tuple(coeffs), p, n=n)


# mod-p helpers


def test_legendre_and_sqrt():
    for p in (3, 5, 7, 11, 13, 97):
        squares = {x * x % p for x in range(1, p)}
        for a in range(1, p):
            assert legendre(a, p) == (1 if a in squares else -1)
            if a in squares:
                r = sqrt_mod(a, p)
                assert r * r % p == a


# lazy digits


def test_digits_in_range_and_stable():
    src = DigitSource(5, 3, seed=11, index=4)
    shallow = src.value(1, 10)
    deep = src.value(1, 40)
    assert deep % 5**10 == shallow
    assert all(0 <= d < 5 for d in src.digits(1, 40))
    again = DigitSource(5, 3, seed=11, index=4)
    assert again.value(1, 40) == deep


def test_digits_independent_of_access_order():
    a = DigitSource(3, 6, seed=2, index=9)
    b = DigitSource(3, 6, seed=2, index=9)
    b.value(5, 64)
    assert a.value(0, 20) == b.value(0, 20)


def test_random_forms_differ_by_index():
    f = PAdicForm.random(3, 2, seed=1, index=0)
    g = PAdicForm.random(3, 2, seed=1, index=1)
    assert f.truncated(32) != g.truncated(32)


# classification


def test_classify_examples():
    assert classify_mod_p(exact((1, 1, 1), 2)).kind is CaseKind.CASE_I
    cls = classify_mod_p(exact((1, 0, 1), 2))
    assert cls.kind is CaseKind.CASE_II
    g = QuadraticForm(2, (1, 0, 1)).substitute([list(r) for r in cls.basis])
    assert [c % 2 for c in g.coeffs] == [1, 0, 0]
    assert classify_mod_p(exact((1, 0, 0, 1, 0, 1), 3)).kind is CaseKind.OTHER


# recursive decider


@pytest.mark.parametrize("p", [2, 3, 5, 7, 101])
def test_hyperbolic_plane(p):
    v = decide_recursive(exact((0, 1, 0), p))
    assert v.kind is VerdictKind.ISOTROPIC
    assert v.witness == [1, 0]


def test_sum_of_two_squares_mod_3():
    v = decide_recursive(exact((1, 0, 1), 3))
    assert v.kind is VerdictKind.ANISOTROPIC
    assert v.trace[-1]["base_case"] == "alpha1(2)"
    assert decide_hasse(QuadraticForm(2, (1, 0, 1)), 3).kind is VerdictKind.ANISOTROPIC


def test_sum_of_four_squares_at_2():
    f = (1, 0, 0, 0, 1, 0, 0, 1, 0, 1)
    v = decide_recursive(exact(f, 2))
    assert v.kind is VerdictKind.ANISOTROPIC
    assert v.trace[-1]["base_case"] in BASE_CASES
    assert decide_hasse(QuadraticForm(4, f), 2).kind is VerdictKind.ANISOTROPIC
    assert liftable_zero_mod(4, f, 2, 4) is None


def test_zero_and_degenerate_forms():
    v = decide_recursive(exact((0, 0, 0), 3))
    assert v.kind is VerdictKind.DEGENERATE_ISOTROPIC
    f = (1, 2, 0, 1, 0, 5)  # (x + y)^2 + 5 z^2
    v = decide_recursive(exact(f, 5))
    assert v.kind is VerdictKind.DEGENERATE_ISOTROPIC
    assert QuadraticForm(3, f)(v.witness) == 0
    h = decide_hasse(QuadraticForm(3, f), 5)
    assert h.kind is VerdictKind.DEGENERATE_ISOTROPIC


def test_unary_forms_are_anisotropic():
    for p in (2, 3, 5):
        for a in (1, 2, 3, p, p * p * 7):
            assert decide_recursive(exact((a,), p, n=1)).kind is VerdictKind.ANISOTROPIC


def test_rational_coefficients():
    f = PAdicForm.exact((Fraction(1, 2), 0, Fraction(-1, 3)), 5, n=2)
    assert decide_recursive(f).kind is decide_hasse(f).kind


def test_trace_shape():
    v = decide_recursive(exact((1, 0, 0, 0, 1, 0, 0, 1, 0, 1), 2))
    for step in v.trace:
        assert {"n", "case"} <= set(step)
    assert any("substitution" in step for step in v.trace)


def test_witness_sound_on_random_corpus():
    rng = random.Random(7)
    for _ in range(400):
        p = rng.choice([2, 3, 5, 7])
        n = rng.randint(2, 5)
        coeffs = [rng.randint(-30, 30) * p ** rng.choice([0, 0, 1, 2]) for _ in range(num_coeffs(n))]
        f = exact(coeffs, p, n)
        v = decide_recursive(f, check=True)
        assert v.kind is not VerdictKind.UNDECIDED
        if v.kind is VerdictKind.ISOTROPIC:
            assert verify_witness(f, v.witness)


def test_oracle_equivalence_small_corpus():
    rng = random.Random(3)
    for p in (2, 3, 5, 7):
        for n in (2, 3, 4, 5):
            for _ in range(60):
                coeffs = [rng.randint(-50, 50) for _ in range(num_coeffs(n))]
                q = QuadraticForm(n, tuple(coeffs))
                if q.discriminant() == 0:
                    continue
                a = decide_recursive(exact(coeffs, p, n))
                b = decide_hasse(q, p)
                assert a.kind is b.kind, (p, coeffs)


def test_scaling_by_p_preserves_verdict():
    rng = random.Random(8)
    for _ in range(200):
        p = rng.choice([2, 3, 5])
        n = rng.randint(2, 4)
        coeffs = [rng.randint(-20, 20) for _ in range(num_coeffs(n))]
        a = decide_recursive(exact(coeffs, p, n))
        b = decide_recursive(exact([p * c for c in coeffs], p, n))
        assert a.kind is b.kind


def test_lazy_forms_decide():
    for i in range(200):
        f = PAdicForm.random(3, 2, seed=5, index=i)
        v = decide_recursive(f)
        assert v.decided
        if v.kind is VerdictKind.ISOTROPIC:
            assert verify_witness(f, v.witness)


def test_tiny_depth_limit_gives_undecided():
    # two digits are not enough to settle every form
    outcomes = [decide_recursive(PAdicForm.random(2, 2, seed=1, index=i, depth_limit=2)).kind for i in range(200)]
    assert VerdictKind.UNDECIDED in outcomes


# verify_witness


def test_verify_witness_examples():
    f = exact((0, 1, 0), 5)
    assert verify_witness(f, [1, 0])
    assert not verify_witness(f, [1, 1])


def test_verify_witness_hensel_lifted():
    # 7 = 1 mod 3 is a square, so x^2 - 7 y^2 has a smooth zero mod 3
    r = next(x for x in range(27) if (x * x - 7) % 27 == 0)
    assert verify_witness(exact((1, 0, -7), 3), [r, 1])
    assert not verify_witness(exact((1, 0, -7), 3), [1, 0])


def test_x2_plus_7y2_is_anisotropic_at_3():
    # -7 = 2 is a non-residue mod 3
    assert decide_recursive(exact((1, 0, 7), 3)).kind is VerdictKind.ANISOTROPIC
    assert decide_hasse(QuadraticForm(2, (1, 0, 7)), 3).kind is VerdictKind.ANISOTROPIC


# Hasse oracle


def _hilbert_by_search(a, b, p, k):
    """(a, b)_p via a primitive liftable zero of a x^2 + b y^2 - z^2 mod p^k.

    With v(a), v(b) <= 1 some primitive zero has gradient valuation 0 (p odd)
    or 1 (p = 2), so k = 2 and k = 4 decide the symbol.
    """
    return 1 if liftable_zero_mod(3, (a, 0, 0, b, 0, -1), p, k) is not None else -1


def test_hilbert_examples():
    for p in (2, 3, 5, 7):
        for b in (1, -1, 2, 3, 5, 6, 10):
            assert hilbert_symbol(1, b, p) == 1
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(2, 5, 5) == -1
    with pytest.raises(ValueError):
        hilbert_symbol(0, 1, 3)


@pytest.mark.parametrize("p, k", [(2, 4), (3, 2), (5, 2)])
def test_hilbert_matches_search(p, k):
    for a, b in itertools.product([1, -1, 2, -2, 3, 5, 6, -3, 10, 15], repeat=2):
        if (vp(a, p) + vp(b, p)) > 1:
            continue
        assert hilbert_symbol(a, b, p) == _hilbert_by_search(a, b, p, k), (a, b)


def test_hilbert_symmetric_and_bilinear():
    vals = [1, -1, 2, 3, 5, 6, 7, -5, 10, 12]
    for p in (2, 3, 5, 7):
        for a, b, c in itertools.product(vals, repeat=3):
            assert hilbert_symbol(a, b, p) == hilbert_symbol(b, a, p)
            assert hilbert_symbol(a * b, c, p) == hilbert_symbol(a, c, p) * hilbert_symbol(b, c, p)


def test_hasse_examples():
    assert decide_hasse(QuadraticForm(3, (1, 0, 0, 1, 0, -1)), 5).kind is VerdictKind.ISOTROPIC
    assert decide_hasse(QuadraticForm(3, (1, 0, 0, 1, 0, 1)), 2).kind is VerdictKind.ANISOTROPIC
    assert liftable_zero_mod(3, (1, 0, 0, 1, 0, 1), 2, 4) is None
    assert decide_hasse(QuadraticForm(2, (1, 0, -7)), 7).kind is VerdictKind.ANISOTROPIC
    with pytest.raises(ValueError):
        decide_hasse(QuadraticForm(2, (0, 0, 0)), 3)


def test_diagonalize_preserves_discriminant_class():
    rng = random.Random(2)
    for _ in range(200):
        n = rng.randint(1, 5)
        q = QuadraticForm(n, tuple(rng.randint(-9, 9) for _ in range(num_coeffs(n))))
        d = diagonalize(q)
        prod = Fraction(1)
        for x in d:
            prod *= x
        # det B = 2^n det(Gram), and a congruence changes det by a square
        det_gram = Fraction(q.discriminant(), 2**n)
        if det_gram == 0:
            assert prod == 0
        else:
            ratio = prod / det_gram
            assert ratio > 0 and all(is_square_qp(ratio, p) for p in (2, 3, 5, 7))


# sampling


def test_sampling_is_deterministic_and_worker_independent():
    a = sample_local_density(2, 3, 300, seed=4, workers=1)
    b = sample_local_density(2, 3, 300, seed=4, workers=2)
    assert (a.successes, a.samples, a.undecided) == (b.successes, b.samples, b.undecided)


def test_conditioned_sampling_small():
    est = sample_local_density(2, 3, 2000, seed=1, condition="caseII")
    assert abs(est.estimate - 1 / 8) < 5 * max(est.stderr, 0.01)
    with pytest.raises(ValueError):
        sample_local_density(1, 3, 10, seed=1, condition="caseI")
    with pytest.raises(ValueError):
        sample_local_density(2, 4, 10, seed=1)
