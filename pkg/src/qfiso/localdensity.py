"""Symbolic local isotropy densities over Z_p.

Every quantity is a :class:`~qfiso.symbolic.RationalFunction` in ``p``.  The
pipeline is

    case_densities(n)      closed forms for the mod-p case probabilities
    solve_beta_gamma(n)    isotropy probabilities one step after a Case I/II move
    solve_alpha(n)         isotropy probabilities given Case I / Case II
    rho_local(n)           isotropy probability of a Haar-random form

Table entries that are meaningless for small ``n`` are the :data:`UNDEFINED`
marker.  It refuses all arithmetic; a recursion term may only drop it when its
coefficient is identically zero, which is checked.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Optional, Union

from qfiso.primes import is_prime
from qfiso.symbolic import ONE, P, ZERO, RationalFunction, rf_eval

__all__ = [
    "UNDEFINED",
    "UndefinedEntryError",
    "CaseDensities",
    "RecursionSolution",
    "case_densities",
    "solve_beta_gamma",
    "solve_alpha",
    "rho_local",
    "rho_local_at",
    "recursion_residuals",
    "MAX_N",
]

MAX_N = 16


class UndefinedEntryError(ArithmeticError):
    pass


class _Undefined:
    """Inert marker for a table entry that has no meaning."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNDEFINED"

    def __str__(self) -> str:
        return "-"

    def _refuse(self, *args):
        raise UndefinedEntryError("arithmetic on an undefined table entry")

    __add__ = __radd__ = __sub__ = __rsub__ = _refuse
    __mul__ = __rmul__ = __truediv__ = __rtruediv__ = __neg__ = _refuse

    def __call__(self, p):
        raise UndefinedEntryError("cannot evaluate an undefined table entry")


UNDEFINED = _Undefined()
Entry = Union[RationalFunction, _Undefined]


def _term(coeff: RationalFunction, value: Entry) -> RationalFunction:
    if value is UNDEFINED:
        if not coeff.is_zero():
            raise UndefinedEntryError("undefined entry with a nonzero coefficient")
        return ZERO
    return coeff * value


def _p_pow(k: int) -> RationalFunction:
    return P**k


def _check_n(n: int, low: int) -> None:
    if not isinstance(n, int) or n < low:
        raise ValueError(f"n must be an integer >= {low}, got {n!r}")
    if n > MAX_N:
        raise ValueError(f"n = {n} exceeds the configured cap MAX_N = {MAX_N}")


@dataclass(frozen=True)
class CaseDensities:
    """Probabilities of the mod-p cases, unconditioned (xi), given the point
    condition (eta) and given the line condition (nu)."""

    n: int
    xi0: RationalFunction
    xi1: RationalFunction
    xi2: RationalFunction
    eta0: RationalFunction
    eta1: RationalFunction
    eta2: RationalFunction
    nu0: RationalFunction
    nu1: RationalFunction
    nu2: RationalFunction


@dataclass(frozen=True)
class RecursionSolution:
    n: int
    beta1: Entry
    beta2: Entry
    gamma1: Entry
    gamma2: Entry
    alpha1: Optional[Entry] = None
    alpha2: Optional[Entry] = None

    def as_dict(self) -> dict[str, Entry]:
        return {f.name: getattr(self, f.name) for f in fields(self) if f.name != "n"}


_lock = threading.Lock()
_memo: dict[tuple[str, int], object] = {}


def _memoized(kind: str, n: int, build):
    key = (kind, n)
    with _lock:
        if key in _memo:
            return _memo[key]
    value = build(n)
    with _lock:
        return _memo.setdefault(key, value)


def _case_densities(n: int) -> CaseDensities:
    N = n * (n + 1) // 2
    pn = _p_pow(n)
    xi1 = (pn - 1) * (pn - P) / (2 * (P + 1) * _p_pow(N))
    xi2 = (pn - 1) / _p_pow(N)
    xi0 = 1 - xi1 - xi2 - 1 / _p_pow(N)
    eta1 = (_p_pow(n - 1) - 1) / (2 * _p_pow(n * (n - 1) // 2))
    eta2 = 1 / _p_pow(n * (n - 1) // 2)
    eta0 = 1 - eta1 - eta2
    nu1 = 1 / _p_pow((n - 1) * (n - 2) // 2)
    nu2 = ZERO
    nu0 = 1 - nu1 - nu2
    return CaseDensities(n, xi0, xi1, xi2, eta0, eta1, eta2, nu0, nu1, nu2)


def case_densities(n: int) -> CaseDensities:
    _check_n(n, 1)
    return _memoized("cases", n, _case_densities)


def _solve_beta_gamma(n: int) -> RecursionSolution:
    if n == 2:
        return RecursionSolution(2, UNDEFINED, UNDEFINED, UNDEFINED, ZERO)

    # beta1 from (i)
    if n == 3:
        beta1: Entry = UNDEFINED
    elif n == 4:
        beta1 = ZERO
    else:
        nu = case_densities(n - 2)
        beta1 = nu.nu0 / (1 - nu.nu1)

    # beta2 and gamma1 together from (ii) and (iii)
    if n == 3:
        beta2: Entry = ZERO
        gamma1: Entry = ZERO
    else:
        line = case_densities(n - 1)
        pt = case_densities(n - 2)
        # beta2 - nu1' gamma1 = nu0'
        # -eta2 beta2 + gamma1 = eta0 + eta1 beta1
        a11, a12, b1 = ONE, -line.nu1, line.nu0
        a21, a22, b2 = -pt.eta2, ONE, pt.eta0 + _term(pt.eta1, beta1)
        det = a11 * a22 - a12 * a21
        beta2 = (b1 * a22 - a12 * b2) / det
        gamma1 = (a11 * b2 - a21 * b1) / det

    # gamma2 from (iv)
    pt = case_densities(n - 1)
    gamma2 = (pt.eta0 + _term(pt.eta1, gamma1)) / (1 - pt.eta2)
    return RecursionSolution(n, beta1, beta2, gamma1, gamma2)


def solve_beta_gamma(n: int) -> RecursionSolution:
    """Post-step isotropy probabilities; alpha fields are left as ``None``."""
    _check_n(n, 2)
    return _memoized("beta_gamma", n, _solve_beta_gamma)


def _solve_alpha(n: int) -> RecursionSolution:
    if n == 1:
        return RecursionSolution(1, UNDEFINED, UNDEFINED, UNDEFINED, UNDEFINED, UNDEFINED, ZERO)
    bg = solve_beta_gamma(n)
    here = case_densities(n)

    if n == 2:
        alpha1: Entry = ZERO
    else:
        inner = case_densities(n - 2)
        c = 1 / _p_pow((n - 1) * (n - 2) // 2)
        if not here.nu2.is_zero():
            raise AssertionError("line condition must exclude Case II")
        rhs = inner.xi0 + _term(inner.xi1, bg.beta1) + _term(inner.xi2, bg.beta2) + c * here.nu0
        alpha1 = rhs / (1 - c * here.nu1)

    inner = case_densities(n - 1)
    c = 1 / _p_pow(n * (n - 1) // 2)
    rhs = (
        inner.xi0
        + _term(inner.xi1, bg.gamma1)
        + _term(inner.xi2, bg.gamma2)
        + c * (here.eta0 + _term(here.eta1, alpha1))
    )
    alpha2 = rhs / (1 - c * here.eta2)
    return RecursionSolution(n, bg.beta1, bg.beta2, bg.gamma1, bg.gamma2, alpha1, alpha2)


def solve_alpha(n: int) -> RecursionSolution:
    _check_n(n, 1)
    return _memoized("alpha", n, _solve_alpha)


def _rho_local(n: int) -> RationalFunction:
    cd = case_densities(n)
    sol = solve_alpha(n)
    N = n * (n + 1) // 2
    pN = _p_pow(N)
    body = cd.xi0 + _term(cd.xi1, sol.alpha1) + _term(cd.xi2, sol.alpha2)
    return pN / (pN - 1) * body


def rho_local(n: int) -> RationalFunction:
    """Probability that a Haar-random n-ary form over Z_p is isotropic."""
    _check_n(n, 1)
    return _memoized("rho", n, _rho_local)


def rho_local_at(n: int, p: int) -> Fraction:
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    return rf_eval(rho_local(n), p)


def recursion_residuals(n: int) -> dict[str, RationalFunction]:
    """Left minus right side of every recursion equation that applies at ``n``.

    All values are identically zero for a correct solution.
    """
    sol = solve_alpha(n)
    out: dict[str, RationalFunction] = {}
    if n >= 4:
        nu = case_densities(n - 2)
        if n >= 5:
            out["beta1"] = sol.beta1 - (nu.nu0 + nu.nu1 * sol.beta1)
        line = case_densities(n - 1)
        out["beta2"] = sol.beta2 - (line.nu0 + line.nu1 * sol.gamma1)
        pt = case_densities(n - 2)
        out["gamma1"] = sol.gamma1 - (pt.eta0 + _term(pt.eta1, sol.beta1) + pt.eta2 * sol.beta2)
    if n >= 3:
        pt = case_densities(n - 1)
        out["gamma2"] = sol.gamma2 - (pt.eta0 + _term(pt.eta1, sol.gamma1) + pt.eta2 * sol.gamma2)
        inner = case_densities(n - 2)
        here = case_densities(n)
        c = 1 / _p_pow((n - 1) * (n - 2) // 2)
        out["alpha1"] = sol.alpha1 - (
            inner.xi0
            + _term(inner.xi1, sol.beta1)
            + _term(inner.xi2, sol.beta2)
            + c * (here.nu0 + here.nu1 * sol.alpha1 + here.nu2 * sol.alpha2)
        )
    if n >= 2:
        inner = case_densities(n - 1)
        here = case_densities(n)
        c = 1 / _p_pow(n * (n - 1) // 2)
        out["alpha2"] = sol.alpha2 - (
            inner.xi0
            + _term(inner.xi1, sol.gamma1)
            + _term(inner.xi2, sol.gamma2)
            + c * (here.eta0 + _term(here.eta1, sol.alpha1) + here.eta2 * sol.alpha2)
        )
    N = n * (n + 1) // 2
    cd = case_densities(n)
    rho = rho_local(n)
    out["rho"] = rho - (
        cd.xi0 + _term(cd.xi1, sol.alpha1) + _term(cd.xi2, sol.alpha2) + rho / _p_pow(N)
    )
    return out
