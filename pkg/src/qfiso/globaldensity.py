"""Global isotropy: Hasse-Minkowski decisions, Euler products, height experiments."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from qfiso.estimate import DensityEstimate, chunk_ranges, chunk_rng, run_chunks
from qfiso.forms import IsotropyVerdict, QuadraticForm, VerdictKind, num_coeffs, rational_kernel_vector
from qfiso.localdensity import rho_local_at
from qfiso.padic.decide import decide_recursive
from qfiso.padic.hasse import decide_hasse, diagonalize
from qfiso.padic.lazy import PAdicForm
from qfiso.primes import FactorizationError, factorize, primes_up_to
from qfiso.realdensity import estimate_rho_infinity

__all__ = [
    "IntegralForm",
    "EulerProductResult",
    "LocalInconsistency",
    "decide_global",
    "signature",
    "euler_product",
    "rho_n_combined",
    "empirical_global",
    "DivergentProductError",
]

DIGITS = 40
WITNESS_BOX = 6


class DivergentProductError(ValueError):
    pass


class LocalInconsistency(AssertionError):
    """The recursive decider and the Hasse invariant disagree at some prime."""


@dataclass(frozen=True)
class IntegralForm(QuadraticForm):
    """A quadratic form with integer coefficients."""

    def __post_init__(self):
        super().__post_init__()
        for k, c in enumerate(self.coeffs):
            if isinstance(c, bool) or not isinstance(c, (int, np.integer)):
                if isinstance(c, Fraction) and c.denominator == 1:
                    continue
                raise TypeError(f"coeffs[{k}] = {c!r} is not an integer")
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def of(cls, form: QuadraticForm | Sequence[int], n: Optional[int] = None) -> IntegralForm:
        if isinstance(form, IntegralForm):
            return form
        if isinstance(form, QuadraticForm):
            return cls(form.n, tuple(form.coeffs))
        if n is None:
            raise ValueError("n is required with a bare coefficient list")
        return cls(n, tuple(form))


def signature(form: QuadraticForm) -> tuple[int, int, int]:
    """(positive, negative, zero) counts, exact by Sylvester's law of inertia."""
    diag = diagonalize(form)
    return (sum(1 for d in diag if d > 0), sum(1 for d in diag if d < 0), sum(1 for d in diag if d == 0))


def _primitive(v: Sequence[int]) -> list[int]:
    g = 0
    for x in v:
        g = math.gcd(g, x)
    return [x // g for x in v] if g else list(v)


def _binary_witness(form: QuadraticForm, s: int) -> list[int]:
    a, b, c = form.coeffs
    if a == 0:
        return [1, 0]
    return _primitive([-b + s, 2 * a])


def _box_witness(form: QuadraticForm, bound: int = WITNESS_BOX) -> Optional[list[int]]:
    """Smallest-height rational zero with entries in [-bound, bound], if any."""
    n = form.n
    for h in range(1, bound + 1):
        for x in itertools.product(range(-h, h + 1), repeat=n):
            if max(abs(t) for t in x) != h or next(t for t in x if t) < 0:
                continue
            if form(x) == 0:
                return list(x)
    return None


def decide_global(f: QuadraticForm | Sequence[int], n: Optional[int] = None, *, witness: bool = True,
                  check: bool = True) -> IsotropyVerdict:
    """Isotropy over Q of an integral form.

    For n >= 3 the verdict rests on the real signature and local decisions at
    2 and at the odd primes dividing det B.  ``check`` cross-validates every
    local decision against the Hasse-invariant test.  ``witness`` searches a
    small box for an explicit rational zero.
    """
    form = IntegralForm.of(f, n)
    n = form.n
    if form.is_zero():
        return IsotropyVerdict(VerdictKind.ISOTROPIC, [1] + [0] * (n - 1), None, [], {"zero_form": True}, "global")
    det = form.discriminant()
    if det == 0:
        w = rational_kernel_vector(form.doubled_gram())
        return IsotropyVerdict(VerdictKind.DEGENERATE_ISOTROPIC, w, None, [], {"kernel_vector": True}, "global")
    cert: dict = {"discriminant": det}
    if n == 1:
        return IsotropyVerdict(VerdictKind.ANISOTROPIC, None, None, [], cert, "global")
    if n == 2:
        disc = -det
        s = math.isqrt(disc) if disc >= 0 else -1
        if s >= 0 and s * s == disc:
            return IsotropyVerdict(VerdictKind.ISOTROPIC, _binary_witness(form, s), None, [], cert, "global")
        return IsotropyVerdict(VerdictKind.ANISOTROPIC, None, None, [], cert, "global")

    pos, neg, _ = signature(form)
    cert["signature"] = [pos, neg]
    if pos == 0 or neg == 0:
        cert["obstruction"] = "infinity"
        return IsotropyVerdict(VerdictKind.ANISOTROPIC, None, None, [], cert, "global")
    if n <= 4:
        try:
            odd = sorted(p for p in factorize(abs(det)) if p != 2)
        except FactorizationError as exc:
            cert["unfactored"] = exc.composite
            return IsotropyVerdict(VerdictKind.UNDECIDED, None, None, [], cert, "global")
        local = {}
        for p in [2] + odd:
            v = decide_recursive(PAdicForm.exact(form, p), witness=False)
            if check:
                h = decide_hasse(form, p, find_witness=False)
                if h.kind is not v.kind:
                    raise LocalInconsistency(f"p={p}: recursive {v.kind.value}, hasse {h.kind.value} for {form.coeffs}")
            local[p] = v.kind.value
            if not v.isotropic:
                cert["local"] = local
                cert["obstruction"] = p
                return IsotropyVerdict(VerdictKind.ANISOTROPIC, None, None, [], cert, "global")
        cert["local"] = local
    verdict = IsotropyVerdict(VerdictKind.ISOTROPIC, None, None, [], cert, "global")
    if witness:
        verdict.witness = _box_witness(form)
    return verdict


@dataclass
class EulerProductResult:
    value: Decimal
    truncation_prime: int
    tail_bound: float
    factor_count: int
    exact_partial: Optional[Fraction] = None

    @property
    def interval(self) -> tuple[Decimal, Decimal]:
        with localcontext() as ctx:
            ctx.prec = DIGITS
            t = Decimal(self.tail_bound)
            return self.value * (-t).exp(), self.value * t.exp()

    def to_json(self) -> dict:
        lo, hi = self.interval
        return {
            "value": str(self.value),
            "truncation_prime": self.truncation_prime,
            "tail_bound": self.tail_bound,
            "factor_count": self.factor_count,
            "interval": [str(lo), str(hi)],
        }


def _tail_bound(P: int) -> float:
    # -log(1 - f) <= f / (1 - f) with f < 1/(4 m^3) <= 1/32, and sum_{m>P} m^-3 < 1/(2 P^2)
    return (32 / 31) * (1 / 4) / (2 * P * P)


def euler_product(n: int, tol: float) -> EulerProductResult:
    """prod_p rho_n(p), truncated with a proven bound on the log-scale error."""
    if not tol > 0:
        raise ValueError("tol must be positive")
    if n <= 3:
        raise DivergentProductError(
            f"the product over p of rho_{n}(p) diverges to 0: 1 - rho_{n}(p) is of order 1/(2p) or larger "
            "and the sum of 1/(2p) over primes diverges"
        )
    if n >= 5:
        return EulerProductResult(Decimal(1), 2, 0.0, 0, Fraction(1))
    P = max(2, math.isqrt(math.ceil(4 / (31 * tol))))
    while _tail_bound(P) >= tol:
        P += 1
    primes = primes_up_to(P)
    prod = Fraction(1)
    for p in primes:
        prod *= rho_local_at(n, p)
    with localcontext() as ctx:
        ctx.prec = DIGITS
        value = Decimal(prod.numerator) / Decimal(prod.denominator)
    return EulerProductResult(value, P, _tail_bound(P), len(primes), prod)


def rho_n_combined(n: int, dist="uniform", mc_samples: int = 10**6, tol: float = 1e-6, seed: int = 0,
                   workers: Optional[int] = None) -> DensityEstimate:
    """rho_n = rho_n(inf) * prod_p rho_n(p)."""
    if n < 1:
        raise ValueError("n must be positive")
    if n <= 3:
        est = DensityEstimate(0.0, 0.0, 0, seed, None, 0)
        est.extra.update({"n": n, "exact": True})
        return est
    real = estimate_rho_infinity(n, dist, mc_samples, seed, workers)
    if n >= 5:
        real.extra["euler_product"] = "1"
        return real
    ep = euler_product(n, tol)
    prod = float(ep.value)
    est = DensityEstimate(real.estimate * prod, real.stderr * prod + real.estimate * prod * ep.tail_bound,
                          real.samples, seed, None, 0)
    est.extra.update({"n": n, "dist": real.extra["dist"], "rho_infinity": real.estimate,
                      "rho_infinity_stderr": real.stderr, "euler_product": str(ep.value),
                      "truncation_prime": ep.truncation_prime, "tail_bound": ep.tail_bound})
    return est


def _empirical_chunk(n: int, X: int, seed: int, chunk_id: int, size: int) -> tuple[int, int]:
    rng = chunk_rng(seed, chunk_id, stream=3)
    m = num_coeffs(n)
    iso = und = 0
    done = 0
    while done < size:
        coeffs = rng.integers(-X, X + 1, size=m)
        if not coeffs.any():
            continue
        done += 1
        v = decide_global(IntegralForm(n, tuple(int(c) for c in coeffs)), witness=False)
        if v.kind is VerdictKind.UNDECIDED:
            und += 1
        elif v.isotropic:
            iso += 1
    return iso, und


def empirical_global(n: int, X: int, samples: int, seed: int, workers: Optional[int] = None) -> DensityEstimate:
    """Isotropic fraction among random integral forms of height at most X."""
    if X < 1 or samples < 1:
        raise ValueError("X and samples must be positive")
    tasks = [(n, X, seed, k, b - a) for k, a, b in chunk_ranges(samples)]
    iso = und = 0
    for a, b in run_chunks(_empirical_chunk, tasks, workers):
        iso += a
        und += b
    est = DensityEstimate.from_counts(iso, samples - und, und, seed)
    est.extra.update({"n": n, "X": X})
    return est
