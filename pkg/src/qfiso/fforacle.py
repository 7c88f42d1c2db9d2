"""Brute-force ground truth over F_p.

Nothing here is clever on purpose.  Case I and Case II are recognized straight
from their definitions by running over every linear form (up to scaling) over
F_p and F_{p^2}; the counts come from labelling every one of the ``p^N``
reductions.
"""

from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from qfiso.forms import CaseClass, CaseKind, num_coeffs, triangle_pairs
from qfiso.localdensity import case_densities
from qfiso.primes import is_prime

__all__ = [
    "FFForm",
    "CaseCounts",
    "GuardError",
    "naive_classify",
    "enumerate_counts",
    "compare_with_lemma",
    "case_labels",
    "binary_irreducible",
    "MAX_P",
    "MAX_N",
    "MAX_TABLE",
]

MAX_P = 13
MAX_N = 5
MAX_TABLE = 50_000_000

_LABEL = {CaseKind.ZERO: 0, CaseKind.CASE_I: 1, CaseKind.CASE_II: 2, CaseKind.OTHER: 3}


class GuardError(ValueError):
    pass


@dataclass(frozen=True)
class FFForm:
    n: int
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != num_coeffs(self.n):
            raise ValueError("wrong number of coefficients")
        if any(not 0 <= c < self.p for c in self.coeffs):
            raise ValueError("coefficients must lie in [0, p)")

    @classmethod
    def reduce(cls, n: int, p: int, coeffs: Sequence[int]) -> FFForm:
        return cls(n, p, tuple(int(c) % p for c in coeffs))


def _guard(p: int, n: int) -> None:
    if not is_prime(p):
        raise GuardError(f"p = {p} is not prime")
    if p > MAX_P or not 1 <= n <= MAX_N:
        raise GuardError(f"enumeration guard: need p <= {MAX_P} and 1 <= n <= {MAX_N}")


class _GFp2:
    """F_{p^2} = F_p[t]/(t^2 + b t + c); elements are pairs ``(u, v) = u + v t``."""

    def __init__(self, p: int):
        self.p = p
        for b, c in itertools.product(range(p), repeat=2):
            if all((x * x + b * x + c) % p for x in range(p)):
                self.b, self.c = b, c
                break

    def mul(self, x, y):
        p = self.p
        u1, v1 = x
        u2, v2 = y
        # t^2 = -b t - c
        vv = v1 * v2
        return ((u1 * u2 - self.c * vv) % p, (u1 * v2 + u2 * v1 - self.b * vv) % p)

    def add(self, x, y):
        return ((x[0] + y[0]) % self.p, (x[1] + y[1]) % self.p)

    def frob(self, x):
        # x^p by square-and-multiply
        result, base, k = (1, 0), x, self.p
        while k:
            if k & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            k >>= 1
        return result

    def elements(self):
        return itertools.product(range(self.p), repeat=2)


def _normalized_vectors(field_elems, one, zero, n):
    """Vectors whose first nonzero entry is ``one`` (one per scaling class)."""
    for lead in range(n):
        for tail in itertools.product(field_elems, repeat=n - lead - 1):
            yield (zero,) * lead + (one,) + tuple(tail)


def _square_coeffs(ell: Sequence[int], p: int) -> tuple[int, ...]:
    n = len(ell)
    return tuple(
        (ell[i] * ell[i] if i == j else 2 * ell[i] * ell[j]) % p for i, j in triangle_pairs(n)
    )


def _conjugate_product(ell, F: _GFp2) -> tuple[int, ...]:
    """Coefficients of ell * ell^sigma, which lie in F_p."""
    n = len(ell)
    conj = [F.frob(x) for x in ell]
    out = []
    for i, j in triangle_pairs(n):
        if i == j:
            c = F.mul(ell[i], conj[i])
        else:
            c = F.add(F.mul(ell[i], conj[j]), F.mul(ell[j], conj[i]))
        if c[1]:
            raise AssertionError("norm form left F_p")
        out.append(c[0])
    return tuple(out)


@lru_cache(maxsize=None)
def _linear_products(p: int, n: int):
    """All ``(coeffs, factors)`` for Case II (``c * l^2``) and Case I (``c * l l^sigma``)."""
    case2: dict[tuple[int, ...], tuple] = {}
    for ell in _normalized_vectors(range(p), 1, 0, n):
        sq = _square_coeffs(ell, p)
        for c in range(1, p):
            case2.setdefault(tuple(c * a % p for a in sq), (c, ell))
    F = _GFp2(p)
    case1: dict[tuple[int, ...], tuple] = {}
    elems = list(F.elements())
    for ell in _normalized_vectors(elems, (1, 0), (0, 0), n):
        if all(x[1] == 0 for x in ell):
            continue  # proportional to an F_p-form
        norm = _conjugate_product(ell, F)
        for c in range(1, p):
            case1.setdefault(tuple(c * a % p for a in norm), (c, ell))
    return case1, case2


def naive_classify(f: FFForm) -> CaseClass:
    """Classify a reduction by searching all linear factorizations."""
    _guard(f.p, f.n)
    if not any(f.coeffs):
        return CaseClass(CaseKind.ZERO)
    case1, case2 = _linear_products(f.p, f.n)
    if f.coeffs in case2:
        return CaseClass(CaseKind.CASE_II, factors=case2[f.coeffs])
    if f.coeffs in case1:
        return CaseClass(CaseKind.CASE_I, factors=case1[f.coeffs])
    return CaseClass(CaseKind.OTHER)


def _encode(coeffs: Sequence[int], p: int) -> int:
    idx = 0
    for k, c in enumerate(coeffs):
        idx += c * p**k
    return idx


def case_labels(p: int, n: int) -> np.ndarray:
    """Label (0 Zero, 1 CaseI, 2 CaseII, 3 Other) of every reduction.

    Index ``sum_k a_k p^k`` over the storage order of the coefficients.
    """
    _guard(p, n)
    size = p ** num_coeffs(n)
    if size > MAX_TABLE:
        raise GuardError(f"p^N = {size} exceeds the table limit {MAX_TABLE}")
    labels = np.full(size, _LABEL[CaseKind.OTHER], dtype=np.uint8)
    labels[0] = _LABEL[CaseKind.ZERO]
    case1, case2 = _linear_products(p, n)
    if set(case1) & set(case2):
        raise AssertionError("Case I and Case II overlap")
    labels[np.fromiter((_encode(c, p) for c in case2), dtype=np.int64)] = _LABEL[CaseKind.CASE_II]
    if case1:
        labels[np.fromiter((_encode(c, p) for c in case1), dtype=np.int64)] = _LABEL[CaseKind.CASE_I]
    return labels


@lru_cache(maxsize=None)
def _binary_irreducible_table(p: int) -> np.ndarray:
    table = np.zeros((p, p, p), dtype=bool)
    for a, b, c in itertools.product(range(p), repeat=3):
        table[a, b, c] = a != 0 and all((a * x * x + b * x + c) % p for x in range(p))
    return table


def binary_irreducible(a: int, b: int, c: int, p: int) -> bool:
    """Whether ``a x^2 + b x y + c y^2`` has no zero on the projective line over F_p."""
    return bool(_binary_irreducible_table(p)[a % p, b % p, c % p])


@dataclass(frozen=True)
class CaseCounts:
    p: int
    n: int
    total: int
    zero: int
    caseI: int
    caseII: int
    other: int
    point_total: int
    point_caseI: int
    point_caseII: int
    line_total: int
    line_caseI: int
    line_caseII: int

    def __add__(self, other: CaseCounts) -> CaseCounts:
        if (self.p, self.n) != (other.p, other.n):
            raise ValueError("cannot merge counts for different (p, n)")
        merged = {k: v + getattr(other, k) for k, v in asdict(self).items() if k not in ("p", "n")}
        return CaseCounts(self.p, self.n, **merged)

    def to_json(self) -> dict:
        return asdict(self)


def _count_chunk(labels: np.ndarray, p: int, n: int, start: int, stop: int) -> CaseCounts:
    lab = labels[start:stop]
    idx = np.arange(start, stop, dtype=np.int64)
    counts = np.bincount(lab, minlength=4)
    a11 = idx % p
    point = a11 != 0
    pc = np.bincount(lab[point], minlength=4)
    if n >= 2:
        a12 = (idx // p) % p
        a22 = (idx // p**n) % p
        line = _binary_irreducible_table(p)[a11, a12, a22]
        lc = np.bincount(lab[line], minlength=4)
        line_total = int(line.sum())
    else:
        lc = np.zeros(4, dtype=np.int64)
        line_total = 0
    return CaseCounts(
        p, n,
        total=stop - start,
        zero=int(counts[0]), caseI=int(counts[1]), caseII=int(counts[2]), other=int(counts[3]),
        point_total=int(point.sum()), point_caseI=int(pc[1]), point_caseII=int(pc[2]),
        line_total=line_total, line_caseI=int(lc[1]), line_caseII=int(lc[2]),
    )


def enumerate_counts(p: int, n: int, chunks: int = 1) -> CaseCounts:
    """Exact case counts over all ``p^(n(n+1)/2)`` reductions.

    The coefficient space is split into ``chunks`` index ranges whose counts
    are merged by addition, so the result does not depend on ``chunks``.
    """
    labels = case_labels(p, n)
    size = labels.size
    bounds = np.linspace(0, size, max(1, chunks) + 1).astype(np.int64)
    parts = [_count_chunk(labels, p, n, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
    total = parts[0]
    for part in parts[1:]:
        total = total + part
    return total


def compare_with_lemma(counts: CaseCounts) -> dict[str, dict]:
    """Exact comparison of counts against the closed-form case densities.

    Each entry holds the observed and predicted rationals and a ``pass`` flag.
    Line-condition entries are omitted for ``n = 1``.
    """
    p, n = counts.p, counts.n
    cd = case_densities(n)
    N = num_coeffs(n)
    checks: dict[str, tuple[Fraction, Fraction]] = {
        "xi1": (Fraction(counts.caseI, p**N), cd.xi1(p)),
        "xi2": (Fraction(counts.caseII, p**N), cd.xi2(p)),
        "eta1": (Fraction(counts.point_caseI, counts.point_total), cd.eta1(p)),
        "eta2": (Fraction(counts.point_caseII, counts.point_total), cd.eta2(p)),
        "xi0": (Fraction(counts.other, p**N), cd.xi0(p)),
    }
    if n >= 2:
        checks["nu1"] = (Fraction(counts.line_caseI, counts.line_total), cd.nu1(p))
        checks["nu2"] = (Fraction(counts.line_caseII, counts.line_total), cd.nu2(p))
    return {
        name: {"observed": str(obs), "predicted": str(pred), "pass": obs == pred}
        for name, (obs, pred) in checks.items()
    }
