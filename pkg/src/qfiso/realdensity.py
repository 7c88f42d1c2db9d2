"""Probability that a random real quadratic form is indefinite."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from qfiso.estimate import CHUNK, DensityEstimate, chunk_ranges, chunk_rng, run_chunks

__all__ = [
    "Distribution",
    "DistributionSpec",
    "RealSymmetricMatrix",
    "is_indefinite",
    "indefinite_mask",
    "sample_form",
    "sample_batch",
    "estimate_rho_infinity",
    "GOE_EXACT",
]

# Known closed forms for the GOE ensemble.
GOE_EXACT = {1: 0.0, 2: math.sqrt(2) / 2, 3: (math.pi + 2 * math.sqrt(2)) / (2 * math.pi)}


class Distribution(enum.Enum):
    UNIFORM = "uniform"
    GOE = "goe"


@dataclass(frozen=True)
class DistributionSpec:
    """``uniform``: form coefficients i.i.d. on [-scale, scale].
    ``goe``: (A + A^T)/sqrt(2) with A_ij ~ N(0, scale^2)."""

    kind: Distribution
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("distribution scale must be positive")

    @classmethod
    def parse(cls, name: str | Distribution | DistributionSpec) -> DistributionSpec:
        if isinstance(name, DistributionSpec):
            return name
        if isinstance(name, Distribution):
            return cls(name)
        try:
            return cls(Distribution(str(name).lower()))
        except ValueError:
            raise ValueError(f"unknown distribution {name!r}; expected 'uniform' or 'goe'") from None


class RealSymmetricMatrix:
    """Symmetric real matrix stored as a full numpy array."""

    __slots__ = ("n", "entries")

    def __init__(self, entries):
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        if not np.array_equal(a, a.T):
            raise ValueError("matrix must be symmetric")
        self.n = a.shape[0]
        self.entries = a

    @classmethod
    def from_form(cls, n: int, coeffs: Sequence[float]) -> RealSymmetricMatrix:
        m = np.zeros((n, n))
        k = 0
        for i in range(n):
            for j in range(i, n):
                c = float(coeffs[k])
                k += 1
                if i == j:
                    m[i, i] = c
                else:
                    m[i, j] = m[j, i] = c / 2
        return cls(m)

    def lower_triangle(self) -> list[float]:
        return [float(self.entries[i, j]) for i in range(self.n) for j in range(i + 1)]

    def __neg__(self) -> RealSymmetricMatrix:
        return RealSymmetricMatrix(-self.entries)

    def __mul__(self, c: float) -> RealSymmetricMatrix:
        return RealSymmetricMatrix(self.entries * c)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        return isinstance(other, RealSymmetricMatrix) and np.array_equal(self.entries, other.entries)

    def __repr__(self) -> str:
        return f"RealSymmetricMatrix({self.entries.tolist()!r})"


def indefinite_mask(mats: np.ndarray) -> np.ndarray:
    """Vectorized Sylvester test on a stack of shape (m, n, n)."""
    m, n, _ = mats.shape
    pos = np.ones(m, dtype=bool)
    neg = np.ones(m, dtype=bool)
    for k in range(1, n + 1):
        d = np.linalg.det(mats[:, :k, :k]) if k > 1 else mats[:, 0, 0]
        pos &= d > 0
        neg &= (d < 0) if k % 2 else (d > 0)
    return ~(pos | neg)


def is_indefinite(M: RealSymmetricMatrix | Sequence[Sequence[float]]) -> bool:
    """Neither positive nor negative definite (strict leading-minor test)."""
    if not isinstance(M, RealSymmetricMatrix):
        M = RealSymmetricMatrix(M)
    return bool(indefinite_mask(M.entries[None, :, :])[0])


def sample_batch(n: int, dist: DistributionSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    if dist.kind is Distribution.UNIFORM:
        iu = np.triu_indices(n)
        coeffs = rng.uniform(-dist.scale, dist.scale, size=(size, len(iu[0])))
        mats = np.zeros((size, n, n))
        mats[:, iu[0], iu[1]] = coeffs
        off = iu[0] != iu[1]
        mats[:, iu[0][off], iu[1][off]] /= 2
        mats[:, iu[1][off], iu[0][off]] = mats[:, iu[0][off], iu[1][off]]
        return mats
    a = rng.normal(0.0, dist.scale, size=(size, n, n))
    return (a + a.transpose(0, 2, 1)) / math.sqrt(2)


def sample_form(n: int, dist, seed: int) -> RealSymmetricMatrix:
    """One random matrix, a pure function of ``(n, dist, seed)``."""
    dist = DistributionSpec.parse(dist)
    return RealSymmetricMatrix(sample_batch(n, dist, chunk_rng(seed, 0, stream=1), 1)[0])


def _chunk(n: int, dist: DistributionSpec, seed: int, chunk_id: int, size: int) -> int:
    mats = sample_batch(n, dist, chunk_rng(seed, chunk_id, stream=2), size)
    return int(np.count_nonzero(indefinite_mask(mats)))


def estimate_rho_infinity(n: int, dist, samples: int, seed: int, workers: Optional[int] = None) -> DensityEstimate:
    """Fraction of ``samples`` random forms that are indefinite."""
    if samples < 1:
        raise ValueError("samples must be positive")
    if n < 1:
        raise ValueError("n must be positive")
    dist = DistributionSpec.parse(dist)
    tasks = [(n, dist, seed, k, b - a) for k, a, b in chunk_ranges(samples, CHUNK)]
    hits = sum(run_chunks(_chunk, tasks, workers))
    est = DensityEstimate.from_counts(hits, samples, 0, seed)
    est.extra.update({"n": n, "dist": dist.kind.value})
    return est
