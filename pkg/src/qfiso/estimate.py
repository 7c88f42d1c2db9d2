"""Monte Carlo bookkeeping shared by the samplers.

Every sampler splits its work into fixed-size chunks of consecutive sample
indices.  Randomness is derived from ``(seed, chunk)`` or ``(seed, index)``
only, so estimates are bit-identical whatever the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np

__all__ = ["DensityEstimate", "chunk_ranges", "chunk_rng", "run_chunks", "worker_count", "DEFAULT_SEED", "CHUNK"]

DEFAULT_SEED = 20240601
CHUNK = 1 << 14

T = TypeVar("T")


@dataclass
class DensityEstimate:
    """A probability estimate with its binomial standard error.

    ``samples`` counts decided samples only; ``undecided`` are reported
    separately and excluded from the ratio.
    """

    estimate: float
    stderr: float
    samples: int
    seed: Optional[int] = None
    successes: Optional[int] = None
    undecided: int = 0
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_counts(cls, successes: int, samples: int, undecided: int = 0, seed: Optional[int] = None) -> DensityEstimate:
        if samples <= 0:
            return cls(math.nan, math.nan, 0, seed, successes, undecided)
        q = successes / samples
        return cls(q, math.sqrt(q * (1 - q) / samples), samples, seed, successes, undecided)

    def merge(self, other: DensityEstimate) -> DensityEstimate:
        if self.successes is None or other.successes is None:
            raise ValueError("only count-based estimates can be merged")
        return DensityEstimate.from_counts(
            self.successes + other.successes,
            self.samples + other.samples,
            self.undecided + other.undecided,
            self.seed,
        )

    @property
    def undecided_rate(self) -> float:
        total = self.samples + self.undecided
        return self.undecided / total if total else 0.0

    def within(self, target: float, sigmas: float = 4.0, slack: float = 0.0) -> bool:
        return abs(self.estimate - target) <= sigmas * self.stderr + slack

    def to_json(self) -> dict:
        out = asdict(self)
        out.update(out.pop("extra"))
        return out


def worker_count() -> int:
    env = os.environ.get("QFISO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"QFISO_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def chunk_ranges(samples: int, chunk: int = CHUNK) -> list[tuple[int, int, int]]:
    """``(chunk_id, start, stop)`` covering ``range(samples)``."""
    return [(k, s, min(s + chunk, samples)) for k, s in enumerate(range(0, samples, chunk))]


def chunk_rng(seed: int, chunk_id: int, stream: int = 0) -> np.random.Generator:
    """Generator for one chunk, keyed by ``(seed, stream, chunk_id)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, stream, chunk_id])))


def run_chunks(fn: Callable[..., T], tasks: Sequence[tuple], workers: Optional[int] = None) -> list[T]:
    """Apply ``fn(*task)`` to every task, in order, possibly in processes."""
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        futures = [pool.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]
