"""Empirical local densities from Haar-random forms with lazy digits."""

from __future__ import annotations

from typing import Optional

from qfiso.estimate import DensityEstimate, chunk_ranges, run_chunks
from qfiso.forms import CaseKind, VerdictKind
from qfiso.padic.decide import decide_recursive
from qfiso.padic.lazy import PAdicForm
from qfiso.padic.modp import classify_residues
from qfiso.primes import is_prime

__all__ = ["sample_local_density", "CONDITIONS"]

CONDITIONS = {"none": None, "caseI": CaseKind.CASE_I, "caseII": CaseKind.CASE_II}
MAX_REJECTIONS = 100_000


def _draw(n: int, p: int, seed: int, index: int, depth_limit: int, want: Optional[CaseKind]) -> PAdicForm:
    if want is None:
        return PAdicForm.random(n, p, seed, index, depth_limit)
    for attempt in range(MAX_REJECTIONS):
        f = PAdicForm.random(n, p, seed, f"{index}.{attempt}", depth_limit)
        if classify_residues(p, n, f.reduction())[0] is want:
            return f
    raise RuntimeError(f"no {want.value} form in {MAX_REJECTIONS} draws")


def _chunk(n, p, seed, start, stop, depth_limit, condition):
    want = CONDITIONS[condition]
    iso = und = 0
    for i in range(start, stop):
        v = decide_recursive(_draw(n, p, seed, i, depth_limit, want), witness=False)
        if v.kind is VerdictKind.UNDECIDED:
            und += 1
        elif v.isotropic:
            iso += 1
    return iso, und


def sample_local_density(
    n: int,
    p: int,
    samples: int,
    seed: int,
    depth_limit: int = 64,
    condition: str = "none",
    workers: Optional[int] = None,
) -> DensityEstimate:
    """Fraction of Haar-random forms over Z_p that are isotropic.

    ``condition`` restricts to forms whose reduction is in Case I or Case II
    (by rejection).  Form ``i`` depends only on ``(seed, i)``.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if condition not in CONDITIONS:
        raise ValueError(f"condition must be one of {sorted(CONDITIONS)}")
    if condition == "caseI" and n < 2:
        raise ValueError("Case I needs n >= 2")
    tasks = [(n, p, seed, a, b, depth_limit, condition) for _, a, b in chunk_ranges(samples)]
    iso = und = 0
    for a, b in run_chunks(_chunk, tasks, workers):
        iso += a
        und += b
    est = DensityEstimate.from_counts(iso, samples - und, und, seed)
    est.extra.update({"n": n, "p": p, "condition": condition, "depth_limit": depth_limit})
    return est
