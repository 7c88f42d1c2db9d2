"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``PASS/FAIL criterion k`` line, collected again in the
terminal summary.  Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import math
import random
import time
from decimal import Decimal
from fractions import Fraction

import pytest

import test_properties
from oracles import ALPHA, BETA_GAMMA, UNDEF, theorem1
from qfiso.fforacle import compare_with_lemma, enumerate_counts
from qfiso.forms import QuadraticForm, VerdictKind, num_coeffs
from qfiso.globaldensity import empirical_global, euler_product, rho_n_combined
from qfiso.localdensity import ONE, UNDEFINED, rho_local, rho_local_at, solve_alpha, solve_beta_gamma
from qfiso.padic import PAdicForm, decide_hasse, decide_recursive, sample_local_density
from qfiso.primes import primes_up_to
from qfiso.realdensity import GOE_EXACT, estimate_rho_infinity
from qfiso.symbolic import P


def test_criterion_1_theorem(record):
    t0 = time.perf_counter()
    mismatches = [n for n in range(1, 9) if rho_local(n) != theorem1(n)]
    quoted = ONE - P**3 / (4 * (P + 1) ** 2 * (P**4 + P**3 + P**2 + P + 1))
    elapsed = time.perf_counter() - t0
    ok = not mismatches and rho_local(4) == quoted and elapsed < 1
    assert record(1, ok, f"rho_local(n) exact for n=1..8, mismatches={mismatches}, {elapsed:.3f}s")


def test_criterion_2_tables(record):
    t0 = time.perf_counter()
    bad = []
    for n, row in BETA_GAMMA.items():
        sol = solve_beta_gamma(n)
        for name, got, want in zip(("beta1", "beta2", "gamma1", "gamma2"),
                                   (sol.beta1, sol.beta2, sol.gamma1, sol.gamma2), row):
            if (got is not UNDEFINED) if want == UNDEF else (got is UNDEFINED or got != want):
                bad.append((n, name))
    for n, row in ALPHA.items():
        sol = solve_alpha(n)
        if (sol.alpha1, sol.alpha2) != row:
            bad.append((n, "alpha"))
    for n in (5, 6, 7, 8):
        bg, a = solve_beta_gamma(n), solve_alpha(n)
        if (bg.beta1, bg.beta2, bg.gamma1, bg.gamma2, a.alpha1, a.alpha2) != (ONE,) * 6:
            bad.append((n, "large-n row"))
    elapsed = time.perf_counter() - t0
    assert record(2, not bad and elapsed < 1, f"beta/gamma and alpha tables, mismatches={bad}, {elapsed:.3f}s")


def test_criterion_3_counts(record):
    failures = []
    timings = {}
    for p in (2, 3, 5):
        for n in (1, 2, 3, 4):
            t0 = time.perf_counter()
            checks = compare_with_lemma(enumerate_counts(p, n))
            timings[(p, n)] = time.perf_counter() - t0
            failures += [(p, n, k) for k, v in checks.items() if not v["pass"]]
    ok = not failures and timings[(5, 4)] < 120
    assert record(3, ok, f"12 (p, n) pairs exact, failures={failures}, p=5 n=4 took {timings[(5, 4)]:.1f}s")


def test_criterion_4_oracle_equivalence(record):
    t0 = time.perf_counter()
    rng = random.Random(20240601)
    disagreements, undecided, checked = [], 0, 0
    for p in (2, 3, 5, 7):
        for n in (2, 3, 4, 5):
            done = 0
            while done < 10_000:
                coeffs = tuple(rng.randint(-50, 50) for _ in range(num_coeffs(n)))
                q = QuadraticForm(n, coeffs)
                if q.discriminant() == 0:
                    continue
                a = decide_recursive(PAdicForm.exact(coeffs, p, n=n), witness=False)
                b = decide_hasse(q, p, find_witness=False)
                undecided += a.kind is VerdictKind.UNDECIDED
                if a.kind is not b.kind:
                    disagreements.append((p, coeffs))
                done += 1
            checked += done
    elapsed = time.perf_counter() - t0
    ok = not disagreements and not undecided and elapsed < 300
    assert record(4, ok, f"{checked} forms, disagreements={len(disagreements)}, undecided={undecided}, {elapsed:.0f}s")


def test_criterion_5_local_sampling(record):
    t0 = time.perf_counter()
    lines, ok = [], True
    for n, p in [(2, 3), (3, 2), (3, 3), (4, 2), (4, 3), (5, 2)]:
        exact = float(rho_local_at(n, p))
        est = sample_local_density(n, p, 10**6, seed=1000 * n + p)
        sigma = math.sqrt(exact * (1 - exact) / est.samples) if 0 < exact < 1 else 1 / est.samples
        z = abs(est.estimate - exact) / sigma
        good = z <= 4 and est.undecided_rate < 1e-4
        ok &= good
        lines.append(f"({n},{p}) {est.estimate:.5f} vs {exact:.5f} z={z:.2f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 600
    assert record(5, ok, "; ".join(lines) + f"; {elapsed:.0f}s")


def test_criterion_6_conditioned(record):
    parts, ok = [], True
    for n, p, cond, want in [(3, 3, "caseI", Fraction(1, 4)), (2, 3, "caseII", Fraction(1, 8))]:
        assert want == getattr(solve_alpha(n), "alpha1" if cond == "caseI" else "alpha2")(p)
        est = sample_local_density(n, p, 10**5, seed=7, condition=cond)
        sigma = math.sqrt(float(want) * (1 - float(want)) / est.samples)
        z = abs(est.estimate - float(want)) / sigma
        ok &= z <= 4
        parts.append(f"{cond} (n={n},p={p}) {est.estimate:.4f} vs {want} z={z:.2f}")
    assert record(6, ok, "; ".join(parts))


def test_criterion_7_euler(record):
    t0 = time.perf_counter()
    r = euler_product(4, 1e-6)
    # machine check of the tail bound: 1 - rho_4(p) < 1/(4 p^3) on a range of primes
    bound_ok = all(1 - rho_local_at(4, p) < Fraction(1, 4 * p**3) for p in primes_up_to(2000))
    elapsed = time.perf_counter() - t0
    ok = round(r.value, 4) == Decimal("0.9874") and r.tail_bound < 1e-6 and bound_ok and elapsed < 1
    assert record(7, ok, f"value={r.value:.6f} P={r.truncation_prime} tail<={r.tail_bound:.2e}, {elapsed:.2f}s")


def test_criterion_8_real(record):
    t0 = time.perf_counter()
    parts, ok = [], True
    targets = [("goe", 2, GOE_EXACT[2], 0.0), ("goe", 3, GOE_EXACT[3], 0.0)]
    targets += [("uniform", n, v, 0.0005) for n, v in zip((2, 3, 4, 5), (0.627, 0.901, 0.982, 0.998))]
    for dist, n, want, slack in targets:
        est = estimate_rho_infinity(n, dist, 10**6, seed=100 + n)
        diff = abs(est.estimate - want)
        good = diff <= 4 * est.stderr + slack
        ok &= good
        parts.append(f"{dist} n={n} {est.estimate:.5f} vs {want:.5f}")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 120
    assert record(8, ok, "; ".join(parts) + f"; {elapsed:.0f}s")


def test_criterion_9_headline(record):
    uni = rho_n_combined(4, "uniform", 10**6, 1e-6, seed=9)
    goe = rho_n_combined(4, "goe", 10**6, 1e-6, seed=9)
    zeros = [rho_n_combined(n, "uniform", 1000, 1e-6, seed=9).estimate for n in (1, 2, 3)]
    ok = abs(uni.estimate - 0.970) <= 0.002 and abs(goe.estimate - 0.983) <= 0.002 and zeros == [0, 0, 0]
    assert record(9, ok, f"rho_4 uniform={uni.estimate:.4f} goe={goe.estimate:.4f}, n<=3 -> {zeros}")


def test_criterion_10_height(record):
    four = empirical_global(4, 100, 10**5, seed=10)
    trend = [empirical_global(2, X, 10**5, seed=10).estimate for X in (25, 50, 100, 200, 400)]
    decreasing = all(a > b for a, b in zip(trend, trend[1:]))
    ok = abs(four.estimate - 0.970) <= 0.01 and decreasing and four.undecided == 0
    shown = ", ".join(f"{t:.4f}" for t in trend)
    assert record(10, ok, f"n=4 X=100 {four.estimate:.4f}; n=2 X=25..400: {shown}")


def test_criterion_11_properties(record):
    failed = []
    for name, prop in test_properties.PROPERTIES.items():
        try:
            prop()
        except Exception as exc:  # report every property, then fail
            failed.append(f"{name}: {type(exc).__name__}")
    assert record(11, not failed, f"5 properties x 1000 trials, failed={failed}")
