import math

import numpy as np
import pytest

from qfiso.estimate import DensityEstimate, chunk_rng
from qfiso.realdensity import (
    DistributionSpec,
    RealSymmetricMatrix,
    estimate_rho_infinity,
    indefinite_mask,
    is_indefinite,
    sample_batch,
    sample_form,
)


def test_examples():
    assert is_indefinite([[1, 0], [0, -1]])
    assert not is_indefinite(np.eye(3))
    assert not is_indefinite(np.diag([-1.0, -2.0, -3.0]))


def test_rejects_bad_matrices():
    with pytest.raises(ValueError):
        RealSymmetricMatrix([[1, math.nan], [math.nan, 1]])
    with pytest.raises(ValueError):
        RealSymmetricMatrix([[1, 2], [3, 1]])
    with pytest.raises(ValueError):
        DistributionSpec.parse("cauchy")


def test_from_form_halves_cross_terms():
    M = RealSymmetricMatrix.from_form(2, [1, 4, -2])
    assert M.entries.tolist() == [[1, 2], [2, -2]]
    assert M.lower_triangle() == [1, 2, -2]


def test_sample_form_deterministic_and_bounded():
    a = sample_form(4, "uniform", seed=9)
    assert a == sample_form(4, "uniform", seed=9)
    assert not a == sample_form(4, "uniform", seed=10)
    for s in range(200):
        M = sample_form(3, "uniform", seed=s).entries
        coeffs = [M[i, i] if i == j else 2 * M[i, j] for i in range(3) for j in range(i, 3)]
        assert max(abs(c) for c in coeffs) <= 1


def test_goe_variances():
    mats = sample_batch(3, DistributionSpec.parse("goe"), chunk_rng(1, 0), 100_000)
    diag = mats[:, 0, 0].var()
    off = mats[:, 0, 1].var()
    assert abs(diag / off - 2) < 0.1
    assert abs(off - 1) < 0.05


def test_agrees_with_eigenvalues():
    rng = np.random.default_rng(0)
    for dist in ("uniform", "goe"):
        for n in (2, 3, 4, 5):
            mats = sample_batch(n, DistributionSpec.parse(dist), rng, 2500)
            ev = np.linalg.eigvalsh(mats)
            by_eig = (ev.max(axis=1) > 0) & (ev.min(axis=1) < 0)
            mask = indefinite_mask(mats)
            bad = mask != by_eig
            if bad.any():
                assert np.all(np.abs(ev[bad]).min(axis=1) < 1e-10)


def test_sign_and_scale_invariance():
    rng = np.random.default_rng(1)
    for _ in range(500):
        n = int(rng.integers(1, 6))
        M = RealSymmetricMatrix(sample_batch(n, DistributionSpec.parse("goe"), rng, 1)[0])
        c = float(rng.uniform(0.01, 100))
        assert is_indefinite(M) == is_indefinite(-M) == is_indefinite(c * M)


def test_one_by_one_never_indefinite():
    est = estimate_rho_infinity(1, "goe", 5000, seed=1)
    assert est.estimate == 0.0 and est.stderr == 0.0


def test_uniform_binary_closed_form():
    # P(b^2 > 4ac) for a, b, c uniform on [-1, 1]
    exact = (41 + 6 * math.log(2)) / 72
    est = estimate_rho_infinity(2, "uniform", 400_000, seed=3)
    assert abs(est.estimate - exact) < 4 * est.stderr


def test_worker_count_does_not_change_result():
    a = estimate_rho_infinity(3, "goe", 40_000, seed=5, workers=1)
    b = estimate_rho_infinity(3, "goe", 40_000, seed=5, workers=3)
    assert a.successes == b.successes


def test_estimates_merge():
    a = DensityEstimate.from_counts(30, 100)
    b = DensityEstimate.from_counts(50, 100)
    m = a.merge(b)
    assert (m.successes, m.samples) == (80, 200)
    assert m.estimate == 0.4
    assert math.isclose(m.stderr, math.sqrt(0.4 * 0.6 / 200))


def test_monotone_in_n():
    values = [estimate_rho_infinity(n, "uniform", 10**6, seed=6).estimate for n in range(2, 7)]
    assert values == sorted(values)
