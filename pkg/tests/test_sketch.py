import math
import warnings

import numpy as np
import pytest

from entnewton import (
    ConfigError, DegenerateWeightError, RankError, SampledDiagonal, leverage_scores,
    subsample, verify_spectral,
)
from entnewton.sketch import SamplingWarning, make_rng, sample_size, whitened_eigenvalues

pytestmark = pytest.mark.filterwarnings("ignore::entnewton.sketch.SamplingWarning")


def test_leverage_of_identity_columns():
    A = np.eye(6)[:, :2]
    np.testing.assert_allclose(leverage_scores(A, np.ones(6)), [1, 1, 0, 0, 0, 0], atol=1e-15)


def test_leverage_of_ones():
    np.testing.assert_allclose(leverage_scores(np.ones((4, 1)), np.ones(4)), 0.25)


def test_leverage_matches_gram_inverse(frozen):
    case = frozen["leverage_n200_d5"]
    tau = leverage_scores(case["A"], case["q"])
    assert abs(tau.sum() - 5) <= 1e-8
    np.testing.assert_allclose(tau, case["expected"]["tau"], rtol=0, atol=1e-8)


def test_leverage_errors():
    A = np.ones((5, 2))
    with pytest.raises(RankError):
        leverage_scores(A, np.ones(5))
    with pytest.raises(DegenerateWeightError):
        leverage_scores(np.eye(3), [1.0, 0.0, 1.0])
    with pytest.raises(RankError):
        leverage_scores(np.ones((1, 2)), [1.0])


def instance(n=300, d=3, seed=0):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, d)), np.exp(rng.normal(size=n))


def test_saturated_sample_is_exact():
    A, q = instance()
    sd = subsample(A, q, 0.01, 0.01, seed=3)
    assert np.array_equal(sd.dense(300), q)
    assert verify_spectral(A, q, sd) == pytest.approx((1.0, 1.0, True))


def test_scaled_diagonal_fails_spectral_check():
    A, q = instance()
    sd = SampledDiagonal(np.arange(300), 2 * q, 0.05, 0.01, 0, 300, 300)
    lo, hi, ok = verify_spectral(A, q, sd)
    assert lo == pytest.approx(2.0) and hi == pytest.approx(2.0) and not ok


def test_whitened_eigenvalues_match_reference(frozen):
    case = frozen["whitened_n40_d3"]
    ev = whitened_eigenvalues(np.array(case["A"]), case["q"], case["q_tilde"])
    np.testing.assert_allclose(ev, case["expected"]["eigenvalues"], rtol=1e-12)


def test_singular_gram_raises():
    A = np.zeros((4, 2))
    A[0, 0] = 1.0
    with pytest.raises(RankError):
        whitened_eigenvalues(A, np.ones(4), np.ones(4))


def test_determinism_and_sparsity():
    A, q = instance()
    a = subsample(A, q, 0.1, 0.05, seed=11, oversampling=0.05)
    b = subsample(A, q, 0.1, 0.05, seed=11, oversampling=0.05)
    assert np.array_equal(a.indices, b.indices) and np.array_equal(a.values, b.values)
    assert a.indices.size <= a.sample_count < 300
    assert np.all(a.values > 0)
    c = subsample(A, q, 0.1, 0.05, seed=12, oversampling=0.05)
    assert not np.array_equal(a.dense(300), c.dense(300))


def test_unbiased_over_seeds():
    A, q = instance(n=30, d=2, seed=1)
    trials = 10_000
    acc = np.zeros(30)
    acc2 = np.zeros(30)
    for s in range(trials):
        v = subsample(A, q, 0.1, 0.05, seed=s, oversampling=0.015).dense(30)
        acc += v
        acc2 += v * v
    mean = acc / trials
    se = np.sqrt(np.maximum(acc2 / trials - mean ** 2, 0) / trials)
    sampled = se > 0
    assert sampled.any()
    assert np.all(np.abs(mean - q)[sampled] <= 3 * se[sampled])
    np.testing.assert_allclose(mean[~sampled], q[~sampled], rtol=1e-12)


def test_dominant_row_is_kept():
    rng = np.random.default_rng(2)
    A = rng.standard_normal((200, 2)) * 0.01
    A[17] = [50.0, 0.0]
    q = np.ones(200)
    hits = sum(17 in subsample(A, q, 0.1, 0.01, seed=s, oversampling=0.02).indices
               for s in range(1000))
    assert hits >= 0.99 * 1000


def test_parameter_ranges():
    A, q = instance()
    for eps, delta in [(0.0, 0.01), (0.2, 0.01), (0.05, 0.1), (0.05, 0.0)]:
        with pytest.raises(ConfigError):
            subsample(A, q, eps, delta)


def test_oversized_budget_warns():
    A, q = instance()
    with pytest.warns(SamplingWarning):
        subsample(A, q, 0.05, 0.01)


def test_sample_size_formula():
    assert sample_size(500, 4, 0.05, 0.01) == math.ceil(8 * 4 * math.log(50000) / 0.0025)


def test_json_record_round_trip():
    A, q = instance()
    sd = subsample(A, q, 0.1, 0.05, seed=4, oversampling=0.05)
    rec = sd.to_dict()
    assert set(rec) >= {"indices", "values", "epsilon0", "delta", "seed", "sample_count"}
    back = SampledDiagonal.from_dict(rec)
    assert np.array_equal(back.dense(300), sd.dense(300))


def test_rng_is_philox():
    assert isinstance(make_rng(1).bit_generator, np.random.Philox)
    assert make_rng(5).random() == make_rng(5).random()
