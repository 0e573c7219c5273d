import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

import cprank_config as cc
from asymptotics import LIMIT_CONSTANTS, theta_cdf
from cp_rank import rank
from enumeration import ModelId, caterpillar_probability, enumerate_shapes, exact_moments, shape_probability
from sampling import (RngStream, height_samples, height_scaled_samples, monte_carlo, sample_shape,
                      tightness_offsets, tightness_summary)
from tree_core import validate_canonical


def _draw(seed, block, count=20):
    rng = RngStream(seed, block)
    return [rng.randbelow(10 ** 30) for _ in range(count)]


def test_streams_are_reproducible_and_distinct():
    assert _draw(7, 0) == _draw(7, 0)
    assert _draw(7, 0) != _draw(7, 1)
    assert _draw(7, 0) != _draw(8, 0)


def test_randbelow_range():
    rng = RngStream(1)
    assert all(rng.randbelow(1) == 0 for _ in range(10))
    bound = 3 * 10 ** 40 + 7
    values = [rng.randbelow(bound) for _ in range(2000)]
    assert all(0 <= v < bound for v in values)
    small = Counter(rng.randbelow(3) for _ in range(30000))
    assert set(small) == {0, 1, 2}
    assert stats.chisquare([small[0], small[1], small[2]]).pvalue > 1e-6
    with pytest.raises(ValueError):
        rng.randbelow(0)


def test_invalid_seed():
    with pytest.raises(ValueError):
        RngStream(-1)
    with pytest.raises(ValueError):
        RngStream(1 << 64)


@pytest.mark.parametrize("model", list(ModelId))
def test_sample_shape_basics(model):
    rng = RngStream(11)
    assert sample_shape(model, 1, rng).is_leaf
    for n in (2, 9, 50):
        t = sample_shape(model, n, rng)
        assert t.leaves == n
        assert validate_canonical(t)
    with pytest.raises(ValueError):
        sample_shape(model, 0, rng)


@pytest.mark.parametrize("model", list(ModelId))
def test_sampled_shape_law_matches_exact(model, thresholds):
    for n in (5, 6):
        exact = {rank(t): shape_probability(t, model) for t in enumerate_shapes(n)}
        report = monte_carlo(model, n, 20000, seed=5, with_histogram=True)
        assert sum(report.shape_histogram.values()) == report.samples
        observed = [report.shape_histogram.get(k, 0) for k in exact]
        expected = [float(p) * report.samples for p in exact.values()]
        assert stats.chisquare(observed, expected).pvalue > thresholds["chi2_min_pvalue"]


def test_monte_carlo_is_deterministic_across_workers(monkeypatch):
    monkeypatch.setattr(cc, "MC_BLOCK_SIZE", 500)
    single = monte_carlo(ModelId.UNIFORM_UNORDERED, 9, 2000, seed=3, with_histogram=True, workers=1)
    threaded = monte_carlo(ModelId.UNIFORM_UNORDERED, 9, 2000, seed=3, with_histogram=True, workers=3)
    assert single == threaded
    assert monte_carlo(ModelId.UNIFORM_UNORDERED, 9, 2000, seed=4).mean_loglog != single.mean_loglog


def test_monte_carlo_rejects_bad_arguments():
    with pytest.raises(ValueError):
        monte_carlo(ModelId.YULE_HARDING, 1, 100)
    with pytest.raises(ValueError):
        monte_carlo(ModelId.YULE_HARDING, 5, 1)
    with pytest.raises(ValueError):
        monte_carlo(ModelId.YULE_HARDING, 1000, 10, with_histogram=True)


def test_yule_caterpillar_frequency(thresholds):
    report = monte_carlo(ModelId.YULE_HARDING, 4, 100000, seed=0)
    p = 2 / 3
    se = math.sqrt(p * (1 - p) / report.samples)
    assert abs(report.caterpillar_freq - p) < thresholds["se_multiplier"] * se


def test_monte_carlo_matches_exact_moments_at_eight_leaves(thresholds):
    k = thresholds["se_multiplier"]
    yule = monte_carlo(ModelId.YULE_HARDING, 8, 100000, seed=0)
    assert abs(yule.mean_loglog - exact_moments(8, ModelId.YULE_HARDING).e_loglog_f) < k * yule.se_loglog

    labeled = monte_carlo(ModelId.UNIFORM_LABELED, 8, 100000, seed=0)
    exact = exact_moments(8, ModelId.UNIFORM_LABELED)
    assert abs(labeled.mean_height - float(exact.e_height)) < k * labeled.se_height
    p = float(caterpillar_probability(8, ModelId.UNIFORM_LABELED))
    se = math.sqrt(p * (1 - p) / labeled.samples)
    assert abs(labeled.caterpillar_freq - p) < k * se


def test_two_leaf_heights_are_deterministic():
    assert height_scaled_samples(ModelId.UNIFORM_LABELED, 2, 10, seed=1) == [1 / (2 * math.sqrt(2))] * 10
    assert height_scaled_samples(ModelId.YULE_HARDING, 2, 10, seed=1) == [1 / math.log(2)] * 10


@pytest.mark.parametrize("model", [ModelId.UNIFORM_LABELED, ModelId.UNIFORM_ORDERED, ModelId.YULE_HARDING])
def test_height_kernels_agree_with_built_shapes(model):
    for n in (16, 64):
        kernel = height_samples(model, n, 4000, seed=2)
        rng = RngStream(99)
        built = np.array([sample_shape(model, n, rng).height for _ in range(4000)])
        assert stats.ks_2samp(kernel, built).pvalue > 1e-6


def test_height_samples_are_reproducible():
    a = height_samples(ModelId.YULE_HARDING, 300, 50, seed=12)
    b = height_samples(ModelId.YULE_HARDING, 300, 50, seed=12)
    assert np.array_equal(a, b)


def test_tightness_summary_is_finite():
    summary = tightness_summary(256, 200, seed=0)
    assert all(math.isfinite(v) for v in summary.values())
    assert summary["iqr_offset"] >= 0


@pytest.mark.slow
@pytest.mark.parametrize("model", list(ModelId))
def test_total_variation_at_eight_leaves(model, thresholds):
    report = monte_carlo(model, 8, 10 ** 6, seed=0, with_histogram=True)
    exact = {rank(t): shape_probability(t, model) for t in enumerate_shapes(8)}
    tv = 0.5 * sum(abs(Fraction(report.shape_histogram.get(k, 0), report.samples) - p) for k, p in exact.items())
    assert tv <= thresholds["tv_distance"]
    moments = exact_moments(8, model)
    k = thresholds["se_multiplier"]
    assert abs(report.mean_loglog - moments.e_loglog_f) < k * report.se_loglog
    assert abs(report.mean_height - float(moments.e_height)) < k * report.se_height


@pytest.mark.slow
def test_labeled_heights_follow_theta_law(thresholds):
    scaled = height_scaled_samples(ModelId.UNIFORM_LABELED, 4096, 10000, seed=0)
    result = stats.kstest(scaled, np.vectorize(theta_cdf))
    assert result.statistic < thresholds["theta_ks_distance"]


@pytest.mark.slow
def test_yule_height_grows_like_alpha_log_n(thresholds):
    low, high = thresholds["yule_scaled_height"]
    scaled = height_scaled_samples(ModelId.YULE_HARDING, 10 ** 6, 1000, seed=0)
    assert low <= np.mean(scaled) <= high
    assert low < LIMIT_CONSTANTS.alpha < high


@pytest.mark.slow
def test_yule_height_offsets_stay_in_a_band(thresholds):
    offsets = tightness_offsets([2 ** 10, 2 ** 14, 2 ** 18], 1000, seed=0)
    pooled = np.concatenate(list(offsets.values()))
    q25, q75 = np.percentile(pooled, [25, 75])
    assert q75 - q25 < thresholds["yule_offset_iqr"]
