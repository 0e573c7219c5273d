from fractions import Fraction as F

import pytest

import cprank_config as cc
from cp_rank import caterpillar_rank, pseudocaterpillar_rank, rank
from enumeration import (ModelId, TABLE_MODELS, catalan_tree_count, caterpillar_probability,
                         count_shapes_by_height, enumerate_shapes, exact_moments, labeled_histories,
                         labeled_tree_count, shape_probability, shape_table, wedderburn,
                         yule_probability_unsimplified)
from tree_core import balanced, caterpillar, leaf, pseudocaterpillar

# rank: (height, uniform-unordered, uniform-labeled, yule)
SHAPES_UP_TO_7 = {
    1: {1: (0, F(1), F(1), F(1))},
    2: {2: (1, F(1), F(1), F(1))},
    3: {3: (2, F(1), F(1), F(1))},
    4: {
        5: (3, F(1, 2), F(4, 5), F(2, 3)),
        4: (2, F(1, 2), F(1, 5), F(1, 3)),
    },
    5: {
        12: (4, F(1, 3), F(4, 7), F(1, 3)),
        8: (3, F(1, 3), F(1, 7), F(1, 6)),
        6: (3, F(1, 3), F(2, 7), F(1, 2)),
    },
    6: {
        68: (5, F(1, 6), F(8, 21), F(2, 15)),
        30: (4, F(1, 6), F(2, 21), F(1, 15)),
        17: (4, F(1, 6), F(4, 21), F(1, 5)),
        13: (4, F(1, 6), F(4, 21), F(4, 15)),
        9: (3, F(1, 6), F(1, 21), F(2, 15)),
        7: (3, F(1, 6), F(2, 21), F(1, 5)),
    },
    7: {
        2280: (6, F(1, 11), F(8, 33), F(2, 45)),
        437: (5, F(1, 11), F(2, 33), F(1, 45)),
        138: (5, F(1, 11), F(4, 33), F(1, 15)),
        80: (5, F(1, 11), F(4, 33), F(4, 45)),
        38: (4, F(1, 11), F(1, 33), F(2, 45)),
        23: (4, F(1, 11), F(2, 33), F(1, 15)),
        69: (5, F(1, 11), F(4, 33), F(1, 9)),
        31: (4, F(1, 11), F(1, 33), F(1, 18)),
        18: (4, F(1, 11), F(2, 33), F(1, 6)),
        14: (4, F(1, 11), F(4, 33), F(2, 9)),
        10: (3, F(1, 11), F(1, 33), F(1, 9)),
    },
}

SHAPES_8 = {
    2598062: (7, F(64, 429), F(4, 315)),
    95268: (6, F(16, 429), F(2, 315)),
    9455: (6, F(32, 429), F(2, 105)),
    3162: (6, F(32, 429), F(8, 315)),
    705: (5, F(8, 429), F(4, 315)),
    255: (5, F(16, 429), F(2, 105)),
    2348: (6, F(32, 429), F(2, 63)),
    467: (5, F(8, 429), F(1, 63)),
    155: (5, F(16, 429), F(1, 21)),
    93: (5, F(32, 429), F(4, 63)),
    47: (4, F(8, 429), F(2, 63)),
    2281: (6, F(32, 429), F(4, 105)),
    438: (5, F(8, 429), F(2, 105)),
    139: (5, F(16, 429), F(2, 35)),
    81: (5, F(16, 429), F(8, 105)),
    39: (4, F(4, 429), F(4, 105)),
    24: (4, F(8, 429), F(2, 35)),
    70: (5, F(32, 429), F(2, 21)),
    32: (4, F(8, 429), F(1, 21)),
    19: (4, F(16, 429), F(1, 7)),
    16: (4, F(16, 429), F(4, 63)),
    15: (4, F(8, 429), F(4, 63)),
    11: (3, F(1, 429), F(1, 63)),
}


def _table_as_dict(n):
    return {
        row.rank: (row.height,) + tuple(row.probabilities[m] for m in TABLE_MODELS)
        for row in shape_table(n)
    }


@pytest.mark.parametrize("n", sorted(SHAPES_UP_TO_7))
def test_shapes_up_to_seven_leaves(n):
    assert _table_as_dict(n) == SHAPES_UP_TO_7[n]


def test_shapes_with_eight_leaves():
    expected = {k: (h, F(1, 23), labeled, yule) for k, (h, labeled, yule) in SHAPES_8.items()}
    assert _table_as_dict(8) == expected


def test_counting_sequences():
    assert [wedderburn(n) for n in range(1, 11)] == [1, 1, 1, 2, 3, 6, 11, 23, 46, 98]
    assert [catalan_tree_count(n) for n in range(1, 7)] == [1, 1, 2, 5, 14, 42]
    assert [labeled_tree_count(n) for n in range(1, 7)] == [1, 1, 3, 15, 105, 945]
    with pytest.raises(ValueError):
        wedderburn(0)


def test_enumeration_is_complete_and_sorted():
    for n in range(1, 13):
        shapes = enumerate_shapes(n)
        assert len(shapes) == wedderburn(n)
        ranks = [rank(t) for t in shapes]
        assert ranks == sorted(ranks)
        assert len(set(ranks)) == len(ranks)
        assert all(t.leaves == n for t in shapes)


def test_enumeration_cap():
    with pytest.raises(ValueError):
        enumerate_shapes(cc.ENUM_CAP + 1)
    with pytest.raises(ValueError):
        enumerate_shapes(0)


def test_count_shapes_by_height():
    assert count_shapes_by_height(4) == {2: 1, 3: 1}
    assert count_shapes_by_height(7) == {3: 1, 4: 5, 5: 4, 6: 1}


@pytest.mark.parametrize("model", list(ModelId))
def test_probabilities_sum_to_one(model):
    for n in range(1, 13):
        assert sum(shape_probability(t, model) for t in enumerate_shapes(n)) == 1


def test_ordered_model_has_labeled_shape_law():
    for t in enumerate_shapes(7):
        assert shape_probability(t, ModelId.UNIFORM_ORDERED) == shape_probability(t, ModelId.UNIFORM_LABELED)


def test_yule_closed_form_matches_labeled_histories_ratio():
    for n in range(1, 10):
        for t in enumerate_shapes(n):
            assert yule_probability_unsimplified(t) == shape_probability(t, ModelId.YULE_HARDING)


def test_labeled_histories():
    assert labeled_histories(caterpillar(4)) == 1
    assert labeled_histories(balanced(2)) == 2
    assert labeled_histories(leaf()) == 1


def test_caterpillar_has_largest_rank():
    for n in range(1, 15):
        assert max(enumerate_shapes(n), key=rank) == caterpillar(n)


def test_pseudocaterpillar_largest_below_full_height():
    for n in range(4, 15):
        shorter = [t for t in enumerate_shapes(n) if t.height <= n - 2]
        assert max(shorter, key=rank) == pseudocaterpillar(n)


def test_caterpillar_probability():
    assert caterpillar_probability(8, ModelId.UNIFORM_LABELED) == F(64, 429)
    assert caterpillar_probability(8, ModelId.UNIFORM_UNORDERED) == F(1, 23)
    assert caterpillar_probability(5, ModelId.YULE_HARDING) == F(1, 3)
    assert caterpillar_probability(2, ModelId.YULE_HARDING) == 1
    with pytest.raises(ValueError):
        caterpillar_probability(1, ModelId.YULE_HARDING)


def test_exact_moments_small():
    report = exact_moments(4, ModelId.YULE_HARDING)
    assert report.e_f == F(14, 3)
    assert report.e_f2 == F(2, 3) * 25 + F(1, 3) * 16
    assert report.v_f == report.e_f2 - report.e_f ** 2
    assert report.e_height == F(8, 3)
    assert report.caterpillar_prob == F(2, 3)

    labeled = exact_moments(4, ModelId.UNIFORM_LABELED)
    assert labeled.e_f == F(24, 5)
    assert labeled.caterpillar_prob == F(4, 5)


def test_exact_moments_bounds():
    with pytest.raises(ValueError):
        exact_moments(1, ModelId.YULE_HARDING)
    with pytest.raises(ValueError):
        exact_moments(cc.LOGLOG_ENUM_CAP + 1, ModelId.YULE_HARDING)


def test_rank_moments_dropped_above_cap():
    report = exact_moments(cc.ENUM_CAP + 1, ModelId.UNIFORM_LABELED)
    assert report.e_f is None and report.e_f2 is None and report.v_f is None
    assert report.e_loglog_f > 0
    assert report.caterpillar_prob == caterpillar_probability(cc.ENUM_CAP + 1, ModelId.UNIFORM_LABELED)


@pytest.mark.parametrize("model", TABLE_MODELS)
def test_mean_and_second_moment_sandwich(model):
    ratios = []
    for n in range(4, 15):
        report = exact_moments(n, model)
        pi_n = caterpillar_probability(n, model)
        c = caterpillar_rank(n - 1)
        d = pseudocaterpillar_rank(n - 2)
        assert pi_n * c <= report.e_f <= pi_n * c + d
        assert pi_n * c ** 2 <= report.e_f2 <= pi_n * c ** 2 + d ** 2
        if n >= 6:
            ratios.append(report.e_f / (pi_n * c))
    assert all(a > b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] > 1


def test_caterpillar_probability_matches_moments_report():
    for model in TABLE_MODELS:
        for n in range(2, 10):
            assert exact_moments(n, model).caterpillar_prob == caterpillar_probability(n, model)
