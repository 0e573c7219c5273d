# enumeration.py
"""
Exact counting and exhaustive enumeration of shapes, with exact per-shape probabilities
and exact moments of rank and height under the random-tree models.

Every model assigns a shape a probability of the form weight / denominator where the
denominator depends only on n:

    uniform-unordered            1 / U_n
    uniform-labeled / -ordered   (n!/2^s) / (2n-3)!!
    yule                         (2^(n-1-s) * labeled_histories) / (n-1)!

so moments are accumulated as integer sums and turned into fractions once.
"""

import logging
import math
import threading
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import cprank_config as cc
from cp_rank import double_log_rank, rank
from tree_core import TreeShape, is_caterpillar, labeling_count, leaf, node, postorder_missing

logger = logging.getLogger(__name__)


class ModelId(Enum):
    UNIFORM_UNORDERED = "uniform-unordered"
    UNIFORM_LABELED = "uniform-labeled"
    YULE_HARDING = "yule"
    UNIFORM_ORDERED = "uniform-ordered"

    @property
    def shape_law(self) -> "ModelId":
        """Ordered trees induce the uniform-cladogram law on shapes."""
        if self is ModelId.UNIFORM_ORDERED:
            return ModelId.UNIFORM_LABELED
        return self

    @classmethod
    def parse(cls, text: str) -> "ModelId":
        for model in cls:
            if model.value == text:
                return model
        names = ", ".join(m.value for m in cls)
        raise ValueError(f"Unknown model '{text}'. Expected one of: {names}")


# The three shape laws the tables and figures report, in column order
TABLE_MODELS = (ModelId.UNIFORM_UNORDERED, ModelId.UNIFORM_LABELED, ModelId.YULE_HARDING)


@dataclass(frozen=True)
class MomentsReport:
    n: int
    model: ModelId
    e_f: Optional[Fraction]
    e_f2: Optional[Fraction]
    v_f: Optional[Fraction]
    e_loglog_f: float
    e_height: Fraction
    caterpillar_prob: Fraction


@dataclass(frozen=True)
class ShapeRow:
    shape: TreeShape
    rank: int
    height: int
    probabilities: Dict[ModelId, Fraction]


_lock = threading.Lock()
_wedderburn: List[int] = [0, 1]
_shape_lists: Dict[int, Tuple[TreeShape, ...]] = {1: (leaf(),)}


def _require_leaves(n: int, minimum: int = 1):
    if n < minimum:
        raise ValueError(f"number of leaves must be >= {minimum}, got {n}")


def wedderburn(n: int) -> int:
    _require_leaves(n)
    with _lock:
        while len(_wedderburn) <= n:
            m = len(_wedderburn)
            total = sum(_wedderburn[j] * _wedderburn[m - j] for j in range(1, (m + 1) // 2))
            if m % 2 == 0:
                half = _wedderburn[m // 2]
                total += half * (half + 1) // 2
            _wedderburn.append(total)
        return _wedderburn[n]


def catalan_tree_count(n: int) -> int:
    _require_leaves(n)
    return math.comb(2 * n - 2, n - 1) // n


def labeled_tree_count(n: int) -> int:
    """(2n-3)!!, the number of cladograms on n labeled leaves."""
    _require_leaves(n)
    return math.prod(range(1, 2 * n - 2, 2))


def _history_product(t: TreeShape) -> int:
    """Product over internal nodes of (descendant leaves - 1)."""
    if t._history_product is not None:
        return t._history_product
    for v in postorder_missing(t, "_history_product"):
        v._history_product = v.first._history_product * v.second._history_product * (v.leaves - 1)
    return t._history_product


def labeled_histories(t: TreeShape) -> int:
    return math.factorial(t.leaves - 1) // _history_product(t)


def model_denominator(n: int, model: ModelId) -> int:
    law = model.shape_law
    if law is ModelId.UNIFORM_UNORDERED:
        return wedderburn(n)
    if law is ModelId.UNIFORM_LABELED:
        return labeled_tree_count(n)
    return math.factorial(n - 1)


def shape_weight(t: TreeShape, model: ModelId) -> int:
    """Numerator of shape_probability over model_denominator(n, model)."""
    law = model.shape_law
    if law is ModelId.UNIFORM_UNORDERED:
        return 1
    if law is ModelId.UNIFORM_LABELED:
        return labeling_count(t)
    return labeled_histories(t) << (t.leaves - 1 - t.symmetric_nodes)


def shape_probability(t: TreeShape, model: ModelId) -> Fraction:
    law = model.shape_law
    if law is ModelId.YULE_HARDING:
        # 2^(n-1-s) / prod (r-1)^d_r
        return Fraction(1 << (t.leaves - 1 - t.symmetric_nodes), _history_product(t))
    return Fraction(shape_weight(t, model), model_denominator(t.leaves, model))


def yule_probability_unsimplified(t: TreeShape) -> Fraction:
    """Labeled histories of all labelings of t over all labeled histories on n leaves."""
    n = t.leaves
    labelings = Fraction(math.factorial(n), 2 ** t.symmetric_nodes)
    histories = labeled_histories(t)
    total = Fraction(math.factorial(n) * math.factorial(n - 1), 2 ** (n - 1))
    return labelings * histories / total


def _build_shapes(n: int) -> Tuple[TreeShape, ...]:
    result: List[TreeShape] = []
    for j in range(1, n // 2 + 1):
        larger = _shape_lists[n - j]
        smaller = _shape_lists[j]
        if j < n - j:
            for a in larger:
                for b in smaller:
                    result.append(node(a, b))
        else:
            # Unordered pairs with repetition; lists are rank-sorted so a >= b already
            for i, a in enumerate(larger):
                for b in larger[:i + 1]:
                    result.append(node(a, b))
    result.sort(key=rank)
    return tuple(result)


def _shapes(n: int) -> Tuple[TreeShape, ...]:
    with _lock:
        for m in range(2, n + 1):
            if m not in _shape_lists:
                _shape_lists[m] = _build_shapes(m)
                logger.debug(f"Enumerated {len(_shape_lists[m])} shapes with {m} leaves")
        return _shape_lists[n]


def enumerate_shapes(n: int, cap: Optional[int] = None) -> List[TreeShape]:
    """All U_n canonical shapes with n leaves, ascending by rank."""
    limit = cc.ENUM_CAP if cap is None else cap
    _require_leaves(n)
    if n > limit:
        raise ValueError(f"enumeration is capped at n = {limit}, got {n}")
    return list(_shapes(n))


def count_shapes_by_height(n: int, cap: Optional[int] = None) -> Dict[int, int]:
    return dict(sorted(Counter(t.height for t in enumerate_shapes(n, cap)).items()))


def caterpillar_probability(n: int, model: ModelId) -> Fraction:
    if n < 2:
        raise ValueError(f"caterpillar probability needs n >= 2, got {n}")
    law = model.shape_law
    if law is ModelId.UNIFORM_UNORDERED:
        return Fraction(1, wedderburn(n))
    if law is ModelId.UNIFORM_LABELED:
        return Fraction(2 ** (n - 2), catalan_tree_count(n))
    return Fraction(2 ** (n - 2), math.factorial(n - 1))


def exact_moments(n: int, model: ModelId) -> MomentsReport:
    if n < 2 or n > cc.LOGLOG_ENUM_CAP:
        raise ValueError(f"exact moments need 2 <= n <= {cc.LOGLOG_ENUM_CAP}, got {n}")
    with_rank = n <= cc.ENUM_CAP
    shapes = enumerate_shapes(n, cap=cc.LOGLOG_ENUM_CAP)
    denominator = model_denominator(n, model)

    total = 0
    sum_height = 0
    sum_f = 0
    sum_f2 = 0
    loglog_terms = []
    caterpillar_weight = 0
    for t in shapes:
        w = shape_weight(t, model)
        total += w
        sum_height += w * t.height
        if with_rank:
            f = rank(t)
            sum_f += w * f
            sum_f2 += w * f * f
        loglog_terms.append(w / denominator * double_log_rank(t))
        if is_caterpillar(t):
            caterpillar_weight = w

    if total != denominator:
        raise RuntimeError(f"probabilities for n={n}, {model.value} sum to {total}/{denominator}, not 1")

    e_f = Fraction(sum_f, denominator) if with_rank else None
    e_f2 = Fraction(sum_f2, denominator) if with_rank else None
    v_f = e_f2 - e_f * e_f if with_rank else None
    logger.info(f"Exact moments for n={n}, model={model.value} over {len(shapes)} shapes")
    return MomentsReport(
        n=n,
        model=model,
        e_f=e_f,
        e_f2=e_f2,
        v_f=v_f,
        e_loglog_f=math.fsum(loglog_terms),
        e_height=Fraction(sum_height, denominator),
        caterpillar_prob=Fraction(caterpillar_weight, denominator),
    )


def shape_table(n: int, cap: Optional[int] = None) -> List[ShapeRow]:
    """Rows of rank, height and the three model probabilities for every n-leaf shape."""
    rows = []
    for t in enumerate_shapes(n, cap):
        probabilities = {model: shape_probability(t, model) for model in TABLE_MODELS}
        rows.append(ShapeRow(shape=t, rank=rank(t), height=t.height, probabilities=probabilities))
    return rows

