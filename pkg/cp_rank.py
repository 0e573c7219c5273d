# cp_rank.py
"""
The Colijn-Plazzotta bijection between shapes and positive integers.

    f(leaf) = 1
    f(t)    = f(l)(f(l) - 1)/2 + 1 + f(r),   f(l) >= f(r)

Ranks double in bit length with every level of height, so anything that only needs the
magnitude of a rank (double_log_rank, approx_rank) has a log-domain path that never
materializes the integer.
"""

import logging
import math
import threading
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple

import mpmath

import cprank_config as cc
from tree_core import TreeShape, leaf, node, postorder_missing

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)

# Dedicated context so the working precision is never shared with callers or threads
_LOG_CTX = mpmath.mp.clone()
_LOG_CTX.prec = max(cc.LOG_DOMAIN_PREC, 80)

_seq_lock = threading.Lock()
_c_values: List[int] = [1]
_d_values: List[Optional[int]] = [None, None, 4]


class HeightCount(Enum):
    AT_MOST = "at-most"
    EXACTLY = "exactly"


@dataclass(frozen=True)
class ExtremalSeqs:
    # c[h]: rank of the caterpillar of height h; d[h]: rank of the pseudocaterpillar of height h (None below 2)
    c: List[int]
    d: List[Optional[int]]


def rank(t: TreeShape) -> int:
    if t._rank is not None:
        return t._rank
    for v in postorder_missing(t, "_rank"):
        big = v.first._rank
        v._rank = big * (big - 1) // 2 + 1 + v.second._rank
    return t._rank


def _split_rank(k: int) -> Tuple[int, int]:
    """(L, R) with k = L(L-1)/2 + 1 + R and 1 <= R <= L, for k >= 2."""
    big = (1 + math.isqrt(8 * (k - 2) + 1)) // 2
    while (big + 1) * big // 2 + 1 < k:
        big += 1
    while big * (big - 1) // 2 + 2 > k:
        big -= 1
    return big, k - big * (big - 1) // 2 - 1


def unrank(k: int) -> TreeShape:
    if k < 1:
        raise ValueError(f"rank must be a positive integer, got {k}")
    if k == 1:
        return leaf()
    big, small = _split_rank(k)
    t = node(unrank(big), unrank(small))
    t._rank = k
    return t


def _extend(h_max: int):
    with _seq_lock:
        while len(_c_values) <= h_max + 1:
            c = _c_values[-1]
            _c_values.append(c * (c - 1) // 2 + 2)
        while len(_d_values) <= h_max + 1:
            d = _d_values[-1]
            _d_values.append(d * (d - 1) // 2 + 2)


def caterpillar_rank(h: int) -> int:
    """c_h, the rank of the caterpillar of height h."""
    if h < 0:
        raise ValueError(f"height must be >= 0, got {h}")
    _extend(h)
    return _c_values[h]


def pseudocaterpillar_rank(h: int) -> int:
    """d_h, the rank of the pseudocaterpillar of height h (h >= 2)."""
    if h < 2:
        raise ValueError(f"pseudocaterpillars have height >= 2, got {h}")
    _extend(h)
    return _d_values[h]


def extremal_seqs(h_max: int) -> ExtremalSeqs:
    if h_max < 0:
        raise ValueError(f"h_max must be >= 0, got {h_max}")
    _extend(h_max)
    return ExtremalSeqs(c=list(_c_values[:h_max + 1]), d=list(_d_values[:h_max + 1]))


def height_rank_bounds(h: int) -> Tuple[int, int]:
    """Inclusive rank range of the shapes of height h."""
    return caterpillar_rank(h), caterpillar_rank(h + 1) - 1


def count_by_height(h: int, mode: HeightCount) -> int:
    if mode == HeightCount.AT_MOST:
        return caterpillar_rank(h + 1) - 1
    return caterpillar_rank(h + 1) - caterpillar_rank(h)


def height_of_rank(k: int) -> int:
    """Height of unrank(k), read off the block structure of the ranking."""
    if k < 1:
        raise ValueError(f"rank must be a positive integer, got {k}")
    h = 0
    while caterpillar_rank(h + 1) <= k:
        h += 1
    return h


def log_of_int(value: int) -> float:
    """Natural log of a positive integer from its bit length and leading 64 bits."""
    bits = value.bit_length()
    if bits <= 64:
        return math.log(value)
    shift = bits - 64
    return math.log(value >> shift) + shift * LN2


def approx_rank(t: TreeShape):
    """f(t) as an extended-precision float; the exponent is unbounded so tall shapes are fine."""
    one = _LOG_CTX.mpf(1)
    if t.first is None:
        return one
    if t._approx_rank is not None:
        return t._approx_rank
    for v in postorder_missing(t, "_approx_rank"):
        big = one if v.first.first is None else v.first._approx_rank
        small = one if v.second.first is None else v.second._approx_rank
        v._approx_rank = big * (big - one) / 2 + one + small
    return t._approx_rank


def caterpillar_rank_approx(h: int):
    """c_h carried through its recursion in extended precision."""
    c = _LOG_CTX.mpf(1)
    for _ in range(h):
        c = c * (c - 1) / 2 + 2
    return c


def pseudocaterpillar_rank_approx(h: int):
    if h < 2:
        raise ValueError(f"pseudocaterpillars have height >= 2, got {h}")
    d = _LOG_CTX.mpf(4)
    for _ in range(h - 2):
        d = d * (d - 1) / 2 + 2
    return d


def ln_approx(value) -> float:
    """Natural log of an extended-precision value, as a float."""
    return float(_LOG_CTX.log(value))


def log_rank(t: TreeShape) -> float:
    """ln f(t), exact-then-rounded for short shapes and log-domain for tall ones."""
    if t.height <= cc.EXACT_RANK_MAX_HEIGHT:
        return log_of_int(rank(t))
    return float(_LOG_CTX.log(approx_rank(t)))


def double_log_rank(t: TreeShape) -> float:
    """log2(ln f(t)). Undefined for the single leaf, whose rank is 1."""
    if t.first is None:
        raise ValueError("double_log_rank is undefined for the single leaf (rank 1)")
    if t.height <= cc.EXACT_RANK_MAX_HEIGHT:
        return math.log2(log_of_int(rank(t)))
    return float(_LOG_CTX.log(_LOG_CTX.log(approx_rank(t))) / _LOG_CTX.ln2)
