# sampling.py
"""
Seeded random shapes under the four tree models and Monte Carlo estimates built on them.

Randomness comes from numpy's counter-based Philox generator. A run of `samples` draws is
cut into blocks of MC_BLOCK_SIZE; block b always reads the substream keyed by (seed, b)
and blocks are reduced in index order, so reports are bit-identical for any worker count.

Split choices are exact: a uniform integer below the total weight is inverted against
exact cumulative weights, never a float threshold.
"""

import logging
import math
import warnings
from bisect import bisect_right
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from itertools import accumulate
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

import cprank_config as cc
from asymptotics import LIMIT_CONSTANTS, tightness_statistic
from cp_rank import double_log_rank, log_rank, rank
from enumeration import ModelId, catalan_tree_count, wedderburn
from tree_core import TreeShape, is_caterpillar, leaf, node


def _nop_jit(*jit_args, **jit_kwargs):
    def decorator(func):
        return func
    return decorator


try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False
    warnings.warn("Numba could not be imported. Height kernels fall back to plain Python and will be much slower")
    njit = _nop_jit

logger = logging.getLogger(__name__)

_WORD_BUFFER = 4096


class RngStream:
    """Philox substream for one (seed, block) pair."""

    def __init__(self, seed: int, block: int = 0):
        if seed < 0 or seed >= 1 << 64:
            raise ValueError(f"seed must be a 64-bit natural number, got {seed}")
        if block < 0:
            raise ValueError(f"block index must be >= 0, got {block}")
        self.seed = seed
        self.block = block
        sequence = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
        self.generator = np.random.Generator(np.random.Philox(sequence))
        self._words: List[int] = []
        self._next = 0

    def _word(self) -> int:
        if self._next >= len(self._words):
            self._words = self.generator.bit_generator.random_raw(_WORD_BUFFER).tolist()
            self._next = 0
        word = self._words[self._next]
        self._next += 1
        return word

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound), exact for any size of bound."""
        if bound < 1:
            raise ValueError(f"bound must be >= 1, got {bound}")
        words = max(1, ((bound - 1).bit_length() + 63) // 64)
        span = 1 << (64 * words)
        limit = span - span % bound
        while True:
            value = 0
            for _ in range(words):
                value = (value << 64) | self._word()
            if value < limit:
                return value % bound


@dataclass(frozen=True)
class McReport:
    model: ModelId
    n: int
    samples: int
    seed: int
    mean_loglog: float
    se_loglog: float
    mean_height: float
    se_height: float
    caterpillar_freq: float
    shape_histogram: Optional[Dict[int, int]] = None


@dataclass(frozen=True)
class HeightReport:
    model: ModelId
    n: int
    samples: int
    seed: int
    mean_height: float
    se_height: float
    mean_scaled: float
    se_scaled: float


# --- exact split tables ---

@lru_cache(maxsize=256)
def _catalan_split_table(m: int) -> List[int]:
    """Cumulative weights of left size i = 1..m-1 in a uniform ordered tree with m leaves."""
    return list(accumulate(catalan_tree_count(i) * catalan_tree_count(m - i) for i in range(1, m)))


@lru_cache(maxsize=256)
def _wedderburn_split_table(m: int) -> List[int]:
    """Cumulative weights of the smaller part j = 1..m//2 of a uniform shape with m leaves."""
    weights = []
    for j in range(1, m // 2 + 1):
        if 2 * j == m:
            half = wedderburn(j)
            weights.append(half * (half + 1) // 2)
        else:
            weights.append(wedderburn(j) * wedderburn(m - j))
    return list(accumulate(weights))


def _invert(table: List[int], rng: RngStream) -> int:
    """Index i with table[i-1] <= r < table[i] for r uniform below table[-1]."""
    return bisect_right(table, rng.randbelow(table[-1]))


# --- shape samplers ---

_JOIN = 0


def _grow_by_splits(n: int, split: Callable[[int], int]) -> TreeShape:
    """Build a shape top-down; split(m) returns the first part's leaf count in 1..m-1."""
    values: List[TreeShape] = []
    tasks = [n]
    while tasks:
        m = tasks.pop()
        if m == _JOIN:
            second = values.pop()
            first = values.pop()
            values.append(node(first, second))
        elif m == 1:
            values.append(leaf())
        else:
            i = split(m)
            tasks.extend((_JOIN, m - i, i))
    return values[0]


def _sample_unordered(n: int, rng: RngStream) -> TreeShape:
    build, join, equal_pair = 0, 1, 2
    values: List[TreeShape] = []
    tasks = [(build, n)]
    while tasks:
        kind, m = tasks.pop()
        if kind == join:
            second = values.pop()
            first = values.pop()
            values.append(node(first, second))
        elif kind == equal_pair:
            second = values.pop()
            first = values.pop()
            # Distinct pairs come up twice as often as repeated ones, keep half of them
            if first == second or rng.randbelow(2) == 0:
                values.append(node(first, second))
            else:
                tasks.extend(((equal_pair, m), (build, m // 2), (build, m // 2)))
        elif m == 1:
            values.append(leaf())
        else:
            j = _invert(_wedderburn_split_table(m), rng) + 1
            if 2 * j == m:
                tasks.extend(((equal_pair, m), (build, j), (build, j)))
            else:
                tasks.extend(((join, m), (build, m - j), (build, j)))
    return values[0]


def sample_shape(model: ModelId, n: int, rng: RngStream) -> TreeShape:
    if n < 1:
        raise ValueError(f"number of leaves must be >= 1, got {n}")
    law = model.shape_law
    if law is ModelId.UNIFORM_LABELED:
        return _grow_by_splits(n, lambda m: _invert(_catalan_split_table(m), rng) + 1)
    if law is ModelId.YULE_HARDING:
        return _grow_by_splits(n, lambda m: rng.randbelow(m - 1) + 1)
    return _sample_unordered(n, rng)


# --- height-only kernels ---

@njit(nogil=True, cache=False)
def _remy_height(draws, n):
    """
    Height of the ordered tree grown by Remy's process.

    draws[k-1] in [0, 2(2k-1)) picks one of the 2k-1 current nodes (draw >> 1) and the
    side the new leaf goes to (draw & 1).
    """
    size = 2 * n - 1
    left = np.full(size, -1, np.int64)
    right = np.full(size, -1, np.int64)
    parent = np.full(size, -1, np.int64)
    root = 0
    for k in range(1, n):
        d = draws[k - 1]
        x = d >> 1
        p = 2 * k - 1
        q = 2 * k
        g = parent[x]
        if g == -1:
            root = p
        elif left[g] == x:
            left[g] = p
        else:
            right[g] = p
        parent[p] = g
        if d & 1 == 0:
            left[p] = x
            right[p] = q
        else:
            left[p] = q
            right[p] = x
        parent[x] = p
        parent[q] = p

    depth = np.zeros(size, np.int64)
    stack = np.empty(size, np.int64)
    stack[0] = root
    top = 1
    height = 0
    while top > 0:
        top -= 1
        v = stack[top]
        if left[v] == -1:
            if depth[v] > height:
                height = depth[v]
            continue
        depth[left[v]] = depth[v] + 1
        depth[right[v]] = depth[v] + 1
        stack[top] = left[v]
        stack[top + 1] = right[v]
        top += 2
    return height


@njit(nogil=True, cache=False)
def _yule_height(draws, n):
    """Height after n-1 splits of a uniformly chosen leaf; draws[k-1] in [0, k)."""
    depths = np.zeros(n, np.int64)
    height = 0
    for k in range(1, n):
        j = draws[k - 1]
        d = depths[j] + 1
        depths[j] = d
        depths[k] = d
        if d > height:
            height = d
    return height


def _height_one(model: ModelId, n: int, rng: RngStream) -> int:
    if n == 1:
        return 0
    law = model.shape_law
    if law is ModelId.UNIFORM_LABELED:
        highs = 2 * (2 * np.arange(1, n, dtype=np.int64) - 1)
        return int(_remy_height(rng.generator.integers(0, highs), n))
    if law is ModelId.YULE_HARDING:
        return int(_yule_height(rng.generator.integers(0, np.arange(1, n, dtype=np.int64)), n))
    return sample_shape(model, n, rng).height


# --- block scheduling ---

def _block_sizes(samples: int) -> List[int]:
    size = cc.MC_BLOCK_SIZE
    full, rest = divmod(samples, size)
    return [size] * full + ([rest] if rest else [])


def _run_blocks(samples: int, job: Callable[[int, int], object], workers: Optional[int]) -> list:
    sizes = _block_sizes(samples)
    count = cc.MC_WORKERS if workers is None else workers
    logger.debug(f"Running {samples} samples in {len(sizes)} blocks on {count} worker(s)")
    if count <= 1 or len(sizes) == 1:
        return [job(b, size) for b, size in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=count) as pool:
        # map keeps block order, which fixes the reduction order
        return list(pool.map(job, range(len(sizes)), sizes))


def _check_run(n: int, samples: int, min_n: int = 2):
    if n < min_n:
        raise ValueError(f"number of leaves must be >= {min_n}, got {n}")
    if samples < 2:
        raise ValueError(f"samples must be >= 2, got {samples}")


def _mean_se(values: np.ndarray):
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(len(values)))


def monte_carlo(model: ModelId, n: int, samples: int, seed: int = cc.DEFAULT_SEED,
                with_histogram: bool = False, workers: Optional[int] = None) -> McReport:
    _check_run(n, samples)
    if with_histogram and n > cc.ENUM_CAP:
        raise ValueError(f"rank histograms are capped at n = {cc.ENUM_CAP}, got {n}")

    def job(block: int, size: int):
        rng = RngStream(seed, block)
        loglog = np.empty(size)
        heights = np.empty(size, dtype=np.int64)
        caterpillars = 0
        histogram: Dict[int, int] = {}
        for i in range(size):
            t = sample_shape(model, n, rng)
            loglog[i] = double_log_rank(t)
            heights[i] = t.height
            caterpillars += is_caterpillar(t)
            if with_histogram:
                key = rank(t)
                histogram[key] = histogram.get(key, 0) + 1
        return loglog, heights, caterpillars, histogram

    parts = _run_blocks(samples, job, workers)
    mean_loglog, se_loglog = _mean_se(np.concatenate([p[0] for p in parts]))
    mean_height, se_height = _mean_se(np.concatenate([p[1] for p in parts]))
    histogram = None
    if with_histogram:
        histogram = {}
        for p in parts:
            for key, count in p[3].items():
                histogram[key] = histogram.get(key, 0) + count
        histogram = dict(sorted(histogram.items()))

    logger.info(f"Monte Carlo {model.value} n={n}: {samples} samples, seed {seed}")
    return McReport(
        model=model,
        n=n,
        samples=samples,
        seed=seed,
        mean_loglog=mean_loglog,
        se_loglog=se_loglog,
        mean_height=mean_height,
        se_height=se_height,
        caterpillar_freq=sum(p[2] for p in parts) / samples,
        shape_histogram=histogram,
    )


def height_samples(model: ModelId, n: int, samples: int, seed: int = cc.DEFAULT_SEED,
                   workers: Optional[int] = None) -> np.ndarray:
    """Raw heights without building shapes for the labeled, ordered and Yule models."""
    _check_run(n, samples, min_n=1)

    def job(block: int, size: int):
        rng = RngStream(seed, block)
        return np.array([_height_one(model, n, rng) for _ in range(size)], dtype=np.int64)

    return np.concatenate(_run_blocks(samples, job, workers))


def height_scale(model: ModelId, n: int) -> float:
    """Divisor that turns H_n into the model's limit-law variable."""
    law = model.shape_law
    if law is ModelId.UNIFORM_LABELED:
        return 2.0 * math.sqrt(n)
    if law is ModelId.UNIFORM_UNORDERED:
        return LIMIT_CONSTANTS.kappa * math.sqrt(n / math.pi)
    return math.log(n)


def height_scaled_samples(model: ModelId, n: int, samples: int, seed: int = cc.DEFAULT_SEED,
                          workers: Optional[int] = None) -> List[float]:
    _check_run(n, samples)
    return (height_samples(model, n, samples, seed, workers) / height_scale(model, n)).tolist()


def height_report(model: ModelId, n: int, samples: int, seed: int = cc.DEFAULT_SEED,
                  workers: Optional[int] = None) -> HeightReport:
    _check_run(n, samples)
    heights = height_samples(model, n, samples, seed, workers)
    mean_height, se_height = _mean_se(heights)
    mean_scaled, se_scaled = _mean_se(heights / height_scale(model, n))
    return HeightReport(model=model, n=n, samples=samples, seed=seed, mean_height=mean_height,
                        se_height=se_height, mean_scaled=mean_scaled, se_scaled=se_scaled)


def tightness_offsets(n_values: Iterable[int], samples: int, seed: int = cc.DEFAULT_SEED,
                      workers: Optional[int] = None) -> Dict[int, np.ndarray]:
    """Yule H_n - alpha ln n + beta ln ln n per sample, for each n (n >= 3)."""
    alpha, beta = LIMIT_CONSTANTS.alpha, LIMIT_CONSTANTS.beta
    offsets = {}
    for index, n in enumerate(n_values):
        if n < 3:
            raise ValueError(f"tightness offsets need n >= 3, got {n}")
        # One seed lane per position in n_values
        heights = height_samples(ModelId.YULE_HARDING, n, samples, seed ^ (index << 48), workers)
        offsets[n] = heights - alpha * math.log(n) + beta * math.log(math.log(n))
    return offsets


def tightness_summary(n: int, samples: int, seed: int = cc.DEFAULT_SEED,
                      workers: Optional[int] = None) -> Dict[str, float]:
    """Median and interquartile width of the Yule height offset and log-rank statistic at n."""
    _check_run(n, samples, min_n=3)
    alpha, beta = LIMIT_CONSTANTS.alpha, LIMIT_CONSTANTS.beta
    shift = -alpha * math.log(n) + beta * math.log(math.log(n))

    def job(block: int, size: int):
        rng = RngStream(seed, block)
        offsets = np.empty(size)
        statistics = np.empty(size)
        for i in range(size):
            t = sample_shape(ModelId.YULE_HARDING, n, rng)
            offsets[i] = t.height + shift
            statistics[i] = tightness_statistic(log_rank(t), n)
        return offsets, statistics

    parts = _run_blocks(samples, job, workers)
    offsets = np.concatenate([p[0] for p in parts])
    statistics = np.concatenate([p[1] for p in parts])
    q_offsets = np.percentile(offsets, [25, 50, 75])
    q_statistics = np.percentile(statistics, [25, 50, 75])
    return {
        "median_offset": float(q_offsets[1]),
        "iqr_offset": float(q_offsets[2] - q_offsets[0]),
        "median_statistic": float(q_statistics[1]),
        "iqr_statistic": float(q_statistics[2] - q_statistics[0]),
    }
