# asymptotics.py
"""
Constants, the theta distribution and the leading-order formulas for rank statistics.

The published constants are kept as display values in LIMIT_CONSTANTS. solve_alpha,
estimate_gamma and estimate_rho re-derive them and are meant for verification, not for
use at call time.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Optional

from scipy.optimize import brentq

import cprank_config as cc
from cp_rank import (caterpillar_rank, caterpillar_rank_approx, ln_approx, log_of_int,
                     pseudocaterpillar_rank, pseudocaterpillar_rank_approx)
from enumeration import ModelId, caterpillar_probability, wedderburn

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True)
class LimitConstants:
    gamma: float = 1.11625
    kappa: float = 3.13699
    rho: float = 0.40270
    alpha: float = 4.31107

    @property
    def lambda_(self) -> float:
        return 1.0 / self.kappa

    @property
    def beta(self) -> float:
        return 3.0 * self.alpha / (2.0 * self.alpha - 2.0)


LIMIT_CONSTANTS = LimitConstants()


class PiAsymptotic(NamedTuple):
    value: float
    log_value: float


@dataclass(frozen=True)
class MeanRankAsymptotic:
    n: int
    model: ModelId
    variance: bool
    log2log_mean: float
    ln_mean: float
    exact_available: bool
    mean: Optional[Fraction] = None


# --- theta distribution ---

def theta_cdf_small_x(x: float) -> float:
    """4 pi^(5/2) / x^3 * sum_{j>=1} j^2 exp(-pi^2 j^2 / x^2); converges fast for small x."""
    if x <= 0:
        return 0.0
    scale = 4.0 * math.pi ** 2.5 / x ** 3
    c = math.pi ** 2 / x ** 2
    peak = 1.0 / math.sqrt(c)
    terms = []
    j = 1
    while True:
        term = scale * j * j * math.exp(-c * j * j)
        terms.append(term)
        if term < cc.THETA_TERM_CUTOFF and j > peak:
            break
        j += 1
    return math.fsum(terms)


def theta_cdf_large_x(x: float) -> float:
    """sum_{j in Z} (1 - 2 j^2 x^2) exp(-j^2 x^2); converges fast for large x."""
    if x <= 0:
        return 0.0
    x2 = x * x
    terms = [1.0]
    j = 1
    while True:
        term = 2.0 * (1.0 - 2.0 * j * j * x2) * math.exp(-j * j * x2)
        terms.append(term)
        if abs(term) < cc.THETA_TERM_CUTOFF and j * x > 1.0:
            break
        j += 1
    return math.fsum(terms)


def theta_cdf(x: float) -> float:
    if x <= 0:
        return 0.0
    if x < SQRT_PI:
        return theta_cdf_small_x(x)
    return theta_cdf_large_x(x)


# --- constants ---

def solve_alpha() -> float:
    """Root of a ln(2e/a) = 1 on (2, 100)."""
    alpha = brentq(lambda a: a * math.log(2.0 * math.e / a) - 1.0, 2.0, 100.0, xtol=1e-15)
    logger.debug(f"alpha = {alpha!r}")
    return alpha


def beta_from_alpha(alpha: float) -> float:
    return 3.0 * alpha / (2.0 * alpha - 2.0)


def estimate_gamma(depth: int) -> float:
    """(c_depth / 2)^(2^-depth), from the big-integer logarithm of c_depth."""
    if depth < 4:
        raise ValueError(f"estimate_gamma needs depth >= 4, got {depth}")
    ln_half_c = log_of_int(caterpillar_rank(depth)) - math.log(2.0)
    return math.exp(math.ldexp(ln_half_c, -depth))


def estimate_rho(n_max: int) -> float:
    """
    Limit of U_n/U_{n+1}.

    The ratio carries a ((n+1)/n)^(3/2) factor from the polynomial term of U_n, which is
    divided out before Aitken's delta-squared step over the last three ratios.
    """
    if n_max < 100:
        raise ValueError(f"estimate_rho needs n_max >= 100, got {n_max}")
    wedderburn(n_max + 1)

    def corrected(n: int) -> float:
        return wedderburn(n) / wedderburn(n + 1) * (n / (n + 1)) ** 1.5

    x0, x1, x2 = corrected(n_max - 2), corrected(n_max - 1), corrected(n_max)
    denominator = x2 - 2.0 * x1 + x0
    if denominator == 0.0:
        return x2
    return x2 - (x2 - x1) ** 2 / denominator


# --- leading-order formulas ---

def _require_n(n: int, minimum: int):
    if n < minimum:
        raise ValueError(f"n must be >= {minimum}, got {n}")


def pi_asymptotic(n: int, model: ModelId) -> PiAsymptotic:
    """Leading-order probability that the random shape is the caterpillar."""
    _require_n(n, 2)
    law = model.shape_law
    if law is ModelId.UNIFORM_LABELED:
        log_value = 1.5 * math.log(n) + 0.5 * math.log(math.pi) - n * math.log(2.0)
    elif law is ModelId.UNIFORM_UNORDERED:
        log_value = 1.5 * math.log(n) + n * math.log(LIMIT_CONSTANTS.rho) - math.log(LIMIT_CONSTANTS.lambda_)
    else:
        log_value = n * math.log(2.0 * math.e / n) + 0.5 * math.log(n) - math.log(4.0 * math.sqrt(2.0 * math.pi))
    return PiAsymptotic(value=math.exp(log_value), log_value=log_value)


def loglog_asymptotic(n: int, model: ModelId) -> float:
    """Leading-order E{log2 ln f} for a random n-leaf shape."""
    _require_n(n, 2)
    law = model.shape_law
    if law is ModelId.UNIFORM_LABELED:
        return 2.0 * math.sqrt(math.pi * n)
    if law is ModelId.UNIFORM_UNORDERED:
        return LIMIT_CONSTANTS.kappa * math.sqrt(n)
    return LIMIT_CONSTANTS.alpha * math.log(n)


def _ln_fraction(value: Fraction) -> float:
    return log_of_int(value.numerator) - log_of_int(value.denominator)


def mean_rank_asymptotic(n: int, model: ModelId, variance: bool = False,
                         force_log_domain: bool = False) -> MeanRankAsymptotic:
    """
    pi_n * c_{n-1} (or pi_n * c_{n-1}^2 with variance=True), the caterpillar's share of
    E{f} (or V{f}), with the exact caterpillar probability pi_n.

    Materialized as a fraction up to MEAN_RANK_EXACT_MAX_N; beyond that only its logs are
    returned, with c_{n-1} carried through its recursion in extended precision.
    """
    _require_n(n, 4)
    power = 2 if variance else 1
    pi_n = caterpillar_probability(n, model)

    if n <= cc.MEAN_RANK_EXACT_MAX_N and not force_log_domain:
        mean = pi_n * caterpillar_rank(n - 1) ** power
        ln_mean = _ln_fraction(mean)
        exact = True
    else:
        mean = None
        ln_mean = _ln_fraction(pi_n) + power * ln_approx(caterpillar_rank_approx(n - 1))
        exact = False

    return MeanRankAsymptotic(
        n=n,
        model=model,
        variance=variance,
        log2log_mean=math.log2(ln_mean),
        ln_mean=ln_mean,
        exact_available=exact,
        mean=mean,
    )


def dominance_ratio(n: int, model: ModelId, variance: bool = False) -> float:
    """
    d_{n-2}/(pi_n c_{n-1}) (squared ranks with variance=True): the bound on how far the
    exact mean can exceed the caterpillar's share. Tends to 0 for all three models.
    """
    _require_n(n, 4)
    power = 2 if variance else 1
    pi_n = caterpillar_probability(n, model)
    if n <= cc.MEAN_RANK_EXACT_MAX_N:
        ratio = Fraction(pseudocaterpillar_rank(n - 2) ** power) / (pi_n * caterpillar_rank(n - 1) ** power)
        return float(ratio)
    ln_ratio = power * (ln_approx(pseudocaterpillar_rank_approx(n - 2)) - ln_approx(caterpillar_rank_approx(n - 1)))
    return math.exp(ln_ratio - _ln_fraction(pi_n))


def tightness_statistic(ln_rank: float, n: int) -> float:
    """(ln n)^(beta ln 2) ln S_n / n^(alpha ln 2), tight for Yule shapes."""
    _require_n(n, 3)
    ln2 = math.log(2.0)
    log_value = (LIMIT_CONSTANTS.beta * ln2 * math.log(math.log(n)) + math.log(ln_rank)
                 - LIMIT_CONSTANTS.alpha * ln2 * math.log(n))
    return math.exp(log_value)
