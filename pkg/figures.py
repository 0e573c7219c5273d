# figures.py
"""
Data behind the plotted comparisons of exact and asymptotic rank statistics, as CSV rows.

Figure 1: E{log2 ln f} and E{H} against the leading-order log-log formula, n = 2..20.
Figure 2: E{f} against pi_n c_{n-1}, n = 2..10.
Figure 3: V{f} against pi_n c_{n-1}^2, n = 2..10.

All values are text: reals with 17 significant digits, rationals as p/q, undefined cells
(log-log of a value <= 1) left empty.
"""

import csv
import logging
import math
from fractions import Fraction
from typing import Dict, List, Optional, TextIO

from asymptotics import loglog_asymptotic
from cp_rank import caterpillar_rank, log_of_int
from enumeration import TABLE_MODELS, caterpillar_probability, exact_moments

logger = logging.getLogger(__name__)

FIGURE_RANGES = {1: range(2, 21), 2: range(2, 11), 3: range(2, 11)}

FIGURE_COLUMNS = {
    1: ["n", "model", "exact_loglog", "exact_height", "asymptotic_loglog"],
    2: ["n", "model", "exact_mean", "log2log_exact_mean", "asymptotic_mean", "log2log_asymptotic_mean"],
    3: ["n", "model", "exact_variance", "log2log_exact_variance", "asymptotic_variance",
        "log2log_asymptotic_variance"],
}


def format_real(value: float) -> str:
    return f"{value:.17g}"


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def log2log_fraction(value: Fraction) -> Optional[float]:
    """log2(ln value), or None when ln value <= 0."""
    if value <= 1:
        return None
    return math.log2(log_of_int(value.numerator) - log_of_int(value.denominator))


def _cell(value: Optional[float]) -> str:
    return "" if value is None else format_real(value)


def caterpillar_share(n: int, model, power: int = 1) -> Fraction:
    """pi_n * c_{n-1}^power, exact."""
    return caterpillar_probability(n, model) * caterpillar_rank(n - 1) ** power


def figure_rows(which: int) -> List[Dict[str, str]]:
    if which not in FIGURE_RANGES:
        raise ValueError(f"figure must be one of 1, 2, 3, got {which}")
    rows = []
    for n in FIGURE_RANGES[which]:
        for model in TABLE_MODELS:
            report = exact_moments(n, model)
            row = {"n": str(n), "model": model.value}
            if which == 1:
                row["exact_loglog"] = format_real(report.e_loglog_f)
                row["exact_height"] = format_real(float(report.e_height))
                row["asymptotic_loglog"] = format_real(loglog_asymptotic(n, model))
            else:
                name = "mean" if which == 2 else "variance"
                exact = report.e_f if which == 2 else report.v_f
                asymptotic = caterpillar_share(n, model, power=which - 1)
                row[f"exact_{name}"] = format_rational(exact)
                row[f"log2log_exact_{name}"] = _cell(log2log_fraction(exact))
                row[f"asymptotic_{name}"] = format_rational(asymptotic)
                row[f"log2log_asymptotic_{name}"] = _cell(log2log_fraction(asymptotic))
            rows.append(row)
    logger.info(f"Built {len(rows)} rows for figure {which}")
    return rows


def write_csv(rows: List[Dict[str, str]], columns: List[str], stream: TextIO):
    writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)


def write_figure(which: int, stream: TextIO):
    write_csv(figure_rows(which), FIGURE_COLUMNS[which], stream)
