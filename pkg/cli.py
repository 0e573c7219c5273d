# cli.py
"""
Command-line surface for cprank.

    python cli.py rank "((,),);"
    python cli.py unrank 2598062
    python cli.py probs --leaves 8 --model yule
    python cli.py figures --which 1 --out fig1.csv

Results go to stdout, logs and errors to stderr. Exit codes: 0 ok, 1 domain error,
2 usage error.
"""

import argparse
import dataclasses
import json
import logging
import os
import sys
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from colorama import Fore, Style
from colorama import init as colorama_init

import cprank_config as cc
from asymptotics import (LIMIT_CONSTANTS, beta_from_alpha, loglog_asymptotic, mean_rank_asymptotic,
                         pi_asymptotic, solve_alpha, theta_cdf)
from cp_rank import HeightCount, count_by_height, extremal_seqs, rank, unrank
from enumeration import (ModelId, caterpillar_probability, enumerate_shapes, exact_moments,
                         shape_probability, shape_table)
from figures import format_rational, format_real, write_csv, write_figure
from sampling import height_report, monte_carlo, tightness_summary
from tree_core import parse_newick, to_newick

logger = logging.getLogger(__name__)


class ColoredFormatter(logging.Formatter):
    COLORS = {
        'INFO': Fore.WHITE,
        'DEBUG': Fore.CYAN,
        'WARNING': Fore.YELLOW,
        'ERROR': Fore.RED,
        'CRITICAL': Fore.RED + Style.BRIGHT
    }

    def format(self, record):
        msg = super().format(record)
        return f"{self.COLORS.get(record.levelname, Fore.WHITE)}{msg}{Style.RESET_ALL}"


def setup_logging(level: str):
    logging.basicConfig(
        level=level,
        format='%(asctime)s - %(levelname)s - %(message)s',
        handlers=[logging.StreamHandler(sys.stderr)]
    )
    use_color = not os.getenv("NO_COLOR") and sys.stderr.isatty()
    if use_color:
        colorama_init()
    for handler in logging.getLogger().handlers:
        if isinstance(handler, logging.StreamHandler) and not isinstance(handler, logging.FileHandler):
            if use_color:
                handler.setFormatter(ColoredFormatter('%(asctime)s - %(levelname)s - %(message)s'))


# --- output encoding ---

def _encode(value):
    """JSON-ready value: rationals as p/q text, reals as 17-significant-digit text."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, float):
        return format_real(value)
    if isinstance(value, Enum):
        return value.value
    if dataclasses.is_dataclass(value):
        return {f.name: _encode(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if isinstance(value, dict):
        return {str(_encode(k)): _encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_encode(v) for v in value]
    return _encode(float(value))


def _emit_json(payload, out):
    out.write(json.dumps(_encode(payload), indent=2))
    out.write("\n")


def _emit_rows(rows: List[Dict[str, str]], columns: List[str], fmt: str, out):
    if fmt == "json":
        _emit_json(rows, out)
    else:
        write_csv(rows, columns, out)


# --- argument types ---

def _model(text: str) -> ModelId:
    try:
        return ModelId.parse(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))


def _n_range(text: str) -> range:
    try:
        low, high = (int(part) for part in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a:b, got '{text}'")
    if low > high:
        raise argparse.ArgumentTypeError(f"empty range '{text}'")
    return range(low, high + 1)


# --- subcommands ---

def cmd_rank(args, out):
    text = sys.stdin.read() if args.newick == "-" else args.newick
    out.write(f"{rank(parse_newick(text.strip()))}\n")


def cmd_unrank(args, out):
    out.write(to_newick(unrank(args.k)) + "\n")


def cmd_seq(args, out):
    seqs = extremal_seqs(args.max)
    if args.which == "c":
        rows = [{"h": str(h), "c": str(c)} for h, c in enumerate(seqs.c)]
        columns = ["h", "c"]
    elif args.which == "d":
        rows = [{"h": str(h), "d": str(d)} for h, d in enumerate(seqs.d) if d is not None]
        columns = ["h", "d"]
    else:
        rows = [{"h": str(h),
                 "at_most": str(count_by_height(h, HeightCount.AT_MOST)),
                 "exactly": str(count_by_height(h, HeightCount.EXACTLY))} for h in range(args.max + 1)]
        columns = ["h", "at_most", "exactly"]
    _emit_rows(rows, columns, args.format, out)


def cmd_enumerate(args, out):
    rows = [{"rank": str(rank(t)), "height": str(t.height), "newick": to_newick(t)}
            for t in enumerate_shapes(args.leaves)]
    _emit_rows(rows, ["rank", "height", "newick"], args.format, out)


def cmd_probs(args, out):
    rows = [{"rank": str(rank(t)), "height": str(t.height), "newick": to_newick(t),
             "probability": format_rational(shape_probability(t, args.model))}
            for t in enumerate_shapes(args.leaves)]
    _emit_rows(rows, ["rank", "height", "newick", "probability"], args.format, out)


def cmd_table(args, out):
    rows = []
    for row in shape_table(args.leaves):
        entry = {"rank": str(row.rank), "height": str(row.height), "newick": to_newick(row.shape)}
        entry.update({model.value: format_rational(p) for model, p in row.probabilities.items()})
        rows.append(entry)
    columns = ["rank", "height", "newick", "uniform-unordered", "uniform-labeled", "yule"]
    _emit_rows(rows, columns, args.format, out)


def cmd_moments(args, out):
    _emit_json(exact_moments(args.leaves, args.model), out)


def cmd_sample(args, out):
    if args.height_only:
        _emit_json(height_report(args.model, args.leaves, args.count, args.seed, args.workers), out)
        return
    report = monte_carlo(args.model, args.leaves, args.count, args.seed,
                         with_histogram=args.histogram, workers=args.workers)
    if args.histogram:
        rows = [{"rank": str(k), "count": str(v)} for k, v in report.shape_histogram.items()]
        write_csv(rows, ["rank", "count"], out)
    else:
        _emit_json(report, out)


def cmd_asym(args, out):
    what = args.what
    if what == "constants":
        alpha = solve_alpha()
        _emit_json({
            "gamma": LIMIT_CONSTANTS.gamma,
            "lambda": LIMIT_CONSTANTS.lambda_,
            "rho": LIMIT_CONSTANTS.rho,
            "kappa": LIMIT_CONSTANTS.kappa,
            "alpha": LIMIT_CONSTANTS.alpha,
            "beta": LIMIT_CONSTANTS.beta,
            "alpha_solved": alpha,
            "beta_solved": beta_from_alpha(alpha),
        }, out)
        return
    if what == "theta-cdf":
        if args.x is None:
            raise ValueError("asym --what theta-cdf needs --x")
        _emit_json({"x": args.x, "F": theta_cdf(args.x)}, out)
        return
    if args.n_range is None:
        raise ValueError(f"asym --what {what} needs --n-range a:b")

    rows = []
    if what == "loglog":
        columns = ["n", "loglog_asymptotic"]
        for n in args.n_range:
            rows.append({"n": str(n), "loglog_asymptotic": format_real(loglog_asymptotic(n, args.model))})
    elif what == "pi":
        columns = ["n", "pi_asymptotic", "ln_pi_asymptotic", "pi_exact"]
        for n in args.n_range:
            pi = pi_asymptotic(n, args.model)
            rows.append({"n": str(n), "pi_asymptotic": format_real(pi.value),
                         "ln_pi_asymptotic": format_real(pi.log_value),
                         "pi_exact": format_rational(caterpillar_probability(n, args.model))})
    elif what == "mean-rank":
        columns = ["n", "log2log_mean", "exact_available", "mean"]
        for n in args.n_range:
            result = mean_rank_asymptotic(n, args.model, variance=args.variance)
            rows.append({"n": str(n), "log2log_mean": format_real(result.log2log_mean),
                         "exact_available": str(result.exact_available).lower(),
                         "mean": "" if result.mean is None else format_rational(result.mean)})
    else:
        columns = ["n", "median_offset", "iqr_offset", "median_statistic", "iqr_statistic"]
        for n in args.n_range:
            summary = tightness_summary(n, args.count, args.seed, args.workers)
            row = {"n": str(n)}
            row.update({k: format_real(v) for k, v in summary.items()})
            rows.append(row)
    _emit_rows(rows, columns, args.format, out)


def cmd_figures(args, out):
    if args.out == "-":
        write_figure(args.which, out)
        return
    with open(args.out, "w", newline="") as f:
        write_figure(args.which, f)
    logger.info(f"Wrote figure {args.which} data to {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cprank", description="CP rank of binary tree shapes")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_format(p):
        p.add_argument("--format", choices=["csv", "json"], default="csv", help="Output format")
        return p

    p = sub.add_parser("rank", help="Rank of a Newick tree ('-' reads stdin)")
    p.add_argument("newick")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("unrank", help="Newick of the shape with rank k")
    p.add_argument("k", type=int)
    p.set_defaults(func=cmd_unrank)

    p = with_format(sub.add_parser("seq", help="Caterpillar / pseudocaterpillar ranks and counts by height"))
    p.add_argument("which", choices=["c", "d", "height-counts"])
    p.add_argument("--max", type=int, required=True, help="Largest height")
    p.set_defaults(func=cmd_seq)

    p = with_format(sub.add_parser("enumerate", help="All shapes with n leaves"))
    p.add_argument("--leaves", type=int, required=True)
    p.set_defaults(func=cmd_enumerate)

    p = with_format(sub.add_parser("probs", help="Exact per-shape probabilities under a model"))
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--model", type=_model, required=True)
    p.set_defaults(func=cmd_probs)

    p = with_format(sub.add_parser("table", help="Rank, height and all three model probabilities per shape"))
    p.add_argument("--leaves", type=int, required=True)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("moments", help="Exact moments of rank and height")
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--model", type=_model, required=True)
    p.set_defaults(func=cmd_moments)

    p = sub.add_parser("sample", help="Monte Carlo estimates")
    p.add_argument("--model", type=_model, required=True)
    p.add_argument("--leaves", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=cc.DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=None, help="Threads (results do not depend on it)")
    p.add_argument("--histogram", action="store_true", help="Emit the rank histogram as CSV")
    p.add_argument("--height-only", action="store_true", help="Heights only, no shapes built where possible")
    p.set_defaults(func=cmd_sample)

    p = with_format(sub.add_parser("asym", help="Constants and asymptotic formulas"))
    p.add_argument("--what", required=True,
                   choices=["loglog", "pi", "mean-rank", "theta-cdf", "constants", "tightness"])
    p.add_argument("--model", type=_model, default=ModelId.UNIFORM_LABELED)
    p.add_argument("--n-range", type=_n_range, default=None, help="a:b, inclusive")
    p.add_argument("--x", type=float, default=None)
    p.add_argument("--variance", action="store_true", help="mean-rank: pi_n c_{n-1}^2 instead")
    p.add_argument("--count", type=int, default=1000, help="tightness: samples per n")
    p.add_argument("--seed", type=int, default=cc.DEFAULT_SEED)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_asym)

    p = sub.add_parser("figures", help="CSV data for the exact-vs-asymptotic figures")
    p.add_argument("--which", type=int, choices=[1, 2, 3], required=True)
    p.add_argument("--out", default="-", help="Output path, '-' for stdout")
    p.set_defaults(func=cmd_figures)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code is None else e.code

    level = cc.LOG_LEVEL
    if args.verbose == 1:
        level = "INFO"
    elif args.verbose >= 2:
        level = "DEBUG"
    setup_logging(level)

    try:
        args.func(args, sys.stdout)
    except ValueError as e:
        logger.debug("Domain error", exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
