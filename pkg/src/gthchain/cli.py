"""Command-line front end.

Exit status: 0 on success, 1 for bad input (malformed file, unknown
family, invalid subset, reducible chain), 2 for numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import benchmark, families
from .censoring import censor, first_entry_probability, visits_expected
from .core import is_irreducible, parse_subset
from .errors import NumericalError, ValidationError
from .gth import gth_forward, gth_solve
from .rg import format_rg, reconstruction_residual, rg_factorize
from .stmx import format_stmx, format_vector_csv, read_stmx, write_atomic
from .truncation import censored_truncation, compare_augmentations, parse_strategy

DEFAULT_STRATEGIES = "censored,last,first,uniform,linear:0.5"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def _positive_float(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return v


def _common(p, source=True):
    if source:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--input", metavar="PATH", help="matrix file (.stmx)")
        src.add_argument("--family", metavar="ID", help="family id, e.g. random:n=6 or bd:p=0.3")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=_positive_float, default=1e-12)
    p.add_argument("--N", type=_int_list, metavar="LIST", help="state counts, e.g. 5,10,20")
    p.add_argument("--normalize", action="store_true", help="rescale rows of input files to sum to one")


def build_parser():
    parser = _Parser(prog="gthchain", description="Stationary distributions via GTH elimination.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("solve", help="stationary distribution as CSV")
    _common(p)

    p = sub.add_parser("censor", help="censor a chain to a subset of states")
    _common(p)
    p.add_argument("--subset", required=True, metavar="E", help='e.g. "E=1,2,5" or "E=1..4"')

    p = sub.add_parser("factorize", help="RG-factorization of I - P")
    _common(p)

    p = sub.add_parser("interpret", help="excursion quantities of one elimination level")
    _common(p)
    p.add_argument("--level", type=int, required=True, metavar="n")

    p = sub.add_parser("truncate-compare", help="compare augmentations of a countable chain")
    _common(p, source=False)
    p.add_argument("--family", required=True, metavar="ID", help="countable family, e.g. bd:p=0.3")
    p.add_argument("--strategies", default=DEFAULT_STRATEGIES, metavar="LIST")
    p.add_argument("--omega-cap", type=int, metavar="INT", help="largest outer size (default 1024*N)")
    p.add_argument("--no-timing", action="store_true", help="write 0 in runtime columns")

    p = sub.add_parser("stability-bench", help="GTH vs naive elimination against the exact oracle")
    _common(p, source=False)
    p.add_argument("--family", default="ncd", choices=("ncd", "random"))
    p.add_argument("--eps", type=_float_list, default=[1e-4, 1e-8, 1e-12], metavar="LIST")
    p.add_argument("--compensated", action="store_true")
    p.add_argument("--no-timing", action="store_true", help="write 0 in runtime columns")
    return parser


def _load_matrix(args) -> np.ndarray:
    if args.input:
        return read_stmx(args.input, normalize=args.normalize)
    name, _ = families.parse_family_id(args.family)
    if name in families.COUNTABLE:
        if not args.N or len(args.N) != 1:
            raise ValidationError("a countable family needs exactly one --N")
        spec = families.countable_family(args.family)
        return censored_truncation(spec, args.N[0], ctol=args.tol).matrix
    return families.to_float(families.finite_family(args.family, args.seed))


def _solve(args):
    pi = gth_solve(_load_matrix(args))
    if args.format == "json":
        return json.dumps({"state": list(range(1, pi.size + 1)), "probability": pi.tolist()}) + "\n"
    return format_vector_csv(pi)


def _censor(args):
    m = _load_matrix(args)
    part = parse_subset(args.subset, m.shape[0])
    out = censor(m, part)
    if args.format == "json":
        return json.dumps({"states": list(part.census), "matrix": out.tolist()}) + "\n"
    return format_stmx(out, comment="states " + ",".join(map(str, part.census)))


def _factorize(args):
    m = _load_matrix(args)
    f = rg_factorize(m)
    res = reconstruction_residual(m, f)
    if args.format == "json":
        doc = {"R": f.R.tolist(), "PSI": f.psi.tolist(), "G": f.G.tolist(), "reconstruction_residual": res}
        return json.dumps(doc) + "\n"
    return format_rg(f, residual=res)


def _interpret(args):
    m = _load_matrix(args)
    if not is_irreducible(m):
        raise ValidationError("interpret needs an irreducible chain")
    n = args.level
    tr = gth_forward(m, keep_levels=True)
    if not 2 <= n <= tr.n:
        raise ValidationError(f"--level must lie in 2..{tr.n}")
    lower = range(1, n)
    rows = [("1", n, n, visits_expected(m, n, n, tr))]
    rows += [("2", i, n, visits_expected(m, n, i, tr)) for i in lower]
    rows += [("3", n, j, first_entry_probability(m, n, n, j, tr)) for j in lower]
    rows += [("4", i, j, first_entry_probability(m, n, i, j, tr)) for i in lower for j in lower]
    rows += [("5", i, j, float(tr.level(n - 1)[i - 1, j - 1])) for i in lower for j in lower]
    if args.format == "json":
        return json.dumps([{"quantity": q, "from": a, "to": b, "value": v} for q, a, b, v in rows]) + "\n"
    lines = ["quantity,from,to,value"] + [f"{q},{a},{b},{v:.12g}" for q, a, b, v in rows]
    return "\n".join(lines) + "\n"


def _truncate_compare(args):
    spec = families.countable_family(args.family)
    Ns = args.N or [5, 10, 20, 40]
    strategies = [parse_strategy(s) for s in args.strategies.split(",") if s.strip()]
    report = compare_augmentations(spec, Ns, strategies, ctol=args.tol, omega_cap=args.omega_cap)
    for strat, n, why in report.skipped:
        print(f"skipped {strat} at N={n}: {why}", file=sys.stderr)
    timing = not args.no_timing
    return report.to_json(timing) if args.format == "json" else report.to_csv(timing)


def _stability_bench(args):
    sizes = args.N or [4, 8, 16]
    rows = benchmark.stability_benchmark(args.family, sizes, args.eps, args.seed, args.compensated)
    timing = not args.no_timing
    return benchmark.benchmark_json(rows, timing) if args.format == "json" else benchmark.benchmark_csv(rows, timing)


COMMANDS = {
    "solve": _solve,
    "censor": _censor,
    "factorize": _factorize,
    "interpret": _interpret,
    "truncate-compare": _truncate_compare,
    "stability-bench": _stability_bench,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None):
    sys.exit(run(argv))
