"""Command-line front end: parse a dataset, solve, rank, and emit reports.

Subcommands
-----------
solve
    Solve the requested model family and print its score table. ``--model
    relational`` gives the overall/stage-1/stage-2 table, ``ccr`` the plain
    CCR column, ``both`` (default) both tables side by side.
compare
    Both tables plus the Spearman rank correlation between the overall and
    CCR rankings.
rank
    Rank columns only, scores omitted.
validate
    Parse and validate the dataset, print its dimensions, solve nothing.

Exit codes: 0 success, 2 usage errors, 3 dataset errors (parse,
validation, schema, unreadable file), 4 solver failures. Diagnostics go to
stderr, reports to stdout or the ``--out`` file. ``NETDEA_EPSILON`` in the
environment overrides the default of ``--epsilon``; the flag wins.
"""

from __future__ import annotations

import argparse
import os
import sys

from .analysis import build_report
from .dataset_io import load_dataset, render_report
from .errors import (
    ConfigurationError,
    DatasetFormatError,
    DecompositionError,
    DmuSolveError,
    NetdeaError,
    SolverFailureError,
)
from .models import SolverConfig, StagePriority, run_full_analysis

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_SOLVER = 4

_SOLVER_ERRORS = (SolverFailureError, ConfigurationError, DecompositionError,
                  DmuSolveError)

_SECTIONS_BY_MODEL = {
    "both": ("relational", "ccr"),
    "relational": ("relational",),
    "ccr": ("ccr",),
}

_PRIORITY_BY_FLAG = {
    "first": StagePriority.FIRST_STAGE,
    "second": StagePriority.SECOND_STAGE,
}


def _epsilon_value(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid epsilon {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(
            f"epsilon must be in the open interval (0, 1), got {text}"
        )
    return value


def _add_common_flags(parser: argparse.ArgumentParser, with_model: bool):
    parser.add_argument("--data", required=True, metavar="PATH",
                        help="dataset file (csv with id,name,x*,z*,y* header)")
    if with_model:
        parser.add_argument("--model", choices=sorted(_SECTIONS_BY_MODEL),
                            default="both", help="model family to report")
    parser.add_argument("--stage-priority", choices=sorted(_PRIORITY_BY_FLAG),
                        default="second", dest="stage_priority",
                        help="stage whose efficiency is maximized when "
                             "splitting the relational score (default second)")
    parser.add_argument("--epsilon", type=_epsilon_value,
                        default=os.environ.get("NETDEA_EPSILON", "1e-6"),
                        help="lower bound on every multiplier weight "
                             "(default 1e-6, or NETDEA_EPSILON)")
    parser.add_argument("--format", choices=("table", "csv", "json"),
                        default="table", dest="output_format",
                        help="report format (default table)")
    parser.add_argument("--out", metavar="PATH", dest="output_path",
                        help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netdea",
        description="Two-stage relational network DEA efficiency solver.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    solve = sub.add_parser("solve", help="solve and print score tables")
    _add_common_flags(solve, with_model=True)

    compare = sub.add_parser(
        "compare", help="relational and CCR tables plus rank correlation"
    )
    _add_common_flags(compare, with_model=False)

    rank = sub.add_parser("rank", help="print rank columns only")
    _add_common_flags(rank, with_model=True)

    validate = sub.add_parser("validate", help="check a dataset, solve nothing")
    validate.add_argument("--data", required=True, metavar="PATH",
                          help="dataset file to validate")
    return parser


def _plural(count: int, noun: str) -> str:
    return f"{count} {noun}" + ("" if count == 1 else "s")


def _emit(text: str, output_path):
    if output_path:
        with open(output_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _config_from(args) -> SolverConfig:
    return SolverConfig(
        epsilon=args.epsilon,
        stage_priority=_PRIORITY_BY_FLAG[args.stage_priority],
    )


def _report_for(args):
    data = load_dataset(args.data)
    cfg = _config_from(args)
    relational, ccr = run_full_analysis(data, cfg)
    return build_report(relational, ccr, cfg)


def _run(args) -> int:
    if args.subcommand == "validate":
        data = load_dataset(args.data)
        line = ", ".join([
            _plural(data.n, "DMU"),
            _plural(data.m, "input"),
            _plural(data.p, "intermediate"),
            _plural(data.s, "output"),
        ])
        sys.stdout.write(line + "\n")
        return EXIT_OK

    report = _report_for(args)
    if args.subcommand == "solve":
        text = render_report(report, args.output_format,
                             sections=_SECTIONS_BY_MODEL[args.model],
                             include_rho=False)
    elif args.subcommand == "compare":
        text = render_report(report, args.output_format, include_rho=True)
    else:  # rank
        text = render_report(report, args.output_format,
                             sections=_SECTIONS_BY_MODEL[args.model],
                             include_rho=False, ranks_only=True)
    _emit(text, args.output_path)
    return EXIT_OK


def _describe(exc: Exception) -> str:
    if isinstance(exc, DmuSolveError):
        return f"solving DMU {exc.dmu_id} failed: {exc}"
    if isinstance(exc, DatasetFormatError):
        where = []
        if exc.row is not None:
            where.append(f"row {exc.row}")
        if exc.column is not None:
            where.append(f"column {exc.column}")
        if exc.role is not None:
            where.append(f"role {exc.role}")
        location = f" ({', '.join(where)})" if where else ""
        return f"dataset error{location}: {exc}"
    return str(exc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except DatasetFormatError as exc:
        print(f"netdea: {_describe(exc)}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"netdea: cannot read data file: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _SOLVER_ERRORS as exc:
        print(f"netdea: {_describe(exc)}", file=sys.stderr)
        return EXIT_SOLVER
    except NetdeaError as exc:
        print(f"netdea: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
