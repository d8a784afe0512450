"""Command-line interface: solve a problem file, run the accuracy
benchmark, the timing harness, or the ablation sweep.

Machine-readable output goes to stdout (or ``--out``); diagnostics go to
stderr.  Exit codes: 0 success, 2 usage or input errors, 3 degenerate
geometry.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import bench, jsonio
from .solver import CollinearPoints, DegenerateInput, SolverConfig, solve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DEGENERATE = 3

# CLI tokens for the solver knobs.
_VARIANT_FLAGS = {"adaptive": "adaptive", "fl": "ferrari_lagrange", "cf": "classical"}
_D3_FLAGS = {"eq14": "s12", "eq15": "s13", "eq16": "s23"}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--gn-iters", type=int, default=2, metavar="K",
                        help="depth refinement iterations (default 2)")
    parser.add_argument("--variant", choices=sorted(_VARIANT_FLAGS), default="adaptive",
                        help="quartic method: adaptive dispatch, fl, or cf")
    parser.add_argument("--no-reindex", action="store_true",
                        help="disable canonical correspondence reordering")
    parser.add_argument("--d3", choices=sorted(_D3_FLAGS), default="eq16",
                        help="which distance equation recovers the depth scale")


def _config_from_args(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        gn_iterations=args.gn_iters,
        force_variant=_VARIANT_FLAGS[args.variant],
        reindex_enabled=not args.no_reindex,
        d3_source=_D3_FLAGS[args.d3],
    )


def _add_bench_flags(parser: argparse.ArgumentParser, with_threads: bool) -> None:
    parser.add_argument("--trials", type=int, default=1_000_000, metavar="N")
    parser.add_argument("--seed", type=int, default=0, metavar="S")
    if with_threads:
        parser.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                            metavar="T", help="worker threads (results are identical "
                            "for any value)")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="write the report here instead of stdout")


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _cmd_solve(args: argparse.Namespace) -> int:
    try:
        with open(args.input, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        problem = jsonio.problem_from_json(text)
    except (ValueError, TypeError) as exc:
        print(f"error: malformed problem file: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        solutions = solve(problem, _config_from_args(args))
    except (DegenerateInput, CollinearPoints) as exc:
        print(f"error: degenerate geometry: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    _emit(jsonio.solutions_to_json(solutions), args.out)
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace) -> int:
    spec = bench.TrialSpec(seed=args.seed)
    report = bench.run_benchmark(
        spec, args.trials, config=_config_from_args(args),
        threads=args.threads, dump_path=args.dump_trials,
    )
    if args.format == "csv":
        _emit(jsonio.report_to_csv(report), args.out)
    else:
        _emit(jsonio.report_to_json(report), args.out)
    return EXIT_OK


def _cmd_time(args: argparse.Namespace) -> int:
    spec = bench.TrialSpec(seed=args.seed)
    stats = bench.run_timing(
        spec, args.trials, repeats=args.repeats, config=_config_from_args(args)
    )
    if args.format == "csv":
        _emit(jsonio.timing_to_csv(stats), args.out)
    else:
        _emit(jsonio.timing_to_json(stats), args.out)
    return EXIT_OK


def _cmd_ablate(args: argparse.Namespace) -> int:
    spec = bench.TrialSpec(seed=args.seed)
    reports = bench.run_ablation(spec, args.trials, threads=args.threads)
    if args.format == "csv":
        _emit(jsonio.ablation_to_csv(reports), args.out)
    else:
        _emit(jsonio.ablation_to_json(reports), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="p3p",
        description="Three-point camera pose solver and synthetic benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve one problem from a JSON file")
    p_solve.add_argument("input", help="path to a problem JSON document")
    p_solve.add_argument("--out", metavar="PATH", default=None)
    _add_config_flags(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_bench = sub.add_parser("bench", help="accuracy benchmark on synthetic problems")
    _add_bench_flags(p_bench, with_threads=True)
    _add_config_flags(p_bench)
    p_bench.add_argument("--dump-trials", metavar="PATH", default=None,
                         help="also write one JSON line per trial (large)")
    p_bench.set_defaults(func=_cmd_bench)

    p_time = sub.add_parser("time", help="timing harness (single-threaded)")
    _add_bench_flags(p_time, with_threads=False)
    _add_config_flags(p_time)
    p_time.add_argument("--repeats", type=int, default=10, metavar="K",
                        help="consecutive solves averaged per problem (default 10)")
    p_time.set_defaults(func=_cmd_time)

    p_ablate = sub.add_parser("ablate", help="benchmark each heuristic variant")
    _add_bench_flags(p_ablate, with_threads=True)
    p_ablate.set_defaults(func=_cmd_ablate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on usage errors and 0 for --help.
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
