"""Command-line benchmark driver emitting the semicolon CSV metric table."""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

from .bench import ExperimentConfig, ExperimentResult, run_experiment, write_report
from .candidates import CandidateKind, build_candidate_sets
from .errors import LkgainError
from .gains import GainKind
from .oracle import HELD_KARP_LIMIT, held_karp_optimum
from .tsplib import parse_tsplib, read_optima


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lkgain",
        description="Tour-improvement benchmark over TSPLIB instances "
        "with selectable gain-criterion policies.",
    )
    parser.add_argument(
        "--instance",
        action="append",
        required=True,
        metavar="PATH",
        help="TSPLIB .tsp file or a directory of them (repeatable)",
    )
    parser.add_argument("--optima", metavar="PATH", help="optimum registry file (name cost)")
    parser.add_argument("--runs", type=int, default=10, help="independent runs per instance")
    parser.add_argument("--seed", type=int, default=1, help="base random seed")
    parser.add_argument("--trials", type=int, default=None, help="trials per run (default: n)")
    parser.add_argument("--max-candidates", type=int, default=5, help="candidate list length")
    parser.add_argument(
        "--candidate-set",
        choices=[k.value for k in CandidateKind],
        default=CandidateKind.ALPHA.value,
        help="candidate generation scheme",
    )
    parser.add_argument(
        "--gain-criterion",
        action="append",
        choices=[k.value for k in GainKind],
        help="gain policy; repeatable, default: all three",
    )
    parser.add_argument("--time-limit", type=float, default=None, help="seconds per run")
    parser.add_argument(
        "--stop-at-optimum",
        action="store_true",
        help="end a run once the known optimum is reached",
    )
    parser.add_argument("--max-depth", type=int, default=5, help="exchange depth cap k")
    parser.add_argument("--feasibility-period", type=int, default=5, help="close-up period r")
    parser.add_argument("--out", metavar="CSV_PATH", required=True, help="output CSV path")
    parser.add_argument(
        "--oracle",
        action="store_true",
        help=f"solve instances with n <= {HELD_KARP_LIMIT} exactly and report true gaps",
    )
    parser.add_argument(
        "--validate",
        action="store_true",
        help="audit tour invariants after every applied exchange (slow)",
    )
    return parser


def _collect_instance_paths(entries: list[str]) -> list[Path]:
    paths: list[Path] = []
    for entry in entries:
        p = Path(entry)
        if p.is_dir():
            paths.extend(sorted(p.glob("*.tsp")))
        else:
            paths.append(p)
    return paths


def cli_main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.runs < 1:
        parser.error("--runs must be >= 1")
    if args.trials is not None and args.trials < 1:
        parser.error("--trials must be >= 1")
    if args.seed < 0:
        parser.error("--seed must be >= 0")
    if args.max_candidates < 1:
        parser.error("--max-candidates must be >= 1")
    if args.max_depth < 2:
        parser.error("--max-depth must be >= 2")
    if args.feasibility_period < 1:
        parser.error("--feasibility-period must be >= 1")
    if args.time_limit is not None and args.time_limit <= 0:
        parser.error("--time-limit must be positive")

    policies = [GainKind(v) for v in args.gain_criterion] if args.gain_criterion else list(GainKind)
    kind = CandidateKind(args.candidate_set)

    optima: dict[str, int] = {}
    if args.optima:
        try:
            optima = read_optima(Path(args.optima).read_text())
        except (OSError, LkgainError) as exc:
            print(f"error: cannot read optima registry: {exc}", file=sys.stderr)
            return 1

    instance_paths = _collect_instance_paths(args.instance)
    if not instance_paths:
        print("error: no instances found", file=sys.stderr)
        return 1

    results: list[ExperimentResult] = []
    for path in instance_paths:
        try:
            inst = parse_tsplib(path.read_text())
        except (OSError, LkgainError) as exc:
            print(f"error: {path}: {exc}", file=sys.stderr)
            return 1
        optimum = optima.get(inst.name)
        if optimum is None and args.oracle and inst.dimension <= HELD_KARP_LIMIT:
            optimum = held_karp_optimum(inst).optimum
        if optimum is not None:
            inst = replace(inst, known_optimum=optimum)
        prep_start = time.perf_counter()
        cands = build_candidate_sets(inst, kind, args.max_candidates)
        print(
            f"{inst.name} n={inst.dimension} candidate preprocessing "
            f"{time.perf_counter() - prep_start:.3f}s",
            file=sys.stderr,
        )
        for policy in policies:
            cfg = ExperimentConfig(
                runs=args.runs,
                max_candidates=args.max_candidates,
                candidate_kind=kind,
                gain_policy=policy,
                seed=args.seed,
                time_limit=args.time_limit,
                stop_at_optimum=args.stop_at_optimum,
                trials_per_run=args.trials,
                max_depth=args.max_depth,
                feasibility_period=args.feasibility_period,
                validate=args.validate,
            )
            try:
                report = run_experiment(inst, cfg, cands=cands)
            except LkgainError as exc:
                print(f"error: {inst.name} [{policy.value}]: {exc}", file=sys.stderr)
                return 1
            results.append(ExperimentResult(inst.name, policy.value, kind.value, report))
            print(
                f"{inst.name} n={inst.dimension} policy={policy.value} "
                f"cost_min={report.cost_min} time_avg={report.time_avg:.3f}s",
                file=sys.stderr,
            )
    try:
        write_report(results, args.out)
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
