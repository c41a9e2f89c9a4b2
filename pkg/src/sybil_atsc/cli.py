"""Command-line front end: run scenarios, solve lane games, lint configs.

Exit codes: 0 on success, 1 when any scenario arm failed to execute,
2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from .game import GameSolverError, build_payoff_matrix, solve_game
from .metrics import reports_to_csv, summarize
from .scenario import ScenarioError, parse_scenario, run_suite
from .traffic_model import validate_network

EXIT_OK = 0
EXIT_ARM_FAILURE = 1
EXIT_USAGE = 2


def _parse_seed_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}: {exc}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sybil-atsc",
        description="Traffic-signal lab: phantom-vehicle attacks and game-based filtering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seeds", type=_parse_seed_list, default=None,
                       help="comma-separated seed list (default: scenario file, "
                            "then SYBIL_ATSC_SEED, then 1..10)")
        p.add_argument("--out-dir", type=Path, default=None,
                       help="write reports.csv and summary.txt here")
        p.add_argument("--parallelism", type=int, default=1)
        p.add_argument("--format", choices=("csv", "table"), default="table")

    p_run = sub.add_parser("run", help="run one scenario file")
    p_run.add_argument("scenario", type=Path)
    add_common(p_run)

    p_suite = sub.add_parser("suite", help="run every scenario in files/directories")
    p_suite.add_argument("paths", type=Path, nargs="+")
    add_common(p_suite)

    p_solve = sub.add_parser(
        "solve-game", help="solve the lane game from a theta/flow CSV"
    )
    p_solve.add_argument("csv_file", type=Path,
                         help="CSV with header lane,theta_vps,f_vps")
    p_solve.add_argument("--format", choices=("csv", "table"), default="table")

    p_val = sub.add_parser("validate", help="lint scenario files and their networks")
    p_val.add_argument("scenarios", type=Path, nargs="+")
    return parser


def _collect_scenarios(paths) -> list[Path]:
    files: list[Path] = []
    for path in paths:
        if path.is_dir():
            files.extend(sorted(path.glob("*.scn")))
        else:
            files.append(path)
    return files


def _emit_reports(reports, args) -> None:
    csv_text = reports_to_csv(reports)
    summary = summarize(reports)
    if args.out_dir is not None:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        (args.out_dir / "reports.csv").write_text(csv_text)
        (args.out_dir / "summary.txt").write_text(summary)
    if args.format == "csv":
        sys.stdout.write(csv_text)
    else:
        sys.stdout.write(summary)


def _cmd_run_or_suite(args, paths) -> int:
    files = _collect_scenarios(paths)
    if not files:
        print("no scenario files found", file=sys.stderr)
        return EXIT_USAGE
    try:
        configs = [parse_scenario(f) for f in files]
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        reports, _csv_text, _summary = run_suite(
            configs, parallelism=args.parallelism, seeds=args.seeds
        )
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # an arm blew up mid-run
        print(f"arm failure: {exc}", file=sys.stderr)
        return EXIT_ARM_FAILURE
    _emit_reports(reports, args)
    return EXIT_OK


def _cmd_solve_game(args) -> int:
    try:
        with args.csv_file.open(newline="") as handle:
            reader = csv.DictReader(handle)
            required = {"lane", "theta_vps", "f_vps"}
            if reader.fieldnames is None or set(reader.fieldnames) != required:
                print(
                    f"error: {args.csv_file}: header must be lane,theta_vps,f_vps",
                    file=sys.stderr,
                )
                return EXIT_USAGE
            lanes, theta, flows = [], [], []
            for row in reader:
                lanes.append(row["lane"])
                theta.append(float(row["theta_vps"]))
                flows.append(float(row["f_vps"]))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not lanes:
        print("error: no lanes in input", file=sys.stderr)
        return EXIT_USAGE
    try:
        solution = solve_game(build_payoff_matrix(theta, flows))
    except (GameSolverError, ValueError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_ARM_FAILURE
    if args.format == "csv":
        sys.stdout.write("lane,alpha,beta\n")
        for lane, a, b in zip(lanes, solution.attacker.probs, solution.defender.probs):
            sys.stdout.write(f"{lane},{a:.6f},{b:.6f}\n")
        sys.stdout.write(f"value,{solution.value:.6f},{solution.value:.6f}\n")
    else:
        width = max(len(l) for l in lanes + ["lane"])
        print(f"{'lane':<{width}}  {'alpha':>8}  {'beta':>8}")
        for lane, a, b in zip(lanes, solution.attacker.probs, solution.defender.probs):
            print(f"{lane:<{width}}  {a:>8.4f}  {b:>8.4f}")
        print(f"game value: {solution.value:.6f}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    status = EXIT_OK
    for path in _collect_scenarios(args.scenarios):
        try:
            config = parse_scenario(path)
            network = config.build_network()
            problems = validate_network(network)
        except ScenarioError as exc:
            print(f"{path}: INVALID: {exc}")
            status = EXIT_USAGE
            continue
        if problems:
            for problem in problems:
                print(f"{path}: INVALID: {problem}")
            status = EXIT_USAGE
        else:
            print(f"{path}: ok ({config.name}, {len(network.lanes())} lanes)")
    return status


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run_or_suite(args, [args.scenario])
    if args.command == "suite":
        return _cmd_run_or_suite(args, args.paths)
    if args.command == "solve-game":
        return _cmd_solve_game(args)
    if args.command == "validate":
        return _cmd_validate(args)
    parser.error(f"unknown command {args.command!r}")
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
