"""Command line interface.

Subcommands:

    qentropy verify --suite inequalities --dim 6 --trials 200 --seed 42
    qentropy channel analyze '{"family": "example1", "alpha": 0.693147}' --criterion b
    qentropy roof eof state.json --split 2,2 --m 16 --starts 64
    qentropy bound continuity --C 0 --ranks 1,1 --eps 1

Exit codes: 0 all checks passed, 1 suite failures, 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pce, roof
from .channels import family_from_channel, family_from_json
from .harness import DEFAULT_SCHEDULE, SUITE_NAMES, SuiteConfig, run_suite
from .linalg import matrix_from_json


def _int_list(text: str):
    return [int(x) for x in text.split(",") if x]


def _load_json_arg(text: str) -> dict:
    text = text.strip()
    if text.startswith("{"):
        return json.loads(text)
    return json.loads(Path(text).read_text())


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qentropy")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("--suite", required=True, choices=SUITE_NAMES)
    verify.add_argument("--dim", type=_int_list, default=[4])
    verify.add_argument("--trials", type=int, default=100)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--tol", type=float, default=1e-8)
    verify.add_argument("--schedule", type=_int_list, default=list(DEFAULT_SCHEDULE))
    verify.add_argument("--format", choices=("json", "text"), default="json")
    verify.add_argument("--out", default=None)
    verify.add_argument("--jobs", type=int, default=1)

    channel = sub.add_parser("channel", help="channel analysis")
    channel_sub = channel.add_subparsers(dest="channel_command", required=True)
    analyze = channel_sub.add_parser("analyze", help="Kraus criteria for a channel or family")
    analyze.add_argument("spec", help="channel JSON, family JSON, or a path to either")
    analyze.add_argument("--criterion", choices=("a", "b", "c"), default=None)
    analyze.add_argument("--h-seq", default="2lnk")
    analyze.add_argument("--schedule", type=_int_list, default=list(DEFAULT_SCHEDULE))
    analyze.add_argument("--starts", type=int, default=16)
    analyze.add_argument("--seed", type=int, default=0)

    roof_cmd = sub.add_parser("roof", help="ensemble optimizations")
    roof_sub = roof_cmd.add_subparsers(dest="roof_command", required=True)
    eof_cmd = roof_sub.add_parser("eof", help="entanglement of formation")
    eof_cmd.add_argument("state", help="density matrix JSON or a path to one")
    eof_cmd.add_argument("--split", type=_int_list, required=True)
    eof_cmd.add_argument("--m", type=int, default=None)
    eof_cmd.add_argument("--starts", type=int, default=32)
    eof_cmd.add_argument("--seed", type=int, default=0)

    bound = sub.add_parser("bound", help="closed-form bounds")
    bound_sub = bound.add_subparsers(dest="bound_command", required=True)
    cont = bound_sub.add_parser("continuity", help="entropy continuity bound")
    cont.add_argument("--C", type=float, required=True)
    cont.add_argument("--ranks", type=_int_list, required=True)
    cont.add_argument("--eps", type=float, required=True)

    return parser


def _cmd_verify(args) -> int:
    config = SuiteConfig(
        suite=args.suite,
        dims=args.dim,
        trials=args.trials,
        seed=args.seed,
        tol=args.tol,
        n_schedule=args.schedule,
        output_path=args.out,
    )
    report = run_suite(config, jobs=args.jobs)
    text = report.dumps() if args.format == "json" else report.to_text()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    return 0 if report.failures == 0 else 1


def _cmd_analyze(args) -> int:
    spec = _load_json_arg(args.spec)
    if "family" in spec:
        fam = family_from_json(spec)
        if "N" in spec and args.schedule == list(DEFAULT_SCHEDULE):
            schedule = [int(spec["N"])]
        else:
            schedule = args.schedule
    elif "kraus" in spec:
        from .channels import channel_from_json

        fam = family_from_channel(channel_from_json(spec))
        schedule = args.schedule
    else:
        raise ValueError("spec must contain a 'family' or 'kraus' key")

    wanted = [args.criterion] if args.criterion else ["b", "c"]
    reports = []
    for crit in wanted:
        if crit == "a":
            rep = pce.criterion_a_report(fam, schedule, n_starts=args.starts, seed=args.seed)
        elif crit == "b":
            rep = pce.criterion_b_report(fam, schedule)
        else:
            rep = pce.criterion_c_report(fam, args.h_seq, schedule)
        reports.append(rep.to_json())
    print(json.dumps({"family": fam.name, "reports": reports}, sort_keys=True, indent=2))
    return 0


def _cmd_eof(args) -> int:
    rho = matrix_from_json(_load_json_arg(args.state))
    if len(args.split) != 2:
        raise ValueError("--split expects two comma-separated dimensions")
    result = roof.eof(rho, tuple(args.split), m=args.m, n_starts=args.starts, seed=args.seed)
    print(json.dumps(result.to_json(), sort_keys=True, indent=2))
    return 0


def _cmd_continuity(args) -> int:
    if len(args.ranks) != 2:
        raise ValueError("--ranks expects two comma-separated integers")
    value = pce.continuity_bound(args.C, args.ranks[0], args.ranks[1], args.eps)
    print(f"{value:.6f}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        if args.command == "channel":
            return _cmd_analyze(args)
        if args.command == "roof":
            return _cmd_eof(args)
        if args.command == "bound":
            return _cmd_continuity(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
