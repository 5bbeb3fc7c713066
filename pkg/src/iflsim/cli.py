"""Command-line interface.

    iflsim run <preset-or-file> [--seed N] [--report text|json]
    iflsim matrix [--seed N] [--report text|json] [--out DIR]
    iflsim list
    iflsim profiles [--seed N]
"""

from __future__ import annotations

import argparse
import json
import sys

from . import catalog
from .harness import (
    Scenario,
    ScenarioInvalid,
    compare_profiles,
    run_matrix,
    run_scenario,
)


def _load_scenario(spec: str) -> Scenario:
    if spec in catalog.PRESETS:
        return catalog.preset(spec)
    try:
        with open(spec) as fh:
            data = json.load(fh)
    except OSError:
        raise SystemExit(
            f"error: {spec!r} is neither a preset nor a readable file; "
            f"see `iflsim list`")
    except json.JSONDecodeError as exc:
        raise SystemExit(f"error: {spec}: invalid JSON: {exc}")
    try:
        return Scenario.from_dict(data)
    except ScenarioInvalid as exc:
        raise SystemExit(f"error: {spec}: invalid scenario: {exc}")


def _cmd_run(args) -> int:
    scenario = _load_scenario(args.scenario)
    report = run_scenario(scenario, seed=args.seed)
    if args.report == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    if report.expected_match is False:
        return 1
    return 0


def _cmd_matrix(args) -> int:
    report = run_matrix(seed=args.seed)
    if args.report == "json":
        print(report.to_json())
    else:
        print(report.to_text())
    if args.out:
        from .report import write_matrix_outputs

        paths = write_matrix_outputs(report, args.out)
        for kind in sorted(paths):
            print(f"wrote {paths[kind]}", file=sys.stderr)
    return 0


def _cmd_list(_args) -> int:
    width = max(len(n) for n in catalog.preset_names()) + 2
    for name in catalog.preset_names():
        klass = catalog.ATTACK_CLASS.get(name, "?")
        expected = catalog.PRESETS[name].get("expected", {})
        verdict = expected.get("verdict", "?")
        print(f"{name.ljust(width)}{klass.ljust(22)}expected: {verdict}")
    return 0


def _cmd_profiles(args) -> int:
    for entry in compare_profiles(seed=args.seed):
        print(f"{entry['implication']}: {entry['preset']}")
        print(f"  android_like: {entry['android_like']}")
        print(f"  ios_like:     {entry['ios_like']}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iflsim",
        description="Deterministic simulator of indirect file leaks "
                    "through deputy apps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one scenario (preset name or "
                                       "JSON file) and print its report")
    p_run.add_argument("scenario")
    p_run.add_argument("--seed", type=int, default=0)
    p_run.add_argument("--report", choices=("text", "json"), default="text")
    p_run.set_defaults(func=_cmd_run)

    p_matrix = sub.add_parser(
        "matrix", help="run every matrix preset under every mitigation")
    p_matrix.add_argument("--seed", type=int, default=0)
    p_matrix.add_argument("--report", choices=("text", "json"), default="text")
    p_matrix.add_argument("--out", metavar="DIR",
                          help="also write matrix.tsv, matrix.json and "
                               "matrix.png under DIR")
    p_matrix.set_defaults(func=_cmd_matrix)

    p_list = sub.add_parser("list", help="list bundled scenario presets")
    p_list.set_defaults(func=_cmd_list)

    p_prof = sub.add_parser(
        "profiles", help="show behavioral differences between the "
                         "android-like and ios-like platform profiles")
    p_prof.add_argument("--seed", type=int, default=0)
    p_prof.set_defaults(func=_cmd_profiles)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
