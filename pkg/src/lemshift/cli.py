"""Command line entry point.

    lemshift run <scenario.json> [--out DIR] [--depth D] [--degree N]
    lemshift list
    lemshift describe <op>

`run` accepts either a path to a scenario JSON file or the name of a
shipped scenario. Exit status: 0 when every expectation passes, 1 when an
expectation fails or a diagnostic raises, 2 for scenario parse/validation
errors or an unknown op name.

Numerics are plain numpy; cap BLAS threads with OMP_NUM_THREADS if the
runs must not oversubscribe a shared machine.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .runner import describe, known_ops, run_scenario
from .scenarios import ScenarioError, shipped_scenarios

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lemshift",
        description=(
            "Orthonormal polynomials and Hessenberg shift sections for "
            "measures on polynomial lemniscates. Thread count follows "
            "OMP_NUM_THREADS."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser(
        "run", help="execute a scenario JSON and write a report directory"
    )
    p_run.add_argument(
        "scenario", help="path to a scenario file, or a shipped scenario name"
    )
    p_run.add_argument(
        "--out",
        default=None,
        help="output directory (default: ./out/<scenario-name>)",
    )
    p_run.add_argument(
        "--depth", type=int, default=None, help="override quadrature cell_depth"
    )
    p_run.add_argument(
        "--degree", type=int, default=None, help="override basis degree N"
    )

    sub.add_parser("list", help="list shipped scenarios and diagnostic ops")

    p_desc = sub.add_parser("describe", help="explain one diagnostic op")
    p_desc.add_argument("op", help="diagnostic op name (see: lemshift list)")
    return parser


def _cmd_run(args) -> int:
    source = args.scenario
    if args.out is None:
        stem = Path(source).stem if source.endswith(".json") else source
        out_dir = Path("out") / stem
    else:
        out_dir = Path(args.out)
    try:
        run = run_scenario(source, out_dir, depth=args.depth, degree=args.degree)
    except ScenarioError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"scenario error: {exc}", file=sys.stderr)
        return 2

    rep = run.report
    print(f"scenario: {run.scenario_name}")
    env = rep["environment"]
    print(
        f"measure: {env['n_nodes']} nodes, {env['n_atoms']} atoms, "
        f"total mass {env['total_mass']:.6g}"
    )
    n_err = 0
    for diag in rep["diagnostics"]:
        if diag["error"] is not None:
            n_err += 1
            print(f"  diagnostic {diag['id']} ({diag['op']}): ERROR {diag['error']}")
    for exp in rep["expectations"]:
        verdict = "PASS" if exp["passed"] else "FAIL"
        shown = exp["measured"]
        if isinstance(shown, float):
            shown = f"{shown:.6g}"
        detail = f"measured={shown} target={exp['target']} kind={exp['kind']}"
        if exp.get("note"):
            detail += f" ({exp['note']})"
        print(f"  {verdict} {exp['quantity']}: {detail}")
    print(f"report: {run.out_dir / 'report.json'}")
    print("verdict: PASS" if rep["passed"] else "verdict: FAIL")
    return 0 if rep["passed"] else 1


def _cmd_list() -> int:
    print("shipped scenarios:")
    for name in shipped_scenarios():
        print(f"  {name}")
    print("diagnostic ops:")
    for op in known_ops():
        print(f"  {op}")
    return 0


def _cmd_describe(op: str) -> int:
    try:
        text = describe(op)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    print(f"{op}:")
    print(f"  {text}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "list":
        return _cmd_list()
    return _cmd_describe(args.op)


if __name__ == "__main__":
    sys.exit(main())
