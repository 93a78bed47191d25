"""Command line: ``bipedrrt plan <scenario> [options]``.

Exit codes: 0 solved, 2 no solution within the budget, 1 bad input.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from .cli_io import FORMATS, LAYERS, ScenarioError, default_out_dir, export, load_scenario, with_overrides

EXIT_SOLVED, EXIT_INPUT, EXIT_NO_SOLUTION = 0, 1, 2


def _csv_choice(allowed):
    def parse(text: str) -> List[str]:
        items = [t.strip() for t in text.split(",") if t.strip()]
        bad = [t for t in items if t not in allowed]
        if bad:
            raise argparse.ArgumentTypeError(f"unknown value(s) {bad}; choose from {list(allowed)}")
        return items
    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bipedrrt", description="Kinodynamic footstep planner")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("plan", help="plan a route for a scenario file")
    p.add_argument("scenario", help="scenario json file")
    p.add_argument("--seed", type=int, help="override the RNG seed")
    p.add_argument("--rewire-iters", type=int, help="override the rewiring budget")
    p.add_argument("--goal-bias", type=float, help="override the goal sampling probability")
    p.add_argument("--k", type=int, help="override the number of candidate parents")
    p.add_argument("--max-iters", type=int, help="override the tree-growth budget")
    p.add_argument("--workers", type=int, default=1, help="threads for candidate propagation")
    p.add_argument("--out", help=f"output directory (default: ${{BIPEDRRT_OUT_DIR}} or ./bipedrrt_out)")
    p.add_argument("--formats", type=_csv_choice(FORMATS), default=list(FORMATS),
                   help="comma-separated subset of json,csv,svg")
    p.add_argument("--dt", type=float, default=0.01, help="CoM sampling period in seconds")
    p.add_argument("--layers", type=_csv_choice(LAYERS), default=list(LAYERS),
                   help="comma-separated svg layers: " + ",".join(LAYERS))
    p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if not args.dt > 0.0:
        print("error: --dt must be positive", file=sys.stderr)
        return EXIT_INPUT
    try:
        scenario = load_scenario(args.scenario)
        scenario = with_overrides(
            scenario, rng_seed=args.seed, rewire_iterations=args.rewire_iters,
            goal_bias=args.goal_bias, k_nearest=args.k, max_iterations=args.max_iters,
            workers=args.workers,
        )
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    result = scenario.make_planner().plan()
    out_dir = args.out or default_out_dir()
    try:
        paths = export(scenario, result, out_dir, args.formats, args.dt, args.layers)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    d = result.diagnostics
    if result.success:
        sol = result.solution
        print(f"solved: {sol.steps} steps, {sol.duration:.3f} s walking, "
              f"{d.tree_size} tree nodes, {d.iterations} iterations")
    else:
        print(f"no solution found after {d.iterations} iterations ({d.tree_size} tree nodes)")
    for p in paths:
        print(f"wrote {p}")
    return EXIT_SOLVED if result.success else EXIT_NO_SOLUTION


if __name__ == "__main__":
    sys.exit(main())
