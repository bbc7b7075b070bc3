"""``hiermap run <scenario>`` command line.

Exit codes: 0 on success, 2 for configuration problems, 3 for numerical
failure.  Everything else (I/O errors carry their path in the message) is
left to traceback, since it indicates a bug rather than bad input.
"""

from __future__ import annotations

import argparse
import sys

from ..errors import ConfigError, EvaluationError, NumericalError
from .config import SCENARIOS, load_run_config
from .runner import run_scenario


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hiermap",
        description="Run a hierarchical-estimation scenario and write CSV/SVG artifacts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="execute one scenario")
    run.add_argument("scenario", help=f"one of: {', '.join(SCENARIOS)}")
    run.add_argument("--config", help="TOML config file")
    run.add_argument("--seed", type=int, help="base seed (replicate r uses seed + r)")
    run.add_argument("--out", help="output directory")
    run.add_argument("--replicates", type=int, help="number of replicates")
    run.add_argument("--profile", choices=("ci", "full"),
                     help="default-set profile (ci is small, full matches the figures)")
    run.add_argument("--grid", type=int, help="optimizer grid points per dimension")
    run.add_argument("--tol", type=float, help="optimizer theta tolerance")
    run.add_argument("--max-evals", type=int, help="optimizer evaluation budget")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = load_run_config(
            args.scenario, args.config, seed=args.seed, out=args.out,
            replicates=args.replicates, profile=args.profile,
            grid=args.grid, tol=args.tol, max_evals=args.max_evals,
        )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        result = run_scenario(config)
    except ConfigError as exc:
        # scenario-specific validation happens at run time
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, EvaluationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    print(f"{config.scenario}: wrote {len(result.files)} artifacts to {result.output_dir}")
    if result.aborted_replicates:
        print(f"warning: {result.aborted_replicates} replicate(s) aborted; "
              f"see {result.manifest}", file=sys.stderr)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
