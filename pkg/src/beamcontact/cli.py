"""Command-line interface.

Subcommands: solve, study, certify, oracle.  Each takes --config plus
optional --svg, --jobs, --out, --seed; see the README for the config file
format.  Exit codes: 0 success, 2 config error, 3 unconverged, 4 a
certificate or comparison check failed.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .solvers import NumericalError
from .studies import run_certificates, run_oracle_compare, run_solve, run_study

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNCONVERGED = 3
EXIT_CHECK_FAILED = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamcontact",
        description="Fourth-order beam boundary value problems with contact forces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="path to a key = value config file")
    common.add_argument("--svg", action="store_true", help="also write SVG figures")
    common.add_argument("--jobs", type=int, default=1, help="parallel solves where supported")
    common.add_argument("--out", default=None, help="output directory (overrides config)")
    common.add_argument("--seed", type=int, default=None, help="seed (overrides config)")

    sub.add_parser("solve", parents=[common], help="single solve at the configured N")
    sub.add_parser("study", parents=[common], help="nested-grid convergence study over Ns")
    sub.add_parser("certify", parents=[common], help="spectrum and contraction certificates")
    sub.add_parser("oracle", parents=[common], help="cross-validate against the integral oracle")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    config = config.with_overrides(output_dir=args.out, seed=args.seed)

    try:
        if args.command == "solve":
            result = run_solve(config, svg=args.svg)
            print(
                f"solve: N={config.n} iterations={result.report.iterations} "
                f"converged={result.report.converged} "
                f"residual_inf={result.report.residual_inf:.3e}"
            )
        elif args.command == "study":
            result = run_study(config, svg=args.svg, jobs=args.jobs)
            print(
                f"study: Ns={list(config.n_list)} reference_n={result.table.reference_n} "
                f"fitted_order={result.table.fitted_order:.3f}"
            )
        elif args.command == "certify":
            result = run_certificates(config, svg=args.svg)
            print(
                f"certify: n={result.data['n_certificate']} "
                f"eig_deviation={result.data['eigenvalue_deviation']:.3e} "
                f"empirical_ratio={result.data['empirical_ratio_max']:.6f} "
                f"contraction={result.data['contraction_formula']:.6f} "
                f"all_ok={result.data['all_ok']}"
            )
        else:
            result = run_oracle_compare(config, svg=args.svg)
            print(
                f"oracle: mode={result.data['mode']} "
                f"discrepancy={result.data['discrepancy_inf']:.3e} "
                f"tolerance={result.data['tolerance']:.1e} "
                f"passed={result.data['passed']}"
            )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_UNCONVERGED

    for path in result.files:
        print(f"wrote {path}")
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
