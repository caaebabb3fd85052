"""
Command-line entry point.

Usage:
    python -m app.cli sensitivity --state noon --n 4 --scheme parity --lambda 1.0
    python -m app.cli sweep --state yurke --n 4 --lambda 0.6 0.8 1.0
    python -m app.cli state --state intelligent --n 4 --eta 10
    python -m app.cli reproduce-fig2 --output output/
    python -m app.cli verify --max-n 6

Exit codes: 0 success, 1 verification or numerical failure, 2 usage or invalid input.
"""
import argparse
import logging
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from app.config import LOG_FORMAT, settings
from app.models.errors import InvalidInputError
from app.models.schemas import DetectionScheme, RunConfig, StateFamily
from app.services import experiments, states
from app.services.verification import run_verification
from app.utils import export

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _add_state_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--state", required=True, choices=[f.value for f in StateFamily])
    parser.add_argument("--n", type=int, required=True, help="Photon number N = 2j")
    parser.add_argument("--eta", type=float, default=None, help="Intelligent state eta (default 10)")
    parser.add_argument("--m0", type=float, default=None, help="Intelligent state m0 (default 0)")


def _add_output_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--output", default=None, help="CSV path (stdout if omitted)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parity-interferometry",
        description="Phase sensitivity of a Mach-Zehnder interferometer under parity detection.",
    )
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)

    sens = sub.add_parser("sensitivity", help="Minimum (or fixed-phase) sensitivity")
    _add_state_arguments(sens)
    sens.add_argument("--scheme", choices=[s.value for s in DetectionScheme], default="parity")
    sens.add_argument("--lambda", dest="lambdas", type=float, nargs="+", default=[1.0])
    sens.add_argument("--phi", type=float, default=None, help="Evaluate at this phase instead of minimising")
    _add_output_argument(sens)

    sweep = sub.add_parser("sweep", help="Minimum sensitivity over a transmission grid")
    _add_state_arguments(sweep)
    grid = sweep.add_mutually_exclusive_group(required=True)
    grid.add_argument("--lambda", dest="lambdas", type=float, nargs="+")
    grid.add_argument("--lambda-range", nargs=3, type=float, metavar=("START", "STOP", "POINTS"),
                      help="Inclusive linear grid, as in numpy.linspace")
    _add_output_argument(sweep)

    state = sub.add_parser("state", help="Dump input-state amplitudes")
    _add_state_arguments(state)
    _add_output_argument(state)

    fig = sub.add_parser("reproduce-fig2", help="Loss-comparison curves for N = 4 and 6")
    fig.add_argument("--n", type=int, nargs="+", default=[4, 6], choices=[4, 6])
    fig.add_argument("--points", type=int, default=settings.FIG2_GRID_POINTS)
    fig.add_argument("--output", default=settings.OUTPUT_DIR, help="Output directory")

    verify = sub.add_parser("verify", help="Compare closed forms against the Fock-space oracle")
    verify.add_argument("--max-n", type=int, default=6)
    return parser


def _run_config(args: argparse.Namespace, lambdas: list[float], scheme: str = "parity") -> RunConfig:
    return RunConfig(
        state_label=args.state,
        n_photons=args.n,
        eta=args.eta,
        m0=args.m0,
        scheme=scheme,
        lambda_grid=lambdas,
        phi=getattr(args, "phi", None),
        output_path=args.output,
    )


def _state_echo(args: argparse.Namespace) -> dict:
    """Metadata for the state flags; an intelligent state echoes the eta actually used."""
    echo = {"state": args.state, "n": args.n, "eta": args.eta, "m0": args.m0}
    if args.state == StateFamily.INTELLIGENT.value:
        echo["eta"] = states.resolve_eta(args.eta)
        if args.eta is not None and echo["eta"] != args.eta:
            echo["eta_requested"] = args.eta
    return echo


def _emit(frame, output: str | None, **config) -> None:
    if output is None:
        export.write_frame(frame, sys.stdout, **config)
    else:
        export.save_frame(frame, Path(output), **config)


def cmd_sensitivity(args: argparse.Namespace) -> int:
    config = _run_config(args, args.lambdas, args.scheme)
    samples = experiments.run_sensitivity(config)
    _emit(export.sensitivity_frame(samples), config.output_path,
          command="sensitivity", scheme=args.scheme, phi=args.phi, **_state_echo(args))
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.lambda_range is not None:
        start, stop, points = args.lambda_range
        if points < 1 or points != int(points):
            raise InvalidInputError(f"POINTS must be a positive integer, got {points}")
        lambdas = [float(x) for x in np.linspace(start, stop, int(points))]
    else:
        lambdas = args.lambdas
    config = _run_config(args, lambdas)
    samples = experiments.run_sensitivity(config)
    _emit(export.sensitivity_frame(samples), config.output_path,
          command="sweep", **_state_echo(args))
    return EXIT_OK


def cmd_state(args: argparse.Namespace) -> int:
    config = _run_config(args, [1.0])
    state = states.build_state(config.state_label, config.n_photons, config.eta, config.m0)
    _emit(export.state_frame(state), config.output_path,
          command="state", **_state_echo(args))
    return EXIT_OK


def cmd_reproduce_fig2(args: argparse.Namespace) -> int:
    if args.points < 2:
        raise InvalidInputError(f"--points must be at least 2, got {args.points}")
    out_dir = Path(args.output)
    lambdas = experiments.fig2_lambda_grid(args.points)
    tables = {n: experiments.fig2_table(n, lambdas) for n in sorted(set(args.n))}

    csv_files = {}
    for n_photons, table in tables.items():
        path = out_dir / f"fig2_N{n_photons}.csv"
        csv_files[n_photons] = export.save_frame(table, path, command="reproduce-fig2", n=n_photons,
                                                 points=args.points)
    curves = ["baseline"] + [column for column, _, _ in experiments.FIG2_CURVES]
    export.write_plot_script(out_dir / "fig2.gp", csv_files, curves)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    rows = run_verification(args.max_n)
    print(f"{'check':<34} {'N':>3} {'lambda':>7} {'max_dev':>12}  result")
    for row in rows:
        print(f"{row.check:<34} {row.n_photons:>3} {row.transmission:>7.3g} "
              f"{row.max_deviation:>12.3e}  {'PASS' if row.passed else 'FAIL'}")
    return EXIT_OK if all(row.passed for row in rows) else EXIT_FAILED


COMMANDS = {
    "sensitivity": cmd_sensitivity,
    "sweep": cmd_sweep,
    "state": cmd_state,
    "reproduce-fig2": cmd_reproduce_fig2,
    "verify": cmd_verify,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format=LOG_FORMAT, stream=sys.stderr)

    try:
        return COMMANDS[args.command](args)
    except (InvalidInputError, ValidationError) as e:
        logger.error(f"Invalid input: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (RuntimeError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
