"""
Command line front end of the ALS toolkit.

Subcommands solve, analyze, trace and sweep map onto the workflows in
als.commands. Parameters resolve as flags > --config manifest > environment
(.env included) > defaults, and every error is reported through the exit
code of its exception class.
"""

import argparse
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv

from als import __version__
from als.commands import AlsRunner
from als.errors import AlsError, ExitCode, InvalidParameterError
from als.models import Command
from als.parser.manifest_parser import AUTO, build_manifest, parse_dims, parse_methods

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# Flag destinations and the RunManifest fields they set
FLAG_FIELDS = {
    'matrix': 'matrix_path',
    'vector': 'vector_path',
    'truth': 'truth_path',
    'methods': 'methods',
    'mu': 'mu',
    'step_divisor': 'step_divisor',
    'iterations': 'iterations',
    'iteration_policy': 'iteration_policy',
    'seed': 'seed',
    'out': 'output_dir',
    'full_scale': 'full_scale',
    'dims': 'dims',
    'noise_free': 'noise_free',
    'sigma': 'sigma',
    'initial_scale': 'initial_scale',
    'workers': 'workers',
}


def _auto_or(kind):
    def convert(text: str):
        if text.strip().lower() == AUTO:
            return AUTO
        try:
            return kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}")
    return convert


def _argument_type(function):
    def convert(text: str):
        try:
            return function(text)
        except InvalidParameterError as e:
            raise argparse.ArgumentTypeError(str(e))
    return convert


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--config', help="INI run manifest with a [run] section")
    parser.add_argument('--out', help="Output directory (env ALS_OUTPUT_DIR)")
    parser.add_argument('--seed', type=int, help="Random seed (env ALS_SEED)")
    parser.add_argument('--log-level', dest='log_level',
                        help="Logging level (env ALS_LOG_LEVEL, default INFO)")


def _add_inputs(parser: argparse.ArgumentParser, vector: bool = True) -> None:
    parser.add_argument('--matrix', help="Observation matrix file")
    if vector:
        parser.add_argument('--vector', help="Measurement vector file")
        parser.add_argument('--truth', help="True parameter vector file")


def _add_step_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--mu', type=_auto_or(float),
                        help="Step size, or 'auto' for bound / step divisor")
    parser.add_argument('--step-divisor', dest='step_divisor', type=float,
                        help="Divisor applied to the step-size bound (default 2.05)")


def _add_iteration_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--iterations', type=_auto_or(int),
                        help="Iteration count N, or 'auto'")
    parser.add_argument('--iteration-policy', dest='iteration_policy',
                        choices=('contraction', 'onset'),
                        help="Automatic N from the cycle-matrix norm or from the periodic onset")


def _add_methods(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--method', '--methods', dest='methods', type=_argument_type(parse_methods),
                        help="Comma separated methods out of als, ils, sls, batch")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='als', description="Approximate least squares solvers and experiments")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest='command', required=True)

    solve = subparsers.add_parser(Command.SOLVE.value, help="Estimate x from matrix and vector files")
    _add_common(solve)
    _add_inputs(solve)
    _add_methods(solve)
    _add_step_options(solve)
    _add_iteration_options(solve)
    solve.add_argument('--initial-scale', dest='initial_scale', type=float,
                       help="Initial scale of the SLS P matrix (default 1e9)")

    analyze = subparsers.add_parser(Command.ANALYZE.value, help="Step-size bounds and cycle-matrix norm")
    _add_common(analyze)
    _add_inputs(analyze, vector=False)
    _add_step_options(analyze)

    trace = subparsers.add_parser(Command.TRACE.value, help="Error traces of several estimators")
    _add_common(trace)
    _add_inputs(trace)
    _add_methods(trace)
    _add_step_options(trace)
    _add_iteration_options(trace)
    trace.add_argument('--noise-free', dest='noise_free', action='store_const', const=True,
                       help="Use a noise-free sinusoid scenario")
    trace.add_argument('--sigma', type=float, help="Noise standard deviation of the sinusoid scenario")
    trace.add_argument('--initial-scale', dest='initial_scale', type=float,
                       help="Initial scale of the SLS P matrix (default 1e9)")

    sweep = subparsers.add_parser(Command.SWEEP.value, help="Random-matrix degradation sweep")
    _add_common(sweep)
    _add_step_options(sweep)
    _add_iteration_options(sweep)
    scale = sweep.add_mutually_exclusive_group()
    scale.add_argument('--desk-scale', dest='full_scale', action='store_const', const=False,
                       help="10 matrices x 10 vectors per noise level (default)")
    scale.add_argument('--full-scale', dest='full_scale', action='store_const', const=True,
                       help="100 matrices x 100 vectors per noise level over every table shape")
    sweep.add_argument('--dims', type=_argument_type(parse_dims), help="Dimensions as MxP,MxP")
    sweep.add_argument('--workers', type=int, help="Worker processes (env ALS_WORKERS)")
    return parser


def flag_values(args: argparse.Namespace) -> Dict[str, Any]:
    """Map parsed flags onto RunManifest fields; unset flags map to None."""
    return {key: getattr(args, flag, None) for flag, key in FLAG_FIELDS.items()}


def configure_logging(level: Optional[str]) -> None:
    level_name = (level or os.getenv('ALS_LOG_LEVEL') or 'INFO').upper()
    logging.basicConfig(level=getattr(logging, level_name, logging.INFO), format=LOG_FORMAT)


def print_summary(summary: Dict[str, object], outputs: List[str]) -> None:
    for key, value in summary.items():
        print(f"{key}: {value}")
    for path in outputs:
        print(f"wrote {path}")


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line and return the process exit code."""
    load_dotenv()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)

    try:
        command = Command(args.command)
        manifest = build_manifest(command, flag_values(args), args.config)
        outcome = AlsRunner().run(manifest)
    except AlsError as e:
        logger.error(str(e))
        return int(e.exit_code)
    except FileNotFoundError as e:
        logger.error(str(e))
        return int(ExitCode.INVALID_INPUT)
    except Exception as e:
        logger.exception(f"Unexpected error: {e}")
        return int(ExitCode.INTERNAL)

    print_summary(outcome.summary, outcome.outputs)
    return int(outcome.exit_code)


if __name__ == '__main__':
    sys.exit(main())
