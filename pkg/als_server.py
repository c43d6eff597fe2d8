from typing import Optional
from mcp.server.fastmcp import FastMCP
import logging
from dotenv import load_dotenv

from als.commands import AlsRunner, CommandOutcome
from als.errors import AlsError
from als.models import Command
from als.parser.manifest_parser import build_manifest, parse_dims, parse_methods

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Load environment variables
load_dotenv()

# Initialize MCP server
mcp = FastMCP("als")


def format_outcome(title: str, outcome: CommandOutcome) -> str:
    """Render a workflow outcome as text.

    Args:
        title: First line of the report
        outcome: Outcome returned by the runner

    Returns:
        str: Summary values followed by the written files
    """
    result_str = f"{title}:\n\n"
    for key, value in outcome.summary.items():
        if isinstance(value, float):
            result_str += f"- {key}: {value:.6g}\n"
        else:
            result_str += f"- {key}: {value}\n"
    if outcome.outputs:
        result_str += "\nFiles:\n"
        for path in outcome.outputs:
            result_str += f"- {path}\n"
    if outcome.exit_code:
        result_str += f"\nExit code: {int(outcome.exit_code)}\n"
    return result_str


def run_command(command: Command, title: str, **flags) -> str:
    try:
        manifest = build_manifest(command, flags)
        outcome = AlsRunner().run(manifest)
        return format_outcome(title, outcome)
    except AlsError as e:
        return f"Error: {str(e)}"
    except FileNotFoundError as e:
        return f"Error: {str(e)}"
    except Exception as e:
        logger.exception("Unexpected error")
        return f"Error running {command.value}: {str(e)}"


@mcp.tool()
async def solve_least_squares(matrix_file: str, vector_file: str, method: str = "als",
                              mu: Optional[float] = None, iterations: Optional[int] = None,
                              truth_file: Optional[str] = None, output_dir: Optional[str] = None) -> str:
    """Estimate x in y = H x + n from matrix and vector files.

    Args:
        matrix_file: Path to the observation matrix in "m p" text format
        vector_file: Path to the measurement vector (m x 1)
        method: Comma separated methods out of als, ils, sls, batch (default: "als")
        mu: Step size for ALS/ILS (default: bound / 2.05)
        iterations: Iteration count N (default: automatic)
        truth_file: Optional true parameter vector for error norms
        output_dir: Directory for the estimate and metadata files (default: None)
    """
    try:
        methods = parse_methods(method)
    except AlsError as e:
        return f"Error: {str(e)}"
    return run_command(Command.SOLVE, f"Least squares estimate for {matrix_file}",
                       matrix_path=matrix_file, vector_path=vector_file, truth_path=truth_file,
                       methods=methods, mu=mu, iterations=iterations, output_dir=output_dir)


@mcp.tool()
async def analyze_stability(matrix_file: str, mu: Optional[float] = None,
                            output_dir: Optional[str] = None) -> str:
    """Report step-size bounds and the cycle-matrix norm of an observation matrix.

    Args:
        matrix_file: Path to the observation matrix in "m p" text format
        mu: Step size to analyze (default: ALS bound / 2.05)
        output_dir: Directory for the stability record (default: None)
    """
    return run_command(Command.ANALYZE, f"Stability of ALS on {matrix_file}",
                       matrix_path=matrix_file, mu=mu, output_dir=output_dir)


@mcp.tool()
async def trace_experiment(methods: str = "als,ils,sls", seed: int = 0, sigma: float = 1e-2,
                           noise_free: bool = False, output_dir: Optional[str] = None) -> str:
    """Trace the error of several estimators on the sinusoid scenario.

    Args:
        methods: Comma separated methods (default: "als,ils,sls")
        seed: Scenario seed (default: 0)
        sigma: Noise standard deviation (default: 1e-2)
        noise_free: Drop the noise (default: False)
        output_dir: Directory for the trace CSVs (default: None)
    """
    try:
        selected = parse_methods(methods)
    except AlsError as e:
        return f"Error: {str(e)}"
    return run_command(Command.TRACE, "Trace experiment", methods=selected, seed=seed,
                       sigma=sigma, noise_free=noise_free, output_dir=output_dir)


@mcp.tool()
async def degradation_sweep(dims: str = "100x1,100x10", seed: int = 0, full_scale: bool = False,
                            workers: int = 1, output_dir: Optional[str] = None) -> str:
    """Compare ALS with batch least squares on random matrices over noise levels.

    Args:
        dims: Dimensions as MxP,MxP (default: "100x1,100x10")
        seed: Sweep seed (default: 0)
        full_scale: 100 x 100 trials per noise level instead of 10 x 10 (default: False)
        workers: Worker processes (default: 1)
        output_dir: Directory for the sweep CSVs (default: None)
    """
    try:
        parsed = parse_dims(dims)
    except AlsError as e:
        return f"Error: {str(e)}"
    return run_command(Command.SWEEP, "Degradation sweep", dims=parsed, seed=seed,
                       full_scale=full_scale, workers=workers, output_dir=output_dir)


if __name__ == "__main__":
    mcp.run(transport='stdio')
