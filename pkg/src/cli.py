"""
Command Line Interface Module
Handles argument parsing and validation.
"""

import argparse
from typing import List, Optional


def _probability(value: str) -> float:
    number = float(value)
    if not 0.0 < number < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1), got {value}")
    return number


def _positive(value: str) -> float:
    number = float(value)
    if not number > 0.0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return number


def _float_list(value: str) -> List[float]:
    try:
        return [float(part) for part in value.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {value}") from e


def _add_backend(parser: argparse.ArgumentParser) -> None:
    backend = parser.add_mutually_exclusive_group(required=True)
    backend.add_argument("--game", type=str, help="Game file (JSON) with base1, base2 and pre policies")
    backend.add_argument("--engine", type=str, help="Engine config file (JSON) for the chess backend")


def _add_accuracy(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--eps", type=_probability, default=0.05, help="Accuracy target (default: 0.05)")
    parser.add_argument("--delta", type=_probability, default=0.05, help="Failure probability (default: 0.05)")
    parser.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser with all subcommands.

    Returns:
        argparse.ArgumentParser
    """
    parser = argparse.ArgumentParser(
        description="Solve precomputation (opening preparation) games between two players",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  %(prog)s generate-game --depth 4 --branching 2 --out game.json
  %(prog)s best-response --game game.json --lambda 0.01 --exact
  %(prog)s equilibrium --game game.json --lambda1 0.01 --lambda2 0.01
  %(prog)s entropy-profile --game game.json --v-grid 0.25,0.5,0.75
  %(prog)s sweep --config sweep.json --out white.csv --resume
  %(prog)s compare-sides --white white.csv --black black.csv --out sides.csv
        """
    )

    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Enable verbose output"
    )

    parser.add_argument(
        "--version",
        action="version",
        version="%(prog)s 0.2.0"
    )

    commands = parser.add_subparsers(dest="command", required=True)

    best = commands.add_parser("best-response", help="Best precomputation response against fixed policies")
    _add_backend(best)
    best.add_argument("--player", type=int, choices=(1, 2), default=1, help="Responding player (default: 1)")
    best.add_argument("--lambda", dest="lam", type=_positive, required=True, help="Penalty per memorized history")
    _add_accuracy(best)
    best.add_argument("--exact", action="store_true", help="Use exact values instead of rollouts")
    best.add_argument("--samples", type=int, default=None, help="Rollouts per history (default: accuracy formula)")
    best.add_argument("-o", "--out", type=str, default=None, help="Output JSON (default: next to the input)")

    entropy = commands.add_parser("entropy-profile", help="First-advantage entropy and constructive strategies")
    entropy.add_argument("--game", type=str, required=True, help="Game file (JSON)")
    entropy.add_argument("--v-grid", type=_float_list, default=[0.25, 0.5, 0.75], help="Comma-separated thresholds")
    entropy.add_argument("--eps", type=_probability, default=0.25, help="Slack of the constructive strategy")
    entropy.add_argument("-o", "--out", type=str, default=None, help="Output CSV (default: next to the input)")

    equilibrium = commands.add_parser("equilibrium", help="Approximate Nash equilibrium of the meta-game")
    _add_backend(equilibrium)
    equilibrium.add_argument("--lambda1", type=_positive, required=True, help="Player 1 penalty")
    equilibrium.add_argument("--lambda2", type=_positive, required=True, help="Player 2 penalty")
    _add_accuracy(equilibrium)
    equilibrium.add_argument("--max-iters", type=int, default=None, help="Iteration cap")
    equilibrium.add_argument("--check-interval", type=int, default=None, help="Iterations between checks")
    equilibrium.add_argument("-o", "--out", type=str, default=None, help="Output JSON (default: next to the input)")

    sweep = commands.add_parser("sweep", help="Precomputation value across opponent temperatures")
    sweep.add_argument("--config", type=str, required=True, help="Sweep config file (JSON)")
    sweep.add_argument("-o", "--out", type=str, required=True, help="Output CSV")
    sweep.add_argument("--resume", action="store_true", help="Skip grid points already in the output")
    sweep.add_argument("--workers", type=int, default=1, help="Grid points evaluated in parallel")

    sides = commands.add_parser("compare-sides", help="Pair white- and black-precomputes sweeps")
    sides.add_argument("--white", type=str, required=True, help="Sweep CSV where white precomputes")
    sides.add_argument("--black", type=str, required=True, help="Sweep CSV where black precomputes")
    sides.add_argument("-o", "--out", type=str, required=True, help="Output CSV")

    generate = commands.add_parser("generate-game", help="Write a seeded random game with random policies")
    generate.add_argument("--seed", type=int, default=0, help="Random seed (default: 0)")
    generate.add_argument("--depth", type=int, default=4, help="Moves before the end (default: 4)")
    generate.add_argument("--branching", type=int, default=2, help="Actions per history (default: 2)")
    generate.add_argument("--law", choices=("uniform", "bernoulli", "ternary"), default="uniform",
                          help="Terminal utility law (default: uniform)")
    generate.add_argument("--stop-probability", type=float, default=0.0, help="Early terminal chance")
    generate.add_argument("-o", "--out", type=str, required=True, help="Output game file (JSON)")

    return parser


def parse_arguments(argv: Optional[List[str]] = None) -> argparse.Namespace:
    """
    Parse and validate command line arguments.

    Returns:
        argparse.Namespace: Parsed arguments
    """
    return build_parser().parse_args(argv)
