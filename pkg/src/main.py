import os
import sys
import argparse
import json
import logging
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv

# Add project root to Python path
project_root = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
if project_root not in sys.path:
    sys.path.insert(0, project_root)

from src.experiments.config import ExperimentConfig, load_config
from src.experiments.results import emit_results
from src.experiments.runner import analyze_experiment, optimize_experiment, run_experiment, with_overrides
from src.model.errors import CacheModelError

load_dotenv()

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
logger = logging.getLogger(__name__)

COMMANDS = ("analyze", "optimize", "simulate", "sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Hit probability and tier-level content placement for cache-enabled heterogeneous networks"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    help_text = {
        "analyze": "Closed-form hit probability breakdown of every policy's placement",
        "optimize": "Placement matrix, solver report and file ranges per policy",
        "simulate": "Analytic rows checked against the Monte Carlo simulator",
        "sweep": "One result row per (sweep value, policy)",
    }
    for name in COMMANDS:
        sub = subparsers.add_parser(name, help=help_text[name])
        sub.add_argument("--config", required=True, help="Experiment YAML file")
        sub.add_argument("--seed", type=int, help="Simulation seed (overrides the config)")
        sub.add_argument("--trials", type=int, help="Monte Carlo trials (overrides the config)")
        sub.add_argument("--out", help="Output file (default: config output.path, else stdout)")
        sub.add_argument("--format", choices=["csv", "json"], help="Row format for simulate/sweep")
        sub.add_argument("--workers", type=int, help="Simulation workers (default: MAX_WORKERS or CPU count)")
        sub.add_argument("--no-progress", action="store_true", help="Disable the sweep progress bar")
        sub.add_argument(
            "--log-level",
            type=str.upper,
            default=os.getenv("LOG_LEVEL", "INFO").upper(),
            choices=["DEBUG", "INFO", "WARNING", "ERROR"],
            help="Logging level (default: LOG_LEVEL or INFO)",
        )
    return parser


def _write_document(document: Dict[str, Any], path: Optional[str]) -> str:
    text = json.dumps(document, indent=2) + "\n"
    if path:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        logger.info(f"Wrote {path}")
    return text


def run_command(args: argparse.Namespace) -> Tuple[str, Optional[str]]:
    """Execute one subcommand.

    Returns:
        The produced text and the file it was written to (None: not written)
    """
    cfg: ExperimentConfig = load_config(args.config)
    cfg = with_overrides(cfg, seed=args.seed, trials=args.trials, simulate=args.command == "simulate")
    out = args.out or cfg.output.path

    if args.command == "analyze":
        return _write_document(analyze_experiment(cfg), out), out
    if args.command == "optimize":
        return _write_document(optimize_experiment(cfg), out), out

    progress = not args.no_progress and sys.stderr.isatty()
    rows = run_experiment(cfg, progress=progress, workers=args.workers)
    return emit_results(rows, args.format or cfg.output.format, out), out


def main(argv: Optional[List[str]] = None) -> int:
    """Main function"""
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers is not None and args.workers < 1:
        parser.error("--workers must be at least 1")
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT)

    try:
        text, path = run_command(args)
    except CacheModelError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return 1

    if path is None:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
