"""
Main Entry Point - Attraction Games
Exact analysis of one-dimensional attraction games from the command line.

Run:
    python main.py evaluate --config data/instances/mixed_widths.json
    python main.py verify   --config data/instances/mixed_widths.json --mode winner
    python main.py solve    --config data/instances/shared_peak.json --method two-agent
    python main.py analyze  --config data/instances/fairness_tight.json
    python main.py reproduce all
    python main.py corpus   --count 100 --suite support-bounds --format records
"""

import argparse
import sys
from typing import Optional

from dotenv import load_dotenv

# Load environment variables FIRST
load_dotenv()

from cli.commands import (  # noqa: E402
    EXIT_FAILED,
    EXIT_REFUTED,
    EXIT_USAGE,
    METHODS,
    UsageError,
    cmd_analyze,
    cmd_corpus,
    cmd_evaluate,
    cmd_reproduce,
    cmd_solve,
    cmd_verify,
)
from operations.analysis_operations import SUITES  # noqa: E402
from operations.reproduction_operations import TARGET_ALIASES, TARGETS  # noqa: E402
from utils.errors import AttractionGameError, NotEquilibriumError  # noqa: E402
from utils.logger import logger  # noqa: E402


def _add_common(parser: argparse.ArgumentParser, instance: bool = True) -> None:
    if instance:
        parser.add_argument("--config", metavar="PATH", help="RunConfig JSON file")
        parser.add_argument("--profile", metavar="CSV", help="Comma-separated rational centres, e.g. 1/5,13/20,4/5")
    parser.add_argument("--mode", choices=["support", "winner"], help="Override the utility mode")
    parser.add_argument("--format", choices=["table", "records"], help="Output format")
    parser.add_argument("--out", metavar="PATH", help="Write output to a file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="attraction-games",
        description="Exact equilibria, dynamics and bounds for attraction games on [0, 1].",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    evaluate = sub.add_parser("evaluate", help="Supports, winners, congestion and potential of a profile")
    _add_common(evaluate)
    evaluate.set_defaults(handler=cmd_evaluate)

    solve = sub.add_parser("solve", help="Construct or search for an equilibrium")
    _add_common(solve)
    solve.add_argument("--method", choices=METHODS, default="auto")
    solve.add_argument("--epsilon", help="Dynamics improvement threshold (rational)")
    solve.add_argument("--round-limit", type=int, help="Maximum improving moves")
    solve.add_argument("--order", choices=["round-robin", "max-gain"], default="round-robin")
    solve.add_argument("--trace-out", metavar="PATH", help="Write the dynamics trace as records")
    solve.set_defaults(handler=cmd_solve)

    verify = sub.add_parser("verify", help="Check whether a profile is an equilibrium")
    _add_common(verify)
    verify.add_argument("--method", choices=["exact", "grid"], default="exact")
    verify.add_argument("--grid-step", help="Lattice step for the grid oracle (rational)")
    verify.add_argument("--epsilon", help="Support-mode tolerance (rational)")
    verify.set_defaults(handler=cmd_verify)

    analyze = sub.add_parser("analyze", help="Fairness, welfare and coverage bounds of support-mode equilibria")
    _add_common(analyze)
    analyze.add_argument("--epsilon", help="Tolerance when checking the given profile (rational)")
    analyze.add_argument("--starts", type=int, help="Random dynamics starts when no profile is given")
    analyze.set_defaults(handler=cmd_analyze)

    repro = sub.add_parser("reproduce", help="Re-derive the catalogued worked instances")
    repro.add_argument("target", choices=TARGETS + tuple(TARGET_ALIASES))
    repro.add_argument("--n", type=int, default=10, help="Family size for poa-family")
    repro.add_argument("--format", choices=["table", "records"])
    repro.add_argument("--out", metavar="PATH")
    repro.set_defaults(handler=cmd_reproduce)

    corpus = sub.add_parser("corpus", help="Seeded random-instance experiments")
    _add_common(corpus, instance=False)
    corpus.add_argument("--config", metavar="PATH", help="InstanceSpec JSON file")
    corpus.add_argument("--suite", choices=SUITES, default="support-bounds")
    corpus.add_argument("--count", type=int, default=100)
    corpus.add_argument("--seed", type=int, default=0)
    corpus.add_argument("--workers", type=int, help="Worker processes (default from settings)")
    corpus.add_argument("--starts", type=int, help="Random dynamics starts per instance")
    corpus.add_argument("--grid-step", help="Lattice step for oracle-agreement")
    corpus.add_argument("--n-min", type=int)
    corpus.add_argument("--n-max", type=int)
    corpus.add_argument("--widths", metavar="CSV", help="Width pool, e.g. 1/3,1/2")
    corpus.add_argument("--equal-widths", action="store_true")
    corpus.add_argument("--pieces-min", type=int)
    corpus.add_argument("--pieces-max", type=int)
    corpus.add_argument("--granularity")
    corpus.add_argument("--progress", action="store_true", help="Show a progress bar on stderr")
    corpus.set_defaults(handler=cmd_corpus)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NotEquilibriumError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_REFUTED
    except (UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AttractionGameError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED
    except Exception as e:
        logger.exception(f"[CLI] Unexpected failure: {e}")
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
