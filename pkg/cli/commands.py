"""
CLI Commands
One function per subcommand; each returns the process exit code.
"""

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from pydantic import ValidationError

from config.settings import settings
from models.config_models import InstanceSpec, RunConfig, describe_validation_error, load_run_config
from models.game_models import Game, Profile, UtilityMode
from models.result_models import ConstructionResult, CorpusRecord, DynamicsStep, ReproductionCheck
from operations.analysis_operations import find_support_equilibria, poa_report, run_corpus, spread_profile
from operations.dynamics_operations import run_dynamics
from operations.game_operations import congestion, utility_report
from operations.reproduction_operations import reproduce
from operations.verifier_operations import grid_verify, verify_ne, verify_support_ne
from operations.winner_operations import (
    algorithm1,
    algorithm2,
    construct_winner_ne,
    solve_reduced,
    two_agent_ne,
)
from tools.record_tool import (
    CERTIFICATE_COLUMNS,
    CONSTRUCTION_COLUMNS,
    REPORT_COLUMNS,
    certificate_row,
    construction_row,
    encode_models,
    encode_rows,
    report_rows,
)
from tools.report_tool import (
    format_analysis,
    format_certificate,
    format_checks,
    format_construction,
    format_corpus_summary,
    format_trace,
    format_utility_report,
)
from utils.errors import ConfigError
from utils.rationals import HALF, to_rational


EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_REFUTED = 3

METHODS = ("dynamics", "two-agent", "alg1", "alg2", "reduce", "auto")


class UsageError(Exception):
    """Bad flags or a method that does not fit the configuration."""


# ── Shared helpers ────────────────────────────────────────────────────────────

def parse_profile(text: str) -> tuple[Fraction, ...]:
    """Comma-separated rationals; an empty string is the empty profile."""
    parts = [p for p in text.split(",") if p.strip()]
    try:
        return tuple(to_rational(p) for p in parts)
    except ValueError as e:
        raise UsageError(f"--profile: {e}") from e


def load_config(args: argparse.Namespace) -> RunConfig:
    if not getattr(args, "config", None):
        raise UsageError("--config PATH is required for this command")
    config = load_run_config(args.config)
    updates = {}
    if getattr(args, "profile", None) is not None:
        updates["profile"] = parse_profile(args.profile)
    if getattr(args, "mode", None):
        updates["mode"] = args.mode
    if updates:
        try:
            config = RunConfig.model_validate({**config.model_dump(), **updates})
        except ValidationError as e:
            raise UsageError(describe_validation_error(e)) from e
    return config


def output_format(args: argparse.Namespace, config: Optional[RunConfig] = None) -> str:
    if getattr(args, "format", None):
        return args.format
    if config is not None and config.format:
        return config.format
    return settings.output_format


def emit(args: argparse.Namespace, text: str) -> None:
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text if text.endswith("\n") else text + "\n", encoding="utf-8")
    else:
        print(text.rstrip("\n"))


def _require_profile(config: RunConfig) -> Profile:
    profile = config.build_profile()
    if profile is None:
        raise UsageError("a profile is required (config 'profile' or --profile)")
    return profile


def _rational_option(args: argparse.Namespace, name: str, fallback: Optional[Fraction]) -> Optional[Fraction]:
    value = getattr(args, name, None)
    if value is None:
        return fallback
    try:
        return to_rational(value)
    except ValueError as e:
        raise UsageError(f"--{name.replace('_', '-')}: {e}") from e


# ── evaluate ──────────────────────────────────────────────────────────────────

def cmd_evaluate(args: argparse.Namespace) -> int:
    """Supports, winner set, congestion and potential of a profile."""
    config = load_config(args)
    game = config.build_game()
    profile = config.build_profile() or Profile(locations=())
    report = utility_report(game, profile)
    if output_format(args, config) == "records":
        emit(args, encode_rows(report_rows(game, profile, report), REPORT_COLUMNS))
    else:
        emit(args, format_utility_report(game, profile, report, congestion(game, profile)))
    return EXIT_OK


# ── solve ─────────────────────────────────────────────────────────────────────

def applicable_methods(game: Game) -> list[str]:
    if game.mode == UtilityMode.SUPPORT:
        return ["dynamics"]
    if game.n < 2 or not game.equal_widths():
        return []
    width = game.widths[0]
    methods = []
    if game.n == 2:
        methods.append("two-agent")
    if game.n == 3:
        methods.append("alg1")
    if width == HALF:
        methods.append("alg2")
    if width >= HALF:
        methods.append("reduce")
    return methods + ["auto"]


def _write_trace(path: str, steps: tuple[DynamicsStep, ...]) -> None:
    Path(path).write_text(encode_models(steps, DynamicsStep), encoding="utf-8")


def cmd_solve(args: argparse.Namespace) -> int:
    """Find an equilibrium with the chosen method and print its certificate."""
    config = load_config(args)
    game = config.build_game()
    method = args.method
    if method == "auto":
        method = "dynamics" if game.mode == UtilityMode.SUPPORT else "auto"
    applicable = applicable_methods(game)
    if method not in applicable:
        listed = ", ".join(applicable) or "none"
        raise UsageError(f"method '{args.method}' does not apply here; applicable methods: {listed}")

    fmt = output_format(args, config)
    if method == "dynamics":
        start = config.build_profile() or spread_profile(game)
        epsilon = _rational_option(args, "epsilon", config.epsilon)
        round_limit = args.round_limit or config.round_limit
        end, trace = run_dynamics(game, start, epsilon=epsilon, round_limit=round_limit, order=args.order)
        certificate = verify_support_ne(game, end, tolerance=trace.epsilon)
        if getattr(args, "trace_out", None):
            _write_trace(args.trace_out, trace.steps)
        if fmt == "records":
            row = {**certificate_row(certificate), "case": "dynamics", "moves": len(trace.steps)}
            emit(args, encode_rows([row], CERTIFICATE_COLUMNS + ["case", "moves"]))
        else:
            emit(args, format_trace(trace) + "\n" + format_certificate(certificate))
        return EXIT_OK if certificate.is_equilibrium else EXIT_REFUTED

    builders = {
        "two-agent": two_agent_ne,
        "alg1": algorithm1,
        "alg2": algorithm2,
        "reduce": solve_reduced,
        "auto": construct_winner_ne,
    }
    result: ConstructionResult = builders[method](game)
    if fmt == "records":
        emit(args, encode_rows([construction_row(result)], CONSTRUCTION_COLUMNS))
    else:
        emit(args, format_construction(result))
    return EXIT_OK


# ── verify ────────────────────────────────────────────────────────────────────

def cmd_verify(args: argparse.Namespace) -> int:
    """Exact (or grid) equilibrium check; exit 3 when refuted."""
    config = load_config(args)
    game = config.build_game()
    profile = _require_profile(config)
    if args.method == "grid":
        step = _rational_option(args, "grid_step", config.grid_step)
        certificate = grid_verify(game, profile, step)
    else:
        tolerance = _rational_option(args, "epsilon", config.epsilon) or Fraction(0)
        certificate = verify_ne(game, profile, tolerance)
    if output_format(args, config) == "records":
        emit(args, encode_rows([certificate_row(certificate)], CERTIFICATE_COLUMNS))
    else:
        emit(args, format_certificate(certificate))
    return EXIT_OK if certificate.is_equilibrium else EXIT_REFUTED


# ── analyze ───────────────────────────────────────────────────────────────────

ANALYSIS_COLUMNS = [
    "equilibria", "fairness", "fairness_bound", "welfare", "optimal_welfare",
    "ratio", "uncovered", "uncovered_bound", "optimal_profile", "bounds_ok",
]


def cmd_analyze(args: argparse.Namespace) -> int:
    """
    Fairness, welfare ratio and uncovered mass of support-mode equilibria.

    Uses the config profile when given; otherwise searches from seeded starts.
    Exit 1 when a bound fails, 3 when the given profile is not an equilibrium.
    """
    config = load_config(args)
    game = config.build_game()
    if game.mode != UtilityMode.SUPPORT:
        raise UsageError("analyze works on support-mode games; use --mode support")
    tolerance = _rational_option(args, "epsilon", config.epsilon) or Fraction(0)
    profile = config.build_profile()
    if profile is not None:
        profiles = [profile]
    else:
        profiles = find_support_equilibria(game, seed=config.seed or 0, starts=args.starts)
        if not profiles:
            print("no exact equilibrium reached from the seeded starts", file=sys.stderr)
            return EXIT_FAILED
    report = poa_report(game, profiles, tolerance)
    if output_format(args, config) == "records":
        row = {
            "equilibria": report.equilibria,
            "fairness": report.fairness_ratio,
            "welfare": report.welfare,
            "optimal_welfare": report.optimal_welfare,
            "fairness_bound": report.fairness_bound,
            "uncovered": report.uncovered,
            "uncovered_bound": report.uncovered_bound,
            "ratio": report.welfare_ratio,
            "optimal_profile": report.optimal_profile.locations,
            "bounds_ok": report.bounds_ok,
        }
        emit(args, encode_rows([row], ANALYSIS_COLUMNS))
    else:
        emit(args, format_analysis(report))
    return EXIT_OK if report.bounds_ok else EXIT_FAILED


# ── reproduce ─────────────────────────────────────────────────────────────────

def cmd_reproduce(args: argparse.Namespace) -> int:
    """Pass/fail table for a catalogued instance; exit 0 iff every check passes."""
    checks = reproduce(args.target, n=args.n)
    if output_format(args) == "records":
        emit(args, encode_models(checks, ReproductionCheck))
    else:
        emit(args, format_checks(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_FAILED


# ── corpus ────────────────────────────────────────────────────────────────────

def load_instance_spec(args: argparse.Namespace) -> InstanceSpec:
    raw: dict = {}
    if getattr(args, "config", None):
        try:
            raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"Cannot read instance spec {args.config}: {e}") from e
    overrides = {
        "n_min": args.n_min,
        "n_max": args.n_max,
        "widths": parse_profile(args.widths) if args.widths else None,
        "equal_widths": True if args.equal_widths else None,
        "pieces_min": args.pieces_min,
        "pieces_max": args.pieces_max,
        "granularity": args.granularity,
        "mode": args.mode,
    }
    raw.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return InstanceSpec.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid instance spec: {describe_validation_error(e)}") from e


def cmd_corpus(args: argparse.Namespace) -> int:
    """Seeded corpus run; records in seed order, then the summary."""
    spec = load_instance_spec(args)
    summary = run_corpus(
        spec,
        count=args.count,
        seed=args.seed or 0,
        suite=args.suite,
        workers=args.workers,
        starts=args.starts,
        grid_step=_rational_option(args, "grid_step", None),
        progress=args.progress,
    )
    if output_format(args) == "records":
        emit(args, encode_models(summary.records, CorpusRecord))
        print(format_corpus_summary(summary), file=sys.stderr)
    else:
        failing = [r for r in summary.records if r.violation]
        text = format_corpus_summary(summary)
        for record in failing:
            text += f"\n  seed {record.seed}: {record.detail}"
        emit(args, text)
    return EXIT_OK if summary.violations == 0 else EXIT_FAILED
