"""
Reproduction Operations
Expected-versus-observed checks on the catalogued instances.
"""

from fractions import Fraction
from typing import Any, Callable

from models.game_models import Profile, UtilityMode
from models.result_models import ReproductionCheck
from operations.analysis_operations import fairness_bound, fairness_ratio, poa_report
from operations.dynamics_operations import best_response
from operations.game_operations import congestion, potential, utility_report
from operations.instance_catalog import (
    fairness_tight_instance,
    mixed_widths_instance,
    poa_family_instance,
    shared_peak_game,
)
from operations.step_function_operations import argmax, format_rational, window_objective
from operations.verifier_operations import (
    replay_ordinal_counterexample,
    verify_support_ne,
    verify_winner_ne,
)
from utils.errors import ReplayError


TARGETS = ("mixed-widths", "shared-peak", "ordinal", "fairness-tight", "poa-family", "all")
TARGET_ALIASES = {"example2": "mixed-widths", "example4": "shared-peak"}


def _text(value: Any) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(_text(v) for v in value) + ")"
    if isinstance(value, (set, frozenset)):
        return "{" + ", ".join(str(v + 1) for v in sorted(value)) + "}"
    return str(value)


class _Checks:
    """Collects named comparisons for one target."""

    def __init__(self, target: str):
        self.target = target
        self.rows: list[ReproductionCheck] = []

    def expect(self, name: str, expected: Any, observed: Any) -> None:
        self.rows.append(ReproductionCheck(
            target=self.target,
            name=name,
            expected=_text(expected),
            observed=_text(observed),
            passed=expected == observed,
        ))


def _mixed_widths(_: int) -> list[ReproductionCheck]:
    checks = _Checks("mixed-widths")
    game, profile = mixed_widths_instance()
    report = utility_report(game, profile)
    checks.expect("supports", (Fraction(2, 5), Fraction(1, 5), Fraction(3, 10)), report.supports)
    checks.expect("congestion", (1, 0, 1, 2, 1), tuple(int(v) for v in congestion(game, profile).values))
    checks.expect("potential", Fraction(1), potential(game, profile))
    checks.expect("winner set", frozenset({0}), report.winner_set)
    support_cert = verify_support_ne(game, profile)
    checks.expect("support mode verdict", "not-equilibrium", support_cert.verdict.value)
    deviation = support_cert.best_deviation
    checks.expect("deviating agent", 2, deviation.agent + 1 if deviation else None)
    checks.expect("deviation gain", Fraction(1, 20), deviation.gain if deviation else None)
    winner_cert = verify_winner_ne(game.with_mode(UtilityMode.WINNER), profile)
    checks.expect("winner mode verdict", "equilibrium", winner_cert.verdict.value)
    return checks.rows


def _shared_peak(_: int) -> list[ReproductionCheck]:
    checks = _Checks("shared-peak")
    game = shared_peak_game()
    fifth = Fraction(1, 5)
    checks.expect("single-agent optimum", (fifth, Fraction(1, 2)), argmax(window_objective(game.f, Fraction(2, 5), (fifth, 1 - fifth))))
    stacked = utility_report(game, _profile(fifth, fifth))
    checks.expect("stacked winners", frozenset({0, 1}), stacked.winner_set)
    checks.expect("stacked utilities", (Fraction(1, 2), Fraction(1, 2)), stacked.utilities)
    apart = verify_winner_ne(game, _profile(fifth, Fraction(4, 5)))
    checks.expect("apart verdict", "not-equilibrium", apart.verdict.value)
    deviation = apart.best_deviation
    checks.expect(
        "apart deviation",
        (2, fifth, Fraction(0), Fraction(1, 2)),
        (deviation.agent + 1, deviation.location, deviation.old_utility, deviation.new_utility) if deviation else None,
    )
    support_game = game.with_mode(UtilityMode.SUPPORT)
    checks.expect("best response beside 1/5", (Fraction(3, 5), Fraction(1, 3)), best_response(support_game, _profile(fifth, fifth), 1))
    return checks.rows


def _ordinal(_: int) -> list[ReproductionCheck]:
    checks = _Checks("ordinal")
    try:
        report = replay_ordinal_counterexample()
    except ReplayError as e:
        checks.expect("replay", "sign pattern holds", str(e))
        return checks.rows
    for step in report.steps:
        checks.expect(
            f"path {step.path} step {step.step + 1} agent {step.agent + 1} sign",
            step.expected_sign,
            step.observed_sign,
        )
    return checks.rows


def _fairness_tight(_: int) -> list[ReproductionCheck]:
    checks = _Checks("fairness-tight")
    game, profile = fairness_tight_instance()
    checks.expect("supports", (Fraction(1, 3), Fraction(2, 3)), utility_report(game, profile).supports)
    checks.expect("equilibrium", "equilibrium", verify_support_ne(game, profile).verdict.value)
    checks.expect("fairness ratio", Fraction(1, 2), fairness_ratio(game, profile))
    checks.expect("fairness bound", Fraction(1, 2), fairness_bound(game))
    return checks.rows


def _poa_family(n: int) -> list[ReproductionCheck]:
    checks = _Checks(f"poa-family {n}")
    game, stacked, _ = poa_family_instance(n)
    report = poa_report(game, [stacked])
    checks.expect("welfare", Fraction(n, 2 * n - 1), report.welfare)
    checks.expect("optimal welfare", Fraction(1), report.optimal_welfare)
    checks.expect("ratio", Fraction(n, 2 * n - 1), report.welfare_ratio)
    checks.expect("ratio at least 1/2", True, report.welfare_ok)
    checks.expect("uncovered within bound", True, report.uncovered_ok)
    return checks.rows


def _profile(*locations: Fraction) -> Profile:
    return Profile(locations=locations)


_RUNNERS: dict[str, Callable[[int], list[ReproductionCheck]]] = {
    "mixed-widths": _mixed_widths,
    "shared-peak": _shared_peak,
    "ordinal": _ordinal,
    "fairness-tight": _fairness_tight,
    "poa-family": _poa_family,
}


def reproduce(target: str, n: int = 10) -> list[ReproductionCheck]:
    """Run one catalogued target (or all of them) and return every check."""
    target = TARGET_ALIASES.get(target, target)
    if target == "all":
        rows = []
        for name, runner in _RUNNERS.items():
            rows.extend(runner(n))
        return rows
    if target not in _RUNNERS:
        raise ValueError(f"Unknown target '{target}'; choose from {', '.join(TARGETS)}")
    return _RUNNERS[target](n)
