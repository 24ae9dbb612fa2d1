"""
Verifier Tests
Exact and grid equilibrium checks in both modes, and the ordinal replay.

Run:
    pytest test_verifier.py
"""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from models.game_models import Density, Game, Profile, UtilityMode
from models.result_models import Method, Verdict
from operations.game_operations import utility_report
from operations.instance_catalog import mixed_widths_instance, poa_family_instance, shared_peak_game
from operations.step_function_operations import StepFunction
from operations.verifier_operations import (
    deviation_cells,
    deviation_support_curves,
    grid_verify,
    lattice,
    replay_ordinal_counterexample,
    verify_ne,
    verify_support_ne,
    verify_winner_ne,
)
from utils.errors import ModeError


@st.composite
def small_games(draw, mode: UtilityMode):
    values = draw(st.lists(st.integers(0, 4), min_size=1, max_size=3))
    if not any(values):
        values[0] = 1
    step = StepFunction([F(k, len(values)) for k in range(len(values) + 1)], values)
    widths = tuple(F(draw(st.integers(1, 5)), 10) for _ in range(draw(st.integers(2, 3))))
    game = Game(density=Density.from_step(step), widths=widths, mode=mode)
    profile = Profile(locations=tuple(
        w / 2 + (1 - w) * F(draw(st.integers(0, 8)), 8) for w in widths
    ))
    return game, profile


# ── Support mode ──────────────────────────────────────────────────────────────

def test_mixed_widths_support_mode_is_refuted():
    game, profile = mixed_widths_instance()
    certificate = verify_support_ne(game, profile)
    assert certificate.verdict == Verdict.NOT_EQUILIBRIUM
    assert certificate.gaps == (0, F(1, 20), 0)
    deviation = certificate.best_deviation
    assert (deviation.agent, deviation.location) == (1, F(9, 20))
    assert deviation.gain == F(1, 20)


def test_tolerance_absorbs_small_gaps():
    game, profile = mixed_widths_instance()
    assert verify_support_ne(game, profile, tolerance=F(1, 20)).is_equilibrium
    assert not verify_support_ne(game, profile, tolerance=F(1, 21)).is_equilibrium


def test_poa_family_stack_is_an_equilibrium():
    game, stacked, _ = poa_family_instance(3)
    certificate = verify_ne(game, stacked)
    assert certificate.is_equilibrium
    assert utility_report(game, stacked).supports == (F(1, 5),) * 3


def test_support_verifier_rejects_winner_games():
    game, profile = mixed_widths_instance(UtilityMode.WINNER)
    with pytest.raises(ModeError):
        verify_support_ne(game, profile)


# ── Winner mode ───────────────────────────────────────────────────────────────

def test_mixed_widths_winner_mode_is_an_equilibrium():
    game, profile = mixed_widths_instance(UtilityMode.WINNER)
    certificate = verify_winner_ne(game, profile)
    assert certificate.is_equilibrium
    assert certificate.best_deviation is None


def test_shared_peak_apart_is_refuted():
    game = shared_peak_game()
    certificate = verify_ne(game, Profile.of(F(1, 5), F(4, 5)))
    assert not certificate.is_equilibrium
    deviation = certificate.best_deviation
    assert (deviation.agent, deviation.location) == (1, F(1, 5))
    assert (deviation.old_utility, deviation.new_utility) == (0, F(1, 2))


def test_shared_peak_stack_is_an_equilibrium():
    assert verify_winner_ne(shared_peak_game(), Profile.of(F(1, 5), F(1, 5))).is_equilibrium


def test_deviation_curves_match_moved_supports():
    game, profile = mixed_widths_instance(UtilityMode.WINNER)
    curves = deviation_support_curves(game, profile, 1)
    for y in (F(3, 20), F(9, 20), F(1, 2), F(17, 20)):
        moved = utility_report(game, profile.moved(1, y))
        assert tuple(curve(y) for curve in curves) == moved.supports


def test_deviation_cells_span_the_feasible_interval():
    game, profile = mixed_widths_instance(UtilityMode.WINNER)
    cells = deviation_cells(game, profile, 1)
    assert cells == sorted(cells)
    assert (cells[0], cells[-1]) == game.feasible(1)


def test_winner_verifier_rejects_support_games():
    game, profile = mixed_widths_instance()
    with pytest.raises(ModeError):
        verify_winner_ne(game, profile)


# ── Grid oracle ───────────────────────────────────────────────────────────────

def test_lattice_points():
    assert lattice(F(1, 10), F(1, 2), F(1, 5)) == [F(1, 10), F(3, 10), F(1, 2)]


def test_grid_finds_the_same_deviation():
    game, profile = mixed_widths_instance()
    certificate = grid_verify(game, profile, F(1, 20))
    assert certificate.method == Method.GRID
    assert not certificate.is_equilibrium
    assert certificate.best_deviation.gain == F(1, 20)


def test_grid_flags_single_point_lattices():
    game = Game(density=Density.uniform(), widths=(F(1), F(1, 2)), mode=UtilityMode.WINNER)
    certificate = grid_verify(game, Profile.of(F(1, 2), F(1, 2)), F(1, 10))
    assert certificate.coarse


def test_grid_step_longer_than_the_line_accepts_trivially():
    game, profile = mixed_widths_instance()
    certificate = grid_verify(game, profile, 2)
    assert certificate.is_equilibrium
    assert certificate.coarse
    assert certificate.gaps == (0, 0, 0)
    assert grid_verify(game, profile, 1).coarse


@settings(max_examples=20, deadline=None)
@given(small_games(UtilityMode.SUPPORT))
def test_exact_support_gaps_dominate_grid_gaps(case):
    game, profile = case
    exact = verify_support_ne(game, profile)
    grid = grid_verify(game, profile, F(1, 20))
    assert all(e >= g for e, g in zip(exact.gaps, grid.gaps))


@settings(max_examples=20, deadline=None)
@given(small_games(UtilityMode.WINNER))
def test_exact_winner_verifier_is_complete_and_sound(case):
    game, profile = case
    exact = verify_winner_ne(game, profile)
    grid = grid_verify(game, profile, F(1, 20))
    if not grid.is_equilibrium:
        assert not exact.is_equilibrium
    if not exact.is_equilibrium:
        dev = exact.best_deviation
        moved = utility_report(game, profile.moved(dev.agent, dev.location))
        assert moved.utilities[dev.agent] == dev.new_utility


# ── Ordinal replay ────────────────────────────────────────────────────────────

def test_ordinal_replay_sign_pattern():
    report = replay_ordinal_counterexample()
    assert report.ok
    assert [s.observed_sign for s in report.steps] == [-1, -1, 0, 0, 1]
    assert report.start == Profile(locations=(F(1, 6),) * 3)
    assert report.end == Profile.of(F(1, 6), F(1, 6), F(5, 6))


def test_ordinal_replay_reports_support_values():
    first, *_, last = replay_ordinal_counterexample().steps
    assert (first.winner_before, first.winner_after) == (F(1, 3), 0)
    assert (first.support_before, first.support_after) == (F(4, 27), F(1, 6))
    assert (last.path, last.support_before, last.support_after) == (2, F(4, 27), F(4, 9))
