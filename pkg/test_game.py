"""
Game Core Tests
Congestion, supports, winner sets, potential and density validation.

Run:
    pytest test_game.py
"""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from models.config_models import RunConfig
from models.game_models import Density, Game, Profile, UtilityMode
from operations.game_operations import (
    congestion,
    covered_mass,
    entrant_objective,
    mirror,
    potential,
    potential_upper_bound,
    stacked_entrant_objective,
    support_vector,
    uncovered_mass,
    utility_report,
)
from operations.instance_catalog import mixed_widths_instance, shared_peak_game
from operations.step_function_operations import StepFunction, argmax
from utils.errors import DomainError, ProfileError


@st.composite
def games_with_profiles(draw, max_agents: int = 4):
    cuts = draw(st.lists(st.integers(1, 19), max_size=3, unique=True))
    breakpoints = [F(0)] + [F(c, 20) for c in sorted(cuts)] + [F(1)]
    values = draw(st.lists(st.integers(0, 6), min_size=len(breakpoints) - 1, max_size=len(breakpoints) - 1))
    if not any(values):
        values[0] = 1
    density = Density.from_step(StepFunction(breakpoints, values))
    n = draw(st.integers(1, max_agents))
    widths = tuple(F(draw(st.integers(1, 10)), 10) for _ in range(n))
    game = Game(density=density, widths=widths)
    locations = []
    for w in widths:
        k = draw(st.integers(0, 40))
        locations.append(w / 2 + (1 - w) * F(k, 40))
    return game, Profile(locations=tuple(locations))


# ── Worked instance ───────────────────────────────────────────────────────────

def test_mixed_widths_congestion():
    game, profile = mixed_widths_instance()
    c = congestion(game, profile)
    assert c.breakpoints == (F(0), F(2, 5), F(1, 2), F(3, 5), F(4, 5), F(1))
    assert c.values == (1, 0, 1, 2, 1)


def test_mixed_widths_supports_and_winner():
    game, profile = mixed_widths_instance()
    report = utility_report(game, profile)
    assert report.supports == (F(2, 5), F(1, 5), F(3, 10))
    assert report.winner_set == frozenset({0})
    assert report.utilities == report.supports
    assert report.potential == 1
    assert report.covered_mass == F(9, 10)
    assert uncovered_mass(game, profile) == F(1, 10)


def test_winner_mode_utilities():
    game, profile = mixed_widths_instance(UtilityMode.WINNER)
    assert utility_report(game, profile).utilities == (1, 0, 0)


def test_shared_peak_stack_has_two_winners():
    game = shared_peak_game()
    report = utility_report(game, Profile.of(F(1, 5), F(1, 5)))
    assert report.winner_set == frozenset({0, 1})
    assert report.utilities == (F(1, 2), F(1, 2))


def test_entrant_objective_best_location():
    game, profile = mixed_widths_instance()
    assert argmax(entrant_objective(game, profile, 1)) == (F(9, 20), F(1, 4))


def test_stacked_entrant_objective_beside_the_peak():
    game = shared_peak_game()
    objective = stacked_entrant_objective(game, F(1, 5), F(2, 5), 1)
    assert argmax(objective) == (F(3, 5), F(1, 3))


def test_empty_profile():
    game = Game(density=Density.uniform(), widths=())
    report = utility_report(game, Profile(locations=()))
    assert report.winner_set == frozenset()
    assert report.covered_mass == 0


# ── Validation ────────────────────────────────────────────────────────────────

def test_profile_outside_feasible_interval():
    game, _ = mixed_widths_instance()
    with pytest.raises(ProfileError) as info:
        congestion(game, Profile.of(F(1, 5), F(1, 10), F(4, 5)))
    assert info.value.agent == 1


def test_profile_size_mismatch():
    game, _ = mixed_widths_instance()
    with pytest.raises(ProfileError):
        support_vector(game, Profile.of(F(1, 2)))


@pytest.mark.parametrize("width", [F(0), F(3, 2), F(-1, 4)])
def test_widths_must_lie_in_unit(width):
    with pytest.raises(ValidationError):
        Game(density=Density.uniform(), widths=(width,))


def test_density_rejects_negative_pieces_and_zero_mass():
    with pytest.raises(DomainError):
        Density.from_pieces([(F(1, 2), 2), (1, -1)])
    with pytest.raises(DomainError):
        Density.from_pieces([(1, 0)])


def test_density_is_rescaled_to_unit_mass():
    density = Density.from_pieces([(F(1, 2), 3), (1, 1)])
    assert density.was_normalized
    assert density.step.total() == 1
    assert density.step.values == (F(3, 2), F(1, 2))
    assert not Density.uniform().was_normalized


def test_run_config_builds_the_game():
    config = RunConfig.model_validate({
        "density": [{"upto": "2/5", "value": "5/4"}, {"upto": "1", "value": "5/6"}],
        "widths": ["2/5", "2/5"],
        "mode": "winner",
        "profile": ["1/5", "1/5"],
    })
    assert config.build_game() == shared_peak_game()
    assert config.build_profile() == Profile.of(F(1, 5), F(1, 5))


@pytest.mark.parametrize("payload", [
    {"widths": ["1/2"], "profile": ["1/2", "1/2"]},
    {"widths": ["1/2"], "density": [{"upto": "1/2", "value": 1}]},
    {"widths": ["1/2"], "density": [{"upto": "1/2", "value": 1}, {"upto": "1/4", "value": 1}]},
    {"widths": [0.5]},
    {"widths": ["1/2"], "colour": "blue"},
])
def test_run_config_rejects_bad_documents(payload):
    with pytest.raises(ValidationError):
        RunConfig.model_validate(payload)


# ── Properties ────────────────────────────────────────────────────────────────

@settings(max_examples=40, deadline=None)
@given(games_with_profiles())
def test_total_support_is_covered_mass(case):
    game, profile = case
    assert sum(support_vector(game, profile)) == covered_mass(game, profile)


@settings(max_examples=40, deadline=None)
@given(games_with_profiles())
def test_potential_bounded_by_harmonic_number(case):
    game, profile = case
    assert potential(game, profile) <= potential_upper_bound(game.n)


@settings(max_examples=40, deadline=None)
@given(games_with_profiles(), st.integers(0, 40), st.data())
def test_potential_tracks_unilateral_moves(case, k, data):
    game, profile = case
    agent = data.draw(st.integers(0, game.n - 1))
    lo, hi = game.feasible(agent)
    moved = profile.moved(agent, lo + (hi - lo) * F(k, 40))
    before = support_vector(game, profile)[agent]
    after = support_vector(game, moved)[agent]
    assert potential(game, moved) - potential(game, profile) == after - before


@settings(max_examples=30, deadline=None)
@given(games_with_profiles())
def test_mirroring_preserves_supports(case):
    game, profile = case
    mirrored_game, mirrored_profile = mirror(game, profile)
    assert support_vector(mirrored_game, mirrored_profile) == support_vector(game, profile)
