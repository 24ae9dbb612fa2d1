"""
Winner Construction Tests
Two-agent, three-agent, width-1/2 and width-reduction constructions.

Run:
    pytest test_winner_constructions.py
"""

from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from models.config_models import InstanceSpec
from models.game_models import Density, Game, Profile, UtilityMode
from models.result_models import CaseTag
from operations.analysis_operations import random_instance
from operations.game_operations import support_vector, utility_report
from operations.instance_catalog import ordinal_counterexample_game, shared_peak_game
from operations.verifier_operations import deviation_cells, deviation_support_curves
from operations.winner_operations import (
    algorithm1,
    algorithm2,
    compatible_maximizers,
    construct_winner_ne,
    reduce_width,
    solve_reduced,
    stack_depth,
    two_agent_ne,
)
from utils.errors import ModeError, UnsupportedConfigurationError


FRONT_HEAVY = [(F(1, 2), 2), (1, 0)]
LEFT_LEANING = [(F(1, 2), F(8, 5)), (1, F(2, 5))]


def _assert_flanks_beat_the_stack(game: Game, result) -> None:
    supports = support_vector(game, result.profile)
    assert min(supports[-2:]) > max(supports[:-2])


def _game(pieces, n: int, width: F) -> Game:
    density = Density.uniform() if pieces is None else Density.from_pieces(pieces)
    return Game(density=density, widths=(width,) * n, mode=UtilityMode.WINNER)


# ── Two agents ────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("pieces, width, location", [
    (None, F(3, 10), F(3, 20)),
    (FRONT_HEAVY, F(1, 2), F(1, 4)),
    ([(F(1, 2), F(2, 3)), (1, F(4, 3))], F(1, 2), F(3, 4)),
])
def test_two_agents_share_the_best_window(pieces, width, location):
    result = two_agent_ne(_game(pieces, 2, width))
    assert result.case_tag == CaseTag.TWO_AGENT
    assert result.profile == Profile.of(location, location)
    assert result.certificate.is_equilibrium


def test_two_agents_on_shared_peak():
    result = two_agent_ne(shared_peak_game())
    assert result.profile == Profile.of(F(1, 5), F(1, 5))
    assert result.intermediates["u1"] == F(1, 2)


# ── Three agents ──────────────────────────────────────────────────────────────

def test_compatible_maximizers_on_uniform_density():
    game = _game(None, 3, F(1, 3))
    assert compatible_maximizers(game, F(1, 3)) == [F(1, 6), F(1, 2), F(5, 6)]


def test_three_disjoint_optimal_windows():
    game = _game(None, 3, F(1, 3))
    result = algorithm1(game)
    assert result.case_tag == CaseTag.A1_CASE1
    assert result.profile == Profile.of(F(1, 6), F(1, 2), F(5, 6))
    assert utility_report(game, result.profile).winner_set == frozenset({0, 1, 2})


def test_two_optimal_windows_put_a_pair_on_the_second():
    result = algorithm1(ordinal_counterexample_game())
    assert result.case_tag == CaseTag.A1_CASE2
    assert result.profile == Profile.of(F(1, 6), F(5, 6), F(5, 6))


def test_single_optimal_region_falls_through_to_same_side_placement():
    result = algorithm1(_game(FRONT_HEAVY, 3, F(1, 3)))
    assert result.case_tag == CaseTag.A1_CASE5
    assert result.profile == Profile.of(F(1, 6), F(1, 3), F(1, 3))
    assert result.intermediates["u1"] == F(2, 3)
    assert result.intermediates["u2"] == F(1, 2)
    assert (result.intermediates["t2"], result.intermediates["t3"]) == (F(1, 3), F(1, 3))


def test_algorithm1_preconditions():
    with pytest.raises(UnsupportedConfigurationError):
        algorithm1(_game(None, 2, F(1, 3)))
    with pytest.raises(ModeError):
        algorithm1(_game(None, 3, F(1, 3)).with_mode(UtilityMode.SUPPORT))
    unequal = Game(density=Density.uniform(), widths=(F(1, 3), F(1, 3), F(1, 4)), mode=UtilityMode.WINNER)
    with pytest.raises(UnsupportedConfigurationError):
        algorithm1(unequal)


# ── Width one half ────────────────────────────────────────────────────────────

def test_balanced_halves_split_the_agents():
    result = algorithm2(_game(None, 4, F(1, 2)))
    assert result.case_tag == CaseTag.A2_SPLIT
    assert result.profile == Profile.of(F(1, 4), F(1, 4), F(3, 4), F(3, 4))


def test_stack_depth_on_left_leaning_density():
    game = _game(LEFT_LEANING, 6, F(1, 2))
    assert stack_depth(game, F(1, 4), 6) == 4


def test_deep_stack_absorbs_every_agent():
    result = algorithm2(_game(LEFT_LEANING, 5, F(1, 2)))
    assert result.case_tag == CaseTag.A2_STACK
    assert result.profile == Profile(locations=(F(1, 4),) * 5)
    assert result.intermediates["t"] == 4


def test_flanking_agents_beside_the_stack():
    game = _game(LEFT_LEANING, 6, F(1, 2))
    result = algorithm2(game)
    assert result.case_tag == CaseTag.A2_FLANK
    assert result.intermediates["x_star"] == F(11, 40)
    assert result.intermediates["ll"] == result.intermediates["rl"] == F(24, 125)
    assert result.profile == Profile(locations=(F(11, 40),) * 4 + (F(1, 4), F(3, 4)))
    assert utility_report(game, result.profile).winner_set == frozenset({4, 5})
    _assert_flanks_beat_the_stack(game, result)


def test_algorithm2_needs_width_one_half():
    with pytest.raises(UnsupportedConfigurationError):
        algorithm2(_game(None, 4, F(1, 3)))


# ── Width reduction ───────────────────────────────────────────────────────────

def test_reduction_of_uniform_density_is_uniform():
    reduction = reduce_width(_game(None, 2, F(3, 4)))
    assert not reduction.degenerate
    assert reduction.scale == F(1, 2)
    assert reduction.excised_mass == F(1, 2)
    assert reduction.game.f.values == (1,)
    assert reduction.inverse(F(1, 4)) == F(3, 8)
    assert reduction.forward(F(3, 8)) == F(1, 4)


def test_reduced_solution_maps_back():
    result = solve_reduced(_game(None, 2, F(3, 4)))
    assert result.case_tag == CaseTag.REDUCED
    assert result.inner_case == CaseTag.A2_SPLIT
    assert result.profile == Profile.of(F(3, 8), F(5, 8))
    assert result.certificate.is_equilibrium


def test_full_width_reduction_is_degenerate():
    result = solve_reduced(_game(None, 3, F(1)))
    assert result.degenerate
    assert result.profile == Profile(locations=(F(1, 2),) * 3)


def test_width_one_half_reduction_is_the_identity():
    game = _game(LEFT_LEANING, 3, F(1, 2))
    reduction = reduce_width(game)
    assert reduction.scale == 1
    assert reduction.excised_mass == 0
    assert reduction.game.f == game.f
    for x in (F(1, 4), F(1, 3), F(3, 4)):
        assert reduction.forward(x) == x
        assert reduction.inverse(x) == x


@settings(max_examples=50, deadline=None)
@given(st.integers(5, 9), st.integers(0, 100))
def test_reduction_maps_round_trip(width_tenths, hundredths):
    width = F(width_tenths, 10)
    reduction = reduce_width(_game(LEFT_LEANING, 2, width))
    x = width / 2 + (1 - width) * F(hundredths, 100)
    assert reduction.inverse(reduction.forward(x)) == x
    assert reduction.forward(reduction.inverse(x)) == x


def test_reduction_needs_wide_intervals():
    with pytest.raises(UnsupportedConfigurationError):
        reduce_width(_game(None, 2, F(1, 3)))


# ── Dispatcher ────────────────────────────────────────────────────────────────

@pytest.mark.parametrize("n, width, tag", [
    (2, F(1, 5), CaseTag.TWO_AGENT),
    (3, F(1, 3), CaseTag.A1_CASE1),
    (4, F(1, 2), CaseTag.A2_SPLIT),
    (4, F(3, 4), CaseTag.REDUCED),
])
def test_dispatcher_picks_the_applicable_construction(n, width, tag):
    assert construct_winner_ne(_game(None, n, width)).case_tag == tag


def test_dispatcher_refuses_narrow_crowds():
    with pytest.raises(UnsupportedConfigurationError):
        construct_winner_ne(_game(None, 4, F(1, 5)))
    with pytest.raises(UnsupportedConfigurationError):
        construct_winner_ne(_game(None, 1, F(1, 5)))


# ── Random instances ──────────────────────────────────────────────────────────

WINNER_SPEC = InstanceSpec(
    equal_widths=True,
    pieces_max=6,
    granularity=F(1, 20),
    mode=UtilityMode.WINNER,
)


def _random_game(seed: int, n: int, width: F) -> Game:
    spec = WINNER_SPEC.model_copy(update={"n_min": n, "n_max": n, "widths": (width,)})
    return random_instance(seed, spec)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([F(1, 5), F(1, 4), F(1, 3), F(1, 2)]))
def test_two_agent_stackers_cannot_outgrow_each_other(seed, width):
    game = _random_game(seed, 2, width)
    result = two_agent_ne(game)
    assert result.certificate.is_equilibrium
    for mover in (0, 1):
        curves = deviation_support_curves(game, result.profile, mover)
        for y in deviation_cells(game, result.profile, mover):
            assert curves[mover](y) <= curves[1 - mover](y)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([F(1, 5), F(1, 3), F(2, 5)]))
def test_algorithm1_is_certified_on_random_densities(seed, width):
    game = _random_game(seed, 3, width)
    result = algorithm1(game)
    assert result.certificate.is_equilibrium
    supports = support_vector(game, result.profile)
    u1 = result.intermediates["u1"]
    if result.case_tag == CaseTag.A1_CASE1:
        assert supports == (u1, u1, u1)
    if result.case_tag == CaseTag.A1_CASE2:
        assert supports[0] == u1
        assert supports[0] > max(supports[1:])
    if result.case_tag == CaseTag.A1_CASE4:
        assert supports[1] == supports[2]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 8))
def test_algorithm2_is_certified_on_random_densities(seed, n):
    game = _random_game(seed, n, F(1, 2))
    result = algorithm2(game)
    assert result.certificate.is_equilibrium
    if result.case_tag == CaseTag.A2_FLANK:
        assert result.intermediates["ll"] == result.intermediates["rl"]
        _assert_flanks_beat_the_stack(game, result)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 6), st.sampled_from([F(3, 5), F(3, 4)]))
def test_reduced_constructions_are_certified_on_the_original_game(seed, n, width):
    game = _random_game(seed, n, width)
    result = solve_reduced(game)
    assert result.case_tag == CaseTag.REDUCED
    assert result.certificate.is_equilibrium
    assert result.certificate.profile == result.profile
