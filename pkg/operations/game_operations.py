"""
Game Operations
Congestion, supports, winner sets and the potential of an attraction game.
"""

from fractions import Fraction
from typing import Optional

from models.game_models import Density, Game, Profile, UtilityMode, UtilityReport
from operations.step_function_operations import (
    ONE,
    ZERO,
    PiecewiseLinear,
    StepFunction,
    combine,
    window_objective,
)


def _per_capita(f_value: Fraction, c_value: Fraction) -> Fraction:
    return f_value / c_value if c_value else ZERO


def _entrant_share(f_value: Fraction, c_value: Fraction) -> Fraction:
    return f_value / (c_value + 1)


def congestion(game: Game, profile: Profile, without: Optional[int] = None) -> StepFunction:
    """
    c(y) = number of agents whose interval contains y.

    With `without=i` the count excludes agent i (c_{-i}). The result is not
    normalized: its breakpoints are exactly {0, 1} and the interval endpoints.
    """
    game.check_profile(profile)
    intervals = [game.interval(profile, j) for j in range(game.n) if j != without]
    edges = {ZERO, ONE}
    for lo, hi in intervals:
        edges.add(lo)
        edges.add(hi)
    grid = sorted(edges)
    counts = []
    for a, b in zip(grid, grid[1:]):
        counts.append(Fraction(sum(1 for lo, hi in intervals if lo <= a and b <= hi)))
    return StepFunction(grid, counts)


def support_vector(game: Game, profile: Profile) -> tuple[Fraction, ...]:
    """s_i = ∫_{R_i} f / c."""
    density = combine(game.f, congestion(game, profile), _per_capita)
    return tuple(density.integrate(*game.interval(profile, i)) for i in range(game.n))


def winner_set(supports: tuple[Fraction, ...]) -> frozenset[int]:
    if not supports:
        return frozenset()
    best = max(supports)
    return frozenset(i for i, s in enumerate(supports) if s == best)


def covered_mass(game: Game, profile: Profile) -> Fraction:
    """∫ f over the union of intervals."""
    covered = combine(game.f, congestion(game, profile), lambda f, c: f if c else ZERO)
    return covered.total()


def uncovered_mass(game: Game, profile: Profile) -> Fraction:
    return ONE - covered_mass(game, profile)


def _harmonic(count: Fraction) -> Fraction:
    return sum((Fraction(1, k) for k in range(1, int(count) + 1)), ZERO)


def potential(game: Game, profile: Profile) -> Fraction:
    """Φ = ∫ f · H(c), H the harmonic numbers."""
    weighted = combine(game.f, congestion(game, profile), lambda f, c: f * _harmonic(c))
    return weighted.total()


def potential_upper_bound(n: int) -> Fraction:
    """Φ ≤ H_n for every profile of n agents."""
    return _harmonic(Fraction(n))


def utility_report(game: Game, profile: Profile) -> UtilityReport:
    """
    Supports, winner set and mode utilities.

    Support mode: u_i = s_i. Winner mode: u_i = 1/|W| for winners, 0 otherwise.
    An empty profile has an empty winner set and covers nothing.
    """
    game.check_profile(profile)
    supports = support_vector(game, profile)
    winners = winner_set(supports)
    if game.mode == UtilityMode.SUPPORT:
        utilities = supports
    else:
        share = Fraction(1, len(winners)) if winners else ZERO
        utilities = tuple(share if i in winners else ZERO for i in range(game.n))
    return UtilityReport(
        mode=game.mode,
        supports=supports,
        winner_set=winners,
        utilities=utilities,
        covered_mass=covered_mass(game, profile),
        potential=potential(game, profile),
    )


def entrant_density(game: Game, profile: Profile, agent: int) -> StepFunction:
    """f / (c_{-i} + 1): what agent i would collect per unit length anywhere."""
    return combine(game.f, congestion(game, profile, without=agent), _entrant_share)


def entrant_objective(game: Game, profile: Profile, agent: int) -> PiecewiseLinear:
    """Support agent i would get at each x in L_i with everyone else fixed."""
    return window_objective(entrant_density(game, profile, agent), game.widths[agent], game.feasible(agent))


def stacked_entrant_objective(game: Game, location: Fraction, width: Fraction, count: int) -> PiecewiseLinear:
    """Entrant objective when `count` agents of `width` sit at `location` and nobody else plays."""
    half = width / 2
    stack = StepFunction.indicator(location - half, location + half).scale(count)
    density = combine(game.f, stack, _entrant_share)
    return window_objective(density, width, (half, ONE - half))


def mirror(game: Game, profile: Optional[Profile] = None) -> tuple[Game, Optional[Profile]]:
    """Reflect the instance through x ↦ 1 - x."""
    mirrored = game.model_copy(update={"density": Density.from_step(game.f.reflect())})
    if profile is None:
        return mirrored, None
    return mirrored, Profile(locations=tuple(ONE - x for x in profile.locations))
