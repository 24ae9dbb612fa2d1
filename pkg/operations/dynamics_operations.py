"""
Dynamics Operations
Exact best responses and best-response dynamics for support-mode games.
"""

from fractions import Fraction
from typing import Literal, Optional

from config.settings import settings
from models.game_models import Game, Profile, UtilityMode
from models.result_models import DynamicsStep, DynamicsTrace, TerminationReason
from operations.game_operations import entrant_objective, potential
from operations.step_function_operations import argmax, format_rational, to_rational
from utils.errors import ConstructionInvariantError, ModeError
from utils.logger import logger

Order = Literal["round-robin", "max-gain"]


def _require_support_mode(game: Game) -> None:
    if game.mode != UtilityMode.SUPPORT:
        raise ModeError("Best responses are defined for support mode only")


def _response(game: Game, profile: Profile, agent: int) -> tuple[Fraction, Fraction, Fraction]:
    """(best location, best value, current value) for one agent."""
    objective = entrant_objective(game, profile, agent)
    location, value = argmax(objective)
    return location, value, objective(profile.locations[agent])


def best_response(game: Game, profile: Profile, agent: int) -> tuple[Fraction, Fraction]:
    """
    Leftmost location maximizing agent i's support with everyone else fixed.

    Returns:
        (location, value)

    Raises:
        ModeError: If the game is in winner mode
        ProfileError: If the profile is infeasible
    """
    _require_support_mode(game)
    game.check_profile(profile)
    location, value, _ = _response(game, profile, agent)
    return location, value


def run_dynamics(
    game: Game,
    start: Profile,
    epsilon: Optional[Fraction] = None,
    round_limit: Optional[int] = None,
    order: Order = "round-robin",
) -> tuple[Profile, DynamicsTrace]:
    """
    Improving best-response dynamics.

    An agent moves to its best response only when that gains more than epsilon.
    The run is epsilon-stable once every agent has been checked since the last
    move without moving; it stops early after `round_limit` moves.
    Every move raises the potential by exactly its gain.
    """
    _require_support_mode(game)
    game.check_profile(start)
    epsilon = to_rational(settings.default_epsilon if epsilon is None else epsilon)
    round_limit = settings.default_round_limit if round_limit is None else round_limit
    if order not in ("round-robin", "max-gain"):
        raise ValueError(f"Unknown dynamics order '{order}'")

    profile = start
    phi = potential(game, profile)
    initial_phi = phi
    steps: list[DynamicsStep] = []
    evaluations = 0
    reason = TerminationReason.EPSILON_STABLE

    def apply(agent: int, location: Fraction, gain: Fraction) -> None:
        nonlocal profile, phi
        moved = profile.moved(agent, location)
        new_phi = potential(game, moved)
        if new_phi - phi != gain:
            raise ConstructionInvariantError(
                f"Potential changed by {format_rational(new_phi - phi)} but agent {agent + 1} "
                f"gained {format_rational(gain)}",
                instance=(game, profile, agent, location),
            )
        steps.append(DynamicsStep(
            step=len(steps),
            agent=agent,
            old_location=profile.locations[agent],
            new_location=location,
            gain=gain,
            potential=new_phi,
        ))
        profile, phi = moved, new_phi

    if order == "round-robin":
        agent = 0
        idle = 0
        while game.n and idle < game.n:
            if len(steps) >= round_limit:
                reason = TerminationReason.ROUND_LIMIT
                break
            location, value, current = _response(game, profile, agent)
            evaluations += 1
            gain = value - current
            if gain > epsilon:
                apply(agent, location, gain)
                idle = 0
            else:
                idle += 1
            agent = (agent + 1) % game.n
    else:
        while game.n:
            if len(steps) >= round_limit:
                reason = TerminationReason.ROUND_LIMIT
                break
            best: Optional[tuple[Fraction, int, Fraction]] = None
            for agent in range(game.n):
                location, value, current = _response(game, profile, agent)
                evaluations += 1
                gain = value - current
                if best is None or gain > best[0]:
                    best = (gain, agent, location)
            gain, agent, location = best
            if gain <= epsilon:
                break
            apply(agent, location, gain)

    trace = DynamicsTrace(
        steps=tuple(steps),
        terminated=reason == TerminationReason.EPSILON_STABLE,
        reason=reason,
        order=order,
        epsilon=epsilon,
        initial_potential=initial_phi,
        evaluations=evaluations,
    )
    logger.info(
        f"[SupportDynamics] {reason.value} after {len(steps)} moves "
        f"({evaluations} evaluations), potential {format_rational(phi)}"
    )
    return profile, trace
