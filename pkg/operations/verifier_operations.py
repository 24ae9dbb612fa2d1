"""
Verifier Operations
Exact and grid-based equilibrium checks, plus the ordinal-potential counterexample replay.
"""

from fractions import Fraction
from typing import Optional

from config.settings import settings
from models.game_models import Game, Profile, UtilityMode
from models.result_models import (
    Deviation,
    Method,
    NeCertificate,
    ReplayReport,
    ReplayStep,
    Verdict,
)
from operations.instance_catalog import ordinal_counterexample_game
from operations.game_operations import congestion, entrant_objective, utility_report
from operations.step_function_operations import (
    ONE,
    ZERO,
    PiecewiseLinear,
    StepFunction,
    argmax,
    combine,
    crossings,
    format_rational,
    to_rational,
    window_objective,
)
from utils.errors import DomainError, ModeError, ReplayError
from utils.logger import logger


def _certificate(
    game: Game,
    profile: Profile,
    method: Method,
    gaps: list[Fraction],
    best: Optional[Deviation],
    tolerance: Fraction,
    coarse: bool = False,
) -> NeCertificate:
    refuted = best is not None and best.new_utility - best.old_utility > tolerance
    return NeCertificate(
        verdict=Verdict.NOT_EQUILIBRIUM if refuted else Verdict.EQUILIBRIUM,
        mode=game.mode,
        method=method,
        profile=profile,
        gaps=tuple(gaps),
        best_deviation=best if refuted else None,
        tolerance=tolerance,
        coarse=coarse,
    )


def _better(candidate: Deviation, incumbent: Optional[Deviation]) -> bool:
    """Larger gain wins; ties go to the smaller (agent, location)."""
    if incumbent is None:
        return True
    if candidate.gain != incumbent.gain:
        return candidate.gain > incumbent.gain
    return (candidate.agent, candidate.location) < (incumbent.agent, incumbent.location)


# ── Support mode ──────────────────────────────────────────────────────────────

def verify_support_ne(game: Game, profile: Profile, tolerance: Fraction = ZERO) -> NeCertificate:
    """
    Exact support-mode check: each agent's best response against its current support.

    The profile is an equilibrium iff every gap is at most `tolerance`.
    """
    if game.mode != UtilityMode.SUPPORT:
        raise ModeError("verify_support_ne needs a support-mode game")
    game.check_profile(profile)
    tolerance = to_rational(tolerance)
    gaps = []
    best: Optional[Deviation] = None
    for i in range(game.n):
        objective = entrant_objective(game, profile, i)
        location, value = argmax(objective)
        current = objective(profile.locations[i])
        gaps.append(value - current)
        deviation = Deviation(agent=i, location=location, old_utility=current, new_utility=value)
        if value > current and _better(deviation, best):
            best = deviation
    return _certificate(game, profile, Method.EXACT, gaps, best, tolerance)


# ── Winner mode ───────────────────────────────────────────────────────────────

def deviation_support_curves(game: Game, profile: Profile, agent: int) -> list[PiecewiseLinear]:
    """
    Support of every agent as a function of agent i's location y ∈ L_i.

    s_i(y) integrates f/(c_{-i}+1) over the moved interval. For j ≠ i,
    s_j(y) = ∫_{R_j} f/c_{-i} minus what agent i takes from R_j, which is the
    window integral of 1_{R_j}·(f/c_{-i} - f/(c_{-i}+1)).
    """
    game.check_profile(profile)
    f = game.f
    width = game.widths[agent]
    feasible = game.feasible(agent)
    others = congestion(game, profile, without=agent)
    alone = combine(f, others, lambda fv, c: fv / c if c else ZERO)
    shared = combine(f, others, lambda fv, c: fv / (c + 1))
    loss = alone - shared
    curves = []
    for j in range(game.n):
        if j == agent:
            curves.append(window_objective(shared, width, feasible))
            continue
        lo, hi = game.interval(profile, j)
        base = alone.integrate(lo, hi)
        taken = window_objective(loss * StepFunction.indicator(lo, hi), width, feasible)
        curves.append(taken.scale(-1).add_constant(base))
    return curves


def deviation_cells(game: Game, profile: Profile, agent: int) -> list[Fraction]:
    """
    Sorted split points of L_i for agent i's deviations.

    Between consecutive split points every support curve is linear and no two
    curves cross, so the winner set is constant on each open cell.
    """
    return _split_points(deviation_support_curves(game, profile, agent))


def _split_points(curves: list[PiecewiseLinear]) -> list[Fraction]:
    points: set[Fraction] = set()
    for curve in curves:
        points.update(curve.breakpoints)
    for a in range(len(curves)):
        for b in range(a + 1, len(curves)):
            points.update(crossings(curves[a], curves[b]).points)
    return sorted(points)


def _winner_utility(values: list[Fraction], agent: int) -> Fraction:
    best = max(values)
    if values[agent] != best:
        return ZERO
    return Fraction(1, sum(1 for v in values if v == best))


def verify_winner_ne(game: Game, profile: Profile) -> NeCertificate:
    """
    Exact winner-mode check over every cell of every agent's deviation space.

    A deviation is profitable iff it strictly raises 1/|W| membership utility.
    Candidates are the split points and the midpoints of consecutive ones.
    """
    if game.mode != UtilityMode.WINNER:
        raise ModeError("verify_winner_ne needs a winner-mode game")
    game.check_profile(profile)
    current = utility_report(game, profile).utilities
    gaps = []
    best: Optional[Deviation] = None
    for i in range(game.n):
        curves = deviation_support_curves(game, profile, i)
        split = _split_points(curves)
        candidates = list(split) + [(a + b) / 2 for a, b in zip(split, split[1:])]
        top_value = ZERO
        top_location = profile.locations[i]
        for y in sorted(candidates):
            value = _winner_utility([curve(y) for curve in curves], i)
            if value > top_value:
                top_value, top_location = value, y
        gaps.append(max(top_value - current[i], ZERO))
        deviation = Deviation(agent=i, location=top_location, old_utility=current[i], new_utility=top_value)
        if top_value > current[i] and _better(deviation, best):
            best = deviation
    certificate = _certificate(game, profile, Method.EXACT, gaps, best, ZERO)
    if not certificate.is_equilibrium:
        dev = certificate.best_deviation
        logger.info(
            f"[Verifier] Agent {dev.agent + 1} improves {format_rational(dev.old_utility)} → "
            f"{format_rational(dev.new_utility)} at {format_rational(dev.location)}"
        )
    return certificate


def verify_ne(game: Game, profile: Profile, tolerance: Fraction = ZERO) -> NeCertificate:
    """Exact check in the game's own mode."""
    if game.mode == UtilityMode.WINNER:
        return verify_winner_ne(game, profile)
    return verify_support_ne(game, profile, tolerance)


# ── Grid oracle ───────────────────────────────────────────────────────────────

def lattice(lo: Fraction, hi: Fraction, step: Fraction) -> list[Fraction]:
    """lo, lo + step, ... up to hi."""
    if step <= 0:
        raise DomainError("Grid step must be positive")
    count = int((hi - lo) / step)
    return [lo + k * step for k in range(count + 1)]


def grid_verify(
    game: Game,
    profile: Profile,
    step: Optional[Fraction] = None,
    tolerance: Fraction = ZERO,
) -> NeCertificate:
    """
    Independent check on the lattice {w_i/2 + k·step} ∩ L_i with exact utilities.

    Sound for refutation only: a reported improvement is a real one. A step
    longer than [0, 1] leaves no lattice to search, so the profile is accepted
    with zero gaps and flagged coarse. A step that only exceeds some L_i still
    tests the single point w_i/2 for that agent, also flagged coarse.
    """
    game.check_profile(profile)
    step = to_rational(settings.default_grid_step if step is None else step)
    tolerance = to_rational(tolerance)
    if step <= 0:
        raise DomainError("Grid step must be positive")
    if step > ONE:
        return _certificate(game, profile, Method.GRID, [ZERO] * game.n, None, tolerance, coarse=True)
    current = utility_report(game, profile).utilities
    gaps = []
    best: Optional[Deviation] = None
    coarse = False
    for i in range(game.n):
        points = lattice(*game.feasible(i), step)
        coarse = coarse or len(points) == 1
        top_value, top_location = current[i], profile.locations[i]
        for y in points:
            value = utility_report(game, profile.moved(i, y)).utilities[i]
            if value > top_value:
                top_value, top_location = value, y
        gaps.append(top_value - current[i])
        deviation = Deviation(agent=i, location=top_location, old_utility=current[i], new_utility=top_value)
        if top_value > current[i] and _better(deviation, best):
            best = deviation
    return _certificate(game, profile, Method.GRID, gaps, best, tolerance, coarse=coarse)


# ── Ordinal-potential counterexample ──────────────────────────────────────────

_ORDINAL_START = (Fraction(1, 6),) * 3
# (path, agent, new location, expected sign of the mover's winner-utility change)
_ORDINAL_MOVES = (
    (1, 2, Fraction(5, 9), -1),
    (1, 1, Fraction(5, 9), -1),
    (1, 2, Fraction(5, 6), 0),
    (1, 1, Fraction(1, 6), 0),
    (2, 2, Fraction(5, 6), 1),
)


def _sign(value: Fraction) -> int:
    return (value > 0) - (value < 0)


def replay_ordinal_counterexample() -> ReplayReport:
    """
    Replay the two deviation paths between the same pair of profiles.

    Path 1 loses winner utility or keeps it at every step; path 2 is one move
    that strictly gains. No ordinal potential can agree with both.

    Raises:
        ReplayError: If any step shows a different sign
    """
    game = ordinal_counterexample_game()
    support_game = game.with_mode(UtilityMode.SUPPORT)
    start = Profile(locations=_ORDINAL_START)
    steps = []
    ends: dict[int, Profile] = {}
    for path in (1, 2):
        profile = start
        for index, (move_path, agent, location, expected) in enumerate(m for m in _ORDINAL_MOVES if m[0] == path):
            after = profile.moved(agent, location)
            before_w = utility_report(game, profile).utilities[agent]
            after_w = utility_report(game, after).utilities[agent]
            before_s = utility_report(support_game, profile).utilities[agent]
            after_s = utility_report(support_game, after).utilities[agent]
            steps.append(ReplayStep(
                path=path,
                step=index,
                agent=agent,
                before=profile,
                after=after,
                winner_before=before_w,
                winner_after=after_w,
                support_before=before_s,
                support_after=after_s,
                expected_sign=expected,
                observed_sign=_sign(after_w - before_w),
            ))
            profile = after
        ends[path] = profile
    report = ReplayReport(steps=tuple(steps), start=start, end=ends[1])
    if ends[1] != ends[2]:
        raise ReplayError(f"Paths end at different profiles {ends[1]} and {ends[2]}")
    for step in report.steps:
        if not step.ok:
            raise ReplayError(
                f"Path {step.path} step {step.step + 1}: agent {step.agent + 1} winner utility "
                f"{format_rational(step.winner_before)} → {format_rational(step.winner_after)}, "
                f"expected sign {step.expected_sign}"
            )
    return report
