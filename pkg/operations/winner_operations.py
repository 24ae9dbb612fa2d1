"""
Winner Operations
Constructive pure equilibria for winner-mode games.

Every constructor returns a ConstructionResult whose profile has been certified
by the exact winner-mode verifier. An entrant joining a stack of c agents is
assumed to receive f/(c+1) per unit length; each result records that rule.
"""

from fractions import Fraction
from math import ceil

from pydantic import BaseModel, ConfigDict

from models.game_models import Density, Game, Profile, UtilityMode
from models.result_models import CaseTag, ConstructionResult
from operations.game_operations import stacked_entrant_objective, support_vector
from operations.step_function_operations import (
    ONE,
    ZERO,
    PiecewiseLinear,
    StepFunction,
    argmax,
    combine,
    first_point_at_or_after,
    format_rational,
    level_set,
    window_objective,
)
from operations.verifier_operations import verify_winner_ne
from utils.errors import (
    CertificationError,
    ConstructionInvariantError,
    ModeError,
    UnsupportedConfigurationError,
)
from utils.logger import logger
from utils.rationals import HALF

QUARTER = Fraction(1, 4)
THREE_QUARTERS = Fraction(3, 4)


# ── Shared helpers ────────────────────────────────────────────────────────────

def _require(game: Game, n_ok: bool, what: str) -> Fraction:
    if game.mode != UtilityMode.WINNER:
        raise ModeError("Winner-mode constructions need a winner-mode game")
    if not n_ok:
        raise UnsupportedConfigurationError(f"{what} does not apply to n = {game.n}")
    if not game.equal_widths():
        raise UnsupportedConfigurationError(f"{what} needs equal widths")
    return game.widths[0]


def _certify(
    game: Game,
    locations: list[Fraction],
    tag: CaseTag,
    intermediates: dict[str, Fraction],
    **extra,
) -> ConstructionResult:
    profile = Profile(locations=tuple(locations))
    certificate = verify_winner_ne(game, profile)
    if not certificate.is_equilibrium:
        logger.error(f"[WinnerConstruction] {tag.value} profile {profile} refuted")
        raise CertificationError(
            f"{tag.value} construction {profile} is not an equilibrium",
            certificate=certificate,
            instance=game,
        )
    logger.info(f"[WinnerConstruction] {tag.value} → {profile}")
    return ConstructionResult(
        profile=profile,
        case_tag=tag,
        intermediates=intermediates,
        certificate=certificate,
        **extra,
    )


def _single_objective(game: Game, width: Fraction) -> PiecewiseLinear:
    half = width / 2
    return window_objective(game.f, width, (half, ONE - half))


# ── Two agents ────────────────────────────────────────────────────────────────

def two_agent_ne(game: Game) -> ConstructionResult:
    """Both agents on the leftmost maximizer of the window mass."""
    width = _require(game, game.n == 2, "The two-agent construction")
    x1, u1 = argmax(_single_objective(game, width))
    return _certify(game, [x1, x1], CaseTag.TWO_AGENT, {"u1": u1, "x1": x1})


# ── Three agents ──────────────────────────────────────────────────────────────

def compatible_maximizers(game: Game, width: Fraction, limit: int = 3) -> list[Fraction]:
    """
    Greedy left-to-right u1-achievers whose windows overlap on zero mass.

    After a pick p, the next pick must sit at or beyond z0 + w/2 where z0 is the
    leftmost point with F(z0) = F(p + w/2).
    """
    objective = _single_objective(game, width)
    _, u1 = argmax(objective)
    achievers = level_set(objective, u1)
    cdf = game.f.cumulative()
    half = width / 2
    picks: list[Fraction] = []
    floor = objective.domain[0]
    while len(picks) < limit:
        pick = first_point_at_or_after(achievers, floor)
        if pick is None:
            break
        picks.append(pick)
        right = pick + half
        z0 = level_set(cdf, cdf(right))[0][0]
        floor = z0 + half
    return picks


def algorithm1(game: Game) -> ConstructionResult:
    """
    Three agents of equal width.

    Case 1/2 use simultaneous u1-achievers; otherwise agent 1 takes the leftmost
    u1-achiever and agents 2, 3 are placed by the second agent's objective.
    """
    width = _require(game, game.n == 3, "Algorithm 1")
    half = width / 2
    feasible = (half, ONE - half)
    objective = _single_objective(game, width)
    x1, u1 = argmax(objective)

    picks = compatible_maximizers(game, width)
    if len(picks) >= 3:
        result = _certify(game, picks[:3], CaseTag.A1_CASE1, {"u1": u1, "x1": picks[0]})
        if set(support_vector(game, result.profile)) != {u1}:
            raise ConstructionInvariantError("Case 1 agents do not all hold u1", instance=game)
        return result
    if len(picks) == 2:
        return _certify(game, [picks[0], picks[1], picks[1]], CaseTag.A1_CASE2, {"u1": u1, "x1": picks[0]})

    first = StepFunction.indicator(x1 - half, x1 + half)
    entrant = window_objective(
        _combine_entrant(game.f, first), width, feasible
    )
    _, u2 = argmax(entrant)
    intermediates = {"u1": u1, "x1": x1, "u2": u2}
    if entrant(x1) == u2:
        return _certify(game, [x1, x1, x1], CaseTag.A1_CASE3, intermediates)

    achievers = level_set(entrant, u2)
    left = [hi for lo, hi in achievers if hi < x1]
    right = [lo for lo, hi in achievers if lo > x1]
    if left and right:
        x2, x3 = max(left), min(right)
        result = _certify(game, [x1, x2, x3], CaseTag.A1_CASE4, {**intermediates, "x2": x2, "x3": x3})
        supports = support_vector(game, result.profile)
        if supports[1] != supports[2]:
            raise ConstructionInvariantError("Case 4 flanking agents differ in support", instance=game)
        return result

    t2 = achievers[0][0]
    t3 = achievers[-1][1]
    x2, x3 = (t3, t2) if t2 < x1 else (t2, t3)
    return _certify(game, [x1, x2, x3], CaseTag.A1_CASE5, {**intermediates, "t2": t2, "t3": t3})


def _combine_entrant(f: StepFunction, stack: StepFunction) -> StepFunction:
    return combine(f, stack, lambda fv, c: fv / (c + 1))


# ── Width one half ────────────────────────────────────────────────────────────

def stack_depth(game: Game, x1: Fraction, k: int) -> int:
    """
    Largest t ≤ k such that, with j - 1 agents stacked at x1, x1 still maximizes
    the next entrant's objective for every j = 2..t.
    """
    t = 1
    for j in range(2, k + 1):
        objective = stacked_entrant_objective(game, x1, HALF, j - 1)
        _, best = argmax(objective)
        if objective(x1) != best:
            break
        t = j
    return t


def _flank_lines(game: Game, k: int) -> tuple[PiecewiseLinear, PiecewiseLinear]:
    """
    ll(x) = max over z ≤ x of an entrant's support at z beside k-2 agents at x;
    rl(x) the same over z ≥ x. Both on [1/4, 3/4].
    """
    beta = Fraction(k - 2, k - 1)
    cdf = game.f.cumulative()
    ahead = cdf.shift(-QUARTER).restrict(QUARTER, THREE_QUARTERS)
    behind = cdf.shift(QUARTER).restrict(QUARTER, THREE_QUARTERS)
    left_gain = ahead.scale(1 - beta) - behind
    right_gain = ahead - behind.scale(1 - beta)
    ll = behind.scale(beta) + left_gain.running_max()
    rl = right_gain.suffix_max() - ahead.scale(beta)
    return ll, rl


def algorithm2(game: Game) -> ConstructionResult:
    """
    n ≥ 2 agents of width 1/2.

    SPLIT when both halves carry mass 1/2 and u1 = 1/2; STACK when the stack at
    x1 absorbs every agent; otherwise FLANK with k-2 agents at the zero x* of
    ll - rl and one agent on either side.
    """
    width = _require(game, game.n >= 2, "Algorithm 2")
    if width != HALF:
        raise UnsupportedConfigurationError(f"Algorithm 2 needs width 1/2, got {format_rational(width)}")
    k = game.n
    objective = _single_objective(game, width)
    x1, u1 = argmax(objective)
    half_mass = game.f.integrate(ZERO, HALF)

    if half_mass == HALF and u1 == HALF:
        left = ceil(k / 2)
        locations = [QUARTER] * left + [THREE_QUARTERS] * (k - left)
        return _certify(game, locations, CaseTag.A2_SPLIT, {"u1": u1, "x1": x1})

    t = stack_depth(game, x1, k)
    intermediates = {"u1": u1, "x1": x1, "t": Fraction(t)}
    if k <= t + 1:
        return _certify(game, [x1] * k, CaseTag.A2_STACK, intermediates)

    ll, rl = _flank_lines(game, k)
    zeros = level_set(ll - rl, ZERO)
    if not zeros:
        raise ConstructionInvariantError("ll - rl has no zero on [1/4, 3/4]", instance=game)
    x_star = zeros[0][0]
    stacked = stacked_entrant_objective(game, x_star, HALF, k - 2)
    left_value, right_value = ll(x_star), rl(x_star)
    left_side = level_set(stacked.restrict(QUARTER, x_star), left_value)
    right_side = level_set(stacked.restrict(x_star, THREE_QUARTERS), right_value)
    if not left_side or not right_side:
        raise ConstructionInvariantError(
            f"Flank values {format_rational(left_value)} / {format_rational(right_value)} "
            f"not attained around x* = {format_rational(x_star)}",
            instance=game,
        )
    x_l = left_side[0][0]
    x_r = right_side[-1][1]
    locations = [x_star] * (k - 2) + [x_l, x_r]
    return _certify(
        game,
        locations,
        CaseTag.A2_FLANK,
        {**intermediates, "x_star": x_star, "x_l": x_l, "x_r": x_r, "ll": left_value, "rl": right_value},
    )


# ── Width reduction ───────────────────────────────────────────────────────────

class WidthReduction(BaseModel):
    """
    Map from a game of equal width w ≥ 1/2 to a width-1/2 game.

    The common core [1-w, w] lies in every interval and is cut out; the two
    remaining flanks are stretched onto [0, 1/2] and [1/2, 1].
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    width: Fraction
    game: Game | None
    excised_mass: Fraction
    degenerate: bool

    @property
    def scale(self) -> Fraction:
        return 2 - 2 * self.width

    def forward(self, x: Fraction) -> Fraction:
        """Original centre → reduced centre."""
        return (x - self.width + HALF) / self.scale

    def inverse(self, x: Fraction) -> Fraction:
        """Reduced centre → original centre."""
        return self.scale * x + self.width - HALF


def reduce_width(game: Game) -> WidthReduction:
    """
    Build the width-1/2 game for equal widths w ∈ [1/2, 1].

    When the flanks carry no mass (or w = 1) the reduction is degenerate and no
    reduced game exists; any profile is then trivially stable.
    """
    width = _require(game, game.n >= 2, "Width reduction")
    if width < HALF:
        raise UnsupportedConfigurationError(f"Width reduction needs w ≥ 1/2, got {format_rational(width)}")
    f = game.f
    left_end = ONE - width
    flank_mass = f.integrate(ZERO, left_end) + f.integrate(width, ONE)
    excised = ONE - flank_mass
    if width == ONE or flank_mass == 0:
        logger.info("[WidthReduction] Flanks carry no mass; reduction is degenerate")
        return WidthReduction(width=width, game=None, excised_mass=excised, degenerate=True)

    scale = 2 - 2 * width
    pieces: list[tuple[Fraction, Fraction]] = []
    for lo, hi, value in f.pieces():
        if lo < left_end:
            pieces.append((min(hi, left_end) / scale, value))
    for lo, hi, value in f.pieces():
        if hi > width:
            pieces.append(((hi - 2 * width + 1) / scale, value))
    step = StepFunction.from_pieces((upto, value * scale / flank_mass) for upto, value in pieces)
    reduced = Game(density=Density.from_step(step), widths=(HALF,) * game.n, mode=UtilityMode.WINNER)
    return WidthReduction(width=width, game=reduced, excised_mass=excised, degenerate=False)


def solve_reduced(game: Game) -> ConstructionResult:
    """Reduce to width 1/2, run Algorithm 2, map back and certify on the original game."""
    reduction = reduce_width(game)
    if reduction.degenerate:
        return _certify(
            game,
            [HALF] * game.n,
            CaseTag.REDUCED,
            {"excised_mass": reduction.excised_mass},
            degenerate=True,
        )
    inner = algorithm2(reduction.game)
    locations = [reduction.inverse(x) for x in inner.profile.locations]
    return _certify(
        game,
        locations,
        CaseTag.REDUCED,
        {**inner.intermediates, "scale": reduction.scale, "excised_mass": reduction.excised_mass},
        inner_case=inner.case_tag,
    )


def construct_winner_ne(game: Game) -> ConstructionResult:
    """Pick the construction that applies to (n, w)."""
    if game.n == 1:
        raise UnsupportedConfigurationError("A single agent needs no construction")
    width = _require(game, True, "Winner construction")
    if game.n == 2:
        return two_agent_ne(game)
    if game.n == 3:
        return algorithm1(game)
    if width == HALF:
        return algorithm2(game)
    if width > HALF:
        return solve_reduced(game)
    raise UnsupportedConfigurationError(
        f"No construction for n = {game.n} with width {format_rational(width)} < 1/2"
    )
