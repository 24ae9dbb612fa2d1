"""
Analysis Operations
Fairness, price of anarchy, uncovered mass, optimal welfare, random instances and corpus runs.
"""

import itertools
import random
from collections import Counter
from fractions import Fraction
from math import ceil
from multiprocessing import Pool
from typing import Literal, Optional

from tqdm import tqdm

from config.settings import settings
from models.config_models import InstanceSpec
from models.game_models import Density, Game, Profile, UtilityMode
from models.result_models import AnalysisReport, CorpusRecord, CorpusSummary
from operations.dynamics_operations import run_dynamics
from operations.game_operations import support_vector, utility_report
from operations.step_function_operations import (
    ONE,
    ZERO,
    PiecewiseLinear,
    StepFunction,
    format_rational,
    level_set,
    upper_envelope,
)
from operations.verifier_operations import grid_verify, lattice, verify_ne, verify_support_ne
from operations.winner_operations import construct_winner_ne
from utils.errors import (
    CertificationError,
    ConfigError,
    DegenerateInstanceError,
    ModeError,
    NotEquilibriumError,
    UnsupportedConfigurationError,
)
from utils.logger import logger

Suite = Literal["support-bounds", "winner-construct", "oracle-agreement"]
SUITES = ("support-bounds", "winner-construct", "oracle-agreement")


# ── Fairness ──────────────────────────────────────────────────────────────────

def fairness_ratio(game: Game, profile: Profile) -> Fraction:
    """
    min_i s_i / max_i s_i.

    Raises:
        DegenerateInstanceError: If every support is zero
    """
    supports = support_vector(game, profile)
    if not supports:
        return ONE
    top = max(supports)
    if top == 0:
        raise DegenerateInstanceError("All supports are zero; fairness is undefined")
    return min(supports) / top


def fairness_bound(game: Game) -> Fraction:
    """1 / (2⌈w_max / w_min⌉)."""
    return Fraction(1, 2 * ceil(max(game.widths) / min(game.widths)))


def pairwise_fairness_violations(game: Game, profile: Profile) -> list[tuple[int, int]]:
    """Pairs (i, j) with s_i < s_j / (2⌈w_j / w_i⌉)."""
    supports = support_vector(game, profile)
    violations = []
    for i, j in itertools.permutations(range(game.n), 2):
        factor = 2 * ceil(game.widths[j] / game.widths[i])
        if supports[i] * factor < supports[j]:
            violations.append((i, j))
    return violations


def winner_fairness(game: Game, profile: Profile) -> Fraction:
    """Winner-mode fairness: 0 when some agent loses, 1 otherwise."""
    report = utility_report(game.with_mode(UtilityMode.WINNER), profile)
    return ONE if len(report.winner_set) == game.n else ZERO


# ── Optimal welfare ───────────────────────────────────────────────────────────

def _tiling(widths: tuple[Fraction, ...]) -> list[Fraction]:
    locations = []
    cursor = ZERO
    for w in widths:
        left = min(cursor, ONE - w)
        locations.append(left + w / 2)
        cursor = left + w
    return locations


def _placement_gain(cdf: PiecewiseLinear, previous: PiecewiseLinear, width: Fraction, lo: Fraction) -> PiecewiseLinear:
    """e ↦ V_prev(e - w) + F(e) - F(e - w) on [lo, 1]."""
    return (
        previous.shift(width).restrict(lo, ONE)
        + cdf.restrict(lo, ONE)
        - cdf.shift(width).restrict(lo, ONE)
    )


def optimal_welfare(game: Game) -> tuple[Fraction, Profile]:
    """
    Maximum total support, which equals the best covered mass.

    With Σw ≥ 1 the agents tile [0, 1]. Otherwise an optimum uses disjoint
    intervals, found exactly by a dynamic program over multisets of used widths
    whose value V_S(e) (best mass with the agents in S inside [0, e]) is a
    piecewise-linear function of the right edge e.
    """
    if game.n == 0:
        return ZERO, Profile(locations=())
    if sum(game.widths) >= 1:
        return ONE, Profile(locations=tuple(_tiling(game.widths)))

    cdf = game.f.cumulative()
    kinds = sorted(set(game.widths))
    counts = Counter(game.widths)
    full = tuple(counts[w] for w in kinds)

    def used(state: tuple[int, ...]) -> Fraction:
        return sum((c * w for c, w in zip(state, kinds)), ZERO)

    values: dict[tuple[int, ...], PiecewiseLinear] = {(0,) * len(kinds): PiecewiseLinear.constant(ZERO, ONE, ZERO)}

    def gains(state: tuple[int, ...], lo: Fraction) -> list[tuple[int, PiecewiseLinear]]:
        out = []
        for t, w in enumerate(kinds):
            if state[t] == 0:
                continue
            previous = state[:t] + (state[t] - 1,) + state[t + 1:]
            out.append((t, _placement_gain(cdf, values[previous], w, lo)))
        return out

    states = sorted(itertools.product(*(range(c + 1) for c in full)), key=sum)
    for state in states[1:]:
        lo = used(state)
        envelope = None
        for _, gain in gains(state, lo):
            envelope = gain if envelope is None else upper_envelope(envelope, gain)
        values[state] = envelope.running_max()

    best = values[full](ONE)
    placed: list[tuple[Fraction, Fraction]] = []
    state, edge = full, ONE
    while sum(state):
        lo = used(state)
        target = values[state](edge)
        choice = None
        for t, gain in gains(state, lo):
            hits = level_set(gain.restrict(lo, edge), target)
            if hits and (choice is None or hits[0][0] < choice[0]):
                choice = (hits[0][0], t)
        right, t = choice
        width = kinds[t]
        placed.append((width, right - width / 2))
        state = state[:t] + (state[t] - 1,) + state[t + 1:]
        edge = right - width

    pools: dict[Fraction, list[Fraction]] = {w: [] for w in kinds}
    for width, centre in placed:
        pools[width].append(centre)
    locations = [pools[w].pop() for w in game.widths]
    return best, Profile(locations=tuple(locations))


def covered_mass_of(cdf: PiecewiseLinear, intervals: list[tuple[Fraction, Fraction]]) -> Fraction:
    total = ZERO
    reach = ZERO
    for lo, hi in sorted(intervals):
        lo = max(lo, reach)
        if hi > lo:
            total += cdf(hi) - cdf(lo)
            reach = hi
    return total


def lattice_optimal_welfare(game: Game, step: Fraction) -> tuple[Fraction, Profile]:
    """Brute-force optimum over the lattice {w_i/2 + k·step}; small n only."""
    cdf = game.f.cumulative()
    grids = [lattice(*game.feasible(i), step) for i in range(game.n)]
    halves = [w / 2 for w in game.widths]
    best, best_locations = None, None
    for locations in itertools.product(*grids):
        mass = covered_mass_of(cdf, [(x - h, x + h) for x, h in zip(locations, halves)])
        if best is None or mass > best:
            best, best_locations = mass, locations
    return best, Profile(locations=tuple(best_locations))


# ── Price of anarchy ──────────────────────────────────────────────────────────

def welfare_slack(n: int, tolerance: Fraction, optimum: Fraction) -> Fraction:
    """How far below 1/2 the welfare ratio of an equilibrium at `tolerance` may fall."""
    return n * tolerance / (2 * optimum)


def poa_report(game: Game, profiles: list[Profile], tolerance: Fraction = ZERO) -> AnalysisReport:
    """
    Welfare, coverage and fairness of the worst supplied equilibrium.

    Raises:
        NotEquilibriumError: If any profile fails verification at `tolerance`
        ModeError: If the game is not in support mode
    """
    if game.mode != UtilityMode.SUPPORT:
        raise ModeError("Price of anarchy is analysed in support mode")
    if not profiles:
        raise ValueError("poa_report needs at least one equilibrium")
    welfare_of = []
    for profile in profiles:
        certificate = verify_support_ne(game, profile, tolerance)
        if not certificate.is_equilibrium:
            raise NotEquilibriumError(f"Profile {profile} is not an equilibrium", certificate=certificate)
        welfare_of.append(sum(support_vector(game, profile), ZERO))
    welfare = min(welfare_of)
    optimum, optimal_profile = optimal_welfare(game)
    ratio = welfare / optimum
    # Each agent moving to its slot in the optimum gains at most `tolerance`, so
    # welfare + n·tolerance ≥ optimum - welfare, i.e. ratio ≥ 1/2 - n·tolerance/(2·optimum).
    slack = welfare_slack(game.n, tolerance, optimum)
    uncovered = ONE - welfare
    uncovered_bound = 1 / (1 + sum(game.widths))
    fairness = min(fairness_ratio(game, p) for p in profiles)
    bound = fairness_bound(game)
    return AnalysisReport(
        fairness_ratio=fairness,
        fairness_bound=bound,
        welfare=welfare,
        optimal_welfare=optimum,
        optimal_profile=optimal_profile,
        welfare_ratio=ratio,
        uncovered=uncovered,
        uncovered_bound=uncovered_bound,
        fairness_ok=fairness >= bound,
        welfare_ok=ratio >= Fraction(1, 2) - slack,
        uncovered_ok=uncovered <= uncovered_bound,
        equilibria=len(profiles),
    )


# ── Random instances ──────────────────────────────────────────────────────────

def random_instance(seed: int, spec: InstanceSpec) -> Game:
    """
    Deterministic game from a seed.

    Breakpoints and piece values are multiples of the granularity before the
    density is rescaled to unit mass.

    Raises:
        ConfigError: If the spec cannot be satisfied
    """
    if spec.n_min > spec.n_max:
        raise ConfigError(f"n range [{spec.n_min}, {spec.n_max}] is empty")
    if spec.pieces_min > spec.pieces_max:
        raise ConfigError(f"piece range [{spec.pieces_min}, {spec.pieces_max}] is empty")
    cells = 1 / spec.granularity
    if cells.denominator != 1:
        raise ConfigError(f"granularity {format_rational(spec.granularity)} does not divide 1")
    cells = int(cells)
    if spec.pieces_min > cells:
        raise ConfigError(f"{spec.pieces_min} pieces do not fit on a {cells}-cell lattice")

    rng = random.Random(seed)
    n = rng.randint(spec.n_min, spec.n_max)
    pieces = rng.randint(spec.pieces_min, min(spec.pieces_max, cells))
    cuts = sorted(rng.sample(range(1, cells), pieces - 1))
    breakpoints = [ZERO] + [k * spec.granularity for k in cuts] + [ONE]
    values = [rng.randint(0, spec.max_value) * spec.granularity for _ in range(pieces)]
    if not any(values):
        values[rng.randrange(pieces)] = rng.randint(1, spec.max_value) * spec.granularity
    if spec.equal_widths:
        widths = (rng.choice(spec.widths),) * n
    else:
        widths = tuple(rng.choice(spec.widths) for _ in range(n))
    step = StepFunction(breakpoints, values)
    density = Density.from_step(step.scale(1 / step.total()))
    return Game(density=density, widths=widths, mode=spec.mode)


# ── Equilibrium search ────────────────────────────────────────────────────────

def spread_profile(game: Game) -> Profile:
    """Agent i near (2i+1)/(2n), clamped into L_i."""
    locations = []
    for i in range(game.n):
        lo, hi = game.feasible(i)
        locations.append(min(max(Fraction(2 * i + 1, 2 * game.n), lo), hi))
    return Profile(locations=tuple(locations))


def start_profiles(game: Game, seed: int, starts: Optional[int] = None) -> list[Profile]:
    """Seeded random starts plus the all-stacked and evenly-spread profiles."""
    starts = settings.multistart_count if starts is None else starts
    rng = random.Random(seed)
    profiles = [
        Profile(locations=(Fraction(1, 2),) * game.n),
        spread_profile(game),
    ]
    for _ in range(starts):
        locations = []
        for i in range(game.n):
            lo, hi = game.feasible(i)
            locations.append(lo + (hi - lo) * Fraction(rng.randrange(1001), 1000))
        profiles.append(Profile(locations=tuple(locations)))
    return profiles


def find_support_equilibria(
    game: Game,
    seed: int,
    starts: Optional[int] = None,
    epsilon: Optional[Fraction] = None,
    round_limit: Optional[int] = None,
) -> list[Profile]:
    """Distinct exactly-certified equilibria reached by dynamics from every start."""
    found: list[Profile] = []
    for start in start_profiles(game, seed, starts):
        end, trace = run_dynamics(game, start, epsilon=epsilon, round_limit=round_limit)
        if not trace.terminated or end in found:
            continue
        if verify_support_ne(game, end).is_equilibrium:
            found.append(end)
    return found


# ── Corpus ────────────────────────────────────────────────────────────────────

def _widths_text(game: Game) -> str:
    return ";".join(format_rational(w) for w in game.widths)


def _support_bounds(seed: int, spec: InstanceSpec, starts: Optional[int]) -> CorpusRecord:
    game = random_instance(seed, spec).with_mode(UtilityMode.SUPPORT)
    equilibria = find_support_equilibria(game, seed, starts)
    base = dict(seed=seed, suite="support-bounds", n=game.n, widths=_widths_text(game))
    if not equilibria:
        return CorpusRecord(**base, detail="no exact equilibrium reached")
    report = poa_report(game, equilibria)
    pairwise = [pair for p in equilibria for pair in pairwise_fairness_violations(game, p)]
    return CorpusRecord(
        **base,
        certified=True,
        equilibria=len(equilibria),
        fairness=report.fairness_ratio,
        fairness_bound=report.fairness_bound,
        ratio=report.welfare_ratio,
        uncovered=report.uncovered,
        uncovered_bound=report.uncovered_bound,
        violation=not report.bounds_ok or bool(pairwise),
        detail=f"pairwise violations {pairwise}" if pairwise else "",
    )


def _winner_construct(seed: int, spec: InstanceSpec) -> CorpusRecord:
    game = random_instance(seed, spec).with_mode(UtilityMode.WINNER)
    base = dict(seed=seed, suite="winner-construct", n=game.n, widths=_widths_text(game))
    try:
        result = construct_winner_ne(game)
    except UnsupportedConfigurationError as e:
        return CorpusRecord(**base, detail=f"unsupported: {e}")
    except CertificationError as e:
        return CorpusRecord(**base, violation=True, detail=str(e))
    return CorpusRecord(**base, certified=True, equilibria=1, case_tag=result.case_tag.value)


def _oracle_agreement(seed: int, spec: InstanceSpec, grid_step: Optional[Fraction]) -> CorpusRecord:
    game = random_instance(seed, spec)
    profile = start_profiles(game, seed, starts=1)[-1]
    base = dict(seed=seed, suite="oracle-agreement", n=game.n, widths=_widths_text(game))
    exact = verify_ne(game, profile)
    grid = grid_verify(game, profile, grid_step)
    disagree = not grid.is_equilibrium and exact.is_equilibrium
    if not exact.is_equilibrium:
        dev = exact.best_deviation
        moved = utility_report(game, profile.moved(dev.agent, dev.location)).utilities[dev.agent]
        disagree = disagree or moved != dev.new_utility
    return CorpusRecord(
        **base,
        certified=exact.is_equilibrium,
        violation=disagree,
        detail=f"exact {exact.verdict.value}, grid {grid.verdict.value}",
    )


def analyze_instance(task: tuple) -> CorpusRecord:
    """One corpus instance; module-level so worker processes can pickle it."""
    seed, spec, suite, starts, grid_step = task
    if suite == "support-bounds":
        return _support_bounds(seed, spec, starts)
    if suite == "winner-construct":
        return _winner_construct(seed, spec)
    if suite == "oracle-agreement":
        return _oracle_agreement(seed, spec, grid_step)
    raise ConfigError(f"Unknown corpus suite '{suite}'")


def run_corpus(
    spec: InstanceSpec,
    count: int,
    seed: int = 0,
    suite: Suite = "support-bounds",
    workers: Optional[int] = None,
    starts: Optional[int] = None,
    grid_step: Optional[Fraction] = None,
    progress: bool = False,
) -> CorpusSummary:
    """
    Analyse seeds seed, seed+1, ..., seed+count-1; records come back in seed order.
    """
    if suite not in SUITES:
        raise ConfigError(f"Unknown corpus suite '{suite}'; choose from {', '.join(SUITES)}")
    if count < 1:
        raise ConfigError("Corpus needs at least one instance")
    workers = settings.corpus_workers if workers is None else workers
    tasks = [(seed + k, spec, suite, starts, grid_step) for k in range(count)]
    records: list[CorpusRecord] = []
    with tqdm(total=count, desc=f"   {suite}", unit=" inst", ncols=100, disable=not progress) as bar:
        if workers > 1:
            with Pool(processes=workers) as pool:
                for record in pool.imap(analyze_instance, tasks):
                    records.append(record)
                    bar.update(1)
        else:
            for task in tasks:
                records.append(analyze_instance(task))
                bar.update(1)
    violations = sum(1 for r in records if r.violation)
    if violations:
        logger.warning(f"[Corpus] {violations} of {count} {suite} instances violated a check")
    return CorpusSummary(
        suite=suite,
        instances=count,
        certified=sum(1 for r in records if r.certified),
        violations=violations,
        records=tuple(records),
    )
