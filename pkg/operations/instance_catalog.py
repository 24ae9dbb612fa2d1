"""
Instance Catalog
Worked instances with known exact answers, used by reproduction checks and tests.
"""

from fractions import Fraction

from models.game_models import Density, Game, Profile, UtilityMode

ONE = Fraction(1)


def mixed_widths_instance(mode: UtilityMode = UtilityMode.SUPPORT) -> tuple[Game, Profile]:
    """Uniform density, widths (2/5, 3/10, 2/5), profile (1/5, 13/20, 4/5)."""
    game = Game(
        density=Density.uniform(),
        widths=(Fraction(2, 5), Fraction(3, 10), Fraction(2, 5)),
        mode=mode,
    )
    return game, Profile.of(Fraction(1, 5), Fraction(13, 20), Fraction(4, 5))


def shared_peak_game(mode: UtilityMode = UtilityMode.WINNER) -> Game:
    """Two agents of width 2/5 on {5/4 on [0, 2/5], 5/6 after}."""
    density = Density.from_pieces([(Fraction(2, 5), Fraction(5, 4)), (ONE, Fraction(5, 6))])
    return Game(density=density, widths=(Fraction(2, 5),) * 2, mode=mode)


def ordinal_counterexample_game() -> Game:
    """Three agents of width 1/3 on a density heavy on the outer thirds."""
    density = Density.from_pieces([
        (Fraction(1, 3), Fraction(4, 3)),
        (Fraction(2, 3), Fraction(1, 3)),
        (ONE, Fraction(4, 3)),
    ])
    return Game(density=density, widths=(Fraction(1, 3),) * 3, mode=UtilityMode.WINNER)


def fairness_tight_instance() -> tuple[Game, Profile]:
    """Equal widths 1/2 where the equilibrium (1/4, 3/4) splits support 1 : 2."""
    density = Density.from_pieces([(Fraction(1, 2), Fraction(2, 3)), (ONE, Fraction(4, 3))])
    game = Game(density=density, widths=(Fraction(1, 2),) * 2, mode=UtilityMode.SUPPORT)
    return game, Profile.of(Fraction(1, 4), Fraction(3, 4))


def poa_family_instance(n: int) -> tuple[Game, Profile, Profile]:
    """
    n agents of width 1/n with a heavy first cell.

    Returns the game, the all-stacked equilibrium at 1/(2n) (welfare n/(2n-1))
    and the tiling optimum (welfare 1).
    """
    if n < 1:
        raise ValueError("The family needs at least one agent")
    if n == 1:
        density = Density.uniform()
    else:
        density = Density.from_pieces([
            (Fraction(1, n), Fraction(n * n, 2 * n - 1)),
            (ONE, Fraction(n, 2 * n - 1)),
        ])
    game = Game(density=density, widths=(Fraction(1, n),) * n, mode=UtilityMode.SUPPORT)
    stacked = Profile(locations=(Fraction(1, 2 * n),) * n)
    tiling = Profile(locations=tuple(Fraction(2 * i + 1, 2 * n) for i in range(n)))
    return game, stacked, tiling
