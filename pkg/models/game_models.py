"""
Pydantic models for attraction games
Density, game, profile and utility report.
"""

from enum import Enum
from fractions import Fraction
from typing import Annotated, Any, Iterable

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, PlainValidator, field_validator

from operations.step_function_operations import StepFunction
from utils.errors import DomainError, ProfileError
from utils.logger import logger
from utils.rationals import ONE, ZERO, format_rational, to_rational

Rational = Annotated[
    Fraction,
    PlainValidator(to_rational),
    PlainSerializer(format_rational, return_type=str),
]


class UtilityMode(str, Enum):
    """How an agent's utility is derived from the profile."""
    SUPPORT = "support"
    WINNER = "winner"


class Density(BaseModel):
    """Nonnegative step function with unit mass."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    step: StepFunction = Field(..., description="Normalized piecewise-constant density")
    was_normalized: bool = Field(default=False, description="True if the input mass was rescaled to 1")

    @classmethod
    def from_step(cls, step: StepFunction) -> "Density":
        """
        Validate and normalize a step function into a density.

        Raises:
            DomainError: If any piece is negative or the total mass is zero
        """
        for lo, hi, value in step.pieces():
            if value < 0:
                raise DomainError(
                    f"Density is negative ({format_rational(value)}) on "
                    f"[{format_rational(lo)}, {format_rational(hi)})"
                )
        mass = step.total()
        if mass == 0:
            raise DomainError("Density has zero mass")
        rescaled = mass != 1
        if rescaled:
            logger.warning(f"[Density] Input mass {format_rational(mass)} rescaled to 1")
            step = step.scale(ONE / mass)
        return cls(step=step.normalize(), was_normalized=rescaled)

    @classmethod
    def from_pieces(cls, pieces: Iterable[tuple[Any, Any]]) -> "Density":
        return cls.from_step(StepFunction.from_pieces(pieces))

    @classmethod
    def uniform(cls) -> "Density":
        return cls.from_step(StepFunction.constant(ONE))

    def mass(self, lo: Any, hi: Any) -> Fraction:
        return self.step.integrate(lo, hi)


class Profile(BaseModel):
    """Locations x_1..x_n of the interval centres."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    locations: tuple[Rational, ...]

    @classmethod
    def of(cls, *locations: Any) -> "Profile":
        return cls(locations=tuple(locations))

    def __len__(self) -> int:
        return len(self.locations)

    def __getitem__(self, i: int) -> Fraction:
        return self.locations[i]

    def moved(self, agent: int, location: Any) -> "Profile":
        """Copy of the profile with one agent relocated."""
        locations = list(self.locations)
        locations[agent] = to_rational(location)
        return Profile(locations=tuple(locations))

    def __str__(self) -> str:
        return "(" + ", ".join(format_rational(x) for x in self.locations) + ")"


class Game(BaseModel):
    """n agents with interval widths w_i on a density over [0, 1]."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    density: Density
    widths: tuple[Rational, ...]
    mode: UtilityMode = UtilityMode.SUPPORT

    @field_validator("widths")
    @classmethod
    def _widths_in_unit(cls, widths: tuple[Fraction, ...]) -> tuple[Fraction, ...]:
        for i, w in enumerate(widths):
            if w <= 0 or w > 1:
                raise ValueError(f"width of agent {i + 1} is {format_rational(w)}, outside (0, 1]")
        return widths

    @property
    def n(self) -> int:
        return len(self.widths)

    @property
    def f(self) -> StepFunction:
        return self.density.step

    def feasible(self, agent: int) -> tuple[Fraction, Fraction]:
        """L_i = [w_i/2, 1 - w_i/2]."""
        half = self.widths[agent] / 2
        return half, ONE - half

    def interval(self, profile: Profile, agent: int) -> tuple[Fraction, Fraction]:
        """R_i = [x_i - w_i/2, x_i + w_i/2]."""
        half = self.widths[agent] / 2
        x = profile.locations[agent]
        return x - half, x + half

    def with_mode(self, mode: UtilityMode) -> "Game":
        return self.model_copy(update={"mode": UtilityMode(mode)})

    def equal_widths(self) -> bool:
        return len(set(self.widths)) <= 1

    def check_profile(self, profile: Profile) -> None:
        """
        Raises:
            ProfileError: If the profile size differs from n or a location leaves L_i
        """
        if len(profile) != self.n:
            raise ProfileError(f"Profile has {len(profile)} locations for {self.n} agents")
        for i, x in enumerate(profile.locations):
            lo, hi = self.feasible(i)
            if x < lo or x > hi:
                raise ProfileError(
                    f"Agent {i + 1} at {format_rational(x)} is outside "
                    f"[{format_rational(lo)}, {format_rational(hi)}]",
                    agent=i,
                )


class UtilityReport(BaseModel):
    """Supports, winner set and mode utilities of one profile."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    mode: UtilityMode
    supports: tuple[Rational, ...]
    winner_set: frozenset[int]
    utilities: tuple[Rational, ...]
    covered_mass: Rational = Field(default=ZERO)
    potential: Rational = Field(default=ZERO)
