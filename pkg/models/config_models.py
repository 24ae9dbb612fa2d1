"""
Pydantic models for run configuration
RunConfig is the JSON document every CLI command reads; InstanceSpec drives random instances.
"""

import json
from fractions import Fraction
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from models.game_models import Density, Game, Profile, Rational, UtilityMode
from utils.errors import ConfigError
from utils.rationals import ONE


class DensityPiece(BaseModel):
    """One constant piece of the density, ending at `upto`."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    upto: Rational = Field(..., description="Right end of the piece")
    value: Rational = Field(..., description="Density value on the piece (any nonnegative scale)")


class RunConfig(BaseModel):
    """Game instance plus run parameters, as stored in a config file."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, extra="forbid")

    density: Optional[tuple[DensityPiece, ...]] = Field(
        default=None, description="Density pieces; uniform when omitted"
    )
    widths: tuple[Rational, ...] = Field(..., description="Interval width of each agent")
    mode: UtilityMode = Field(default=UtilityMode.SUPPORT)
    profile: Optional[tuple[Rational, ...]] = Field(default=None, description="Interval centres")
    epsilon: Optional[Rational] = None
    grid_step: Optional[Rational] = None
    round_limit: Optional[int] = Field(default=None, gt=0)
    seed: Optional[int] = None
    format: Optional[Literal["table", "records"]] = None

    @field_validator("widths")
    @classmethod
    def _widths_in_unit(cls, widths):
        for w in widths:
            if w <= 0 or w > 1:
                raise ValueError(f"width {w} outside (0, 1]")
        return widths

    @field_validator("density")
    @classmethod
    def _pieces_ascend(cls, pieces):
        if pieces is None:
            return pieces
        if not pieces:
            raise ValueError("density needs at least one piece")
        previous = 0
        for k, piece in enumerate(pieces):
            if piece.upto <= previous:
                raise ValueError(f"piece {k} ends at {piece.upto}, not after {previous}")
            previous = piece.upto
        if pieces[-1].upto != ONE:
            raise ValueError("the last density piece must end at 1")
        return pieces

    @model_validator(mode="after")
    def _profile_matches_widths(self):
        if self.profile is not None and len(self.profile) != len(self.widths):
            raise ValueError(
                f"profile has {len(self.profile)} locations but widths has {len(self.widths)}"
            )
        return self

    def build_density(self) -> Density:
        if self.density is None:
            return Density.uniform()
        return Density.from_pieces((p.upto, p.value) for p in self.density)

    def build_game(self, mode: Optional[UtilityMode] = None) -> Game:
        return Game(density=self.build_density(), widths=self.widths, mode=mode or self.mode)

    def build_profile(self) -> Optional[Profile]:
        if self.profile is None:
            return None
        return Profile(locations=self.profile)

    @classmethod
    def from_game(cls, game: Game, profile: Optional[Profile] = None) -> "RunConfig":
        pieces = tuple(DensityPiece(upto=hi, value=v) for _, hi, v in game.f.pieces())
        return cls(
            density=pieces,
            widths=game.widths,
            mode=game.mode,
            profile=profile.locations if profile is not None else None,
        )


def load_run_config(path: str | Path) -> RunConfig:
    """
    Read and validate a RunConfig JSON file.

    Raises:
        ConfigError: If the file is missing, not JSON, or fails validation
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Config file {path} is not valid JSON: {e}") from e
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        raise ConfigError(f"Invalid config {path}: {describe_validation_error(e)}") from e


def describe_validation_error(error: ValidationError) -> str:
    """One line per failing field, naming the field path."""
    parts = []
    for item in error.errors():
        field = ".".join(str(loc) for loc in item["loc"]) or "<root>"
        parts.append(f"{field}: {item['msg']}")
    return "; ".join(parts)


class InstanceSpec(BaseModel):
    """Recipe for seeded random instances."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    n_min: int = Field(default=2, ge=1)
    n_max: int = Field(default=8, ge=1)
    widths: tuple[Rational, ...] = Field(
        default=(Fraction(1, 10), Fraction(1, 5), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)),
        min_length=1,
        description="Width pool; each agent draws from it",
    )
    equal_widths: bool = Field(default=False, description="All agents share one drawn width")
    pieces_min: int = Field(default=1, ge=1)
    pieces_max: int = Field(default=20, ge=1)
    granularity: Rational = Field(default=Fraction(1, 100), description="Breakpoint and value lattice")
    max_value: int = Field(default=5, ge=1, description="Piece values drawn as multiples of granularity up to this")
    mode: UtilityMode = UtilityMode.SUPPORT

    @field_validator("widths")
    @classmethod
    def _widths_in_unit(cls, widths):
        for w in widths:
            if w <= 0 or w > 1:
                raise ValueError(f"width {w} outside (0, 1]")
        return widths

    @field_validator("granularity")
    @classmethod
    def _granularity_positive(cls, granularity):
        if granularity <= 0 or granularity > 1:
            raise ValueError("granularity must lie in (0, 1]")
        return granularity
