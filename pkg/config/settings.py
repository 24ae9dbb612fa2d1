"""
Settings
Environment-backed defaults for the attraction-games tools.
Instance data never comes from here; only output and numerical defaults do.
"""

import os
from fractions import Fraction
from typing import Literal

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

load_dotenv()


class Settings(BaseModel):
    """Process-wide defaults, overridable per run by RunConfig or CLI flags."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    output_format: Literal["table", "records"] = Field(
        default="table", description="Default CLI output format"
    )
    log_level: str = Field(default="WARNING", description="Root log level")
    default_epsilon: Fraction = Field(default=Fraction(1, 10**9))
    default_round_limit: int = Field(default=100_000, gt=0)
    default_grid_step: Fraction = Field(default=Fraction(1, 1000))
    multistart_count: int = Field(default=32, gt=0)
    corpus_workers: int = Field(default=1, gt=0)


def _load() -> Settings:
    output_format = os.getenv("ATTRACTION_OUTPUT_FORMAT", "table").strip().lower()
    if output_format not in ("table", "records"):
        output_format = "table"
    return Settings(
        output_format=output_format,
        log_level=os.getenv("LOG_LEVEL", "WARNING").upper(),
    )


settings = _load()
