"""
Record Tools
Line-delimited, header-first record streams that parse back to exact rationals.
"""

import csv
import io
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable, TypeVar

from pydantic import BaseModel

from utils.rationals import format_rational

ModelT = TypeVar("ModelT", bound=BaseModel)


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (tuple, list)):
        return ";".join(_cell(v) for v in value)
    if isinstance(value, (set, frozenset)):
        return ";".join(_cell(v) for v in sorted(value))
    return str(value)


def encode_rows(rows: Iterable[dict[str, Any]], columns: list[str]) -> str:
    """Header row, then one line per row; rationals as "p/q", sequences joined by ';'."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(column)) for column in columns])
    return buffer.getvalue()


def encode_models(models: Iterable[BaseModel], model_type: type[BaseModel]) -> str:
    """Flat pydantic models as a record stream; columns follow the model's field order."""
    columns = list(model_type.model_fields)
    return encode_rows(
        ({name: getattr(model, name) for name in columns} for model in models),
        columns,
    )


def decode_rows(text: str) -> list[dict[str, str]]:
    """Raw cells keyed by the header; empty cells are dropped."""
    reader = csv.DictReader(io.StringIO(text))
    return [{key: value for key, value in row.items() if value != ""} for row in reader]


def decode_models(text: str, model_type: type[ModelT]) -> list[ModelT]:
    """Parse a stream written by encode_models back into validated models."""
    return [model_type.model_validate(row) for row in decode_rows(text)]


# ── Flatteners for nested results ─────────────────────────────────────────────

CERTIFICATE_COLUMNS = [
    "verdict", "mode", "method", "profile", "gaps",
    "deviation_agent", "deviation_location", "old_utility", "new_utility", "tolerance", "coarse",
]


def certificate_row(certificate) -> dict[str, Any]:
    deviation = certificate.best_deviation
    return {
        "verdict": certificate.verdict,
        "mode": certificate.mode,
        "method": certificate.method,
        "profile": certificate.profile.locations,
        "gaps": certificate.gaps,
        "deviation_agent": deviation.agent if deviation else None,
        "deviation_location": deviation.location if deviation else None,
        "old_utility": deviation.old_utility if deviation else None,
        "new_utility": deviation.new_utility if deviation else None,
        "tolerance": certificate.tolerance,
        "coarse": certificate.coarse,
    }


REPORT_COLUMNS = ["agent", "location", "width", "support", "utility", "winner"]


def report_rows(game, profile, report) -> list[dict[str, Any]]:
    return [
        {
            "agent": i,
            "location": profile.locations[i],
            "width": game.widths[i],
            "support": report.supports[i],
            "utility": report.utilities[i],
            "winner": i in report.winner_set,
        }
        for i in range(game.n)
    ]


def parse_rational_list(text: str) -> list[Fraction]:
    """Inverse of the ';'-joined sequence cells."""
    return [Fraction(part) for part in text.split(";") if part]


CONSTRUCTION_COLUMNS = CERTIFICATE_COLUMNS + [
    "case", "inner_case", "prospective_rule", "degenerate", "intermediates",
]


def construction_row(result) -> dict[str, Any]:
    """Certificate cells plus the construction's case, rule and named rationals."""
    return {
        **certificate_row(result.certificate),
        "case": result.case_tag,
        "inner_case": result.inner_case,
        "prospective_rule": result.prospective_rule,
        "degenerate": result.degenerate,
        "intermediates": ";".join(
            f"{name}={format_rational(value)}" for name, value in result.intermediates.items()
        ),
    }


def parse_named_rationals(text: str) -> dict[str, Fraction]:
    """Inverse of the "name=p/q;..." intermediates cell."""
    named = {}
    for part in text.split(";"):
        if part:
            name, _, value = part.partition("=")
            named[name] = Fraction(value)
    return named
