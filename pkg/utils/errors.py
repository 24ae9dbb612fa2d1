"""
Errors
Exception hierarchy shared by the models and operations.
Each error also derives from the builtin a caller would naturally catch.
"""

from typing import Any, Optional


class AttractionGameError(Exception):
    """Base class for all attraction-game errors."""


class DomainError(AttractionGameError, ValueError):
    """An interval or function lies outside [0, 1] or is otherwise ill-formed."""


class PieceArithmeticError(AttractionGameError, ArithmeticError):
    """A pointwise operation is undefined on some piece."""

    def __init__(self, message: str, piece: tuple):
        super().__init__(message)
        self.piece = piece


class ProfileError(AttractionGameError, ValueError):
    """A profile location violates its feasible interval."""

    def __init__(self, message: str, agent: Optional[int] = None):
        super().__init__(message)
        self.agent = agent


class ModeError(AttractionGameError, ValueError):
    """Operation requested under the wrong utility mode."""


class UnsupportedConfigurationError(AttractionGameError, ValueError):
    """A constructor was called outside its (n, widths) preconditions."""


class ConfigError(AttractionGameError, ValueError):
    """A run configuration or instance specification cannot be satisfied."""


class DegenerateInstanceError(AttractionGameError, ValueError):
    """A ratio is undefined because every denominator candidate is zero."""


class NotEquilibriumError(AttractionGameError, ValueError):
    """A profile handed in as an equilibrium failed exact verification."""

    def __init__(self, message: str, certificate: Any = None):
        super().__init__(message)
        self.certificate = certificate


class CertificationError(AttractionGameError, RuntimeError):
    """A constructed profile was refuted by the exact verifier."""

    def __init__(self, message: str, certificate: Any = None, instance: Any = None):
        super().__init__(message)
        self.certificate = certificate
        self.instance = instance


class ConstructionInvariantError(AttractionGameError, RuntimeError):
    """Internal bookkeeping of a construction or dynamics run is inconsistent."""

    def __init__(self, message: str, instance: Any = None):
        super().__init__(message)
        self.instance = instance


class ReplayError(AttractionGameError, RuntimeError):
    """A replayed deviation path did not show the expected utility signs."""
