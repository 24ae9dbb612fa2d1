"""
Pydantic models for analysis results
Dynamics traces, equilibrium certificates, construction results and reports.
"""

from enum import Enum
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field

from models.game_models import Profile, Rational, UtilityMode


class TerminationReason(str, Enum):
    EPSILON_STABLE = "epsilon-stable"
    ROUND_LIMIT = "round-limit"


class DynamicsStep(BaseModel):
    """One improving move of best-response dynamics."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    step: int
    agent: int
    old_location: Rational
    new_location: Rational
    gain: Rational
    potential: Rational = Field(..., description="Potential after the move")


class DynamicsTrace(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    steps: tuple[DynamicsStep, ...]
    terminated: bool = Field(..., description="True when the run ended epsilon-stable")
    reason: TerminationReason
    order: str
    epsilon: Rational
    initial_potential: Rational
    evaluations: int = Field(default=0, description="Best-response evaluations performed")


class Verdict(str, Enum):
    EQUILIBRIUM = "equilibrium"
    NOT_EQUILIBRIUM = "not-equilibrium"


class Method(str, Enum):
    EXACT = "exact"
    GRID = "grid"


class Deviation(BaseModel):
    """A unilateral relocation and its utility effect."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    agent: int
    location: Rational
    old_utility: Rational
    new_utility: Rational

    @property
    def gain(self):
        return self.new_utility - self.old_utility


class NeCertificate(BaseModel):
    """Outcome of an equilibrium check, with the witness deviation when refuted."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    verdict: Verdict
    mode: UtilityMode
    method: Method
    profile: Profile
    gaps: tuple[Rational, ...] = Field(..., description="Best achievable minus current utility, per agent")
    best_deviation: Optional[Deviation] = None
    tolerance: Rational
    coarse: bool = Field(default=False, description="Some lattice had a single point")

    @property
    def is_equilibrium(self) -> bool:
        return self.verdict == Verdict.EQUILIBRIUM


class CaseTag(str, Enum):
    TWO_AGENT = "TWO-AGENT"
    A1_CASE1 = "A1-CASE1"
    A1_CASE2 = "A1-CASE2"
    A1_CASE3 = "A1-CASE3"
    A1_CASE4 = "A1-CASE4"
    A1_CASE5 = "A1-CASE5"
    A2_SPLIT = "A2-SPLIT"
    A2_STACK = "A2-STACK"
    A2_FLANK = "A2-FLANK"
    REDUCED = "REDUCED"


class ConstructionResult(BaseModel):
    """A constructed winner-mode equilibrium with its audit trail."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    profile: Profile
    case_tag: CaseTag
    inner_case: Optional[CaseTag] = Field(default=None, description="Branch taken on the reduced game")
    intermediates: dict[str, Rational] = Field(default_factory=dict)
    certificate: NeCertificate
    prospective_rule: str = Field(default="f/(c+1)", description="Utility assumed for an entrant on a stack")
    degenerate: bool = False


class AnalysisReport(BaseModel):
    """Price-of-anarchy, coverage and fairness figures for a set of equilibria."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    fairness_ratio: Rational = Field(..., description="Worst min/max support ratio over the equilibria")
    fairness_bound: Rational
    welfare: Rational = Field(..., description="Total support of the worst equilibrium")
    optimal_welfare: Rational
    optimal_profile: Profile
    welfare_ratio: Rational
    uncovered: Rational
    uncovered_bound: Rational
    fairness_ok: bool
    welfare_ok: bool
    uncovered_ok: bool
    equilibria: int

    @property
    def bounds_ok(self) -> bool:
        return self.fairness_ok and self.welfare_ok and self.uncovered_ok


class ReplayStep(BaseModel):
    """One move of the ordinal-potential counterexample."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    path: int
    step: int
    agent: int
    before: Profile
    after: Profile
    winner_before: Rational
    winner_after: Rational
    support_before: Rational
    support_after: Rational
    expected_sign: int
    observed_sign: int

    @property
    def ok(self) -> bool:
        return self.expected_sign == self.observed_sign


class ReplayReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    steps: tuple[ReplayStep, ...]
    start: Profile
    end: Profile

    @property
    def ok(self) -> bool:
        return all(step.ok for step in self.steps)


class CorpusRecord(BaseModel):
    """Per-instance outcome of a corpus run; empty fields did not apply."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    seed: int
    suite: str
    n: int
    widths: str
    certified: bool = False
    equilibria: int = 0
    case_tag: Optional[str] = None
    fairness: Optional[Rational] = None
    fairness_bound: Optional[Rational] = None
    ratio: Optional[Rational] = None
    uncovered: Optional[Rational] = None
    uncovered_bound: Optional[Rational] = None
    violation: bool = False
    detail: str = ""


class CorpusSummary(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    suite: str
    instances: int
    certified: int
    violations: int
    records: tuple[CorpusRecord, ...]


class ReproductionCheck(BaseModel):
    """A named expected-versus-observed comparison for a worked instance."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    target: str
    name: str
    expected: str
    observed: str
    passed: bool
