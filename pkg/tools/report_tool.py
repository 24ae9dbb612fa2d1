"""
Report Tools
Human-readable tables for utility reports, certificates, traces and checks.
Rationals print exactly with a 6-decimal approximation alongside.
"""

from typing import Iterable, Optional

from colorama import Fore, Style

from models.game_models import Game, Profile, UtilityReport
from models.result_models import (
    AnalysisReport,
    ConstructionResult,
    CorpusSummary,
    DynamicsTrace,
    NeCertificate,
    ReproductionCheck,
)
from operations.step_function_operations import StepFunction
from utils.rationals import format_rational, render_rational


def _status(ok: bool, yes: str = "PASS", no: str = "FAIL") -> str:
    color = Fore.GREEN if ok else Fore.RED
    return f"{color}{yes if ok else no}{Style.RESET_ALL}"


def _table(headers: list[str], rows: list[list[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for k, cell in enumerate(row):
            widths[k] = max(widths[k], len(cell))
    line = "  ".join(h.ljust(widths[k]) for k, h in enumerate(headers))
    out = [line, "  ".join("-" * w for w in widths)]
    for row in rows:
        out.append("  ".join(cell.ljust(widths[k]) for k, cell in enumerate(row)))
    return "\n".join(out)


def format_winners(winners: Iterable[int]) -> str:
    return "{" + ", ".join(str(i + 1) for i in sorted(winners)) + "}"


def format_utility_report(game: Game, profile: Profile, report: UtilityReport, congestion: StepFunction) -> str:
    rows = [
        [
            str(i + 1),
            render_rational(profile.locations[i]),
            format_rational(game.widths[i]),
            render_rational(report.supports[i]),
            render_rational(report.utilities[i]),
            "yes" if i in report.winner_set else "",
        ]
        for i in range(game.n)
    ]
    pieces = ", ".join(
        f"[{format_rational(a)}, {format_rational(b)}): {format_rational(v)}" for a, b, v in congestion.pieces()
    )
    return "\n".join([
        f"Mode      : {report.mode.value}",
        _table(["agent", "location", "width", "support", "utility", "winner"], rows),
        f"Winners   : {format_winners(report.winner_set)}",
        f"Congestion: {pieces}",
        f"Covered   : {render_rational(report.covered_mass)}",
        f"Potential : {render_rational(report.potential)}",
    ])


def format_certificate(certificate: NeCertificate) -> str:
    lines = [
        f"Verdict   : {_status(certificate.is_equilibrium, 'EQUILIBRIUM', 'NOT AN EQUILIBRIUM')}"
        f" ({certificate.method.value}, {certificate.mode.value} mode)",
        f"Profile   : {certificate.profile}",
        "Gaps      : " + ", ".join(render_rational(g) for g in certificate.gaps),
    ]
    deviation = certificate.best_deviation
    if deviation is not None:
        lines.append(
            f"Deviation : agent {deviation.agent + 1} → {render_rational(deviation.location)}, "
            f"utility {render_rational(deviation.old_utility)} → {render_rational(deviation.new_utility)}"
        )
    if certificate.coarse:
        lines.append(f"{Fore.YELLOW}Warning   : grid coarser than some feasible interval{Style.RESET_ALL}")
    return "\n".join(lines)


def format_trace(trace: DynamicsTrace, limit: Optional[int] = 20) -> str:
    lines = [
        f"Dynamics  : {trace.order}, {trace.reason.value} after {len(trace.steps)} moves "
        f"({trace.evaluations} evaluations)",
        f"Potential : {render_rational(trace.initial_potential)} → "
        + (render_rational(trace.steps[-1].potential) if trace.steps else "unchanged"),
    ]
    shown = trace.steps if limit is None else trace.steps[-limit:]
    if shown:
        rows = [
            [
                str(s.step + 1),
                str(s.agent + 1),
                render_rational(s.old_location),
                render_rational(s.new_location),
                render_rational(s.gain),
            ]
            for s in shown
        ]
        lines.append(_table(["move", "agent", "from", "to", "gain"], rows))
    return "\n".join(lines)


def format_construction(result: ConstructionResult) -> str:
    tag = result.case_tag.value
    if result.inner_case is not None:
        tag += f" (inner {result.inner_case.value})"
    lines = [
        f"Case      : {tag}" + (" [degenerate]" if result.degenerate else ""),
        f"Rule      : entrant on a stack of c receives {result.prospective_rule}",
    ]
    for name, value in result.intermediates.items():
        lines.append(f"  {name:<8}: {render_rational(value)}")
    lines.append(format_certificate(result.certificate))
    return "\n".join(lines)


def format_analysis(report: AnalysisReport) -> str:
    rows = [
        ["fairness", render_rational(report.fairness_ratio), f"≥ {render_rational(report.fairness_bound)}", _status(report.fairness_ok)],
        ["welfare ratio", render_rational(report.welfare_ratio), "≥ 1/2", _status(report.welfare_ok)],
        ["uncovered", render_rational(report.uncovered), f"≤ {render_rational(report.uncovered_bound)}", _status(report.uncovered_ok)],
    ]
    return "\n".join([
        f"Welfare   : {render_rational(report.welfare)} of optimum {render_rational(report.optimal_welfare)}",
        _table(["quantity", "value", "bound", "status"], rows),
    ])


def format_checks(checks: list[ReproductionCheck]) -> str:
    rows = [[c.target, c.name, c.expected, c.observed, _status(c.passed)] for c in checks]
    passed = sum(1 for c in checks if c.passed)
    return _table(["target", "check", "expected", "observed", "status"], rows) + f"\n\n{passed}/{len(checks)} checks passed"


def format_corpus_summary(summary: CorpusSummary) -> str:
    return (
        f"Suite     : {summary.suite}\n"
        f"Instances : {summary.instances}\n"
        f"Certified : {summary.certified}\n"
        f"Violations: {_status(summary.violations == 0, '0', str(summary.violations))}"
    )
