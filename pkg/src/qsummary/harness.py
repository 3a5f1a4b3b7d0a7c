"""Instrumented runs: feed a stream while checking the summary after every step.

Used by the ``verify`` subcommand and the acceptance tests.  Every deletion
step is followed by the rank-gap invariant, the conservation identity and
the per-gap query condition on a fresh snapshot; covered sets are audited
every ``audit_every`` steps and once more at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .compaction import flush, process
from .core import SummaryState, new_summary
from .oracle import ExactOracle, coverage_audit
from .query import query_quantile, snapshot, verify_query_condition

CHECKS = ("rank-gap-invariant", "conservation", "query-condition", "grid-accuracy", "coverage-audit")
GRID = tuple(Fraction(k, 100) for k in range(1, 100))


@dataclass
class RunConfig:
    epsilon: Fraction = Fraction(1, 100)
    algorithm: str = "wgk"
    schedule: str = "paper"
    smooth: bool = False
    audit_every: int = 1
    # corrupt one entry's delta after this many updates (fault injection)
    corrupt_delta_at: int | None = None


@dataclass
class CheckResult:
    name: str
    checked: int = 0
    failures: int = 0
    first_failure: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def record(self, ok: bool, where: str) -> None:
        self.checked += 1
        if not ok:
            self.failures += 1
            if not self.first_failure:
                self.first_failure = where


@dataclass
class VerifyReport:
    config: RunConfig
    checks: dict[str, CheckResult] = field(default_factory=lambda: {c: CheckResult(c) for c in CHECKS})
    state: SummaryState | None = None
    oracle: ExactOracle | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())


def rank_gap_violations(state: SummaryState) -> list[str]:
    """Entries breaking ``g + delta <= t`` (with a floor of 1 before the first chunk)."""
    bound = max(state.current_time, 1)
    return [f"value={e.value!r} g={e.g} delta={e.delta} t={state.current_time}"
            for e in state.ordered() if e.g + e.delta > bound]


def conservation_holds(state: SummaryState) -> bool:
    return sum(e.g + e.weight - 1 for e in state.ordered()) == state.total_weight + 1


def _where(state: SummaryState, detail: str = "") -> str:
    head = f"after {state.elements_seen} updates (W={state.total_weight}, t={state.current_time})"
    return f"{head}: {detail}" if detail else head


def _inspect(report: VerifyReport, state: SummaryState, oracle: ExactOracle, audit: bool) -> None:
    bad = rank_gap_violations(state)
    report.checks["rank-gap-invariant"].record(not bad, _where(state, bad[0] if bad else ""))
    report.checks["conservation"].record(conservation_holds(state), _where(state))
    report.checks["query-condition"].record(verify_query_condition(snapshot(state)), _where(state))
    if audit:
        cov = coverage_audit(state, oracle)
        report.checks["coverage-audit"].record(cov.ok, _where(state, cov.violations[0] if cov.violations else ""))


def run_verified(items: Iterable, config: RunConfig | None = None) -> VerifyReport:
    """Stream ``(value, weight)`` items through an instrumented summary."""
    config = config or RunConfig()
    state = new_summary(config.epsilon, config.algorithm, config.schedule,
                        smooth=config.smooth, track_coverage=True)
    oracle = ExactOracle(state.ell)
    report = VerifyReport(config, state=state, oracle=oracle)
    steps_seen = 0
    for value, weight in items:
        oracle.add(value, weight)
        process(state, value, weight)
        if config.corrupt_delta_at is not None and state.elements_seen == config.corrupt_delta_at and state.entries:
            state.entries[0].delta += state.current_time + 1
        if state.deletion_steps != steps_seen:
            steps_seen = state.deletion_steps
            _inspect(report, state, oracle, steps_seen % max(1, config.audit_every) == 0)
    flush(state)
    _inspect(report, state, oracle, True)
    grid = report.checks["grid-accuracy"]
    if state.entries:
        snap = snapshot(state)
        for phi in GRID:
            value, _ = query_quantile(snap, phi)
            grid.record(oracle.check_answer(phi, value), _where(state, f"phi={phi} answered {value!r}"))
    return report
