"""Exact reference answers and coverage audits.

The oracle keeps the whole stream and answers rank and quantile questions
exactly, so approximate answers can be judged against the accuracy window
``[(phi - eps) W, (phi + eps) W]``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Any

from .bands import band_value, insertion_time
from .core import SummaryState

MAX_ORACLE_WEIGHT = 10**7


class ExactOracle:
    """Full copy of a (possibly weighted) stream with exact rank windows."""

    def __init__(self, ell: int, max_weight: int = MAX_ORACLE_WEIGHT):
        self.ell = ell
        self.max_weight = max_weight
        self.values: list = []
        self.weights: list[int] = []
        self.t0: list[int] = []
        self.total_weight = 0
        self._sorted: tuple | None = None

    def add(self, value, weight: int = 1) -> None:
        if self.total_weight + weight > self.max_weight:
            raise OverflowError(f"oracle is limited to total weight {self.max_weight}")
        self.t0.append(insertion_time(self.total_weight, self.ell))
        self.values.append(value)
        self.weights.append(weight)
        self.total_weight += weight
        self._sorted = None

    def extend(self, items) -> None:
        for value, weight in items:
            self.add(value, weight)

    def _index(self):
        if self._sorted is None:
            order = sorted(range(len(self.values)), key=lambda i: (self.values[i], i))
            vals = [self.values[i] for i in order]
            cum = list(accumulate(self.weights[i] for i in order))
            self._sorted = (vals, cum, order)
        return self._sorted

    def value_window(self, value) -> tuple[int, int]:
        """``(weight strictly below value, weight at or below value)``."""
        vals, cum, _ = self._index()
        lo = bisect.bisect_left(vals, value)
        hi = bisect.bisect_right(vals, value)
        below = cum[lo - 1] if lo else 0
        upto = cum[hi - 1] if hi else 0
        return below, upto

    def arrival_window(self, arrival: int) -> tuple[int, int]:
        """Unfolded copy range ``[first, last]`` of one arrival under the tie-break."""
        vals, cum, order = self._index()
        pos = order.index(arrival)
        first = (cum[pos - 1] if pos else 0) + 1
        return first, cum[pos]

    def quantile(self, phi) -> Any:
        """Exact ``phi``-quantile: the value holding unfolded rank ``ceil(phi W)``."""
        vals, cum, _ = self._index()
        f = Fraction(phi)
        r = -(-f.numerator * self.total_weight // f.denominator)
        r = min(max(r, 1), self.total_weight)
        return vals[bisect.bisect_left(cum, r)]

    def check_answer(self, phi, value, epsilon=None) -> bool:
        """True if ``(below, upto]`` of ``value`` meets ``[(phi-eps)W, (phi+eps)W]``.

        ``epsilon`` defaults to the summary's effective ``1/ell``; a value absent
        from the stream never passes.
        """
        below, upto = self.value_window(value)
        if upto == below:
            return False
        f = Fraction(phi)
        eps = Fraction(1, self.ell) if epsilon is None else Fraction(epsilon)
        lo = (f - eps) * self.total_weight
        hi = (f + eps) * self.total_weight
        # half-open (below, upto] against closed [lo, hi], over the reals
        return below < hi and upto >= lo


@dataclass
class CoverageReport:
    checked_entries: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def coverage_audit(state: SummaryState, oracle: ExactOracle, limit: int = 20) -> CoverageReport:
    """Audit the explicit covered sets of a coverage-tracking summary.

    Checks that covered sets are disjoint and complete, that ``G`` equals the
    covered weight, that no entry covers a larger element, and that no covered
    element is in a higher band than the entry standing for it.
    """
    report = CoverageReport()
    if not state.track_coverage:
        report.violations.append("summary was built without coverage tracking")
        return report
    t = state.current_time
    seen: set[int] = set()
    for e in state.ordered():
        report.checked_entries += 1
        covers = e.covers or []
        mass = sum(oracle.weights[a] for a in covers)
        expected = e.g + e.weight - 1 if not e.is_sentinel else e.g - 1
        if mass != expected:
            report.violations.append(f"entry {e.value!r}: G={expected} but covers weight {mass}")
        dup = seen.intersection(covers)
        if dup:
            report.violations.append(f"entry {e.value!r}: arrivals {sorted(dup)[:5]} covered twice")
        seen.update(covers)
        key = None if e.is_sentinel else (e.value, e.arrival)
        for a in covers:
            if key is not None and (oracle.values[a], a) > key:
                report.violations.append(f"entry {e.value!r}: covers larger arrival {a}")
                break
        if not e.is_sentinel:
            ve = band_value(e.t0, t)
            for a in covers:
                if band_value(oracle.t0[a], t) > ve:
                    report.violations.append(f"entry {e.value!r}: arrival {a} has a higher band")
                    break
        if len(report.violations) >= limit:
            return report
    missing = len(oracle.values) - len(seen)
    if missing:
        report.violations.append(f"{missing} arrivals not covered by any entry")
    return report
