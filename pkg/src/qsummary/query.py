"""Frozen prefix-sum snapshots and quantile/rank queries."""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .core import RankBounds, SummaryState


@dataclass(frozen=True)
class QuerySnapshot:
    """Rank bounds of every real entry, smallest value first.

    ``total_weight`` is the real stream weight ``W``; ``n_unfolded`` adds the
    sentinel's single copy.  ``last_copy`` holds ``rmin + w - 1`` and is what
    queries binary-search over.
    """

    values: tuple
    weights: tuple
    rmin: tuple
    rmax: tuple
    last_copy: tuple
    total_weight: int
    n_unfolded: int
    ell: int
    sentinel_rmin: int = 1

    @property
    def effective_epsilon(self) -> Fraction:
        return Fraction(1, self.ell)

    @property
    def slack(self) -> int:
        """``floor(eps * W)``."""
        return self.total_weight // self.ell

    def __len__(self) -> int:
        return len(self.values)


def snapshot(state: SummaryState) -> QuerySnapshot:
    """Freeze ``state``; pending smoothed work is settled first."""
    from .compaction import settle

    settle(state)
    values, weights, rmin, rmax, last = [], [], [], [], []
    base = 0
    for e in state.entries:
        lo = base + e.g
        values.append(e.value)
        weights.append(e.weight)
        rmin.append(lo)
        rmax.append(lo + e.delta)
        base = lo + e.weight - 1
        last.append(base)
    return QuerySnapshot(tuple(values), tuple(weights), tuple(rmin), tuple(rmax), tuple(last),
                         state.total_weight, state.total_weight + 1, state.ell,
                         sentinel_rmin=base + state.sentinel.g)


def _as_fraction(phi) -> Fraction:
    if isinstance(phi, float):
        return Fraction(phi).limit_denominator(10**9)
    return Fraction(phi)


def target_rank(phi, total_weight: int) -> int:
    """``clamp(ceil(phi * W), 1, W)`` in exact arithmetic."""
    f = _as_fraction(phi)
    r = -(-f.numerator * total_weight // f.denominator)
    return min(max(r, 1), max(total_weight, 1))


def query_quantile(snap: QuerySnapshot, phi) -> tuple[Any, RankBounds]:
    """Approximate ``phi``-quantile with the answer's copy-range bounds.

    With ``r = ceil(phi W)`` and slack ``t = floor(W/ell)``, the answer is the
    first entry if ``r <= t``, otherwise the smallest entry whose last copy
    ``rmin + w - 1`` reaches ``r - t``.  Heavy entries can start far below
    ``r - t`` yet still cover it, which is why the last copy is searched.
    """
    if not snap.values:
        raise ValueError("cannot query an empty summary")
    r = target_rank(phi, snap.total_weight)
    t = snap.slack
    if r <= t:
        i = 0
    else:
        i = bisect.bisect_left(snap.last_copy, r - t)
        if i == len(snap.values):
            i -= 1
    return snap.values[i], RankBounds(snap.rmin[i], snap.rmax[i] + snap.weights[i] - 1)


def query_quantile_linear(snap: QuerySnapshot, phi) -> tuple[Any, RankBounds]:
    """Linear-scan twin of :func:`query_quantile` for differential checks."""
    if not snap.values:
        raise ValueError("cannot query an empty summary")
    r = target_rank(phi, snap.total_weight)
    t = snap.slack
    pick = len(snap.values) - 1
    if r <= t:
        pick = 0
    else:
        for i in range(len(snap.values)):
            if snap.rmin[i] + snap.weights[i] - 1 >= r - t:
                pick = i
                break
    return snap.values[pick], RankBounds(snap.rmin[pick], snap.rmax[pick] + snap.weights[pick] - 1)


def query_rank(snap: QuerySnapshot, value) -> RankBounds:
    """Rank bounds of the largest stored entry ``<= value``; ``(0, 0)`` if none."""
    i = bisect.bisect_right(snap.values, value) - 1
    if i < 0:
        return RankBounds(0, 0)
    return RankBounds(snap.rmin[i], snap.rmax[i] + snap.weights[i] - 1)


def verify_query_condition(snap: QuerySnapshot) -> bool:
    """Check ``rmax_i - (rmin_{i-1} + w_{i-1} - 1) <= max(floor(W/ell), 1)``.

    The predecessor of the first entry is a virtual bottom element at rank 0.
    The floor of 1 matters only before the first full chunk, when every
    entry still has ``g = 1``.
    """
    bound = max(snap.slack, 1)
    prev = 0
    for lo, hi, last in zip(snap.rmin, snap.rmax, snap.last_copy):
        if hi - prev > bound:
            return False
        prev = last
    return snap.sentinel_rmin - prev <= bound
