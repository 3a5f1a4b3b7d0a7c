"""Summary storage and the primitive Insert/Delete operations.

Each stored entry keeps ``(g, delta)`` rather than explicit rank bounds:

* ``g``  -- increment of the first-copy lower rank bound over the last copy
  of the predecessor, ``rmin(e_i) - (rmin(e_{i-1}) + w(e_{i-1}) - 1)``;
* ``delta`` -- ``rmax(e_i) - rmin(e_i)``, frozen at insertion.

Rank bounds are recovered with one in-order prefix sum.  Unweighted streams
are weight-1 streams, so a single code path serves all four algorithms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Any, NamedTuple

from sortedcontainers import SortedKeyList

from .bands import current_time as _clock

MAX_WEIGHT = 2**32 - 1
MAX_TOTAL_WEIGHT = 2**64 - 1


class Algorithm(enum.Enum):
    GREEDY = "greedy"
    GK = "gk"
    WGREEDY = "wgreedy"
    WGK = "wgk"

    @property
    def weighted(self) -> bool:
        return self in (Algorithm.WGREEDY, Algorithm.WGK)

    @property
    def segment_rule(self) -> bool:
        """True for the rules that delete an entry together with its segment."""
        return self in (Algorithm.GK, Algorithm.WGK)

    @classmethod
    def parse(cls, tag: "Algorithm | str") -> "Algorithm":
        if isinstance(tag, Algorithm):
            return tag
        try:
            return cls(tag.lower())
        except ValueError:
            names = ", ".join(a.value for a in cls)
            raise ValueError(f"unknown algorithm {tag!r} (expected one of {names})") from None


@dataclass(eq=False, slots=True)
class SummaryEntry:
    value: Any
    weight: int
    g: int
    delta: int
    t0: int
    arrival: int
    is_sentinel: bool = False
    # arrival indices this entry stands for; only populated when coverage is tracked
    covers: list | None = None

    @property
    def G(self) -> int:
        return self.g + self.weight - 1


class RankBounds(NamedTuple):
    rmin: int
    rmax: int


def _entry_key(e: SummaryEntry):
    return (e.value, e.arrival)


@dataclass(eq=False)
class SummaryState:
    """Mutable summary.  Single owner; not safe for concurrent access."""

    ell: int
    algorithm: Algorithm
    entries: SortedKeyList = field(default_factory=lambda: SortedKeyList(key=_entry_key))
    sentinel: SummaryEntry = field(
        default_factory=lambda: SummaryEntry(None, 1, 1, 0, 0, -1, is_sentinel=True)
    )
    elements_seen: int = 0
    total_weight: int = 0
    track_coverage: bool = False
    schedule: Any = None  # compaction.DeletionSchedule, attached by new_summary
    deletion_steps: int = 0
    max_size: int = 0

    @property
    def effective_epsilon(self) -> Fraction:
        return Fraction(1, self.ell)

    @property
    def current_time(self) -> int:
        return _clock(self.total_weight, self.ell)

    @property
    def size(self) -> int:
        """Number of stored stream elements (the sentinel is not counted)."""
        return len(self.entries)

    def ordered(self) -> list[SummaryEntry]:
        """Stored entries in rank order, sentinel last."""
        return [*self.entries, self.sentinel]

    def successor(self, entry: SummaryEntry) -> SummaryEntry:
        idx = self.entries.index(entry)
        if idx + 1 < len(self.entries):
            return self.entries[idx + 1]
        return self.sentinel

    @classmethod
    def from_entries(cls, ell: int, algorithm, rows, total_weight: int | None = None,
                     sentinel_g: int | None = None) -> "SummaryState":
        """Build a state from explicit ``(value, g, delta, weight)`` rows.

        Used to replay hand-written states.  ``total_weight`` defaults to the
        conservation value ``sum(g + w - 1)`` of the rows plus the sentinel's
        ``g``; the sentinel's ``g`` defaults to 1.
        """
        state = cls(ell=ell, algorithm=Algorithm.parse(algorithm))
        for arrival, (value, g, delta, weight) in enumerate(rows):
            state.entries.add(SummaryEntry(value, weight, g, delta, 0, arrival))
        state.sentinel.g = 1 if sentinel_g is None else sentinel_g
        covered = sum(e.G for e in state.entries) + state.sentinel.g - 1
        state.total_weight = covered if total_weight is None else total_weight
        state.elements_seen = len(rows)
        state.max_size = len(rows)
        return state


def resolve_ell(epsilon) -> int:
    """``ell = max(1, round(1/epsilon))`` in exact arithmetic."""
    if isinstance(epsilon, str):
        epsilon = Fraction(epsilon)
    if isinstance(epsilon, float):
        eps = Fraction(epsilon).limit_denominator(10**12)
    elif isinstance(epsilon, Rational):
        eps = Fraction(epsilon)
    else:
        raise TypeError(f"epsilon must be a number, got {type(epsilon).__name__}")
    if not 0 < eps < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return max(1, round(1 / eps))


def new_summary(epsilon, algorithm="wgk", schedule=None, *, smooth: bool = False,
                track_coverage: bool = False) -> SummaryState:
    """Create an empty summary holding only the +infinity sentinel.

    ``schedule`` is ``"paper"`` (default) or ``"every"``; see
    :class:`qsummary.compaction.DeletionSchedule`.
    """
    from .compaction import DeletionSchedule

    state = SummaryState(ell=resolve_ell(epsilon), algorithm=Algorithm.parse(algorithm),
                         track_coverage=track_coverage)
    state.schedule = DeletionSchedule.create(schedule or "paper", smooth=smooth)
    if track_coverage:
        state.sentinel.covers = []
    return state


def _check_weight(state: SummaryState, weight) -> int:
    if isinstance(weight, bool) or not isinstance(weight, int):
        raise TypeError(f"weight must be an integer, got {weight!r}")
    if weight < 1:
        raise ValueError(f"weight must be positive, got {weight}")
    if weight > MAX_WEIGHT:
        raise ValueError(f"weight {weight} exceeds the maximum {MAX_WEIGHT}")
    if weight != 1 and not state.algorithm.weighted:
        raise ValueError(f"algorithm {state.algorithm.value!r} accepts only unit weights")
    if state.total_weight + weight > MAX_TOTAL_WEIGHT:
        raise OverflowError("total stream weight overflows 64 bits")
    raise AssertionError("unreachable")


def insert(state: SummaryState, value, weight: int = 1) -> SummaryEntry:
    """Insert one stream update and return its entry.

    The new entry sits after every stored entry with an equal value, so
    earlier arrivals keep the lower ranks.  It gets ``g = 1`` and
    ``delta = g_i + delta_i - 1`` where ``e_i`` is its successor.
    """
    if weight.__class__ is not int or not 1 <= weight <= MAX_WEIGHT or (
            weight != 1 and not state.algorithm.weighted) or state.total_weight + weight > MAX_TOTAL_WEIGHT:
        _check_weight(state, weight)  # raises with a specific message
    entries = state.entries
    arrival = state.elements_seen
    idx = entries.bisect_key_left((value, arrival))
    succ = entries[idx] if idx < len(entries) else state.sentinel

    entry = SummaryEntry(value, weight, 1, succ.g + succ.delta - 1,
                         (state.total_weight + 1) // state.ell, arrival)
    if state.track_coverage:
        entry.covers = [arrival]
    entries.add(entry)
    state.elements_seen = arrival + 1
    state.total_weight += weight
    if len(entries) > state.max_size:
        state.max_size = len(entries)
    return entry


def absorb(entry: SummaryEntry, succ: SummaryEntry) -> None:
    """Move ``entry``'s covered weight onto its successor (``g_{i+1} += G_i``)."""
    succ.g += entry.g + entry.weight - 1
    if entry.covers is not None and succ.covers is not None:
        succ.covers.extend(entry.covers)
        entry.covers = []


def delete_entry(state: SummaryState, entry: SummaryEntry) -> None:
    """Remove ``entry``; survivors' reconstructed rank bounds do not change."""
    if entry.is_sentinel:
        raise ValueError("the sentinel cannot be deleted")
    succ = state.successor(entry)
    absorb(entry, succ)
    state.entries.remove(entry)


def reconstruct_rank_bounds(state: SummaryState) -> list[tuple[Any, RankBounds, int]]:
    """``(value, (rmin, rmax), weight)`` for every entry, sentinel last."""
    out = []
    base = 0
    for e in state.ordered():
        rmin = base + e.g
        out.append((e.value, RankBounds(rmin, rmin + e.delta), e.weight))
        base = rmin + e.weight - 1
    return out
