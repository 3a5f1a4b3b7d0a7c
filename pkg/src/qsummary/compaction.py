"""Deletion rules and deletion schedules.

A deletion step freezes the clock, annotates every stored entry with its band
value, and walks the entries from largest to smallest.  An entry ``e_i`` is
removed when its band does not exceed that of its live right neighbour and
the rank budget allows it:

* greedy rule:  ``G_i  + g_next + delta_next <= t``
* segment rule: ``G*_i + g_next + delta_next <= t``, removing ``e_i`` together
  with the run of preceding entries whose band is strictly below ``v(e_i)``.

Deletions only grow the right neighbour's ``g``, and the aggregates left of
the cursor are never touched, so a single backward pass reaches a fixed point.
"""

from __future__ import annotations

import enum
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from sortedcontainers import SortedKeyList

from .bands import band_value
from .core import Algorithm, SummaryEntry, SummaryState, _entry_key, absorb, insert


class CompactionRule(enum.Enum):
    GREEDY_ADJACENT = "greedy"
    SEGMENT_MERGE = "segment"

    @classmethod
    def for_algorithm(cls, algorithm: Algorithm) -> "CompactionRule":
        return cls.SEGMENT_MERGE if algorithm.segment_rule else cls.GREEDY_ADJACENT


class ScheduleMode(enum.Enum):
    EVERY_STEP = "every"
    PAPER_DELAY = "paper"


@dataclass
class DeletionStats:
    examined: int = 0
    deleted: int = 0
    time_step: int = 0

    def __iadd__(self, other: "DeletionStats") -> "DeletionStats":
        self.examined += other.examined
        self.deleted += other.deleted
        self.time_step = max(self.time_step, other.time_step)
        return self


def _log2(t: int) -> float:
    if t <= 1:
        return 0.0
    if t & (t - 1) == 0:
        return float(t.bit_length() - 1)
    return math.log2(t)


def delay_increment(algorithm: Algorithm, t: int, ell: int) -> int:
    """Gap until the next delayed deletion step (time steps or elements)."""
    lg = _log2(t)
    if algorithm is Algorithm.GREEDY:
        inc = math.ceil(lg * lg)
    elif algorithm is Algorithm.GK:
        inc = math.ceil(lg)
    elif algorithm is Algorithm.WGK:
        inc = math.ceil(ell * lg)
    else:
        inc = ell * math.ceil(lg * lg)
    return max(1, inc)


def smoothed_step_budget(work: int, gap: int) -> int:
    """Work units to perform per arrival so ``work`` units finish in half of ``gap``."""
    if work <= 0:
        return 0
    return -(-2 * work // max(1, gap))


@dataclass
class _PendingPass:
    """An in-progress deletion step executed a few units at a time."""

    entries: list
    t: int
    segment: bool
    bands: list = field(default_factory=list)
    gstar: list = field(default_factory=list)
    seg_start: list = field(default_factory=list)
    stack: list = field(default_factory=list)
    # forward cursor over annotation, then backward cursor over decisions
    fwd: int = 0
    bwd: int = -1
    nxt: SummaryEntry | None = None
    nxt_band: float = math.inf
    keep: list | None = None
    stats: DeletionStats = field(default_factory=DeletionStats)
    budget: int = 1

    @property
    def total_work(self) -> int:
        return 2 * len(self.entries)

    @property
    def done(self) -> bool:
        return self.fwd >= len(self.entries) and self.bwd < 0 and self.keep is not None

    def run(self, units: int | None = None) -> None:
        n = len(self.entries)
        left = math.inf if units is None else units
        while left > 0 and self.fwd < n:
            _annotate_one(self, self.fwd)
            self.fwd += 1
            left -= 1
        if self.fwd < n:
            return
        if self.keep is None:
            self.keep = [True] * n
            self.bwd = n - 1
        while left > 0 and self.bwd >= 0:
            self.bwd = _decide_one(self, self.bwd)
            left -= 1


def _annotate_one(p: _PendingPass, i: int) -> None:
    e = p.entries[i]
    v = band_value(e.t0, p.t)
    p.bands.append(v)
    if not p.segment:
        return
    total = e.g + e.weight - 1
    start = i
    stack = p.stack
    while stack and p.bands[stack[-1]] < v:
        j = stack.pop()
        total += p.gstar[j]
        start = p.seg_start[j]
    stack.append(i)
    p.gstar.append(total)
    p.seg_start.append(start)


def _decide_one(p: _PendingPass, i: int) -> int:
    """Decide entry ``i``; return the index the backward cursor moves to."""
    e = p.entries[i]
    nxt = p.nxt
    p.stats.examined += 1
    v = p.bands[i]
    mass = p.gstar[i] if p.segment else e.g + e.weight - 1
    if v <= p.nxt_band and mass + nxt.g + nxt.delta <= p.t:
        start = p.seg_start[i] if p.segment else i
        # absorb left to right so covered sets flow into the neighbour in order
        for k in range(start, i + 1):
            member = p.entries[k]
            succ = p.entries[k + 1] if k < i else nxt
            absorb(member, succ)
            p.keep[k] = False
        p.stats.deleted += i - start + 1
        return start - 1
    p.nxt = e
    p.nxt_band = v
    return i - 1


def compute_gstar(items: Sequence[tuple[int, int]]) -> list[int]:
    """``G*`` for each ``(band, G)`` pair, smallest value first.

    ``G*_i`` is ``G_i`` plus the ``G`` of every entry in the maximal run of
    immediate predecessors whose band is strictly below ``band_i``.
    """
    return compute_gstar_with_segments(items)[0]


def compute_gstar_with_segments(items: Sequence[tuple[int, int]]) -> tuple[list[int], list[int]]:
    """Like :func:`compute_gstar`, also returning each segment's first index."""
    gstar: list[int] = []
    start: list[int] = []
    stack: list[int] = []
    for i, (v, g) in enumerate(items):
        total = g
        s = i
        while stack and items[stack[-1]][0] < v:
            j = stack.pop()
            total += gstar[j]
            s = start[j]
        stack.append(i)
        gstar.append(total)
        start.append(s)
    return gstar, start


def _begin_pass(state: SummaryState) -> _PendingPass:
    p = _PendingPass(entries=list(state.entries), t=state.current_time,
                     segment=state.algorithm.segment_rule)
    p.nxt = state.sentinel
    p.stats.time_step = p.t
    return p


def _commit_pass(state: SummaryState, p: _PendingPass) -> DeletionStats:
    if p.stats.deleted:
        survivors = [e for e, k in zip(p.entries, p.keep) if k]
        state.entries = SortedKeyList(survivors, key=_entry_key)
    state.deletion_steps += 1
    return p.stats


def deletion_step(state: SummaryState) -> DeletionStats:
    """Run one full deletion step at the current time step.

    Same decisions as the incremental pass used for smoothing, written as
    two tight loops because this is the hot path of every schedule.
    """
    entries = list(state.entries)
    t = state.current_time
    segment = state.algorithm.segment_rule
    n = len(entries)
    bands = [band_value(e.t0, t) for e in entries]
    if segment:
        gstar, seg_start = compute_gstar_with_segments(
            [(v, e.g + e.weight - 1) for v, e in zip(bands, entries)])
    keep = [True] * n
    deleted = 0
    nxt = state.sentinel
    nxt_band = math.inf
    i = n - 1
    while i >= 0:
        e = entries[i]
        v = bands[i]
        mass = gstar[i] if segment else e.g + e.weight - 1
        if v <= nxt_band and mass + nxt.g + nxt.delta <= t:
            start = seg_start[i] if segment else i
            for k in range(start, i + 1):
                absorb(entries[k], entries[k + 1] if k < i else nxt)
                keep[k] = False
            deleted += i - start + 1
            i = start - 1
        else:
            nxt, nxt_band = e, v
            i -= 1
    if deleted:
        state.entries = SortedKeyList([e for e, k in zip(entries, keep) if k], key=_entry_key)
    state.deletion_steps += 1
    return DeletionStats(examined=n, deleted=deleted, time_step=t)


def incremental_deletion_step(state: SummaryState, units_per_call: int = 1) -> DeletionStats:
    """The smoothing pass driven to completion in small slices (for cross-checks)."""
    p = _begin_pass(state)
    while not p.done:
        p.run(units_per_call)
    return _commit_pass(state, p)


@dataclass
class DeletionSchedule:
    """When deletion steps run.

    ``next_trigger`` counts time steps for the unweighted algorithms and
    elements for the weighted ones.  In smoothing mode a triggered step is
    spread over later arrivals while those arrivals wait in a buffer.
    """

    mode: ScheduleMode = ScheduleMode.PAPER_DELAY
    next_trigger: int = 2
    smooth: bool = False
    last_compaction_time: int = 0
    arrivals: int = 0
    pending: _PendingPass | None = None
    buffer: deque = field(default_factory=deque)
    max_buffer: int = 0
    stats: DeletionStats = field(default_factory=DeletionStats)

    @classmethod
    def create(cls, mode: "ScheduleMode | str" = "paper", smooth: bool = False) -> "DeletionSchedule":
        if isinstance(mode, str):
            try:
                mode = ScheduleMode(mode.lower())
            except ValueError:
                raise ValueError(f"unknown schedule {mode!r} (expected 'every' or 'paper')") from None
        if smooth and mode is not ScheduleMode.PAPER_DELAY:
            raise ValueError("smoothing requires the delayed 'paper' schedule")
        return cls(mode=mode, smooth=smooth)

    @property
    def busy(self) -> bool:
        return self.pending is not None or bool(self.buffer)


def _counter(state: SummaryState) -> int:
    if state.algorithm.weighted:
        return state.elements_seen
    return state.current_time


def _due(state: SummaryState, sched: DeletionSchedule) -> bool:
    if sched.mode is ScheduleMode.EVERY_STEP:
        if state.algorithm.weighted:
            return True
        return state.current_time > sched.last_compaction_time
    return _counter(state) >= sched.next_trigger


def _advance(state: SummaryState, sched: DeletionSchedule) -> None:
    sched.last_compaction_time = state.current_time
    if sched.mode is ScheduleMode.PAPER_DELAY:
        counter = _counter(state)
        sched.next_trigger = counter + delay_increment(state.algorithm, state.current_time, state.ell)


def _arrivals_until_trigger(state: SummaryState, sched: DeletionSchedule) -> int:
    gap = sched.next_trigger - _counter(state)
    if not state.algorithm.weighted:
        gap *= state.ell
    return max(1, gap)


def _run_step(state: SummaryState, sched: DeletionSchedule) -> DeletionStats:
    st = deletion_step(state)
    sched.stats += st
    return st


def _settle(state: SummaryState, sched: DeletionSchedule) -> None:
    """Finish any in-flight smoothed pass and drain the buffer."""
    if sched.pending is not None:
        sched.pending.run()
        sched.stats += _commit_pass(state, sched.pending)
        sched.pending = None
    while sched.buffer:
        value, weight = sched.buffer.popleft()
        insert(state, value, weight)


def _process_smooth(state: SummaryState, sched: DeletionSchedule, value, weight: int) -> None:
    sched.arrivals += 1
    if sched.pending is not None:
        sched.buffer.append((value, weight))
        sched.max_buffer = max(sched.max_buffer, len(sched.buffer))
        p = sched.pending
        p.run(p.budget)
        if p.done:
            sched.stats += _commit_pass(state, p)
            sched.pending = None
        return
    if sched.buffer:
        sched.buffer.append((value, weight))
        sched.max_buffer = max(sched.max_buffer, len(sched.buffer))
        for _ in range(2):
            if not sched.buffer:
                break
            v, w = sched.buffer.popleft()
            insert(state, v, w)
            if _due(state, sched):
                break
    else:
        insert(state, value, weight)
    if _due(state, sched):
        _settle(state, sched)
        _advance(state, sched)
        p = _begin_pass(state)
        # one budget unit annotates and decides one entry: two cursor moves
        p.budget = 2 * smoothed_step_budget(len(p.entries), _arrivals_until_trigger(state, sched))
        sched.pending = p


def process(state: SummaryState, value, weight: int = 1) -> None:
    """Feed one stream update and run a deletion step if the schedule fires."""
    sched = state.schedule
    if sched.smooth:
        _process_smooth(state, sched, value, weight)
        return
    insert(state, value, weight)
    if sched.mode is ScheduleMode.PAPER_DELAY:
        counter = state.elements_seen if state.algorithm.weighted else state.total_weight // state.ell
        if counter < sched.next_trigger:
            return
    elif not _due(state, sched):
        return
    _advance(state, sched)
    _run_step(state, sched)


def process_many(state: SummaryState, items: Iterable) -> None:
    """Feed ``value`` or ``(value, weight)`` items in order."""
    for item in items:
        if isinstance(item, tuple):
            process(state, item[0], item[1])
        else:
            process(state, item)


def flush(state: SummaryState) -> DeletionStats:
    """Finish buffered work and force a final deletion step.  Idempotent."""
    sched = state.schedule
    if sched is not None:
        _settle(state, sched)
    if not state.entries:
        return DeletionStats(time_step=state.current_time)
    st = deletion_step(state)
    if sched is not None:
        sched.stats += st
    return st


def settle(state: SummaryState) -> None:
    """Complete pending smoothed work without forcing an extra deletion step."""
    if state.schedule is not None:
        _settle(state, state.schedule)
