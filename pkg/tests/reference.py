"""Slow, direct reference model used as a differential oracle.

Stores explicit r-min / r-max per element (no g/delta bookkeeping), and
implements a deletion step as "delete the rightmost eligible element, then
rescan", with segments recomputed by brute force every time.
"""

from __future__ import annotations

import math

from qsummary.bands import band_value_iterative

INF = math.inf


def brute_gstar(bands, Gs):
    out = []
    for i in range(len(bands)):
        total = Gs[i]
        k = i - 1
        while k >= 0 and bands[k] < bands[i]:
            total += Gs[k]
            k -= 1
        out.append(total)
    return out


def brute_segment_start(bands, i):
    k = i - 1
    while k >= 0 and bands[k] < bands[i]:
        k -= 1
    return k + 1


class ReferenceSummary:
    def __init__(self, ell, segment, weighted, every_step=True):
        self.ell = ell
        self.segment = segment
        self.weighted = weighted
        self.every_step = every_step
        # rows: [value, arrival, w, rmin, rmax, t0]; sentinel last with value None
        self.rows = [[None, -1, 1, 1, 1, 0]]
        self.W = 0
        self.n = 0
        self.last_t = 0
        self.next_trigger = 2

    @property
    def t(self):
        return self.W // self.ell

    def _key(self, row):
        return (1, 0, 0) if row[0] is None else (0, row[0], row[1])

    def insert(self, value, w=1):
        key = (0, value, self.n)
        i = 0
        while self._key(self.rows[i]) < key:
            i += 1
        pred_rmin, pred_w = (0, 1) if i == 0 else (self.rows[i - 1][3], self.rows[i - 1][2])
        rmin = pred_rmin + pred_w
        rmax = self.rows[i][4]
        for row in self.rows[i:]:
            row[3] += w
            row[4] += w
        self.rows.insert(i, [value, self.n, w, rmin, rmax, (self.W + 1) // self.ell])
        self.W += w
        self.n += 1

    def g_delta(self):
        out = []
        prev_last = 0
        for row in self.rows:
            out.append((row[3] - prev_last, row[4] - row[3]))
            prev_last = row[3] + row[2] - 1
        return out

    def deletion_step(self):
        t = self.t
        while True:
            gd = self.g_delta()
            bands = [band_value_iterative(r[5], t) for r in self.rows[:-1]] + [INF]
            Gs = [g + r[2] - 1 for (g, _), r in zip(gd, self.rows)]
            mass = brute_gstar(bands, Gs) if self.segment else Gs
            victim = None
            for i in range(len(self.rows) - 2, -1, -1):
                g1, d1 = gd[i + 1]
                if bands[i] <= bands[i + 1] and mass[i] + g1 + d1 <= t:
                    victim = i
                    break
            if victim is None:
                return
            start = brute_segment_start(bands, victim) if self.segment else victim
            del self.rows[start:victim + 1]

    def _lg(self, t):
        return 0.0 if t <= 1 else math.log2(t)

    def process(self, value, w=1):
        self.insert(value, w)
        if self.every_step:
            if self.weighted:
                self.deletion_step()
            elif self.t > self.last_t:
                self.last_t = self.t
                self.deletion_step()
            return
        counter = self.n if self.weighted else self.t
        if counter < self.next_trigger:
            return
        t = self.t
        lg = self._lg(t)
        if not self.weighted:
            inc = math.ceil(lg) if self.segment else math.ceil(lg * lg)
        else:
            inc = math.ceil(self.ell * lg) if self.segment else self.ell * math.ceil(lg * lg)
        self.next_trigger = counter + max(1, inc)
        self.deletion_step()

    def state(self):
        """``(value, w, g, delta)`` for real entries."""
        return [(r[0], r[2], g, d) for r, (g, d) in zip(self.rows[:-1], self.g_delta()[:-1])]

    def flush(self):
        if len(self.rows) > 1:
            self.deletion_step()
