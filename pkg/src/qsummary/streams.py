"""Seeded stream generators and the line-oriented text format.

Streams are drawn from NumPy's PCG64 bit generator seeded with the stream
spec's seed.  Values are drawn first, then weights, from the same generator, so a
``(order, weights, seed, n)`` spec always reproduces the same stream.

Text format: one update per line, ``v`` or ``v,w``.  Blank lines and lines
starting with ``#`` are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple

import numpy as np

ORDERS = ("random", "sorted", "reverse", "sawtooth", "duplicate-heavy")
INT64_MIN = -(2**63)
INT64_MAX = 2**63 - 1
WEIGHT_LIMIT = 2**32
DUPLICATE_DISTINCT = 16


class StreamItem(NamedTuple):
    value: int
    weight: int = 1


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class WeightDist:
    kind: str = "unit"  # unit | uniform | zipf
    bound: int = 1
    exponent: float = 0.0

    def __post_init__(self):
        if self.kind not in ("unit", "uniform", "zipf"):
            raise ValueError(f"unknown weight distribution {self.kind!r}")
        if self.kind != "unit" and not 1 <= self.bound < WEIGHT_LIMIT:
            raise ValueError(f"weight bound must lie in [1, 2^32), got {self.bound}")
        if self.kind == "zipf" and not self.exponent > 0:
            raise ValueError(f"zipf exponent must be positive, got {self.exponent}")

    @classmethod
    def parse(cls, text: str) -> "WeightDist":
        """``unit``, ``uniform-B`` or ``zipf-S-B``."""
        parts = text.strip().lower().split("-")
        try:
            if parts == ["unit"]:
                return cls()
            if parts[0] == "uniform" and len(parts) == 2:
                return cls("uniform", int(parts[1]))
            if parts[0] == "zipf" and len(parts) == 3:
                return cls("zipf", int(parts[2]), float(parts[1]))
        except ValueError as exc:
            raise ValueError(f"bad weight distribution {text!r}: {exc}") from None
        raise ValueError(f"bad weight distribution {text!r} (use unit, uniform-B or zipf-S-B)")

    def __str__(self) -> str:
        if self.kind == "unit":
            return "unit"
        if self.kind == "uniform":
            return f"uniform-{self.bound}"
        return f"zipf-{self.exponent:g}-{self.bound}"


@dataclass(frozen=True)
class StreamSpec:
    n: int
    order: str = "random"
    weights: WeightDist = WeightDist()
    seed: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"stream length must be non-negative, got {self.n}")
        if self.order not in ORDERS:
            raise ValueError(f"unknown order {self.order!r} (expected one of {', '.join(ORDERS)})")

    @classmethod
    def parse(cls, text: str) -> "StreamSpec":
        """Parse ``order:weights:seed:n``, e.g. ``random:uniform-1000:7:20000``."""
        parts = text.split(":")
        if len(parts) != 4:
            raise ValueError(f"generator spec {text!r} must look like order:weights:seed:n")
        order, weights, seed, n = parts
        try:
            return cls(int(n), order.strip().lower(), WeightDist.parse(weights), int(seed))
        except ValueError as exc:
            raise ValueError(f"bad generator spec {text!r}: {exc}") from None

    def __str__(self) -> str:
        return f"{self.order}:{self.weights}:{self.seed}:{self.n}"


def parse_spec(text: str) -> StreamSpec:
    return StreamSpec.parse(text)


def _values(order: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if order == "sorted":
        return np.arange(n, dtype=np.int64)
    if order == "reverse":
        return np.arange(n - 1, -1, -1, dtype=np.int64)
    if order == "sawtooth":
        period = max(1, math.isqrt(n))
        return np.arange(n, dtype=np.int64) % period
    if order == "duplicate-heavy":
        return rng.integers(0, DUPLICATE_DISTINCT, size=n, dtype=np.int64)
    return rng.integers(INT64_MIN, INT64_MAX, size=n, dtype=np.int64, endpoint=True)


def _weights(dist: WeightDist, n: int, rng: np.random.Generator) -> np.ndarray:
    if dist.kind == "unit":
        return np.ones(n, dtype=np.int64)
    if dist.kind == "uniform":
        return rng.integers(1, dist.bound, size=n, dtype=np.int64, endpoint=True)
    ks = np.arange(1, dist.bound + 1, dtype=np.float64)
    p = ks ** -dist.exponent
    p /= p.sum()
    return rng.choice(np.arange(1, dist.bound + 1, dtype=np.int64), size=n, p=p)


def generate_arrays(spec: StreamSpec) -> tuple[np.ndarray, np.ndarray]:
    """``(values, weights)`` as int64 arrays."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    values = _values(spec.order, spec.n, rng)
    weights = _weights(spec.weights, spec.n, rng)
    return values, weights


def generate(spec: StreamSpec) -> Iterator[StreamItem]:
    values, weights = generate_arrays(spec)
    for v, w in zip(values.tolist(), weights.tolist()):
        yield StreamItem(v, w)


def parse_line(line: str, lineno: int = 0) -> StreamItem | None:
    """Parse one input line; ``None`` for blank and comment lines."""
    text = line.strip()
    if not text or text.startswith("#"):
        return None
    fields = text.split(",")
    if len(fields) > 2:
        raise ParseError(lineno, f"expected 'v' or 'v,w', got {text!r}")
    try:
        value = int(fields[0].strip())
    except ValueError:
        raise ParseError(lineno, f"malformed value {fields[0].strip()!r}") from None
    if not INT64_MIN <= value <= INT64_MAX:
        raise ParseError(lineno, f"value {value} does not fit in 64 bits")
    weight = 1
    if len(fields) == 2:
        try:
            weight = int(fields[1].strip())
        except ValueError:
            raise ParseError(lineno, f"malformed weight {fields[1].strip()!r}") from None
        if weight <= 0:
            raise ParseError(lineno, f"weight must be positive, got {weight}")
        if weight >= WEIGHT_LIMIT:
            raise ParseError(lineno, f"weight {weight} must be below 2^32")
    return StreamItem(value, weight)


def read_items(lines: Iterable[str]) -> Iterator[StreamItem]:
    for lineno, line in enumerate(lines, start=1):
        item = parse_line(line, lineno)
        if item is not None:
            yield item


def format_item(item: StreamItem) -> str:
    if item.weight == 1:
        return str(item.value)
    return f"{item.value},{item.weight}"
