"""Time steps and band values.

Time advances in chunks of ``ell`` units of stream weight: after total weight
``W`` has been seen the clock reads ``W // ell``.  An element's band value is a
geometric age class derived from its insertion time step ``t0`` and the
current time step ``t``.  Elements that share a band at some time step keep
sharing it afterwards, because promotion depends only on ``(v, t)``.
"""

from __future__ import annotations

from typing import Iterator


def current_time(total_weight: int, ell: int) -> int:
    """Number of complete ``ell``-weight chunks seen so far."""
    return total_weight // ell


def insertion_time(weight_before: int, ell: int) -> int:
    """Time step assigned to an element arriving after ``weight_before`` units."""
    return (weight_before + 1) // ell


def _in_band(alpha: int, t: int, d: int) -> bool:
    lo_mod = 1 << (alpha - 1)
    hi_mod = 1 << alpha
    return lo_mod + (t & (lo_mod - 1)) <= d < hi_mod + (t & (hi_mod - 1))


def band_value(t0: int, t: int) -> int:
    """Band value at time ``t`` of an element inserted at time ``t0``, in O(1).

    For ``d = t - t0 >= 1`` the band is the unique ``alpha >= 1`` with
    ``2**(alpha-1) + t mod 2**(alpha-1) <= d < 2**alpha + t mod 2**alpha``.
    Both bounds pin ``alpha`` to ``floor(log2 d)`` or ``floor(log2 d) + 1``.
    """
    if t0 > t:
        raise ValueError(f"insertion time {t0} is after current time {t}")
    d = t - t0
    if d == 0:
        return 0
    a = d.bit_length() - 1
    if a >= 1 and _in_band(a, t, d):
        return a
    if _in_band(a + 1, t, d):
        return a + 1
    raise AssertionError(f"no band for t0={t0}, t={t}")  # unreachable


def band_trajectory(t0: int, t_end: int) -> Iterator[int]:
    """Yield the band value at every time step ``t0, t0+1, ..., t_end``.

    Direct simulation of the promotion rule: at each step ``t > t0`` the value
    increases by one when ``t`` is a multiple of ``2**v``.
    """
    v = 0
    yield v
    for t in range(t0 + 1, t_end + 1):
        if t % (1 << v) == 0:
            v += 1
        yield v


def band_value_iterative(t0: int, t: int) -> int:
    """Reference band value by step-by-step simulation (O(t - t0))."""
    if t0 > t:
        raise ValueError(f"insertion time {t0} is after current time {t}")
    v = 0
    for v in band_trajectory(t0, t):
        pass
    return v


def max_band(t: int) -> int:
    """Upper bound on any band value present at time ``t``.

    Every element satisfies ``2**(v-1) - 2 <= t - t0 <= t``, so the largest
    admissible ``v`` is ``floor(log2(t + 2)) + 1``.
    """
    if t <= 0:
        return 0
    return (t + 2).bit_length()
