"""Prime enumeration helpers used by the trial divider and the product engines."""

from __future__ import annotations

from math import isqrt

import numpy as np

__all__ = ["primes_up_to", "iter_trial_candidates"]

# candidates coprime to 30, used to continue trial division past the cache
_WHEEL_RESIDUES = (1, 7, 11, 13, 17, 19, 23, 29)
_WHEEL_GAPS = tuple(
    (_WHEEL_RESIDUES[(i + 1) % 8] - _WHEEL_RESIDUES[i]) % 30 or 30 for i in range(8)
)


def primes_up_to(limit: int) -> np.ndarray:
    """All primes <= limit, ascending, as an int64 array."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_p = np.ones(limit + 1, dtype=bool)
    is_p[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_p[p]:
            is_p[p * p :: p] = False
    return np.flatnonzero(is_p).astype(np.int64)


def iter_trial_candidates(start: int):
    """Yield 30-wheel candidates >= start, endlessly.

    The stream contains every prime >= max(start, 7) (plus harmless
    composites), so trial division that consumes it in ascending order
    never misses a prime factor.
    """
    base = max(start, 7)
    lo = (base // 30) * 30
    i = 0
    while lo + _WHEEL_RESIDUES[i] < base:
        i += 1
        if i == 8:
            i = 0
            lo += 30
    c = lo + _WHEEL_RESIDUES[i]
    while True:
        yield c
        c += _WHEEL_GAPS[i]
        i = (i + 1) % 8
