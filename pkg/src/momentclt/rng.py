"""Counter-based random numbers keyed by (seed, lattice coordinates).

Every random draw is a pure function of its key, so a window simulated at one
size agrees with a larger window on their overlap, and the evaluation order
(or the number of workers) never changes a result. The mixing function is the
SplitMix64 finaliser applied along the key.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "STREAM_CHAIN",
    "STREAM_DIGITS",
    "STREAM_INNOVATIONS",
    "STREAM_REPLICATION",
    "derive_seed",
    "hash_keys",
    "uniforms",
]

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1

# stream tags keep independent uses of one seed apart
STREAM_INNOVATIONS = 1
STREAM_CHAIN = 2
STREAM_DIGITS = 3
STREAM_REPLICATION = 4


def _mix(x: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = x + _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


def _as_u64(values) -> np.ndarray:
    # two's complement for negative lattice coordinates
    if isinstance(values, (int, np.integer)):
        return np.array(int(values) & _MASK, dtype=np.uint64)
    arr = np.asarray(values)
    if arr.dtype == np.uint64:
        return arr
    return arr.astype(np.int64).view(np.uint64)


def hash_keys(seed, *components) -> np.ndarray:
    """Hash ``(seed, c_1, c_2, ...)`` elementwise to uint64.

    ``seed`` and every component broadcast against each other.
    """
    h = _mix(_as_u64(seed))
    for c in components:
        h = _mix(h ^ _as_u64(c))
    return h


def derive_seed(master: int, *components: int) -> int:
    """A child seed that depends only on ``master`` and the integer path ``components``."""
    return int(hash_keys(int(master), *(int(c) for c in components)))


def uniforms(bits: np.ndarray) -> np.ndarray:
    """Map uint64 hashes to doubles in the open interval (0, 1)."""
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * (1.0 / 9007199254740992.0)
