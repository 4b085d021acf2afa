"""Counter-based splittable random streams.

Each walk owns a splitmix64 stream keyed by (seed, walk index), so estimates
are reproducible bit-for-bit and independent of how walks are scheduled across
workers.  The scalar and vectorized implementations draw identical sequences.
"""

from __future__ import annotations

import numpy as np

__all__ = ["SplitMixStream", "stream_states", "next_uniform", "mix64"]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

_U_GOLDEN = np.uint64(_GOLDEN)
_U_MIX1 = np.uint64(_MIX1)
_U_MIX2 = np.uint64(_MIX2)
_U30 = np.uint64(30)
_U27 = np.uint64(27)
_U31 = np.uint64(31)
_U11 = np.uint64(11)
_ONE = np.uint64(1)
_TO_UNIT = 2.0**-53


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK
    return z ^ (z >> 31)


class SplitMixStream:
    """Scalar stream; uniform() yields doubles in (0, 1]."""

    __slots__ = ("state",)

    def __init__(self, seed: int, index: int):
        self.state = mix64(mix64(seed) ^ ((index + 1) * _GOLDEN & _MASK))

    def uniform(self) -> float:
        self.state = (self.state + _GOLDEN) & _MASK
        return ((mix64(self.state) >> 11) + 1) * _TO_UNIT


def stream_states(seed: int, indices: np.ndarray) -> np.ndarray:
    """Initial uint64 states for the given walk indices."""
    idx = indices.astype(np.uint64)
    z = (idx + _ONE) * _U_GOLDEN
    z ^= np.uint64(mix64(seed))
    z = (z ^ (z >> _U30)) * _U_MIX1
    z = (z ^ (z >> _U27)) * _U_MIX2
    return z ^ (z >> _U31)


def next_uniform(states: np.ndarray, idx: np.ndarray | None = None) -> np.ndarray:
    """Advance the selected streams by one draw; uniforms in (0, 1]."""
    if idx is None:
        states += _U_GOLDEN
        z = states.copy()
    else:
        states[idx] += _U_GOLDEN
        z = states[idx].copy()
    z = (z ^ (z >> _U30)) * _U_MIX1
    z = (z ^ (z >> _U27)) * _U_MIX2
    z ^= z >> _U31
    return ((z >> _U11) + _ONE) * _TO_UNIT
