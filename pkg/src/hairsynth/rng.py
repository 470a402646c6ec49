"""Deterministic pseudo-random streams built on SplitMix64.

SplitMix64 (Steele, Lea & Flood, "Fast splittable pseudorandom number
generators") is used as the single generator algorithm everywhere random
values are needed. Streams are derived by hashing integer keys into the
seed, so substream k of a generator is a pure function of (seed, k) and
never depends on how many values other substreams consumed.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: avalanching 64-bit hash of a 64-bit int."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *keys: int) -> int:
    """Derive a substream seed from a base seed and integer keys.

    Pure function; derive_seed(s, a, b) != derive_seed(s, b, a) in general.
    """
    state = seed & _MASK64
    for k in keys:
        state = mix64(state ^ ((k * _GAMMA) & _MASK64))
    return state


class SplitMix64:
    """Sequential SplitMix64 stream with float/int helpers."""

    __slots__ = ("_seed", "_state")

    def __init__(self, seed: int):
        self._seed = seed & _MASK64
        self._state = self._seed

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        return mix64(self._state)

    def next_float(self) -> float:
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.next_float()

    def substream(self, *keys: int) -> "SplitMix64":
        """Independent stream keyed off this stream's seed (not its position)."""
        return SplitMix64(derive_seed(self._seed, *keys))
