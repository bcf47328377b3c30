"""Deterministic 64-bit random number generation for instance sampling.

The generator is splitmix64: a fixed increment (golden-ratio) counter whose
state is scrambled by two xor-shift-multiply rounds per output.  It is pinned
here, instead of relying on a host RNG, so that the same (parameters, seed)
pair produces bit-identical instances on every platform and Python version.

Integer intervals are sampled by rejection: draws above the largest multiple
of the span are discarded, so no modulo bias is introduced.
"""

_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


class SplitMix64:
    """splitmix64 stream seeded from a single 64-bit value."""

    __slots__ = ("_state",)

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in the closed interval [lo, hi], by rejection."""
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        span = hi - lo + 1
        limit = (1 << 64) - ((1 << 64) % span)
        while True:
            u = self.next_u64()
            if u < limit:
                return lo + (u % span)
