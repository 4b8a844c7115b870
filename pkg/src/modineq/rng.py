"""Counter-based pseudo-random stream used for every generated instance.

The generator is deliberately simple so it can be reimplemented bit-for-bit
elsewhere:

* ``mix(z)`` is the SplitMix64 finaliser::

      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
      z = (z ^ (z >> 27)) * 0x94D049BB133111EB
      z =  z ^ (z >> 31)                          (all mod 2**64)

* a stream is keyed by ``key = mix(mix(seed) + stream * 0xD1B54A32D192ED03)``;
* word ``i`` of the stream is ``mix(key + (i + 1) * 0x9E3779B97F4A7C15)``;
* uniforms are ``(word >> 11) * 2**-53`` in ``[0, 1)``;
* standard normals use Box-Muller on consecutive word pairs ``(u1, u2)``:
  ``sqrt(-2 log(1 - u1)) * (cos, sin)(2 pi u2)``.

Nothing depends on the platform's default generator.
"""
from __future__ import annotations

import numpy as np

__all__ = ["CounterRNG", "mix64"]

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_STREAM = 0xD1B54A32D192ED03
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def _mix_array(z: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))


class CounterRNG:
    """Stateful cursor over the counter-based stream ``(seed, stream)``."""

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & _MASK
        self.stream = int(stream) & _MASK
        self.key = mix64((mix64(self.seed) + self.stream * _STREAM) & _MASK)
        self.counter = 0

    def spawn(self, stream: int) -> "CounterRNG":
        """Independent stream derived from the same seed (e.g. one per instance)."""
        return CounterRNG(self.seed, (self.stream * _GOLDEN + stream + 1) & _MASK)

    def words(self, n: int) -> np.ndarray:
        idx = np.arange(self.counter + 1, self.counter + n + 1, dtype=np.uint64)
        self.counter += n
        with np.errstate(over="ignore"):
            z = np.uint64(self.key) + idx * np.uint64(_GOLDEN)
        return _mix_array(z)

    def uniform(self, size=None, low: float = 0.0, high: float = 1.0):
        n = 1 if size is None else int(np.prod(size))
        u = (self.words(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        u = low + (high - low) * u
        return float(u[0]) if size is None else u.reshape(size)

    def normal(self, size) -> np.ndarray:
        n = int(np.prod(size))
        m = (n + 1) // 2
        u = self.uniform(2 * m)
        r = np.sqrt(-2.0 * np.log1p(-u[0::2]))
        theta = 2.0 * np.pi * u[1::2]
        z = np.empty(2 * m)
        z[0::2] = r * np.cos(theta)
        z[1::2] = r * np.sin(theta)
        return z[:n].reshape(size)

    def complex_normal(self, size) -> np.ndarray:
        """Complex Gaussian entries with ``E|z|^2 = 1``."""
        z = self.normal((2,) + tuple(np.atleast_1d(size)))
        return (z[0] + 1j * z[1]) / np.sqrt(2.0)

    def integers(self, low: int, high: int) -> int:
        """Uniform integer in ``[low, high)``."""
        return low + int(self.uniform() * (high - low))
