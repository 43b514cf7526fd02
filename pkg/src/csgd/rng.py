"""Counter-based SplitMix64 generator.

The stream for seed ``s`` is ``x_k = mix(s + (k + 1) * GAMMA mod 2**64)`` for
k = 0, 1, 2, ..., where ``mix`` is the SplitMix64 finalizer::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

All arithmetic is modulo 2**64. Derived quantities:

* uniform double in [0, 1): ``(x >> 11) * 2**-53``
* integer in [0, m): ``floor(u * m)`` with ``u`` the uniform above
* standard normal pairs: Box-Muller on two consecutive uniforms
  ``(u1, u2)``, using ``1 - u1`` inside the logarithm
* the seed of child stream ``k`` (e.g. Monte Carlo trial k) is ``x_k`` of the
  parent stream, see :func:`derive_seed`

Because each output depends only on (seed, counter), blocks are generated
with vectorized uint64 arithmetic, and any language with wrapping 64-bit
integers reproduces the same draws.
"""

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def mix64(x):
    """SplitMix64 finalizer on a Python int, returning a Python int."""
    return int(_mix(np.array([x & _MASK], dtype=np.uint64))[0])


def derive_seed(seed, k):
    """Seed of child stream ``k``: the k-th output of the stream for ``seed``."""
    return mix64((seed + (k + 1) * GAMMA) & _MASK)


class SplitMix64:
    """Stateful view over the counter-based stream for one seed."""

    def __init__(self, seed):
        self.seed = int(seed) & _MASK
        self.counter = 0

    def next_uint64(self, size):
        k = np.arange(self.counter + 1, self.counter + 1 + size, dtype=np.uint64)
        self.counter += size
        state = np.uint64(self.seed) + k * np.uint64(GAMMA)
        return _mix(state)

    def uniform(self, size):
        x = self.next_uint64(size)
        return (x >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def integers(self, m, size):
        return np.floor(self.uniform(size) * m).astype(np.intp)

    def choice(self, cumulative, size):
        """Draw indices from a distribution given by its cumulative sums."""
        u = self.uniform(size) * cumulative[-1]
        idx = np.searchsorted(cumulative, u, side="right")
        return np.minimum(idx, len(cumulative) - 1)

    def standard_normal(self, size):
        shape = size
        size = int(np.prod(size))
        pairs = (size + 1) // 2
        u = self.uniform(2 * pairs)
        u1, u2 = u[0::2], u[1::2]
        r = np.sqrt(-2.0 * np.log1p(-u1))
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(2.0 * np.pi * u2)
        out[1::2] = r * np.sin(2.0 * np.pi * u2)
        return out[:size].reshape(shape)

    def complex_normal(self, size):
        """Standard complex Gaussian entries with E|z|^2 = 1."""
        g = self.standard_normal(2 * int(np.prod(size)))
        return ((g[0::2] + 1j * g[1::2]) / np.sqrt(2.0)).reshape(size)
