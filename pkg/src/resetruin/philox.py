"""Counter-based RNG for the Monte Carlo engine: Philox-4x64-10.

Reproducibility across execution orders is the whole point here.  The k-th
64-bit word of trajectory j's stream is a pure function of (seed, j, k), so
a trajectory sees the same randomness whether it runs alone, inside a
vectorized batch, or on another thread, and batch totals merge by plain
integer addition.

Stream layout
-------------
    key     = (seed mod 2**64, STREAM_TAG)
    counter = (t // 4, j, 0, 0)        tick t of trajectory j
    word    = block output [t % 4]
    uniform = (word >> 11) * 2.0**-53  53-bit uniform in [0, 1)

STREAM_TAG is a fixed domain separator (the first 64 fractional bits of pi)
so a small integer seed still yields a well-mixed key.  Round function and
constants are the standard Philox-4x64 ones (Salmon, Moraes, Dror, Shaw,
"Parallel random numbers: as easy as 1, 2, 3", SC 2011).  The scalar and
vectorized paths are exercised bit-for-bit against each other and against
numpy's independent Philox implementation in the test suite; known-answer
vectors live in the README.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "STREAM_TAG",
    "SubStream",
    "philox4",
    "philox4_blocks",
    "words_to_uniforms",
]

_M0 = 0xD2E7470EE14C6C93
_M1 = 0xCA5A826395121157
_W0 = 0x9E3779B97F4A7C15
_W1 = 0xBB67AE8584CAA73B
_MASK = (1 << 64) - 1

STREAM_TAG = 0x243F6A8885A308D3


def philox4(counter, key):
    """One Philox-4x64-10 block on plain Python integers.

    counter is a 4-tuple and key a 2-tuple of ints below 2**64; returns the
    four output words.  Exact by construction; the vectorized path must
    reproduce it bit for bit.
    """
    x0, x1, x2, x3 = counter
    k0, k1 = key
    for rnd in range(10):
        if rnd:
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
        p0 = _M0 * x0
        p1 = _M1 * x2
        x0 = (p1 >> 64) ^ x1 ^ k0
        x1 = p1 & _MASK
        x2 = (p0 >> 64) ^ x3 ^ k1
        x3 = p0 & _MASK
    return x0, x1, x2, x3


_M32 = np.uint64(0xFFFFFFFF)
_SH32 = np.uint64(32)


def _mulhilo(const, x):
    # 64x64 -> 128 product by 32-bit limbs; every partial sum provably
    # stays below 2**64, so only the deliberate low-word wrap occurs.
    a_lo = np.uint64(const & 0xFFFFFFFF)
    a_hi = np.uint64(const >> 32)
    x_lo = x & _M32
    x_hi = x >> _SH32
    lo = np.uint64(const) * x
    t = a_lo * x_hi + ((a_lo * x_lo) >> _SH32)
    w = a_hi * x_lo + (t & _M32)
    hi = a_hi * x_hi + (t >> _SH32) + (w >> _SH32)
    return hi, lo


def philox4_blocks(block, traj, key0, key1):
    """Philox-4x64-10 for many streams at once.

    block: shared counter word 0 (int); traj: uint64 array of counter word 1
    values.  Returns a (4, n) uint64 array of output words.
    """
    traj = np.ascontiguousarray(traj, dtype=np.uint64)
    n = traj.shape[0]
    x0 = np.full(n, np.uint64(block & _MASK))
    x1 = traj
    x2 = np.zeros(n, dtype=np.uint64)
    x3 = np.zeros(n, dtype=np.uint64)
    k0 = int(key0) & _MASK
    k1 = int(key1) & _MASK
    for rnd in range(10):
        if rnd:
            # key bump on Python ints: numpy warns on scalar overflow
            k0 = (k0 + _W0) & _MASK
            k1 = (k1 + _W1) & _MASK
        hi0, lo0 = _mulhilo(_M0, x0)
        hi1, lo1 = _mulhilo(_M1, x2)
        x0 = hi1 ^ x1 ^ np.uint64(k0)
        x1 = lo1
        x2 = hi0 ^ x3 ^ np.uint64(k1)
        x3 = lo0
    return np.stack((x0, x1, x2, x3))


def words_to_uniforms(words):
    """Map 64-bit words to doubles in [0, 1) keeping 53 mantissa bits."""
    return (words >> np.uint64(11)).astype(np.float64) * 2.0**-53


class SubStream:
    """Scalar view of one trajectory's stream, indexed by tick."""

    __slots__ = ("key", "traj", "_block_index", "_block")

    def __init__(self, seed, traj_index):
        self.key = (int(seed) & _MASK, STREAM_TAG)
        self.traj = int(traj_index) & _MASK
        self._block_index = -1
        self._block = (0, 0, 0, 0)

    def uniform(self, t):
        """The tick-t uniform; any access order gives the same numbers."""
        block, word = divmod(t, 4)
        if block != self._block_index:
            self._block = philox4((block, self.traj, 0, 0), self.key)
            self._block_index = block
        return (self._block[word] >> 11) * 2.0**-53
