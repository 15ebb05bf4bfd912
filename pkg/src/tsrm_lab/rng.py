"""Deterministic coin streams shared by the Python and numba code paths.

Everything downstream of a seed is a pure function of 64-bit integers, so
runs reproduce bit for bit across processes and worker counts.  The mixer is
the splitmix64 finalizer; independent streams are carved out of a seed by
chaining golden-ratio increments for a stream tag and a substream index,
then draws walk the stream counter.  The numba kernels in
:mod:`tsrm_lab.kernels` implement the same arithmetic on ``uint64`` and the
test suite checks the two mirrors word for word.

Three streams exist per (seed, substream):

* walk coins, consumed in coin-time order (``TAG_WALK``),
* web rectangle coins, addressed by rectangle anchor (``TAG_WEB``),
* the geometric horizon draw (``TAG_GEOM``).

Addressing web coins by anchor rather than by draw order is what couples
the walk to the maze explorer: both processes ask for the same anchor and
therefore see the same coin, regardless of the order they discover it.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN = 0x9E3779B97F4A7C15

# Stream tags, mixed into the seed.  Keep in sync with kernels.py.
TAG_WALK = 11
TAG_WEB = 13
TAG_GEOM = 21


def mix64(z: int) -> int:
    """splitmix64 finalizer: avalanche one 64-bit word."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def stream_base(seed: int, tag: int, sub: int) -> int:
    """Base word of stream ``(tag, sub)`` rooted at ``seed``."""
    z = mix64((seed + GOLDEN * tag) & MASK64)
    return mix64(mix64((z + GOLDEN * sub) & MASK64))


def raw64(base: int, i: int) -> int:
    """The ``i``-th word of the counter-mode stream rooted at ``base``."""
    return mix64((base + GOLDEN * i) & MASK64)


def unit_double(z: int) -> float:
    """Map a 64-bit word to a double in (0, 1].

    The half-offset keeps the result strictly positive so logarithms are
    always finite; the top word rounds to exactly 1.0, which downstream
    consumers treat as a zero-length log.
    """
    return ((z >> 11) + 0.5) * 2.0 ** -53


def coin_bit(base: int, i: int) -> bool:
    """Fair coin ``i`` of a sequential stream; True means up (step right)."""
    return raw64(base, i) >> 63 != 0


def anchor_key(idx0: int, h0: int) -> int:
    """Pack a rectangle anchor into one word for addressed coin lookup.

    The anchor is the lattice point (idx0 + 1/2, h0).  Column index in the
    high half, height in the low half keeps distinct anchors on distinct
    words for every coordinate a finite run can reach.
    """
    return ((idx0 & MASK64) << 32 ^ (h0 & 0xFFFFFFFF)) & MASK64


def web_coin_up(web_base: int, idx0: int, h0: int) -> bool:
    """Fair coin of the rectangle anchored at (idx0 + 1/2, h0), h0 >= 1.

    True means the rectangle is filled with upward lines.  Both the walk
    (in addressed-coin mode) and the maze explorer consult this function,
    which couples the two processes path by path.
    """
    return mix64(web_base ^ anchor_key(idx0, h0)) >> 63 != 0
