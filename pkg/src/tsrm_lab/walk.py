"""Self-repelling walk on the integers, driven by edge-local times.

The walker at site x compares the occupation counts of its two adjacent
edges and always crosses the less-visited one.  Ties force a fair coin;
those steps are the coin times, and everything downstream (the rectangle
web, the exact law, the Monte Carlo observables) is indexed by them.

Counts start from the flattest admissible initial profile, alternating 0
and -1 so that every edge pair has unit slope except the tie at the
origin.  This module is the plain-Python reference; the numba twin in
:mod:`tsrm_lab.kernels` reproduces it bit for bit and is used for long
runs.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from tsrm_lab import kernels, rng


def initial_a(idx: int) -> int:
    """Initial count of edge idx + 1/2: 0 at even distance from 1/2, else -1."""
    d = idx if idx >= 0 else -idx - 1
    return 0 if d % 2 == 0 else -1


class EdgeProfile:
    """Sparse integer profile over edges, defaulting to the initial counts.

    Edge e = idx + 1/2 is addressed by idx.  Only counts that differ from
    ``initial_a`` are stored.
    """

    __slots__ = ("_counts",)

    def __init__(self, counts: dict[int, int] | None = None):
        self._counts = dict(counts) if counts else {}

    def count(self, idx: int) -> int:
        return self._counts.get(idx, initial_a(idx))

    def bump(self, idx: int) -> int:
        """Record one traversal of edge idx + 1/2; returns the new count."""
        v = self.count(idx) + 1
        self._counts[idx] = v
        return v

    def set_count(self, idx: int, value: int) -> None:
        """Force the count of one edge (used when rebuilding a state)."""
        if value == initial_a(idx):
            self._counts.pop(idx, None)
        else:
            self._counts[idx] = value

    def touched_range(self) -> tuple[int, int]:
        """Smallest idx interval containing every modified edge."""
        if not self._counts:
            return 0, -1
        return min(self._counts), max(self._counts)

    def copy(self) -> "EdgeProfile":
        return EdgeProfile(self._counts)

    def items(self, margin: int = 2) -> Iterator[tuple[int, int]]:
        """Yield (idx, count) over the touched range plus a margin."""
        lo, hi = self.touched_range()
        for idx in range(lo - margin, hi + margin + 1):
            yield idx, self.count(idx)


class WalkState:
    """Walker position, step counter, coin counter, and the edge profile."""

    __slots__ = ("x", "n", "coins_used", "profile")

    def __init__(self):
        self.x = 0
        self.n = 0
        self.coins_used = 0
        self.profile = EdgeProfile()

    @property
    def left_count(self) -> int:
        return self.profile.count(self.x - 1)

    @property
    def right_count(self) -> int:
        return self.profile.count(self.x)

    @property
    def is_coin_time(self) -> bool:
        return self.left_count == self.right_count

    @property
    def height(self) -> int:
        """Mean of the two adjacent counts; an integer at every step."""
        return (self.left_count + self.right_count) // 2

    def copy(self) -> "WalkState":
        s = WalkState.__new__(WalkState)
        s.x = self.x
        s.n = self.n
        s.coins_used = self.coins_used
        s.profile = self.profile.copy()
        return s


class CoinSource:
    """Supplier of the fair coins consumed at coin times."""

    def up(self, coin_index: int, anchor_idx: int, anchor_h: int) -> bool:
        raise NotImplementedError


class SequentialCoins(CoinSource):
    """Coins drawn from a counter-mode stream in consumption order."""

    def __init__(self, seed: int, sub: int = 0, flip: bool = False):
        self._base = rng.stream_base(seed, rng.TAG_WALK, sub)
        self._flip = flip

    def up(self, coin_index: int, anchor_idx: int, anchor_h: int) -> bool:
        return rng.coin_bit(self._base, coin_index) != self._flip


class AddressedCoins(CoinSource):
    """Coins looked up by the anchor of the rectangle above the walker.

    Sharing this source with a rectangle web built from the same seed
    couples the walk to the maze explorer step for step.
    """

    def __init__(self, seed: int, sub: int = 0):
        self._base = rng.stream_base(seed, rng.TAG_WEB, sub)

    def up(self, coin_index: int, anchor_idx: int, anchor_h: int) -> bool:
        return rng.web_coin_up(self._base, anchor_idx, anchor_h)


class ScriptedCoins(CoinSource):
    """Fixed coin sequence for tests and exact enumeration; True means up."""

    def __init__(self, bits: Sequence[bool]):
        self._bits = list(bits)

    def up(self, coin_index: int, anchor_idx: int, anchor_h: int) -> bool:
        return self._bits[coin_index]


def step(state: WalkState, coins: CoinSource) -> WalkState:
    """Advance the walk one lattice step in place and return the state.

    At a tie the pending coin is fetched from ``coins``, keyed both by the
    running coin index and by the anchor of the rectangle above the walker,
    so sequential and anchor-addressed sources plug in interchangeably.
    """
    el = state.left_count
    er = state.right_count
    if el == er:
        up = coins.up(state.coins_used, state.x - 1, el + 1)
        state.coins_used += 1
        go_right = up
    else:
        go_right = el > er
    if go_right:
        state.profile.bump(state.x)
        state.x += 1
    else:
        state.profile.bump(state.x - 1)
        state.x -= 1
    state.n += 1
    return state


def reconstruct_position(profile: EdgeProfile) -> int:
    """Recover the walker position from the edge profile alone.

    The profile has unit slope across every edge pair except the one at
    the walker, whose slope is even (0 at coin times, otherwise +-2).
    """
    lo, hi = profile.touched_range()
    found = None
    for idx in range(lo - 2, hi + 2):
        if (profile.count(idx + 1) - profile.count(idx)) % 2 == 0:
            if found is not None:
                raise ValueError("profile has more than one even-slope pair")
            found = idx + 1
    if found is None:
        raise ValueError("profile has no even-slope pair")
    return found


@dataclass
class WalkTrace:
    """Recorded walk: position, height and coin indicator per step."""

    positions: np.ndarray
    heights: np.ndarray
    coin_flags: np.ndarray
    seed: int
    sub: int
    mode: str

    @property
    def steps(self) -> int:
        return len(self.positions) - 1

    @property
    def coin_times(self) -> np.ndarray:
        return np.nonzero(self.coin_flags)[0]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "X", "H", "is_coin_time"])
            for n in range(len(self.positions)):
                w.writerow([n, int(self.positions[n]), int(self.heights[n]),
                            int(self.coin_flags[n])])


def profile_to_csv(profile: EdgeProfile, path, margin: int = 2) -> None:
    """Write the edge counts over the touched range as (edge_idx, ell)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["edge_idx", "ell"])
        for idx, count in profile.items(margin):
            w.writerow([idx, count])


def run(steps: int, seed: int, sub: int = 0, addressed: bool = False,
        flip: bool = False, backend: str = "kernel") -> WalkTrace:
    """Run ``steps`` lattice steps from a fresh start and record the trace.

    ``backend="kernel"`` uses the numba twin; ``backend="python"`` runs
    this module's reference loop.  Both produce identical traces for the
    same (seed, sub) and mode, which the test suite asserts.
    """
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    mode = "addressed" if addressed else "sequential"
    if backend == "kernel":
        xs, hs, cf, _, _ = kernels.walk_trace(seed, sub, steps, addressed, flip)
        return WalkTrace(xs, hs, cf, seed, sub, mode)
    if backend != "python":
        raise ValueError(f"unknown backend: {backend!r}")
    if addressed:
        coins: CoinSource = AddressedCoins(seed, sub)
        if flip:
            raise ValueError("flip only applies to sequential coins")
    else:
        coins = SequentialCoins(seed, sub, flip)
    state = WalkState()
    xs = np.zeros(steps + 1, np.int64)
    hs = np.zeros(steps + 1, np.int64)
    cf = np.zeros(steps + 1, np.uint8)
    for n in range(steps):
        xs[n] = state.x
        hs[n] = state.height
        cf[n] = 1 if state.is_coin_time else 0
        step(state, coins)
    xs[steps] = state.x
    hs[steps] = state.height
    cf[steps] = 1 if state.is_coin_time else 0
    return WalkTrace(xs, hs, cf, seed, sub, mode)


def run_with_profile(steps: int, seed: int, sub: int = 0) -> tuple[WalkTrace, EdgeProfile]:
    """Kernel-backed run that also returns the final edge profile."""
    xs, hs, cf, ell, lo = kernels.walk_trace(seed, sub, steps, False, False)
    counts = {}
    for i, v in enumerate(ell):
        idx = lo + i
        if v != initial_a(idx):
            counts[idx] = int(v)
    trace = WalkTrace(xs, hs, cf, seed, sub, "sequential")
    return trace, EdgeProfile(counts)
