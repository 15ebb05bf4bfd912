"""Coin-filled rectangle web and the maze walker that explores it.

The upper half plane above the initial zigzag profile is tiled by 1x2
rectangles anchored at points (c + 1/2, h) with c + h even.  Every anchor
row h >= 1 carries a fair coin deciding whether the rectangle is crossed
by upward or downward line segments.  Rows h in {0, -1} carry no coin:
their segments are the initial zigzag itself, rising where the initial
edge counts rise.  Chaining segments to the right yields the forward line
family; chaining the complementary diagonals to the left yields the
backward family.  Both families are coalescing and non-crossing because
every line through a rectangle reads the same memoized coin.

Left of the origin the zigzag phase makes forward lines reflect off the
floor; right of it they are absorbed and ride the zigzag forever.  The
column pair straddling the origin is flat, carries no boundary line, and
is never queried by any reachable trajectory.

The maze walker starts at the origin and always turns into the less
explored channel; revealing rectangles only as it touches them.  With the
web coins addressed by anchor it reproduces the self-repelling walk of
:mod:`tsrm_lab.walk` exactly, step for step.
"""

from __future__ import annotations

import csv
import enum
from typing import Callable, NamedTuple

import numpy as np

from tsrm_lab import kernels, rng
from tsrm_lab.errors import FixedByInitialCondition
from tsrm_lab.walk import WalkTrace, initial_a


class Filling(enum.Enum):
    """Direction of the line segments crossing one rectangle."""

    UP = "up"
    DOWN = "down"

    @classmethod
    def from_up(cls, up: bool) -> "Filling":
        return cls.UP if up else cls.DOWN


class Anchor(NamedTuple):
    """Anchor point (idx + 1/2, h) of one rectangle; idx + h must be even."""

    idx: int
    h: int

    @property
    def x_half(self) -> float:
        return self.idx + 0.5

    def is_f_point(self) -> bool:
        return (self.idx + self.h) % 2 == 0


class WebStore:
    """Lazy, memoized coin store for one realization of the web.

    Fillings are a pure function of (seed, sub, anchor), so the store can
    be rebuilt in any order and always returns the same web.  ``revealed``
    records which coin rectangles have actually been queried, which is all
    the maze walker ever learns about its environment.
    """

    __slots__ = ("seed", "sub", "_base", "revealed")

    def __init__(self, seed: int, sub: int = 0):
        self.seed = seed
        self.sub = sub
        self._base = rng.stream_base(seed, rng.TAG_WEB, sub)
        self.revealed: dict[Anchor, Filling] = {}

    def coin_up(self, idx: int, h: int) -> bool:
        return rng.web_coin_up(self._base, idx, h)

    def to_csv(self, path) -> None:
        """Dump the revealed rectangles as (x_half, h, filling) rows."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x_half", "h", "filling"])
            for anchor in sorted(self.revealed):
                w.writerow([anchor.x_half, anchor.h, self.revealed[anchor].value])


def boundary_filling(idx: int) -> Filling:
    """Fixed filling of the zigzag rows (h in {-1, 0}) at column idx.

    The segment rises exactly where the initial profile rises.  The flat
    column pair at the origin (idx == -1) carries no line at all.
    """
    if idx == -1:
        raise FixedByInitialCondition(
            "no boundary line in the flat column pair at the origin")
    return Filling.from_up(initial_a(idx + 1) > initial_a(idx))


def rectangle_fill(store: WebStore, anchor: Anchor | tuple[int, int],
                   coins: Callable[[int, int], bool] | None = None) -> Filling:
    """Reveal (or recall) the coin filling of one rectangle.

    Only rows h >= 1 carry coins; the boundary rows are fixed by the
    initial profile and asking for them raises FixedByInitialCondition.
    ``coins`` may override the store's own stream with any callable
    (idx, h) -> up, as long as it is a pure function of the anchor.
    """
    anchor = Anchor(*anchor)
    if not anchor.is_f_point():
        raise ValueError(f"anchor {anchor} is off the even lattice")
    if anchor.h < 1:
        raise FixedByInitialCondition(
            f"row h={anchor.h} is fixed by the initial profile, not coin-filled")
    got = store.revealed.get(anchor)
    if got is None:
        up = store.coin_up(anchor.idx, anchor.h) if coins is None \
            else coins(anchor.idx, anchor.h)
        got = Filling.from_up(up)
        store.revealed[anchor] = got
    return got


def line_filling(store: WebStore, idx: int, h: int) -> Filling:
    """Filling governing the segment in rectangle (idx + 1/2, h), any row."""
    if h >= 1:
        return rectangle_fill(store, Anchor(idx, h))
    if h >= -1:
        return boundary_filling(idx)
    raise ValueError(f"row h={h} lies below the web")


def forward_line(store: WebStore, start: tuple[int, int], e_to: int) -> int:
    """Follow the forward (rightward) line from ``start`` to column e_to.

    ``start`` is an even-parity point (idx, h) meaning (idx + 1/2, h); the
    line gains or loses one unit of height per column according to the
    filling at its current point.  Returns the height at column e_to.
    """
    idx, h = start
    if (idx + h) % 2 != 0:
        raise ValueError(f"forward lines live on the even lattice, got {start}")
    if e_to < idx:
        raise ValueError("forward lines only run to the right")
    while idx < e_to:
        h += 1 if line_filling(store, idx, h) is Filling.UP else -1
        idx += 1
    return h


def backward_line(store: WebStore, start: tuple[int, int], e_to: int) -> int:
    """Follow the backward (leftward) line from ``start`` to column e_to.

    Backward lines live on the odd-parity points and read the rectangle
    one column to their left: an upward filling sends them down, a
    downward filling sends them up.  This makes them the non-crossing
    duals of the forward family inside every rectangle.
    """
    idx, h = start
    if (idx + h) % 2 == 0:
        raise ValueError(f"backward lines live on the odd lattice, got {start}")
    if e_to > idx:
        raise ValueError("backward lines only run to the left")
    while idx > e_to:
        h += -1 if line_filling(store, idx - 1, h) is Filling.UP else 1
        idx -= 1
    return h


def explore(store: WebStore, steps: int) -> WalkTrace:
    """Walk the web as a maze for ``steps`` steps and record the trace.

    The walker state is (x, h, s); s is the half-difference of the local
    channel widths and vanishes exactly at the coin times, where the
    rectangle straight above the walker is revealed and its filling picks
    the turn.  Off coin times the move is forced and only the rectangle in
    the forced direction is revealed.
    """
    xs = np.zeros(steps + 1, np.int64)
    hs = np.zeros(steps + 1, np.int64)
    cf = np.zeros(steps + 1, np.uint8)

    def up(idx: int, h: int) -> bool:
        return line_filling(store, idx, h) is Filling.UP

    x, h, s = 0, 0, 0
    for n in range(steps):
        xs[n] = x
        hs[n] = h
        if s == 0:
            cf[n] = 1
            if (x + h) % 2 != 0:
                raise RuntimeError(f"coin point ({x}, {h}) off the even lattice")
            if up(x - 1, h + 1):
                rh = h + 1 if up(x, h) else h - 1
                x, h, s = x + 1, (h + 1 + rh) // 2, (rh - h - 1) // 2
            else:
                lh = h + 1 if not up(x - 2, h) else h - 1
                x, h, s = x - 1, (h + 1 + lh) // 2, (h + 1 - lh) // 2
        elif s == -1:
            rh = h if up(x, h - 1) else h - 2
            x, h, s = x + 1, (h + rh) // 2, (rh - h) // 2
        else:
            lh = h if not up(x - 2, h - 1) else h - 2
            x, h, s = x - 1, (h + lh) // 2, (h - lh) // 2
    xs[steps] = x
    hs[steps] = h
    if s == 0:
        cf[steps] = 1
    return WalkTrace(xs, hs, cf, store.seed, store.sub, "maze")


def explore_run(steps: int, seed: int, sub: int = 0) -> WalkTrace:
    """Kernel-backed maze walk; identical trace to explore() on a store."""
    xs, hs, cf, consistent = kernels.explore_trace(seed, sub, steps)
    if not consistent:
        raise RuntimeError("maze walker left the even lattice")
    return WalkTrace(xs, hs, cf, seed, sub, "maze")
