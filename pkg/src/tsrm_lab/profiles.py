"""Observables read off the edge profile at coin times.

At a coin time the two edges at the walker hold equal counts, and the
observer who sees only the occupation profile cannot tell where the walker
is.  The modified profile f removes the walker's edge column and splices
the two sides together; everything the profile reveals about the position
is then captured by a few integers: the support ends m- and m+, the
internal zeros, the area above the flat profile, and the admissible
interval of positions consistent with f.

Sites y carry the flat reference value 0 at even y and -1 at odd y; f
agrees with it at the two sentinel sites just outside the support.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from tsrm_lab.errors import Malformed, NotACoinTime, OutsideInterval
from tsrm_lab.walk import EdgeProfile


def flat_value(y: int) -> int:
    """Reference profile: -1 at odd sites, 0 at even sites."""
    return -1 if y % 2 else 0


@dataclass(frozen=True)
class ModifiedProfile:
    """Edge profile at a coin time with the walker column spliced out.

    ``values`` covers the sites lo .. lo + len(values) - 1, which is the
    support [m-, m+] plus one sentinel site on each side where the profile
    has dropped back to -1.
    """

    lo: int
    values: tuple[int, ...]

    def __post_init__(self):
        v = self.values
        if len(v) < 3:
            raise Malformed("profile needs a support site and two sentinels")
        if v[0] != -1 or v[-1] != -1:
            raise Malformed("sentinel sites must hold -1")
        if any(x != -1 and x < 0 for x in v) or -1 in v[1:-1]:
            raise Malformed("support values must be nonnegative")
        for y, x in enumerate(v, start=self.lo):
            if (x - y) % 2:
                raise Malformed(f"value {x} at site {y} breaks parity")
        if any(abs(b - a) != 1 for a, b in zip(v, v[1:])):
            raise Malformed("profile slope must be one unit per site")
        if not self.m_minus <= 0 <= self.m_plus:
            raise Malformed("support must contain the origin")
        z = self.zeros
        if z and z[0] <= 0 <= z[-1]:
            raise Malformed("internal zeros on both sides of the origin")

    @classmethod
    def flat(cls) -> "ModifiedProfile":
        """The profile of the untouched initial condition; support {0}."""
        return cls(-1, (-1, 0, -1))

    @property
    def m_minus(self) -> int:
        return self.lo + 1

    @property
    def m_plus(self) -> int:
        return self.lo + len(self.values) - 2

    def value(self, y: int) -> int:
        """f(y), continued flatly outside the stored range."""
        if self.lo <= y < self.lo + len(self.values):
            return self.values[y - self.lo]
        return flat_value(y)

    @cached_property
    def zeros(self) -> tuple[int, ...]:
        """Sites strictly inside the support where f vanishes."""
        return tuple(y for y in range(self.m_minus + 1, self.m_plus)
                     if self.value(y) == 0)

    @cached_property
    def area(self) -> int:
        """Total excess of f over the flat profile; always even."""
        return sum(self.value(y) - flat_value(y)
                   for y in range(self.m_minus, self.m_plus + 1))

    @property
    def is_flat(self) -> bool:
        return len(self.values) == 3

    def support(self) -> range:
        return range(self.m_minus, self.m_plus + 1)

    def to_rows(self) -> list[tuple[int, int]]:
        """(site, value) rows over the stored range, sentinels included."""
        return [(self.lo + i, v) for i, v in enumerate(self.values)]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["x", "f(x)"])
            w.writerows(self.to_rows())

    def serialize(self) -> dict:
        return {"lo": self.lo, "values": list(self.values)}

    @classmethod
    def deserialize(cls, blob: dict) -> "ModifiedProfile":
        return cls(int(blob["lo"]), tuple(int(v) for v in blob["values"]))


@dataclass(frozen=True)
class AdmissibleInterval:
    """Integer interval of positions consistent with a modified profile.

    ``left`` and ``right`` are the inclusive attainable endpoints; the
    open flags record whether the defining bound sits one site outside
    (an internal zero can never host the walker).
    """

    left: int
    right: int
    open_left: bool = False
    open_right: bool = False

    def __contains__(self, x: int) -> bool:
        return self.left <= x <= self.right

    def __len__(self) -> int:
        return self.right - self.left + 1

    def __iter__(self):
        return iter(range(self.left, self.right + 1))

    def __str__(self) -> str:
        lb = f"({self.left - 1}" if self.open_left else f"[{self.left}"
        rb = f"{self.right + 1})" if self.open_right else f"{self.right}]"
        return f"{lb}, {rb}"


def modify(profile: EdgeProfile, position: int) -> ModifiedProfile:
    """Splice the walker's edge column out of the profile.

    Requires the two edges at ``position`` to hold equal counts (a coin
    time); otherwise the surgery is not defined and NotACoinTime is
    raised.  Left of the walker the spliced profile reads the left edge,
    right of it the right edge, and the shared count survives at the
    walker site itself.
    """
    x = position
    if profile.count(x - 1) != profile.count(x):
        raise NotACoinTime(
            f"edge counts at position {x} differ; no coin is pending")

    def f(y: int) -> int:
        return profile.count(y - 1) if y <= x else profile.count(y)

    y = x
    while not (f(y) == -1 and y <= 0):
        y -= 1
    lo = y
    y = x
    while not (f(y) == -1 and y >= 0):
        y += 1
    hi = y
    return ModifiedProfile(lo, tuple(f(y) for y in range(lo, hi + 1)))


def interval(f: ModifiedProfile) -> AdmissibleInterval:
    """Positions an observer of f cannot rule out.

    Without internal zeros every support site qualifies.  An internal
    zero is a one-sided cut point: the walker must be in the excursion on
    the far side from the origin, strictly beyond the zero.
    """
    z = f.zeros
    if not z:
        return AdmissibleInterval(f.m_minus, f.m_plus)
    if z[0] > 0:
        return AdmissibleInterval(z[-1] + 1, f.m_plus, open_left=True)
    return AdmissibleInterval(f.m_minus, z[0] - 1, open_right=True)


def event_weight(f: ModifiedProfile) -> Fraction:
    """Profile weight 2**-(width of support minus internal zero count)."""
    return Fraction(1, 2 ** ((f.m_plus - f.m_minus) - len(f.zeros)))


def position_probability(f: ModifiedProfile, x: int) -> Fraction:
    """Exact probability that the walk shows the pair (x, f) at its hit time.

    Equals the event weight of f for every position in the interior of
    the admissible interval (where f(x) >= 1), twice that at an interval
    endpoint where f vanishes, and zero at the origin-endpoint: the walk
    cannot sit at 0 over a vanished column unless nothing has moved yet.
    The doubling compensates the endpoint's frozen neighbour column,
    which costs the profile one binary choice less than an interior site.
    """
    if x not in interval(f):
        return Fraction(0)
    if f.is_flat:
        return Fraction(1)
    if f.value(x) == 0:
        if x == 0:
            return Fraction(0)
        return 2 * event_weight(f)
    return event_weight(f)


def hit_time(f: ModifiedProfile, x: int) -> tuple[int, int]:
    """Lattice step n and coin count k at which (x, f) can be observed.

    Both are functions of the observation alone: n is the area plus the
    height at x, and k is half the area plus the height.  Raises
    OutsideInterval when x is inconsistent with f.
    """
    if x not in interval(f):
        raise OutsideInterval(f"position {x} not in {interval(f)}")
    fx = f.value(x)
    return f.area + fx, f.area // 2 + fx


def k_bounds(f: ModifiedProfile) -> tuple[int, int]:
    """Range of coin counts over which f can possibly be observed.

    The low end is attained at a vanishing endpoint of the interval; the
    high end bounds the height through height**2 <= area.
    """
    half = f.area // 2
    root = math.isqrt(f.area)
    if root * root < f.area:
        root += 1
    return half, half + root
