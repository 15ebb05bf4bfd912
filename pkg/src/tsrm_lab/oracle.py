"""Exact law of the coin-time observation by brute force.

Two independent routes compute the same object.  The walk route expands
the coin tree: every coin sequence of length k has weight 2**-k, and the
observation (position, modified profile) at each coin time is recorded
with exact rational arithmetic.  The profile route never runs the walk:
it generates every admissible modified profile directly and assigns each
(x, f) pair its probability from the closed-form position law.  The test
suite holds the two routes equal atom by atom, which is the ground truth
behind every derived constant in the package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

from tsrm_lab.errors import Malformed, Refused
from tsrm_lab.rng import MASK64, mix64
from tsrm_lab.profiles import (
    ModifiedProfile,
    flat_value,
    hit_time,
    interval,
    modify,
    position_probability,
)
from tsrm_lab.walk import CoinSource, WalkState, step

MAX_ENUMERATION_COINS = 20

Atom = tuple[int, ModifiedProfile]


@dataclass
class ExactLaw:
    """Map from observation atoms (x, f) to exact probabilities.

    ``kind`` is "conditional" when each coin level k carries total mass 1,
    or "joint" after mixing with the geometric horizon, in which case the
    probabilities sum to 1 minus ``truncation_mass``.
    """

    kind: str
    max_coins: int
    entries: dict[Atom, Fraction] = field(default_factory=dict)
    truncation_mass: Fraction = Fraction(0)

    def k_of(self, atom: Atom) -> int:
        x, f = atom
        return hit_time(f, x)[1]

    def level(self, k: int) -> dict[Atom, Fraction]:
        return {a: p for a, p in self.entries.items() if self.k_of(a) == k}

    def level_mass(self, k: int) -> Fraction:
        return sum(self.level(k).values(), Fraction(0))

    def conditional_on(self, f: ModifiedProfile) -> dict[int, Fraction]:
        """Law of the position given the profile, normalized over x."""
        atoms = {x: p for (x, g), p in self.entries.items() if g == f}
        total = sum(atoms.values(), Fraction(0))
        if total == 0:
            return {}
        return {x: p / total for x, p in atoms.items()}

    def sorted_entries(self) -> list[tuple[Atom, Fraction]]:
        return sorted(self.entries.items(),
                      key=lambda ap: (self.k_of(ap[0]), ap[0][0],
                                      ap[0][1].lo, ap[0][1].values))

    def to_json_obj(self) -> dict:
        rows = []
        for (x, f), p in self.sorted_entries():
            rows.append({
                "f": f.serialize(),
                "x": x,
                "p_num": p.numerator,
                "p_den": p.denominator,
                "k": self.k_of((x, f)),
            })
        return {
            "kind": self.kind,
            "max_coins": self.max_coins,
            "truncation_num": self.truncation_mass.numerator,
            "truncation_den": self.truncation_mass.denominator,
            "entries": rows,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_obj(), fh, sort_keys=True, indent=1)
            fh.write("\n")


class _FixedCoin(CoinSource):
    """Feeds one prescribed coin; the walk must not ask for another."""

    def __init__(self, up: bool):
        self._up = up
        self._spent = False

    def up(self, coin_index: int, anchor_idx: int, anchor_h: int) -> bool:
        if self._spent:
            raise RuntimeError("walk consumed more than the prescribed coin")
        self._spent = True
        return self._up


def state_from_atom(x: int, f: ModifiedProfile) -> WalkState:
    """Rebuild the full walk state whose observation is (x, f).

    The surgery is invertible: left of x the profile values are the left
    edge counts, right of x the right edge counts, and the walker column
    itself holds the shared coin-time count f(x).
    """
    st = WalkState()
    st.x = x
    for y in range(f.lo, f.lo + len(f.values)):
        idx = y - 1 if y <= x else y
        st.profile.set_count(idx, f.value(y))
    st.profile.set_count(x, f.value(x))
    n, k = hit_time(f, x)
    st.n = n
    st.coins_used = k
    return st


def advance_atom(x: int, f: ModifiedProfile, up: bool) -> Atom:
    """Feed one coin to the observation (x, f) and run to the next coin time."""
    st = state_from_atom(x, f)
    coin = _FixedCoin(up)
    step(st, coin)
    while not st.is_coin_time:
        step(st, coin)
    return st.x, modify(st.profile, st.x)


def enumerate_law(max_coins: int) -> ExactLaw:
    """Walk-route exact law of (x, f) for every coin count k <= max_coins.

    Expands the coin tree level by level, merging equal observations, so
    the work is proportional to the number of distinct atoms rather than
    to 2**k paths.  Refuses budgets past MAX_ENUMERATION_COINS.
    """
    if max_coins > MAX_ENUMERATION_COINS:
        raise Refused(
            f"enumeration to {max_coins} coins exceeds the practical budget "
            f"of {MAX_ENUMERATION_COINS}")
    if max_coins < 0:
        raise ValueError("max_coins must be nonnegative")
    law = ExactLaw("conditional", max_coins)
    frontier: dict[Atom, Fraction] = {(0, ModifiedProfile.flat()): Fraction(1)}
    law.entries.update(frontier)
    for _ in range(max_coins):
        nxt: dict[Atom, Fraction] = {}
        for (x, f), p in frontier.items():
            for up in (True, False):
                atom = advance_atom(x, f, up)
                nxt[atom] = nxt.get(atom, Fraction(0)) + p / 2
        law.entries.update(nxt)
        frontier = nxt
    return law


def admissible_profiles(max_area: int) -> Iterator[ModifiedProfile]:
    """Profile-route generator of every admissible f with area <= max_area.

    Builds unit-slope paths from a left sentinel at -1 up over a
    nonnegative support containing the origin and back down to -1,
    pruning on the accumulated area.  One-sidedness of internal zeros is
    enforced at the end by the ModifiedProfile validator itself.
    """
    if max_area < 0:
        return
    # Each odd support site contributes at least 2 to the area, so the
    # support spans at most max_area + 1 sites.
    for lo in range(-1, -max_area - 3, -2):
        stack = [((-1,), 0)]
        while stack:
            values, area = stack.pop()
            y = lo + len(values)
            last = values[-1]
            if last == -1 and len(values) >= 3:
                if y - 1 > 0:
                    try:
                        yield ModifiedProfile(lo, values)
                    except Malformed:
                        pass
                continue
            for stp in (1, -1):
                v = last + stp
                if v < -1:
                    continue
                if v == -1 and y < 1:
                    # the right sentinel must sit right of the origin
                    continue
                extra = v - flat_value(y)
                if extra < 0 or area + extra > max_area:
                    continue
                stack.append((values + (v,), area + extra))


def admissible_pairs(k: int) -> dict[Atom, Fraction]:
    """Profile-route law at coin count k, built without walking.

    Enumerates admissible profiles of area at most 2k, keeps the (x, f)
    pairs whose hit count equals k, and weighs them by the closed-form
    position law.  Independent of enumerate_law; the two must agree.
    """
    out: dict[Atom, Fraction] = {}
    if k == 0:
        out[(0, ModifiedProfile.flat())] = Fraction(1)
        return out
    for f in admissible_profiles(2 * k):
        if f.is_flat:
            continue
        for x in interval(f):
            if f.area // 2 + f.value(x) != k:
                continue
            p = position_probability(f, x)
            if p > 0:
                out[(x, f)] = p
    return out


def profile_signature(f: ModifiedProfile) -> int:
    """64-bit signature of f matching the batch kernel's bucket key.

    Mix chain over the interior values f(m-..m+) shifted by one, then the
    left endpoint, viewed as a signed 64-bit integer.  Lets empirical
    fixed-coin buckets be joined against exact atoms by integer key.
    """
    acc = 0
    for y in range(f.m_minus, f.m_plus + 1):
        acc = mix64(acc ^ ((f.value(y) + 1) & MASK64))
    acc = mix64(acc ^ (f.m_minus & MASK64))
    return acc - (1 << 64) if acc >= (1 << 63) else acc


def geometric_pmf(big_a: float | Fraction, k: int) -> Fraction:
    """Exact pmf of the geometric horizon: support k >= 1, mean big_a / 2."""
    if k < 1:
        return Fraction(0)
    p = 2 / Fraction(big_a)
    if not 0 < p <= 1:
        raise ValueError(f"horizon parameter must be >= 2, got {big_a}")
    return p * (1 - p) ** (k - 1)


def geometric_joint(law: ExactLaw, big_a: float | Fraction) -> ExactLaw:
    """Mix a conditional law with the geometric horizon.

    Each atom (x, f) at coin count k gets weight P(x, f at k) * P(q = k);
    the probability mass of horizons beyond the enumeration budget is
    reported as the truncation mass.
    """
    if law.kind != "conditional":
        raise ValueError("geometric_joint expects a conditional law")
    joint = ExactLaw("joint", law.max_coins)
    for atom, p in law.entries.items():
        joint.entries[atom] = p * geometric_pmf(big_a, law.k_of(atom))
    total = sum(joint.entries.values(), Fraction(0))
    joint.truncation_mass = 1 - total
    return joint
