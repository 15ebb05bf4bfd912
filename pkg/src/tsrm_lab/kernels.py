"""numba kernels for the walk, the maze explorer, and the Monte Carlo loops.

The kernels mirror the pure-Python reference implementations exactly: same
splitmix64 stream derivation (:mod:`tsrm_lab.rng`), same update rules, same
audits.  All integer state is int64 except the RNG words, which are uint64
end to end.  Mixing the two promotes to float64 under numpy rules, so every
RNG constant below is an explicit ``np.uint64``.

Edge indexing convention: edge ``e = idx + 1/2`` is addressed by the integer
``idx``; the two edges adjacent to a walker at ``x`` are ``idx = x - 1``
(left) and ``idx = x`` (right).
"""

from __future__ import annotations

import numpy as np
from numba import njit

U11 = np.uint64(11)
U27 = np.uint64(27)
U30 = np.uint64(30)
U31 = np.uint64(31)
U32 = np.uint64(32)
U63 = np.uint64(63)
MIX_A = np.uint64(0xBF58476D1CE4E5B9)
MIX_B = np.uint64(0x94D049BB133111EB)
GOLD = np.uint64(0x9E3779B97F4A7C15)
MASK32 = np.uint64(0xFFFFFFFF)

TAG_WALK = np.uint64(11)
TAG_WEB = np.uint64(13)
TAG_GEOM = np.uint64(21)

# Column layout of sample_batch rows.
COL_Q = 0        # geometric coin horizon
COL_N = 1        # lattice steps to reach coin time number q
COL_X = 2        # walker position at that coin time
COL_FX = 3       # modified profile value at the walker (equals the height)
COL_MLO = 4      # left end of the modified profile support
COL_MHI = 5      # right end of the modified profile support
COL_ZEROS = 6    # internal zero count
COL_AREA = 7     # area of the modified profile above the flat profile
COL_FMAX = 8     # max of the modified profile
COL_ILO = 9      # admissible interval, left end
COL_IHI = 10     # admissible interval, right end
COL_CAPPED = 11  # 1 if the step cap fired before the horizon was reached
COL_AUDIT = 12   # 1 if every invariant audit passed
NCOLS = 13


@njit(cache=True, inline="always")
def mix64(z):
    z = (z ^ (z >> U30)) * MIX_A
    z = (z ^ (z >> U27)) * MIX_B
    return z ^ (z >> U31)


@njit(cache=True, inline="always")
def stream_base(seed, tag, sub):
    return mix64(mix64(mix64(seed + GOLD * tag) + GOLD * sub))


@njit(cache=True, inline="always")
def unit_double(z):
    return (np.float64(z >> U11) + 0.5) * 1.1102230246251565e-16


@njit(cache=True, inline="always")
def a_init(idx):
    """Flattest admissible initial edge count: 0 and -1 alternating."""
    d = idx if idx >= 0 else -idx - 1
    return 0 if (d & 1) == 0 else -1


@njit(cache=True, inline="always")
def web_coin_up(web_base, idx0, h0):
    """Fair coin of the rectangle anchored at (idx0 + 1/2, h0), h0 >= 1."""
    key = (np.uint64(idx0) << U32) ^ (np.uint64(h0) & MASK32)
    return (mix64(web_base ^ key) >> U63) != 0


@njit(cache=True, inline="always")
def fill_up(web_base, idx0, h0):
    """Filling of the rectangle anchored at (idx0 + 1/2, h0).

    True means upward lines.  Rows h0 >= 1 are coin-filled; the boundary
    rows h0 in {-1, 0} are fixed by the initial zigzag over the column
    [idx0 + 1/2, idx0 + 3/2].  The column left of the origin (idx0 == -1)
    carries no boundary line and is never queried there.
    """
    if h0 >= 1:
        return web_coin_up(web_base, idx0, h0)
    return a_init(idx0 + 1) > a_init(idx0)


@njit(cache=True)
def _grow(ell, lo):
    """Double the profile window, refilling fresh slots with a_init."""
    n = ell.shape[0]
    new_lo = lo - n // 2
    out = np.empty(2 * n, np.int64)
    for i in range(2 * n):
        out[i] = a_init(new_lo + i)
    out[lo - new_lo:lo - new_lo + n] = ell
    return out, new_lo


@njit(cache=True)
def walk_trace(seed, sub, steps, addressed, flip):
    """Run the self-repelling walk and record its full trace.

    Returns (xs, hs, coin_flags, ell, lo): positions and heights at steps
    0..steps, a coin-time indicator, and the final edge-count window with
    its base index.  ``addressed`` selects anchor-addressed web coins (the
    coupling mode) instead of sequential walk coins.  ``flip`` inverts
    every coin, which mirrors the path through the origin in sequential
    mode.
    """
    half = 64
    lo = -half
    ell = np.empty(2 * half, np.int64)
    for i in range(2 * half):
        ell[i] = a_init(lo + i)
    xs = np.zeros(steps + 1, np.int64)
    hs = np.zeros(steps + 1, np.int64)
    cf = np.zeros(steps + 1, np.uint8)
    walk_base = stream_base(np.uint64(seed), TAG_WALK, np.uint64(sub))
    web_base = stream_base(np.uint64(seed), TAG_WEB, np.uint64(sub))
    x = 0
    el = ell[x - 1 - lo]
    er = ell[x - lo]
    ncoin = np.uint64(0)
    for n in range(steps):
        xs[n] = x
        hs[n] = (el + er) // 2
        if el == er:
            cf[n] = 1
            if addressed:
                up = web_coin_up(web_base, x - 1, el + 1)
            else:
                up = (mix64(walk_base + GOLD * ncoin) >> U63) != 0
            ncoin += np.uint64(1)
            go_right = up != flip
        elif el > er:
            go_right = True
        else:
            go_right = False
        if go_right:
            v = er + 1
            ell[x - lo] = v
            x += 1
            el = v
            er = ell[x - lo]
        else:
            v = el + 1
            ell[x - 1 - lo] = v
            x -= 1
            er = v
            el = ell[x - 1 - lo]
        if x - 2 - lo < 0 or x + 1 - lo >= ell.shape[0]:
            ell, lo = _grow(ell, lo)
    xs[steps] = x
    hs[steps] = (el + er) // 2
    if el == er:
        cf[steps] = 1
    return xs, hs, cf, ell, lo


@njit(cache=True)
def audit_trace(seed, sub, steps):
    """Replay a walk and count invariant violations at every step.

    Checks, per step: the coin-count identity 2k = n + h at coin times,
    the slope of the edge profile (unit slope away from the walker, even
    at the walker), and reconstruction of the walker position as the
    unique even-slope edge pair.  Returns the three violation counts,
    which a correct implementation keeps at zero.
    """
    half = 64
    lo = -half
    ell = np.empty(2 * half, np.int64)
    for i in range(2 * half):
        ell[i] = a_init(lo + i)
    walk_base = stream_base(np.uint64(seed), TAG_WALK, np.uint64(sub))
    x = 0
    vlo = 0
    vhi = 0
    ncoin = np.uint64(0)
    k = 0
    bad_identity = 0
    bad_slope = 0
    bad_recon = 0
    for n in range(steps + 1):
        el = ell[x - 1 - lo]
        er = ell[x - lo]
        # scan the visited range plus a margin on each side
        even_at = np.int64(2) ** 62
        even_count = 0
        for idx in range(vlo - 2, vhi + 2):
            d = ell[idx + 1 - lo] - ell[idx - lo]
            if d == 1 or d == -1:
                continue
            if d == 0 or d == 2 or d == -2:
                even_count += 1
                even_at = idx
            else:
                bad_slope += 1
        if even_count != 1:
            bad_slope += 1
        elif even_at + 1 != x:
            bad_recon += 1
        if n == steps:
            break
        if el == er:
            if 2 * k != n + el:
                bad_identity += 1
            up = (mix64(walk_base + GOLD * ncoin) >> U63) != 0
            ncoin += np.uint64(1)
            k += 1
            go_right = up
        elif el > er:
            go_right = True
        else:
            go_right = False
        if go_right:
            ell[x - lo] = er + 1
            x += 1
        else:
            ell[x - 1 - lo] = el + 1
            x -= 1
        if x < vlo:
            vlo = x
        elif x > vhi:
            vhi = x
        if x - 3 - lo < 0 or x + 2 - lo >= ell.shape[0]:
            ell, lo = _grow(ell, lo)
    return bad_identity, bad_slope, bad_recon


@njit(cache=True)
def explore_trace(seed, sub, steps):
    """Walk the rectangle web as a maze and record the visited F-points.

    The explorer state is (x, h, s) with s the half-difference of the two
    adjacent edge counts.  At s == 0 the next rectangle above is revealed
    and its filling decides the turn; at s == -1 or s == +1 the move is
    forced and only the rectangle in the forced direction is revealed.
    Returns (xs, hs, coin_flags, consistent); consistent goes False only
    if the walker reaches an F-point of the wrong parity, which would mean
    the construction itself is broken.
    """
    xs = np.zeros(steps + 1, np.int64)
    hs = np.zeros(steps + 1, np.int64)
    cf = np.zeros(steps + 1, np.uint8)
    web_base = stream_base(np.uint64(seed), TAG_WEB, np.uint64(sub))
    x = 0
    h = 0
    s = 0
    consistent = True
    for n in range(steps):
        xs[n] = x
        hs[n] = h
        if s == 0:
            cf[n] = 1
            if (x + h) % 2 != 0:
                consistent = False
                break
            if fill_up(web_base, x - 1, h + 1):
                rh = h + 1 if fill_up(web_base, x, h) else h - 1
                x, h, s = x + 1, (h + 1 + rh) // 2, (rh - h - 1) // 2
            else:
                lh = h + 1 if not fill_up(web_base, x - 2, h) else h - 1
                x, h, s = x - 1, (h + 1 + lh) // 2, (h + 1 - lh) // 2
        elif s == -1:
            rh = h if fill_up(web_base, x, h - 1) else h - 2
            x, h, s = x + 1, (h + rh) // 2, (rh - h) // 2
        else:
            lh = h if not fill_up(web_base, x - 2, h - 1) else h - 2
            x, h, s = x - 1, (h + lh) // 2, (h - lh) // 2
    xs[steps] = x
    hs[steps] = h
    if s == 0:
        cf[steps] = 1
    return xs, hs, cf, consistent


@njit(cache=True)
def sample_batch(seed, big_a, n0, n1, cap_steps, flip):
    """Draw samples n0..n1-1 of the walk observed at a geometric horizon.

    Per sample: draw the coin horizon q (geometric with mean big_a / 2,
    support q >= 1), run the walk to coin time number q, and extract the
    modified profile statistics in one pass.  Returns an int64 array with
    one row per sample, columns per the COL_* layout.  Samples whose walk
    would exceed cap_steps lattice steps are marked capped and carry no
    profile fields.  ``flip`` inverts the walk coins (mirror replica); the
    geometric draw is shared so mirrored samples pair up one to one.
    """
    out = np.zeros((n1 - n0, NCOLS), np.int64)
    lg = np.log1p(-2.0 / big_a)
    for i in range(n1 - n0):
        sid = np.uint64(n0 + i)
        gbase = stream_base(np.uint64(seed), TAG_GEOM, sid)
        wbase = stream_base(np.uint64(seed), TAG_WALK, sid)
        u = unit_double(mix64(gbase))
        q = 1 + np.int64(np.floor(np.log(u) / lg)) if big_a > 2.0 else np.int64(1)
        out[i, COL_Q] = q
        # a walk stopped at coin q needs at least 2q - sqrt(2q) steps
        least = 2 * q - np.int64(np.sqrt(2.0 * q)) - 2
        if least > cap_steps:
            out[i, COL_CAPPED] = 1
            continue
        half = 64
        lo = -half
        ell = np.empty(2 * half, np.int64)
        for j in range(2 * half):
            ell[j] = a_init(lo + j)
        x = 0
        el = ell[x - 1 - lo]
        er = ell[x - lo]
        hits = np.int64(0)
        n = np.int64(0)
        ncoin = np.uint64(0)
        capped = False
        while True:
            if el == er:
                hits += 1
                if hits == q + 1:
                    break
                up = (mix64(wbase + GOLD * ncoin) >> U63) != 0
                ncoin += np.uint64(1)
                go_right = up != flip
            elif el > er:
                go_right = True
            else:
                go_right = False
            if go_right:
                v = er + 1
                ell[x - lo] = v
                x += 1
                el = v
                er = ell[x - lo]
            else:
                v = el + 1
                ell[x - 1 - lo] = v
                x -= 1
                er = v
                el = ell[x - 1 - lo]
            n += 1
            if n > cap_steps:
                capped = True
                break
            if x - 2 - lo < 0 or x + 1 - lo >= ell.shape[0]:
                ell, lo = _grow(ell, lo)
        if capped:
            out[i, COL_CAPPED] = 1
            continue
        # modified profile f(y) = ell[y - 1] for y <= x, ell[y] for y > x
        fx = el
        y = x
        while True:
            v = ell[y - 1 - lo] if y <= x else ell[y - lo]
            if v == -1 and y <= 0:
                break
            y -= 1
        mlo = y + 1
        y = x
        while True:
            v = ell[y - 1 - lo] if y <= x else ell[y - lo]
            if v == -1 and y >= 0:
                break
            y += 1
        mhi = y - 1
        zeros = np.int64(0)
        zlo = np.int64(0)
        zhi = np.int64(0)
        area = np.int64(0)
        fmax = np.int64(0)
        audit = np.int64(1)
        for y in range(mlo, mhi + 1):
            v = ell[y - 1 - lo] if y <= x else ell[y - lo]
            if v > fmax:
                fmax = v
            area += v - (-1 if (y & 1) else 0)
            if v == 0 and mlo < y < mhi:
                zeros += 1
                if zeros == 1:
                    zlo = y
                zhi = y
            if v < 0:
                audit = 0
        if zeros == 0:
            ilo, ihi = mlo, mhi
        elif zlo > 0:
            ilo, ihi = zhi + 1, mhi
        elif zhi < 0:
            ilo, ihi = mlo, zlo - 1
        else:
            # internal zeros on both sides of the origin cannot happen
            audit = 0
            ilo, ihi = mlo, mhi
        if area % 2 != 0 or q != area // 2 + fx or n != area + fx:
            audit = 0
        if not ilo <= x <= ihi:
            audit = 0
        if fx * fx > area:
            audit = 0
        out[i, COL_N] = n
        out[i, COL_X] = x
        out[i, COL_FX] = fx
        out[i, COL_MLO] = mlo
        out[i, COL_MHI] = mhi
        out[i, COL_ZEROS] = zeros
        out[i, COL_AREA] = area
        out[i, COL_FMAX] = fmax
        out[i, COL_ILO] = ilo
        out[i, COL_IHI] = ihi
        out[i, COL_AUDIT] = audit
    return out


@njit(cache=True)
def fixed_k_batch(seed, k, n0, n1):
    """Observe samples n0..n1-1 of the walk at the fixed coin time N(k).

    Returns rows (x, mlo, mhi, fsig) where fsig is a 64-bit signature of
    the modified profile: the mix64 chain over the values f(mlo..mhi)
    followed by mlo itself.  The same chain is reproduced in Python by the
    exact enumeration, so buckets can be matched against oracle atoms
    without shipping whole profiles out of the kernel.
    """
    out = np.zeros((n1 - n0, 4), np.int64)
    for i in range(n1 - n0):
        sid = np.uint64(n0 + i)
        wbase = stream_base(np.uint64(seed), TAG_WALK, sid)
        half = 8 + 4 * k
        lo = -half
        ell = np.empty(2 * half, np.int64)
        for j in range(2 * half):
            ell[j] = a_init(lo + j)
        x = 0
        el = ell[x - 1 - lo]
        er = ell[x - lo]
        hits = np.int64(0)
        ncoin = np.uint64(0)
        while True:
            if el == er:
                hits += 1
                if hits == k + 1:
                    break
                up = (mix64(wbase + GOLD * ncoin) >> U63) != 0
                ncoin += np.uint64(1)
                go_right = up
            elif el > er:
                go_right = True
            else:
                go_right = False
            if go_right:
                v = er + 1
                ell[x - lo] = v
                x += 1
                el = v
                er = ell[x - lo]
            else:
                v = el + 1
                ell[x - 1 - lo] = v
                x -= 1
                er = v
                el = ell[x - 1 - lo]
        y = x
        while True:
            v = ell[y - 1 - lo] if y <= x else ell[y - lo]
            if v == -1 and y <= 0:
                break
            y -= 1
        mlo = y + 1
        y = x
        while True:
            v = ell[y - 1 - lo] if y <= x else ell[y - lo]
            if v == -1 and y >= 0:
                break
            y += 1
        mhi = y - 1
        acc = np.uint64(0)
        for y in range(mlo, mhi + 1):
            v = ell[y - 1 - lo] if y <= x else ell[y - lo]
            acc = mix64(acc ^ np.uint64(v + 1))
        acc = mix64(acc ^ np.uint64(mlo))
        out[i, 0] = x
        out[i, 1] = mlo
        out[i, 2] = mhi
        out[i, 3] = np.int64(acc)
    return out
