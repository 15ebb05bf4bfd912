"""Goodness-of-fit statistics used by the experiment drivers.

Kolmogorov-Smirnov and chi-square are implemented from scratch on numpy
primitives so the simulation stack carries no statistics dependency; the
test suite cross-checks them against scipy.  P-values use the classical
asymptotic series, which is plenty for sample sizes in the thousands.
"""

from __future__ import annotations

import math

import numpy as np


def ks_uniform(u: np.ndarray) -> float:
    """One-sample KS distance of ``u`` from the uniform law on (0, 1)."""
    u = np.sort(np.asarray(u, dtype=np.float64))
    n = u.size
    if n == 0:
        raise ValueError("need at least one sample")
    hi = np.arange(1, n + 1) / n
    return float(max(np.max(hi - u), np.max(u - (hi - 1.0 / n))))


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample KS distance between empirical laws of ``a`` and ``b``."""
    a = np.sort(np.asarray(a, dtype=np.float64))
    b = np.sort(np.asarray(b, dtype=np.float64))
    if a.size == 0 or b.size == 0:
        raise ValueError("need at least one sample on each side")
    both = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, both, side="right") / a.size
    cdf_b = np.searchsorted(b, both, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def kolmogorov_sf(lam: float) -> float:
    """Survival function of the Kolmogorov distribution at ``lam``."""
    if lam <= 0:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = 2.0 * (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * lam * lam)
        total += term
        if abs(term) < 1e-16:
            break
    return min(1.0, max(0.0, total))


def ks_uniform_pvalue(d: float, n: int) -> float:
    """Asymptotic p-value of a one-sample KS distance (Stephens transform)."""
    rn = math.sqrt(n)
    return kolmogorov_sf(d * (rn + 0.12 + 0.11 / rn))


def ks_two_sample_pvalue(d: float, na: int, nb: int) -> float:
    """Asymptotic p-value of a two-sample KS distance."""
    ne = na * nb / (na + nb)
    rn = math.sqrt(ne)
    return kolmogorov_sf(d * (rn + 0.12 + 0.11 / rn))


def _gamma_series_p(a: float, x: float) -> float:
    # series expansion around 0, converges fast for x < a + 1
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(500):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * 1e-16:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf_q(a: float, x: float) -> float:
    # Lentz continued fraction for the upper tail, converges for x >= a + 1
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 500):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return math.exp(-x + a * math.log(x) - math.lgamma(a)) * h


def _gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) for a > 0, x >= 0."""
    if x < 0 or a <= 0:
        raise ValueError("need x >= 0 and a > 0")
    if x == 0:
        return 0.0
    if x < a + 1.0:
        return _gamma_series_p(a, x)
    return 1.0 - _gamma_cf_q(a, x)


def _gamma_q(a: float, x: float) -> float:
    """Regularized upper incomplete gamma Q(a, x), accurate in the far tail."""
    if x < 0 or a <= 0:
        raise ValueError("need x >= 0 and a > 0")
    if x == 0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series_p(a, x)
    return _gamma_cf_q(a, x)


def chi_square_sf(x: float, df: int) -> float:
    """Right-tail probability of the chi-square law with ``df`` degrees."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if x <= 0:
        return 1.0
    return max(0.0, min(1.0, _gamma_q(df / 2.0, x / 2.0)))


def chi_square_stat(observed: np.ndarray, expected: np.ndarray) -> float:
    """Pearson statistic sum((obs - exp)^2 / exp)."""
    observed = np.asarray(observed, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    if observed.shape != expected.shape:
        raise ValueError("shape mismatch")
    if np.any(expected <= 0):
        raise ValueError("expected counts must be positive")
    return float(np.sum((observed - expected) ** 2 / expected))
