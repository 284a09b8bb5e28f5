"""Self-contained special functions and statistics utilities.

Regularized incomplete gamma and beta functions via power series and Lentz
continued fractions (the classic Numerical-Recipes decomposition), chi and F
distribution functions built on them, the scaled Kolmogorov-Smirnov
uniformity statistic, and seeded Gaussian sampling on the counter RNG.
No external dependency beyond numpy; oracle tests anchor correctness.
"""

from __future__ import annotations

import math

import numpy as np

from ._rng import SeededRng

_MAX_ITER = 500
_EPS = 1e-16
_TINY = 1e-300


def _log_gamma(a: float) -> float:
    return math.lgamma(a)


def _lower_gamma_series(a: float, x: float) -> float:
    # gamma(a, x) / Gamma(a) by the ascending series, good for x < a + 1
    if x == 0.0:
        return 0.0
    ap = a
    term = 1.0 / a
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total * math.exp(-x + a * math.log(x) - _log_gamma(a))


def _upper_gamma_cf(a: float, x: float) -> float:
    # Gamma(a, x) / Gamma(a) by modified Lentz continued fraction, x >= a + 1
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - _log_gamma(a)) * h


def reg_lower_gamma(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x) = gamma(a, x)/Gamma(a)."""
    if a <= 0.0:
        raise ValueError(f"a must be positive, got {a}")
    if x < 0.0:
        raise ValueError(f"x must be non-negative, got {x}")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < a + 1.0:
        return min(1.0, _lower_gamma_series(a, x))
    return max(0.0, 1.0 - _upper_gamma_cf(a, x))


def _beta_cf(a: float, b: float, x: float) -> float:
    # continued fraction for the incomplete beta, modified Lentz
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), symmetry switch for convergence."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError(f"a and b must be positive, got a={a}, b={b}")
    if x < 0.0 or x > 1.0:
        raise ValueError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(
        _log_gamma(a + b) - _log_gamma(a) - _log_gamma(b)
        + a * math.log(x) + b * math.log(1.0 - x)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return min(1.0, front * _beta_cf(a, b, x) / a)
    return max(0.0, 1.0 - front * _beta_cf(b, a, 1.0 - x) / b)


def chi_cdf(dof: int, x: float) -> float:
    """CDF of the chi distribution (the norm of a dof-variate standard normal)."""
    if dof < 1:
        raise ValueError(f"dof must be >= 1, got {dof}")
    if x < 0.0:
        return 0.0
    return reg_lower_gamma(dof / 2.0, x * x / 2.0)


def f_cdf(d1: int, d2: int, x: float) -> float:
    """CDF of the F distribution with (d1, d2) degrees of freedom."""
    if d1 < 1 or d2 < 1:
        raise ValueError(f"degrees of freedom must be >= 1, got ({d1}, {d2})")
    if x <= 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    return reg_inc_beta(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2))


def f_quantile(d1: int, d2: int, q: float) -> float:
    """Inverse F CDF by bracketed bisection; q in (0, 1)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"q must lie strictly inside (0, 1), got {q}")
    hi = 1.0
    while f_cdf(d1, d2, hi) < q:
        hi *= 2.0
        if hi > 1e300:
            return hi
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f_cdf(d1, d2, mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ks_uniform_statistic(p_values) -> float:
    """sqrt(r) * D: scaled sup distance of the empirical CDF from Uniform[0,1]."""
    p = np.sort(np.asarray(p_values, dtype=np.float64))
    r = p.size
    if r == 0:
        raise ValueError("p_values must be non-empty")
    i = np.arange(1, r + 1, dtype=np.float64)
    d_plus = np.max(i / r - p)
    d_minus = np.max(p - (i - 1.0) / r)
    return float(max(d_plus, d_minus) * math.sqrt(r))


def gaussian_sample(rng: SeededRng, mean: float, sd: float) -> float:
    """One Gaussian draw from the seeded counter stream (Box-Muller)."""
    return rng.gauss(mean, sd)
