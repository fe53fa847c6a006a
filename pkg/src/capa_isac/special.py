"""Special functions used by the closed-form metrics.

Ei on the negative axis, the lower incomplete gamma function and digamma, all
real-argument. Log-gamma comes from ``math.lgamma``.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext

import numpy as np

EULER_GAMMA = 0.57721566490153286060651209008240243
_EULER_DEC = "0.57721566490153286060651209008240243104215933593992359880576723488486772677766467"

_EPS = 1e-17
_TINY = 1e-300
_MAX_ITER = 10_000


def _ei_series(x: float) -> float:
    # C + ln|x| + sum x^k / (k k!)
    term = 1.0
    total = 0.0
    for k in range(1, _MAX_ITER):
        term *= x / k
        contrib = term / k
        total += contrib
        if abs(contrib) < _EPS * max(abs(total), 1e-300):
            break
    return EULER_GAMMA + math.log(-x) + total


def _e1_cf_scaled(y: float) -> float:
    """e^y E1(y) for y > 0 by the modified Lentz continued fraction."""
    b = y + 1.0
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        a = -float(i * i)
        b += 2.0
        d = 1.0 / (a * d + b)
        c = b + a / c
        delta = c * d
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError("E1 continued fraction did not converge")


def _e1_cf(y: float) -> float:
    return _e1_cf_scaled(y) * math.exp(-y)


def expint_ei(x):
    """Exponential integral Ei(x) for x < 0.

    Power series for |x| <= 1, continued fraction (via Ei(x) = -E1(-x)) beyond.
    Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr < 0)):
        raise ValueError("expint_ei requires x < 0")
    out = np.empty_like(arr)
    for idx, v in np.ndenumerate(arr):
        out[idx] = ei_by_series(v) if v >= -1.0 else ei_by_cf(v)
    return out[()] if out.ndim == 0 else out


def expint_e1_scaled(y: float) -> float:
    """e^y E1(y) for y > 0, i.e. -e^y Ei(-y) without overflow for large y."""
    y = float(y)
    if not y > 0:
        raise ValueError("expint_e1_scaled requires y > 0")
    if y <= 1.0:
        return -math.exp(y) * _ei_series(-y)
    return _e1_cf_scaled(y)


def ei_by_series(x: float) -> float:
    return _ei_series(float(x))


def ei_by_cf(x: float) -> float:
    return -_e1_cf(-float(x))


def ei_series_extended(x: float, digits: int = 60) -> float:
    """Power series for Ei in extended decimal precision.

    The alternating series loses about |x|/ln(10) digits to cancellation, so a
    float evaluation is useless past x of roughly -20; this version is the
    reference used to cross-check the continued fraction on wide ranges.
    """
    with localcontext() as ctx:
        ctx.prec = digits + int(abs(x) / 2.3) + 10
        xd = Decimal(repr(float(x)))
        term = Decimal(1)
        total = Decimal(0)
        eps = Decimal(10) ** (-(digits + 5))
        k = 0
        while True:
            k += 1
            term *= xd / k
            contrib = term / k
            total += contrib
            if k > abs(x) and abs(contrib) < eps:
                break
        val = Decimal(_EULER_DEC) + (-xd).ln() + total
        return float(val)


def _lower_gamma_series(s: float, x: float) -> float:
    """gamma(s, x) / (x^s e^-x) via the standard series, returned in log form."""
    ap = s
    term = 1.0 / s
    total = term
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            return math.log(total) + s * math.log(x) - x
    raise ArithmeticError("incomplete gamma series did not converge")


def _upper_gamma_cf(s: float, x: float) -> float:
    """log Gamma(s, x) via Lentz continued fraction (valid for x >= s + 1)."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
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
            return math.log(h) + s * math.log(x) - x
    raise ArithmeticError("incomplete gamma continued fraction did not converge")


def lower_gamma_regularized(s: float, x: float) -> float:
    """P(s, x) = gamma(s, x) / Gamma(s)."""
    if s <= 0:
        raise ValueError("lower_gamma requires s > 0")
    if x < 0:
        raise ValueError("lower_gamma requires x >= 0")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return 1.0
    if x < s + 1.0:
        return math.exp(_lower_gamma_series(s, x) - math.lgamma(s))
    return -math.expm1(_upper_gamma_cf(s, x) - math.lgamma(s))


def lower_gamma(s: float, x: float) -> float:
    """Lower incomplete gamma gamma(s, x) = int_0^x t^(s-1) e^-t dt."""
    if s <= 0:
        raise ValueError("lower_gamma requires s > 0")
    if x < 0:
        raise ValueError("lower_gamma requires x >= 0")
    if x == 0:
        return 0.0
    if x < s + 1.0:
        return math.exp(_lower_gamma_series(s, x))
    upper = math.exp(_upper_gamma_cf(s, x) - math.lgamma(s))
    return math.exp(math.lgamma(s)) * (1.0 - upper)


def log_lower_gamma_regularized(s: float, x: float) -> float:
    """log P(s, x); stays finite where P itself underflows."""
    if x <= 0:
        return -math.inf
    if x < s + 1.0:
        return _lower_gamma_series(s, x) - math.lgamma(s)
    return math.log1p(-math.exp(_upper_gamma_cf(s, x) - math.lgamma(s)))


_BERNOULLI_TERMS = (
    1.0 / 12, -1.0 / 120, 1.0 / 252, -1.0 / 240, 1.0 / 132,
    -691.0 / 32760, 1.0 / 12,
)


def _digamma_scalar(x: float) -> float:
    if not x > 0:
        raise ValueError("digamma requires x > 0")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    p = inv2
    for b in _BERNOULLI_TERMS:
        series += b * p
        p *= inv2
    return acc + math.log(x) - 0.5 / x - series


def digamma(x):
    """psi(x) for x > 0: upward recurrence to x >= 10, then the asymptotic series."""
    arr = np.asarray(x, dtype=float)
    out = np.vectorize(_digamma_scalar, otypes=[float])(arr) if arr.ndim else np.array(
        _digamma_scalar(float(arr)))
    return out[()] if out.ndim == 0 else out


lgamma = math.lgamma
