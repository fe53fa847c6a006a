"""Deterministic spherical-wave sensing channel along the array axis."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .config import ApertureInterval, as_position


@dataclass(frozen=True)
class AxisChannelSample:
    z: float
    value: complex


def _distance(z, p):
    p = as_position(p)
    r2 = z * z - 2.0 * p[2] * z + float(p @ p)
    return np.sqrt(np.maximum(r2, 0.0))


def h_s_eval(z, p, wavenumber: float):
    """Line-of-sight response e^{-j k r} / (sqrt(4 pi) r) from axis point z to p.

    Vectorized over z.
    """
    z = np.asarray(z, dtype=float)
    r = _distance(z, p)
    if np.any(r == 0):
        raise ValueError("singular distance: evaluation point coincides with target")
    out = np.exp(-1j * wavenumber * r) / (math.sqrt(4.0 * math.pi) * r)
    return out[()] if out.ndim == 0 else out


def sample(z: float, p, wavenumber: float) -> AxisChannelSample:
    return AxisChannelSample(float(z), complex(h_s_eval(z, p, wavenumber)))


def _radial(p) -> float:
    p = as_position(p)
    rho = math.hypot(p[0], p[1])
    if rho == 0:
        raise ValueError("target on array axis")
    return rho


def zeta(lo: float, hi: float, p) -> float:
    rho = _radial(p)
    pz = float(as_position(p)[2])
    return math.atan((hi - pz) / rho) - math.atan((lo - pz) / rho)


def aperture_gain_closed(interval: ApertureInterval, p) -> float:
    """Integral of |h_s|^2 over the interval, in closed form (arctan difference)."""
    rho = _radial(p)
    return zeta(interval.lo, interval.hi, p) / (4.0 * math.pi * rho)


def gl_rule(lo: float, hi: float, order: int):
    """Gauss-Legendre nodes and weights mapped onto [lo, hi]."""
    eta, omega = roots_legendre(order)
    half = 0.5 * (hi - lo)
    return half * eta + 0.5 * (hi + lo), half * omega


def aperture_gain_quadrature(interval: ApertureInterval, p, order: int = 200) -> float:
    """Same gain by Gauss-Legendre integration of 1 / (4 pi r^2)."""
    _radial(p)
    z, w = gl_rule(interval.lo, interval.hi, order)
    r = _distance(z, p)
    return float(np.sum(w / (4.0 * math.pi * r * r)))
