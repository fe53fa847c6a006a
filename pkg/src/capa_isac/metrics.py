"""Closed-form rates and outage probabilities for the two single-objective designs.

S-C: beamformer matched to the sensing channel. C-C: matched to the
communication channel. Every metric returns a MetricReport carrying both the
exact value and its high-SNR asymptote.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .config import SystemConfig
from .fading import (GainDistribution, QSpectrum, SeriesConvergenceError, expected_log,
                     expected_log1p)
from .special import (EULER_GAMMA, digamma, expint_e1_scaled, expint_ei,
                      log_lower_gamma_regularized, lower_gamma)

LOG2E = 1.0 / math.log(2.0)
METHODS = ("series", "integral", "auto")


@dataclass(frozen=True)
class MetricReport:
    value: float
    asymptote: float
    regime: str = "exact"

    def __float__(self):
        return float(self.value)


def _check_method(method: str):
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")


# ------------------------------------------------------------------ S-C design

def sr_sc(cfg: SystemConfig, G_t: float, G_r: float, snr_sense: float | None = None) -> MetricReport:
    """Sensing rate of the sensing-matched beamformer (deterministic)."""
    if G_t < 0 or G_r < 0:
        raise ValueError("aperture gains must be nonnegative")
    snr = cfg.snr_sense if snr_sense is None else snr_sense
    L = cfg.frame_len
    arg = snr * L * cfg.rcs_power * G_r * G_t
    value = math.log2(1.0 + arg) / L
    asym = math.log2(arg) / L if arg > 0 else -math.inf
    return MetricReport(value, asym)


def ecr_sc(cfg: SystemConfig, G_t: float, Xi: float, snr_comm: float | None = None) -> MetricReport:
    """Ergodic rate when |rho|^2 / G_t is exponential with mean Xi / G_t."""
    if not Xi > 0:
        raise ValueError("Xi must be positive")
    snr = cfg.snr_comm if snr_comm is None else snr_comm
    x = G_t / (snr * Xi)
    value = LOG2E * expint_e1_scaled(x)
    asym = math.log2(snr) - math.log2(G_t / Xi) - EULER_GAMMA * LOG2E
    return MetricReport(value, asym)


def ecr_sc_literal(cfg: SystemConfig, G_t: float, Xi: float, snr_comm: float | None = None) -> float:
    """-(1/ln 2) e^x Ei(-x) written out directly; overflows for large x."""
    snr = cfg.snr_comm if snr_comm is None else snr_comm
    x = G_t / (snr * Xi)
    return -LOG2E * math.exp(x) * float(expint_ei(-x))


def op_sc(cfg: SystemConfig, G_t: float, Xi: float, snr_comm: float | None = None,
          target_rate: float | None = None) -> MetricReport:
    if not Xi > 0:
        raise ValueError("Xi must be positive")
    snr = cfg.snr_comm if snr_comm is None else snr_comm
    R0 = cfg.target_rate if target_rate is None else target_rate
    if R0 < 0:
        raise ValueError("target rate must be nonnegative")
    x = G_t / (snr * Xi) * math.expm1(R0 * math.log(2.0))
    return MetricReport(-math.expm1(-x), x)


# ------------------------------------------------------------------ C-C design

def _j_continued_fraction(a: float, p: int) -> float:
    """J_p = int_0^inf x^(p-1) e^-x / ((p-1)! (x + a)) dx by Lentz's method."""
    tiny = 1e-300
    b = a + p
    f = b
    c = b
    d = 0.0
    for k in range(1, 100_000):
        ak = -k * (k - 1.0 + p)
        bk = a + p + 2.0 * k
        d = bk + ak * d
        d = tiny if d == 0 else d
        c = bk + ak / c
        c = tiny if c == 0 else c
        d = 1.0 / d
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return 1.0 / f
    raise ArithmeticError("continued fraction for J_p did not converge")


def log1p_gamma_moments(a: float, n_max: int) -> np.ndarray:
    """I_n = E ln(1 + G / a) for G ~ Gamma(n, 1), n = 1..n_max.

    I_n = sum_{k<=n} J_k with J_{k+1} = (1 - a J_k) / k. The recurrence is run
    upward only where k >= a and downward below, so errors never amplify.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    J = np.empty(n_max + 1)
    J[0] = 0.0
    if a <= 1.0:
        J[1] = expint_e1_scaled(a)
        start = 1
    else:
        start = min(int(math.ceil(a)), n_max)
        J[start] = _j_continued_fraction(a, start)
        for k in range(start - 1, 0, -1):
            J[k] = (1.0 - k * J[k + 1]) / a
    for k in range(start, n_max):
        J[k + 1] = (1.0 - a * J[k]) / k
    return np.cumsum(J)[1:]


def _expected_log_series(dist: GainDistribution) -> float:
    return float(np.sum(dist.weights * (digamma(dist.shapes.astype(float)) + math.log(dist.scale))))


def ecr_cc(dist: GainDistribution, snr_comm: float, method: str = "series") -> MetricReport:
    """E log2(1 + snr g_c) for hypoexponential g_c.

    ``series`` sums the mixture against Gamma log-moments; ``integral`` uses a
    Laplace-transform quadrature on the raw eigenvalues (no mixture needed).
    """
    _check_method(method)
    asym = math.log2(snr_comm) + LOG2E * _expected_log_series(dist)
    if method == "integral":
        return MetricReport(LOG2E * expected_log1p(dist.eigenvalues, snr_comm), asym)
    a = 1.0 / (snr_comm * dist.scale)
    moments = log1p_gamma_moments(a, int(dist.shapes[-1]))
    value = LOG2E * float(np.sum(dist.weights * moments[dist.shapes - 1]))
    return MetricReport(value, asym)


def ecr_cc_literal(dist: GainDistribution, snr_comm: float) -> float:
    """Double-series form with Ei and factorial terms, summed as written.

    Suffers catastrophic cancellation once N + M grows; kept as a check for
    small cases.
    """
    b = 1.0 / (snr_comm * dist.scale)
    eb_ei = math.exp(b) * float(expint_ei(-b))
    total = 0.0
    for m, w in enumerate(dist.weights):
        n = dist.n_terms + m
        inner = 0.0
        for u in range(n):
            r = n - u - 1
            bracket = (-1) ** (n - u) * b ** r * eb_ei
            bracket += sum(math.factorial(l - 1) * (-b) ** (r - l) for l in range(1, r + 1))
            inner += bracket / math.factorial(r)
        total += w * inner
    return LOG2E * total


def log_op_cc(dist: GainDistribution, snr_comm: float, target_rate: float) -> float:
    thr = math.expm1(target_rate * math.log(2.0)) / snr_comm
    if thr <= 0:
        return -math.inf
    x = thr / dist.scale
    terms = [math.log(w) + log_lower_gamma_regularized(float(s), x)
             for w, s in zip(dist.weights, dist.shapes) if w > 0]
    return float(logsumexp(terms))


def log_op_cc_asymptote(dist: GainDistribution, snr_comm: float, target_rate: float) -> float:
    N = dist.n_terms
    return (N * math.log(math.expm1(target_rate * math.log(2.0))) - N * math.log(snr_comm)
            - math.lgamma(N + 1) - float(np.sum(np.log(dist.eigenvalues))))


def op_cc(dist: GainDistribution, snr_comm: float, target_rate: float) -> MetricReport:
    """Outage probability of the communication-matched beamformer (gain CDF at threshold)."""
    if target_rate < 0:
        raise ValueError("target rate must be nonnegative")
    if target_rate == 0:
        return MetricReport(0.0, 0.0)
    value = min(1.0, math.exp(log_op_cc(dist, snr_comm, target_rate)))
    return MetricReport(value, math.exp(log_op_cc_asymptote(dist, snr_comm, target_rate)))


def op_cc_literal(dist: GainDistribution, snr_comm: float, target_rate: float) -> float:
    """prefactor * sum xi_m gamma(N + m, x) / (N + m - 1)! term by term."""
    x = (2.0 ** target_rate - 1.0) / (snr_comm * dist.scale)
    return sum(w * lower_gamma(float(s), x) / math.factorial(int(s) - 1)
               for w, s in zip(dist.weights, dist.shapes))


# ------------------------------------------------------- C-C sensing rate

def _expected_log(eigs, method: str) -> float:
    from .fading import gain_distribution

    if method == "integral":
        return expected_log(eigs)
    try:
        return _expected_log_series(gain_distribution(eigs))
    except SeriesConvergenceError:
        if method == "series":
            raise
        return expected_log(eigs)


def avg_sr_cc(qspec: QSpectrum, dist: GainDistribution, frame_len: int, Xi: float | None = None,
              method: str = "auto") -> MetricReport:
    """Average sensing rate of the communication-matched beamformer.

    (1/L) [E log2 sum nu |Phi|^2 - E log2 sum lambda |Psi|^2]. The nu-set
    spreads with the sensing SNR; ``auto`` falls back to the integral route
    when its mixture series cannot converge. The asymptote needs ``Xi``, the
    variance of rho under the same channel model.
    """
    _check_method(method)
    nu = qspec.eigenvalues[: qspec.dof_q]
    if qspec.dof_q == 0:
        raise ValueError("Q spectrum is empty")
    e_lam = _expected_log(dist.eigenvalues, method)
    e_nu = _expected_log(nu, method)
    value = max(0.0, LOG2E * (e_nu - e_lam) / frame_len)
    if Xi is None or qspec.c <= 0:
        asym = math.nan if qspec.c > 0 else -math.inf
    else:
        asym = (math.log2(qspec.c * Xi) - EULER_GAMMA * LOG2E - LOG2E * e_lam) / frame_len
    return MetricReport(value, asym)


# ------------------------------------------------------- slopes and diversity

def slope_estimator(rate_fn, snr1: float, snr2: float) -> float:
    """Finite-difference d rate / d log2(snr) between two linear SNRs."""
    if not snr2 > snr1 > 0:
        raise ValueError("need snr2 > snr1 > 0")
    return (float(rate_fn(snr2)) - float(rate_fn(snr1))) / (math.log2(snr2) - math.log2(snr1))


def diversity_estimator(op_fn, snr1: float, snr2: float, log_domain: bool = False) -> float:
    """-d log2(P_out) / d log2(snr); pass ``log_domain=True`` if op_fn returns ln P."""
    if not snr2 > snr1 > 0:
        raise ValueError("need snr2 > snr1 > 0")
    if log_domain:
        l1, l2 = float(op_fn(snr1)) * LOG2E, float(op_fn(snr2)) * LOG2E
    else:
        p1, p2 = float(op_fn(snr1)), float(op_fn(snr2))
        if p1 <= 0 or p2 <= 0:
            raise ValueError("outage probability underflowed; use log_domain")
        l1, l2 = math.log2(p1), math.log2(p2)
    return -(l2 - l1) / (math.log2(snr2) - math.log2(snr1))


# ------------------------------------------------------------- convenience

def db_to_linear(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)
