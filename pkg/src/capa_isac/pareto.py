"""Pareto-optimal beamforming in the two-dimensional signal subspace.

The beamformer only ever interacts with the channels through their Gram data
(G_t, g_c, rho). Working in coordinates where the sensing channel is
a = [sqrt(G_t), 0] and the communication channel is b with b^H a = rho keeps
every computation two-dimensional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig

BRANCHES = ("comm", "interior", "sense")


@dataclass(frozen=True)
class SubspaceRep:
    G_t: float
    g_c: float
    rho: complex

    @property
    def tau_lo(self) -> float:
        r2 = abs(self.rho) ** 2
        return r2 / (r2 + self.g_c ** 2)

    @property
    def tau_hi(self) -> float:
        r2 = abs(self.rho) ** 2
        return self.G_t ** 2 / (self.G_t ** 2 + r2)

    def vectors(self):
        """Coordinates (a, b) of the sensing and communication channels."""
        a = np.array([math.sqrt(self.G_t), 0.0], dtype=complex)
        perp = max(self.g_c - abs(self.rho) ** 2 / self.G_t, 0.0)
        b = np.array([np.conj(self.rho) / math.sqrt(self.G_t), math.sqrt(perp)], dtype=complex)
        return a, b

    def gains(self, w):
        """(Upsilon_s, Upsilon_c) = (|a^T w|^2, |b^T w|^2) for coordinates w (last axis)."""
        a, b = self.vectors()
        w = np.asarray(w)
        return np.abs(w @ a) ** 2, np.abs(w @ b) ** 2


def subspace_rep(G_t: float, g_c: float, rho: complex, rtol: float = 1e-9) -> SubspaceRep:
    if not G_t > 0:
        raise ValueError("G_t must be positive")
    if not g_c > 0:
        raise ValueError("g_c must be positive")
    if abs(rho) ** 2 > G_t * g_c * (1.0 + rtol):
        raise ValueError("Gram data violates Cauchy-Schwarz: |rho|^2 > G_t g_c")
    return SubspaceRep(float(G_t), float(g_c), complex(rho))


@dataclass(frozen=True)
class ParetoPoint:
    tau: float
    branch: str
    weights: np.ndarray          # beamformer coordinates, unit norm
    eps1: float = math.nan
    eps2: float = math.nan
    varsigma: float = math.nan
    mu1: float = math.nan
    mu2: float = math.nan
    ups_s: float = math.nan
    ups_c: float = math.nan

    def objective(self) -> float:
        return pareto_objective(self.tau, self.ups_s, self.ups_c)


def pareto_objective(tau: float, ups_s, ups_c):
    """min(Upsilon_s / tau, Upsilon_c / (1 - tau)) with the degenerate ends handled."""
    if tau <= 0:
        return ups_c
    if tau >= 1:
        return ups_s
    return np.minimum(ups_s / tau, ups_c / (1.0 - tau))


def _phase(rho: complex) -> complex:
    return 1.0 + 0j if rho == 0 else np.exp(-1j * np.angle(rho))


def pareto_weights(rep: SubspaceRep, tau: float) -> ParetoPoint:
    """Closed-form maximizer of min(Upsilon_s / tau, Upsilon_c / (1 - tau))."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError("tau must lie in [0, 1]")
    a, b = rep.vectors()
    G, g, r = rep.G_t, rep.g_c, abs(rep.rho)
    if tau <= rep.tau_lo:
        w = np.conj(b) / math.sqrt(g)
        us, uc = rep.gains(w)
        return ParetoPoint(tau, "comm", w, ups_s=float(us), ups_c=float(uc))
    if tau >= rep.tau_hi:
        w = np.conj(a) / math.sqrt(G)
        us, uc = rep.gains(w)
        return ParetoPoint(tau, "sense", w, ups_s=float(us), ups_c=float(uc))
    st, sc = math.sqrt(tau), math.sqrt(1.0 - tau)
    delta = (1.0 - tau) * G + tau * g - 2.0 * st * sc * r
    if not delta > 0:
        raise ArithmeticError("degenerate Gram data: nonpositive Delta")
    eps1 = (st * g - sc * r) / delta
    eps2 = (sc * G - st * r) / delta
    norm2 = eps1 ** 2 * G + eps2 ** 2 * g + 2.0 * eps1 * eps2 * r
    varsigma = math.sqrt(norm2)
    w = (eps1 * np.conj(a) + eps2 * _phase(rep.rho) * np.conj(b)) / varsigma
    us, uc = rep.gains(w)
    # same as (g - sqrt((1-tau)/tau) r) / Delta, without overflow at tiny tau
    mu1 = eps1 / st
    mu2 = eps2 / sc
    return ParetoPoint(tau, "interior", w, eps1, eps2, varsigma, mu1, mu2, float(us), float(uc))


def kkt_residual(rep: SubspaceRep, point: ParetoPoint) -> float:
    """Norm of (mu1 a* a^T + mu2 b* b^T) w - nu w for an interior point.

    nu = (G_t g_c - |rho|^2) / Delta is the eigenvalue implied by the multipliers.
    """
    if point.branch != "interior":
        raise ValueError("KKT residual is defined for interior points only")
    a, b = rep.vectors()
    tau = point.tau
    G, g, r = rep.G_t, rep.g_c, abs(rep.rho)
    delta = (1.0 - tau) * G + tau * g - 2.0 * math.sqrt(tau * (1.0 - tau)) * r
    nu = (G * g - r * r) / delta
    A = point.mu1 * np.outer(np.conj(a), a) + point.mu2 * np.outer(np.conj(b), b)
    return float(np.linalg.norm(A @ point.weights - nu * point.weights))


def pareto_oracle(rep: SubspaceRep, tau, grid_n: int = 1000):
    """Brute-force best objective over w = cos(t) e1 + e^{jp} sin(t) e2.

    grid_n points per angle, so grid_n^2 candidates in total. ``tau`` may be
    an array; the gain grids are then built once and shared.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    a, b = rep.vectors()
    theta = np.linspace(0.0, 0.5 * math.pi, grid_n)
    phi = np.linspace(0.0, 2.0 * math.pi, grid_n, endpoint=False)
    c, s = np.cos(theta)[:, None], np.sin(theta)[:, None]
    e = np.exp(1j * phi)[None, :]
    ups_s = (np.abs(c * a[0] + e * s * a[1]) ** 2).ravel()
    ups_c = (np.abs(c * b[0] + e * s * b[1]) ** 2).ravel()
    taus = np.atleast_1d(np.asarray(tau, dtype=float))
    out = np.empty(taus.size)
    buf = np.empty_like(ups_s)
    for i, t in enumerate(taus):
        if t <= 0:
            out[i] = ups_c.max()
        elif t >= 1:
            out[i] = ups_s.max()
        else:
            np.minimum(np.multiply(ups_s, 1.0 / t, out=buf), ups_c * (1.0 / (1.0 - t)), out=buf)
            out[i] = buf.max()
    return float(out[0]) if np.ndim(tau) == 0 else out


# ------------------------------------------------------------- rates

def sensing_rate(cfg: SystemConfig, G_r: float, ups_s, snr_sense: float | None = None):
    snr = cfg.snr_sense if snr_sense is None else snr_sense
    L = cfg.frame_len
    return np.log2(1.0 + L * cfg.rcs_power * snr * G_r * np.asarray(ups_s)) / L


def comm_rate(cfg: SystemConfig, ups_c, snr_comm: float | None = None):
    snr = cfg.snr_comm if snr_comm is None else snr_comm
    return np.log2(1.0 + snr * np.asarray(ups_c))


def pareto_gains_batch(G_t: float, g_c, rho, tau: float):
    """Vectorized (Upsilon_s, Upsilon_c) of the Pareto beamformer over many realizations."""
    g_c = np.asarray(g_c, dtype=float)
    r = np.abs(np.asarray(rho))
    r2 = r * r
    G = G_t
    tau_lo = r2 / (r2 + g_c ** 2)
    tau_hi = G * G / (G * G + r2)
    # corner solutions
    us_comm, uc_comm = r2 / g_c, g_c
    us_sense, uc_sense = np.full_like(g_c, G), r2 / G
    out_s = np.where(tau <= tau_lo, us_comm, us_sense)
    out_c = np.where(tau <= tau_lo, uc_comm, uc_sense)
    inner = (tau > tau_lo) & (tau < tau_hi)
    if np.any(inner) and 0.0 < tau < 1.0:
        st, sc = math.sqrt(tau), math.sqrt(1.0 - tau)
        delta = (1.0 - tau) * G + tau * g_c - 2.0 * st * sc * r
        e1 = (st * g_c - sc * r) / delta
        e2 = (sc * G - st * r) / delta
        n2 = e1 ** 2 * G + e2 ** 2 * g_c + 2.0 * e1 * e2 * r
        # |a^T w| = (e1 G + e2 |rho|) / sqrt(n2), |b^T w| = (e1 |rho| + e2 g_c) / sqrt(n2)
        us = (e1 * G + e2 * r) ** 2 / n2
        uc = (e1 * r + e2 * g_c) ** 2 / n2
        out_s = np.where(inner, us, out_s)
        out_c = np.where(inner, uc, out_c)
    return out_s, out_c


@dataclass(frozen=True)
class RegionPoint:
    tau: float
    sr: float
    cr: float
    sr_stderr: float = 0.0
    cr_stderr: float = 0.0


def region_from_samples(cfg: SystemConfig, G_t: float, G_r: float, g_c, rho, tau_grid,
                        snr_sense: float | None = None, snr_comm: float | None = None):
    """Average per-realization SR and CR of the Pareto beamformer for each tau.

    The same channel draws are reused for every tau.
    """
    n = np.asarray(g_c).size
    points = []
    for tau in tau_grid:
        us, uc = pareto_gains_batch(G_t, g_c, rho, float(tau))
        sr = sensing_rate(cfg, G_r, us, snr_sense)
        cr = comm_rate(cfg, uc, snr_comm)
        points.append(RegionPoint(float(tau), float(np.sum(sr) / n), float(np.sum(cr) / n),
                                  float(np.std(sr, ddof=1) / math.sqrt(n)) if n > 1 else 0.0,
                                  float(np.std(cr, ddof=1) / math.sqrt(n)) if n > 1 else 0.0))
    return points


def region_from_samples_fixed(cfg: SystemConfig, G_t: float, G_r: float, g_c, rho, tau_grid):
    """Test-only variant: one beamformer per tau, designed for the average Gram data.

    Shows that recomputing the beamformer per realization is what the region
    definition requires; the fixed design is generally worse.
    """
    g_c = np.asarray(g_c, dtype=float)
    rho = np.asarray(rho)
    rep = subspace_rep(G_t, float(np.mean(g_c)), complex(np.mean(rho)))
    points = []
    for tau in tau_grid:
        w = pareto_weights(rep, float(tau)).weights
        # realization-specific channel coordinates, with the fixed w
        perp = np.sqrt(np.maximum(g_c - np.abs(rho) ** 2 / G_t, 0.0))
        uc = np.abs(np.conj(rho) / math.sqrt(G_t) * w[0] + perp * w[1]) ** 2
        us = np.full_like(g_c, G_t * abs(w[0]) ** 2)
        points.append(RegionPoint(float(tau), float(np.mean(sensing_rate(cfg, G_r, us))),
                                  float(np.mean(comm_rate(cfg, uc)))))
    return points


def region_sweep(cfg: SystemConfig, tau_grid, n_mc: int, model=None, seed: int | None = None,
                 workers: int = 1):
    """Achievable (SR, CR) boundary by Monte Carlo over channel draws."""
    from .fading import build_channel_model
    from .montecarlo import draw_gains

    model = build_channel_model(cfg) if model is None else model
    g, rho = draw_gains(model, n_mc, cfg.seed if seed is None else seed, workers=workers)
    return region_from_samples(cfg, model.G_t, model.G_r, g, rho, tau_grid)
