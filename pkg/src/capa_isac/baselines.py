"""Comparison schemes: a discretely sampled array (SPDA) and frequency-division sharing (FDSAC)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ApertureInterval, SystemConfig, dof, rx_interval, tx_interval
from .fading import GainDistribution, gain_distribution, standard_complex_normal
from .metrics import ecr_cc
from .montecarlo import McEstimate, map_blocks, summarize
from .pareto import RegionPoint, comm_rate, pareto_gains_batch, sensing_rate
from .sensing import h_s_eval
from .spectral import sinc_kernel


# ------------------------------------------------------------------ FDSAC

@dataclass(frozen=True)
class FdsacSplit:
    kappa: float   # bandwidth fraction given to sensing
    iota: float    # power fraction given to sensing

    def __post_init__(self):
        if not (0.0 <= self.kappa <= 1.0 and 0.0 <= self.iota <= 1.0):
            raise ValueError("kappa and iota must lie in [0, 1]")


@dataclass(frozen=True)
class FdsacPoint:
    kappa: float
    iota: float
    sr: float
    cr: float


def fdsac_sr(cfg: SystemConfig, kappa: float, iota: float, G_t: float, G_r: float,
             snr_sense: float | None = None) -> float:
    FdsacSplit(kappa, iota)
    if kappa == 0.0 or iota == 0.0:
        return 0.0
    snr = cfg.snr_sense if snr_sense is None else snr_sense
    L = cfg.frame_len
    c = iota * snr * L * cfg.rcs_power * G_r * G_t
    if kappa < 1e-280 * c:
        # kappa log(1 + c/kappa) without overflow as kappa -> 0
        return kappa * (math.log(c) - math.log(kappa) + math.log1p(kappa / c)) / (L * math.log(2.0))
    return kappa / L * math.log2(1.0 + c / kappa)


def fdsac_cr_snr(cfg: SystemConfig, kappa: float, iota: float,
                 snr_comm: float | None = None) -> float:
    """Effective communication SNR on the communication sub-band (0 when it is empty)."""
    if kappa == 1.0:
        return 0.0
    snr = cfg.snr_comm if snr_comm is None else snr_comm
    return (1.0 - iota) / (1.0 - kappa) * snr


def fdsac_rates(cfg: SystemConfig, kappa: float, iota: float, G_t: float, G_r: float,
                dist: GainDistribution, snr_sense: float | None = None,
                snr_comm: float | None = None) -> tuple[float, float]:
    """(SR, ECR) of frequency-division sharing with the C-C ergodic rate on the comm band."""
    FdsacSplit(kappa, iota)
    sr = fdsac_sr(cfg, kappa, iota, G_t, G_r, snr_sense)
    eff = fdsac_cr_snr(cfg, kappa, iota, snr_comm)
    cr = 0.0 if eff == 0.0 else (1.0 - kappa) * ecr_cc(dist, eff).value
    return sr, cr


def pareto_filter(points):
    """Keep the points not strictly dominated in (sr, cr); sorted by sr."""
    pts = sorted(points, key=lambda p: (-p.sr, -p.cr))
    front = []
    best_cr = -math.inf
    for p in pts:
        if p.cr > best_cr:
            front.append(p)
            best_cr = p.cr
    return front[::-1]


def default_split_grid(n: int = 21):
    vals = np.linspace(0.0, 1.0, n)
    return [(float(k), float(i)) for k in vals for i in vals]


def fdsac_region(cfg: SystemConfig, grid, G_t: float, G_r: float, dist: GainDistribution | None = None,
                 gain_samples=None, filtered: bool = True):
    """SR-CR pairs over a (kappa, iota) grid, optionally reduced to the Pareto front.

    With ``gain_samples`` the ergodic rate is the sample average over those
    channel gains (common random numbers with an ISAC sweep); otherwise the
    closed form on ``dist`` is used.
    """
    if dist is None and gain_samples is None:
        raise ValueError("need a gain distribution or gain samples")
    g = None if gain_samples is None else np.asarray(gain_samples, dtype=float)
    pts = []
    for kappa, iota in grid:
        sr = fdsac_sr(cfg, kappa, iota, G_t, G_r)
        eff = fdsac_cr_snr(cfg, kappa, iota)
        if eff == 0.0:
            cr = 0.0
        elif g is not None:
            cr = (1.0 - kappa) * float(np.sum(np.log2(1.0 + eff * g)) / g.size)
        else:
            cr = (1.0 - kappa) * ecr_cc(dist, eff).value
        pts.append(FdsacPoint(float(kappa), float(iota), sr, cr))
    return pareto_filter(pts) if filtered else pts


# ------------------------------------------------------------------ SPDA

@dataclass(frozen=True)
class SpdaConfig:
    spacing: float
    element_len: float
    tx_centers: np.ndarray
    rx_centers: np.ndarray

    @property
    def weight(self) -> float:
        """Aperture length each element integrates over (capped by the pitch)."""
        return min(self.element_len, self.spacing)


def element_length(wavelength: float) -> float:
    return math.sqrt(wavelength ** 2 / (4.0 * math.pi))


def element_centers(interval: ApertureInterval, spacing: float) -> np.ndarray:
    """floor(L / d_s) elements at pitch d_s, each centred in its own cell, array centred."""
    count = int(math.floor(interval.length / spacing + 1e-9))
    if count < 1:
        raise ValueError(f"no element of pitch {spacing} fits in an aperture of length "
                         f"{interval.length}")
    offset = 0.5 * (interval.length - count * spacing)
    return interval.lo + offset + spacing * (np.arange(count) + 0.5)


def spda_config(cfg: SystemConfig, spacing: float) -> SpdaConfig:
    if not spacing > 0:
        raise ValueError("element spacing must be positive")
    return SpdaConfig(spacing, element_length(cfg.wavelength),
                      element_centers(tx_interval(cfg), spacing),
                      element_centers(rx_interval(cfg), spacing))


@dataclass(frozen=True)
class SpdaChannel:
    """Per-element sensing responses and a square-root factor of the fading covariance."""
    cfg: SystemConfig
    array: SpdaConfig
    h_tx: np.ndarray
    sqrt_cov: np.ndarray
    cov_eigenvalues: np.ndarray
    G_t: float
    G_r: float

    def gain_eigenvalues(self) -> np.ndarray:
        """Weights of the hypoexponential law of the C-C gain w_e sum |h_c|^2.

        Only the leading DoF modes are kept, as for the continuous aperture;
        the rest carry negligible power and make the mixture series diverge.
        """
        lam = self.array.weight * self.cov_eigenvalues
        lam = lam[lam > 1e-12 * lam.max()]
        return lam[:dof(self.cfg.tx_length, self.cfg.wavelength)]

    def gain_distribution(self) -> GainDistribution:
        return gain_distribution(self.gain_eigenvalues())


def spda_channel(cfg: SystemConfig, spacing: float) -> SpdaChannel:
    arr = spda_config(cfg, spacing)
    w = arr.weight
    h_tx = h_s_eval(arr.tx_centers, cfg.target_pos, cfg.wavenumber)
    h_rx = h_s_eval(arr.rx_centers, cfg.target_pos, cfg.wavenumber)
    z = arr.tx_centers
    R = sinc_kernel(z[:, None], z[None, :], cfg.wavenumber)
    # eigh square root: the sinc matrix is singular at sub-half-wavelength pitch
    vals, vecs = np.linalg.eigh(R)
    vals = np.clip(vals, 0.0, None)
    return SpdaChannel(cfg, arr, np.atleast_1d(h_tx), vecs * np.sqrt(vals), vals[::-1],
                       float(w * np.sum(np.abs(h_tx) ** 2)), float(w * np.sum(np.abs(h_rx) ** 2)))


def spda_sample(rng: np.random.Generator, chan: SpdaChannel, n: int):
    """n draws of (g, rho) for the sampled array."""
    w = chan.array.weight
    x = standard_complex_normal(rng, (n, chan.sqrt_cov.shape[1]))
    hc = x @ chan.sqrt_cov.T
    g = w * np.sum(np.abs(hc) ** 2, axis=1)
    rho = w * (hc @ np.conj(chan.h_tx))
    return g, rho


@dataclass(frozen=True)
class SpdaRates:
    sr_sc: float
    ecr_sc: McEstimate
    op_sc: McEstimate
    avg_sr_cc: McEstimate
    ecr_cc: McEstimate
    op_cc: McEstimate


def spda_draws(cfg: SystemConfig, spacing: float, n_mc: int, seed: int | None = None,
               workers: int = 1, chan: SpdaChannel | None = None):
    chan = spda_channel(cfg, spacing) if chan is None else chan
    seed = cfg.seed if seed is None else seed
    g, rho = map_blocks(lambda rng, k: spda_sample(rng, chan, k), n_mc, seed, workers)
    return chan, g, rho


def spda_rates(cfg: SystemConfig, spacing: float, n_mc: int, seed: int | None = None,
               workers: int = 1, snr_sense: float | None = None,
               snr_comm: float | None = None) -> SpdaRates:
    """S-C and C-C metrics of the sampled array by Monte Carlo (SR_sc is exact)."""
    seed = cfg.seed if seed is None else seed
    chan, g, rho = spda_draws(cfg, spacing, n_mc, seed, workers)
    snr_s = cfg.snr_sense if snr_sense is None else snr_sense
    snr_c = cfg.snr_comm if snr_comm is None else snr_comm
    L, R0 = cfg.frame_len, cfg.target_rate
    r2 = np.abs(rho) ** 2
    sr_sc = math.log2(1.0 + snr_s * L * cfg.rcs_power * chan.G_t * chan.G_r) / L
    cr_sc = np.log2(1.0 + snr_c * r2 / chan.G_t)
    cr_cc = np.log2(1.0 + snr_c * g)
    sr_cc = np.log2(1.0 + L * cfg.rcs_power * snr_s * chan.G_r * r2 / g) / L
    return SpdaRates(
        sr_sc,
        summarize(cr_sc, seed),
        summarize((cr_sc < R0).astype(float), seed, binomial=True),
        summarize(sr_cc, seed),
        summarize(cr_cc, seed),
        summarize((cr_cc < R0).astype(float), seed, binomial=True),
    )


def spda_region(cfg: SystemConfig, spacing: float, tau_grid, n_mc: int, seed: int | None = None,
                workers: int = 1):
    """Pareto region of the sampled array, same beamforming rule as the continuous one."""
    chan, g, rho = spda_draws(cfg, spacing, n_mc, seed, workers)
    pts = []
    for tau in tau_grid:
        us, uc = pareto_gains_batch(chan.G_t, g, rho, float(tau))
        pts.append(RegionPoint(float(tau), float(np.sum(sensing_rate(cfg, chan.G_r, us)) / g.size),
                               float(np.sum(comm_rate(cfg, uc)) / g.size)))
    return pts


def spda_op_closed(chan: SpdaChannel, snr_comm: float, target_rate: float) -> float:
    """C-C outage of the sampled array from its own hypoexponential gain law."""
    from .metrics import op_cc

    return op_cc(chan.gain_distribution(), snr_comm, target_rate).value


def dominated(point, front, rtol: float = 0.0) -> bool:
    """True if some front point is at least as good in both rates (up to rtol)."""
    return any(f.sr >= point.sr * (1 - rtol) and f.cr >= point.cr * (1 - rtol) for f in front)


def dominated_by_hull(point, front, rtol: float = 0.0) -> bool:
    """Weak dominance by the piecewise-linear boundary through ``front``."""
    if dominated(point, front, rtol):
        return True
    pts = sorted(front, key=lambda f: f.sr)
    srs = np.array([f.sr for f in pts])
    crs = np.array([f.cr for f in pts])
    if point.sr > srs.max() * (1 + rtol):
        return False
    cr_at = np.interp(point.sr, srs, crs)
    return cr_at >= point.cr * (1 - rtol)

