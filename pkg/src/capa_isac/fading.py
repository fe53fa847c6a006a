"""Statistics of the fading communication channel.

The channel field on the transmit aperture is expanded in the kernel
eigenfunctions, h_c(z) = sum_n sqrt(lambda_n) phi_n(z) Psi_n with i.i.d.
CN(0, 1) coefficients. The channel model keeps the leading DoF modes; its
gain g_c = sum lambda_n |Psi_n|^2 is hypoexponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaln

from .config import SystemConfig, rx_interval, tx_interval
from .sensing import aperture_gain_closed, gl_rule, h_s_eval
from .spectral import REJECT_RTOL, KernelSpectrum, build_spectrum, retained_count, sinc_kernel

SERIES_TOL = 1e-12
SERIES_CAP = 5000


class SeriesConvergenceError(ArithmeticError):
    """The mixture series did not reach tolerance within the term cap."""


# ---------------------------------------------------------------- xi-series

def xi_coefficients(lams, M: int) -> np.ndarray:
    """xi_0..xi_M of the hypoexponential series for weights ``lams``.

    xi_m = (1/m) sum_{i=1}^m xi_{m-i} gamma_i,  gamma_i = sum_n (1 - lam_min/lam_n)^i.
    """
    lams = np.asarray(lams, dtype=float)
    if lams.ndim != 1 or lams.size == 0:
        raise ValueError("need a nonempty 1-D eigenvalue sequence")
    if np.any(lams <= 0):
        raise ValueError("eigenvalues must be strictly positive")
    ratio = 1.0 - lams.min() / lams
    gam = np.array([np.sum(ratio ** i) for i in range(1, M + 1)])
    xi = np.zeros(M + 1)
    xi[0] = 1.0
    for m in range(1, M + 1):
        xi[m] = np.dot(xi[m - 1::-1][:m], gam[:m]) / m
    return xi


@dataclass(frozen=True)
class GainDistribution:
    """Law of sum_n lam_n |Psi_n|^2 as a Gamma(N + m, lam_min) mixture.

    ``weights[m]`` equals prefactor * xi_m; the weights are positive and sum to 1
    up to the truncation tolerance.
    """
    eigenvalues: np.ndarray
    weights: np.ndarray
    log_prefactor: float

    @property
    def n_terms(self) -> int:
        return self.eigenvalues.size

    @property
    def scale(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def truncation(self) -> int:
        return self.weights.size - 1

    @property
    def prefactor(self) -> float:
        return math.exp(self.log_prefactor)

    @property
    def xi(self) -> np.ndarray:
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(np.log(self.weights) - self.log_prefactor)

    @property
    def shapes(self) -> np.ndarray:
        return self.n_terms + np.arange(self.weights.size)

    @property
    def mean(self) -> float:
        return float(np.sum(self.eigenvalues))


def gain_distribution(lams, tol: float = SERIES_TOL, cap: int = SERIES_CAP) -> GainDistribution:
    """Build the mixture weights directly (all terms positive, no cancellation).

    Terms are added until the unassigned probability mass drops below ``tol``.
    """
    lams = np.sort(np.asarray(lams, dtype=float))[::-1]
    if lams.size == 0 or np.any(lams <= 0):
        raise ValueError("eigenvalues must be strictly positive")
    lam_min = lams[-1]
    log_pref = float(np.sum(np.log(lam_min / lams)))
    p0 = math.exp(log_pref)
    if p0 < 1e-280:
        raise SeriesConvergenceError(
            f"eigenvalue spread too large: mixture prefactor underflows (log = {log_pref:.1f})")
    ratio = 1.0 - lam_min / lams
    ratio = ratio[ratio > 0]
    p = np.zeros(cap + 1)
    gam = np.zeros(cap + 1)
    p[0] = p0
    total = p0
    power = np.ones_like(ratio)
    m = 0
    while 1.0 - total > tol:
        m += 1
        if m > cap:
            raise SeriesConvergenceError(
                f"mixture series not converged after {cap} terms (residual mass {1.0 - total:.2e})")
        power *= ratio
        gam[m] = power.sum()
        p[m] = np.dot(p[m - 1::-1][:m], gam[1:m + 1]) / m
        total += p[m]
    return GainDistribution(lams, p[:m + 1].copy(), log_pref)


def gain_pdf(dist: GainDistribution, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("gain_pdf requires x >= 0")
    s = dist.shapes.astype(float)
    b = dist.scale
    xs = x[..., None]
    with np.errstate(divide="ignore"):
        logterm = (np.log(dist.weights) + (s - 1) * np.log(xs) - xs / b - s * math.log(b)
                   - gammaln(s))
    out = np.exp(logterm).sum(axis=-1)
    return out[()] if out.ndim == 0 else out


def gain_cdf(dist: GainDistribution, x):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("gain_cdf requires x >= 0")
    s = dist.shapes.astype(float)
    out = (dist.weights * gammainc(s, x[..., None] / dist.scale)).sum(axis=-1)
    out = np.clip(out, 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


# ------------------------------------------------------------- channel model

@dataclass(frozen=True)
class FadingRealization:
    psi: np.ndarray
    g_c: float
    rho: complex


@dataclass(frozen=True)
class ChannelModel:
    """Everything needed to draw (g_c, rho) pairs and evaluate closed forms.

    ``projections[n]`` is c_n = int phi_n(z) conj(h_s(z)) dz over all
    numerically nonzero modes; the first ``n_retained`` are used by the model.
    """
    cfg: SystemConfig
    spectrum: KernelSpectrum
    n_retained: int
    projections: np.ndarray
    G_t: float
    G_r: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.spectrum.eigenvalues[: self.n_retained]

    @property
    def coupling(self) -> np.ndarray:
        """sqrt(lambda_n) c_n for the retained modes; rho = coupling @ Psi."""
        return np.sqrt(self.eigenvalues) * self.projections[: self.n_retained]

    @property
    def xi_model(self) -> float:
        """Variance of rho under the retained-mode model."""
        return float(np.sum(self.eigenvalues * np.abs(self.projections[: self.n_retained]) ** 2))

    @property
    def xi_full(self) -> float:
        lam = self.spectrum.eigenvalues[: self.projections.size]
        return float(np.sum(lam * np.abs(self.projections) ** 2))

    def distribution(self) -> GainDistribution:
        return gain_distribution(self.eigenvalues)


def sensing_projections(cfg: SystemConfig, spectrum: KernelSpectrum) -> np.ndarray:
    rule = spectrum.rule
    h = h_s_eval(rule.points, cfg.target_pos, cfg.wavenumber)
    active = spectrum.numerical_rank()
    vecs = spectrum.sym_vectors[:, :active]
    return vecs.T @ (np.sqrt(rule.scaled_weights) * np.conj(h))


def build_channel_model(cfg: SystemConfig, spectrum: KernelSpectrum | None = None) -> ChannelModel:
    spectrum = build_spectrum(cfg) if spectrum is None else spectrum
    return ChannelModel(
        cfg=cfg,
        spectrum=spectrum,
        n_retained=retained_count(spectrum),
        projections=sensing_projections(cfg, spectrum),
        G_t=aperture_gain_closed(tx_interval(cfg), cfg.target_pos),
        G_r=aperture_gain_closed(rx_interval(cfg), cfg.target_pos),
    )


def standard_complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    re = rng.standard_normal(shape)
    im = rng.standard_normal(shape)
    return (re + 1j * im) * math.sqrt(0.5)


def sample_realization(rng: np.random.Generator, model: ChannelModel) -> FadingRealization:
    psi = standard_complex_normal(rng, model.n_retained)
    g = float(np.sum(model.eigenvalues * np.abs(psi) ** 2))
    rho = complex(model.coupling @ psi)
    return FadingRealization(psi, g, rho)


def sample_gains(rng: np.random.Generator, model: ChannelModel, n: int):
    """n joint draws of (g_c, rho) sharing one coefficient vector per draw."""
    psi = standard_complex_normal(rng, (n, model.n_retained))
    g = (np.abs(psi) ** 2) @ model.eigenvalues
    rho = psi @ model.coupling
    return g, rho


def sample_full_gain(rng: np.random.Generator, spectrum: KernelSpectrum, n: int) -> np.ndarray:
    """n draws of g_c from every numerically nonzero mode, not just the retained ones.

    Its mean is the full trace (the aperture length), which the DoF-truncated
    model undershoots slightly.
    """
    lam = spectrum.eigenvalues[:spectrum.numerical_rank()]
    return (np.abs(standard_complex_normal(rng, (n, lam.size))) ** 2) @ lam


def sample_field(rng: np.random.Generator, spectrum: KernelSpectrum, z, n: int) -> np.ndarray:
    """n draws of the channel field at points z using every nonzero mode.

    Row i holds one field realization; covariance converges to sinc(k (z - z')).
    """
    from .spectral import eigenfunction_interp

    active = spectrum.numerical_rank()
    z = np.atleast_1d(np.asarray(z, dtype=float))
    basis = np.stack([eigenfunction_interp(spectrum, k, z) for k in range(active)], axis=1)
    basis = basis * np.sqrt(spectrum.eigenvalues[:active])
    psi = standard_complex_normal(rng, (n, active))
    return psi @ basis.T


# --------------------------------------------------------- cross statistic

def xi_capital(cfg: SystemConfig, spectrum: KernelSpectrum | None = None, order: int = 800,
               kernel=None) -> float:
    """Double integral of h_s(z) R(z, z') conj(h_s(z')) over the transmit aperture.

    Evaluated by its own Gauss-Legendre rule (independent of the spectrum's).
    ``kernel`` replaces the sinc autocorrelation: a callable k(z, z') on grids,
    or the string "delta" for the identity operator (returns the plain gain).
    ``spectrum`` is accepted for interface symmetry and ignored.
    """
    iv = tx_interval(cfg)
    z, w = gl_rule(iv.lo, iv.hi, order)
    h = h_s_eval(z, cfg.target_pos, cfg.wavenumber)
    if isinstance(kernel, str):
        if kernel != "delta":
            raise ValueError(f"unknown kernel hook {kernel!r}")
        return float(np.sum(w * np.abs(h) ** 2))
    kfun = (lambda a, b: sinc_kernel(a, b, cfg.wavenumber)) if kernel is None else kernel
    K = np.asarray(kfun(z[:, None], z[None, :]), dtype=float)
    v = w * h
    return float(np.real(v @ K @ np.conj(v)))


# ------------------------------------------------------------- Q spectrum

@dataclass(frozen=True)
class QSpectrum:
    eigenvalues: np.ndarray   # nu_n, descending
    dof_q: int
    c: float

    def distribution(self) -> GainDistribution:
        return gain_distribution(self.eigenvalues[: self.dof_q])


def q_coupling(cfg: SystemConfig, snr_sense: float | None = None, G_r: float | None = None) -> float:
    snr = cfg.snr_sense if snr_sense is None else snr_sense
    G_r = aperture_gain_closed(rx_interval(cfg), cfg.target_pos) if G_r is None else G_r
    return cfg.frame_len * cfg.rcs_power * snr * G_r


def q_spectrum(model: ChannelModel, snr_sense: float | None = None) -> QSpectrum:
    """Eigenvalues of the sensing-weighted kernel restricted to the retained modes.

    In the eigenbasis the operator is diag(lambda) + c v v^H with v = conj(sqrt(lambda) c_n).
    """
    c = q_coupling(model.cfg, snr_sense, model.G_r)
    lam = model.eigenvalues
    v = np.conj(model.coupling)
    M = np.diag(lam).astype(complex) + c * np.outer(v, np.conj(v))
    try:
        nu = np.linalg.eigvalsh(M)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"Q eigen-solve failed: {exc}") from exc
    nu = np.clip(nu[::-1], 0.0, None)
    dof_q = int(np.count_nonzero(nu > REJECT_RTOL * nu[0]))
    return QSpectrum(nu, dof_q, c)


def q_spectrum_nodes(model: ChannelModel, snr_sense: float | None = None) -> np.ndarray:
    """Same spectrum assembled in the weighted node basis as S (I + c h h^H) S.

    S is the rank-N square root of the discretized kernel. O(T^3); used as a
    cross-check only.
    """
    cfg = model.cfg
    spec = model.spectrum
    c = q_coupling(cfg, snr_sense, model.G_r)
    N = model.n_retained
    U = spec.sym_vectors[:, :N]
    S = (U * np.sqrt(spec.eigenvalues[:N])) @ U.T
    h = np.sqrt(spec.rule.scaled_weights) * h_s_eval(spec.rule.points, cfg.target_pos,
                                                     cfg.wavenumber)
    Sh = S @ h
    Q = S @ S + c * np.outer(Sh, np.conj(Sh))
    nu = np.linalg.eigvalsh(Q)[::-1]
    return np.clip(nu[:N], 0.0, None)


# ------------------------------------------- integral route for log moments

def _u_grid(eigs, extra_scale: float = 1.0, step: float = 0.05):
    eigs = np.asarray(eigs, dtype=float) * extra_scale
    lo = -math.log(max(eigs.sum(), 1.0)) - 42.0
    hi_tail = (42.0 - np.sum(np.log(eigs))) / eigs.size
    hi = max(math.log(45.0), hi_tail, -math.log(eigs.min()) + 5.0)
    n = int(math.ceil((hi - lo) / step))
    return np.linspace(lo, hi, n + 1), eigs


def expected_log(eigs, step: float = 0.05) -> float:
    """E ln(sum_n eigs_n |Phi_n|^2) with Phi_n i.i.d. CN(0, 1).

    Uses ln x = int_0^inf (e^-t - e^-tx) dt / t with t = e^u and the Laplace
    transform prod (1 + t eigs)^-1; trapezoid in u converges geometrically.
    """
    u, eigs = _u_grid(eigs, step=step)
    t = np.exp(u)
    lap = np.exp(-np.log1p(t[:, None] * eigs[None, :]).sum(axis=1))
    f = np.exp(-t) - lap
    return float(np.trapezoid(f, u))


def expected_log1p(eigs, snr: float, step: float = 0.05) -> float:
    """E ln(1 + snr * sum_n eigs_n |Phi_n|^2) by the same transform."""
    u, scaled = _u_grid(eigs, extra_scale=snr, step=step)
    t = np.exp(u)
    lap = np.exp(-np.log1p(t[:, None] * scaled[None, :]).sum(axis=1))
    f = (1.0 - lap) * np.exp(-t)
    return float(np.trapezoid(f, u))
