"""Nystrom eigen-solution of the sinc autocorrelation kernel on the transmit aperture."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import roots_legendre

from .config import SystemConfig, tx_interval
from .config import dof as _dof

_SINC_SERIES_CUTOFF = 1e-4
REJECT_RTOL = 1e-12


def sinc_kernel(z, zp, wavenumber: float):
    """sin(k (z - z')) / (k (z - z')), with a short series near the origin."""
    x = wavenumber * (np.asarray(z, dtype=float) - np.asarray(zp, dtype=float))
    small = np.abs(x) < _SINC_SERIES_CUTOFF
    safe = np.where(small, 1.0, x)
    x2 = x * x
    out = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class QuadratureRule:
    order: int
    nodes: np.ndarray      # eta_t on (-1, 1)
    weights: np.ndarray    # omega_t, summing to 2
    points: np.ndarray     # z_t on the transmit aperture
    scaled_weights: np.ndarray  # (L_t / 2) omega_t


def quadrature_rule(cfg: SystemConfig, order: int | None = None) -> QuadratureRule:
    order = cfg.quadrature_order if order is None else order
    eta, omega = roots_legendre(order)
    z = (cfg.tx_length * eta + cfg.gap + cfg.tx_length) / 2.0
    return QuadratureRule(order, eta, omega, z, 0.5 * cfg.tx_length * omega)


@dataclass(frozen=True)
class KernelSpectrum:
    eigenvalues: np.ndarray   # lambda_n, descending, clipped at 0 (meters)
    epsilon: np.ndarray       # (k0 / pi) lambda_n
    node_values: np.ndarray   # column n holds phi_n(z_t)
    dof: int
    rule: QuadratureRule
    wavenumber: float
    sym_vectors: np.ndarray   # eigenvectors of D^1/2 R D^1/2 (columns)

    @property
    def order(self) -> int:
        return self.rule.order

    def numerical_rank(self) -> int:
        return int(np.count_nonzero(self.eigenvalues > REJECT_RTOL * self.eigenvalues[0]))


def kernel_matrix(rule: QuadratureRule, wavenumber: float) -> np.ndarray:
    z = rule.points
    return sinc_kernel(z[:, None], z[None, :], wavenumber)


def nystrom_matrix(rule: QuadratureRule, wavenumber: float) -> np.ndarray:
    """[Z]_{t',t} = (L_t/2) omega_t R(z_t', z_t); not symmetric."""
    return kernel_matrix(rule, wavenumber) * rule.scaled_weights[None, :]


def dof(cfg: SystemConfig) -> int:
    return _dof(cfg.tx_length, cfg.wavelength)


def build_spectrum(cfg: SystemConfig, order: int | None = None) -> KernelSpectrum:
    """Eigen-decompose the sinc kernel on the transmit aperture.

    The symmetric form D^1/2 R D^1/2 is diagonalized; eigenvectors are mapped
    back by D^-1/2 so that sum_t w_t phi_m(z_t) phi_n(z_t) = delta_mn.
    """
    rule = quadrature_rule(cfg, order)
    n_dof = dof(cfg)
    if rule.order < 4 * n_dof:
        raise ValueError(
            f"quadrature_order {rule.order} too small: need at least 4*DoF = {4 * n_dof}")
    k0 = cfg.wavenumber
    sq = np.sqrt(rule.scaled_weights)
    sym = sq[:, None] * kernel_matrix(rule, k0) * sq[None, :]
    try:
        vals, vecs = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"kernel eigen-solve failed: {exc}") from exc
    order_idx = np.argsort(vals)[::-1]
    vals = np.clip(vals[order_idx], 0.0, None)
    vecs = vecs[:, order_idx]
    # fix the sign so each eigenvector has a positive weighted sum (or first nonzero entry)
    signs = np.sign(vecs.sum(axis=0))
    signs[signs == 0] = 1.0
    vecs = vecs * signs
    phi = vecs / sq[:, None]
    return KernelSpectrum(
        eigenvalues=vals,
        epsilon=vals * k0 / math.pi,
        node_values=phi,
        dof=n_dof,
        rule=rule,
        wavenumber=k0,
        sym_vectors=vecs,
    )


def polarization_census(spectrum: KernelSpectrum, threshold: float) -> int:
    """Number of normalized eigenvalues strictly above ``threshold``."""
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    return int(np.count_nonzero(spectrum.epsilon > threshold))


def eigenfunction_interp(spectrum: KernelSpectrum, n: int, z):
    """Nystrom extension of the n-th eigenfunction (0-based) to arbitrary z."""
    lam = spectrum.eigenvalues
    if not 0 <= n < lam.size:
        raise IndexError(f"mode index {n} out of range")
    if lam[n] < REJECT_RTOL * lam[0] or lam[n] <= 0:
        raise ValueError(f"mode {n} has negligible eigenvalue {lam[n]:.3e}")
    rule = spectrum.rule
    z = np.asarray(z, dtype=float)
    kern = sinc_kernel(z[..., None], rule.points, spectrum.wavenumber)
    out = kern @ (rule.scaled_weights * spectrum.node_values[:, n]) / lam[n]
    return out[()] if out.ndim == 0 else out


def retained_count(spectrum: KernelSpectrum) -> int:
    """Modes kept by the channel model: the leading DoF ones, minus any negligible."""
    return int(min(spectrum.dof, spectrum.numerical_rank()))
