"""Seeded, worker-count-independent Monte Carlo estimation.

Samples are produced in fixed-size blocks. Block b draws from a Philox stream
keyed by SeedSequence([seed, b]), so the sample sequence depends only on
(seed, n) and never on how blocks are scheduled across threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig, rx_interval, tx_interval
from .sensing import aperture_gain_quadrature

BLOCK_SIZE = 8192
MIN_SAMPLES = 100

KINDS = ("g_c", "rho_sq", "sr_sc", "ecr_sc", "op_sc", "ecr_cc", "op_cc", "avg_sr_cc")
BINOMIAL_KINDS = ("op_sc", "op_cc")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    n: int
    seed: int
    binomial: bool = False

    def wilson(self, z: float = 3.0) -> tuple[float, float]:
        """Wilson score interval for a proportion estimate."""
        n, p = self.n, self.mean
        denom = 1.0 + z * z / n
        centre = (p + z * z / (2 * n)) / denom
        half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
        # the clamps against p only absorb rounding at p = 0 or 1
        return max(0.0, min(centre - half, p)), min(1.0, max(centre + half, p))

    @property
    def wilson_halfwidth(self) -> float:
        lo, hi = self.wilson(1.96)
        return 0.5 * (hi - lo)

    def agrees(self, value: float, k: float = 3.0) -> bool:
        """True if ``value`` lies within k standard errors (Wilson interval for OPs)."""
        if self.binomial:
            lo, hi = self.wilson(k)
            return lo <= value <= hi
        if self.stderr == 0:
            return math.isclose(self.mean, value, rel_tol=1e-9, abs_tol=1e-15)
        return abs(self.mean - value) <= k * self.stderr


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def map_blocks(fn, n: int, seed: int, workers: int = 1, block_size: int = BLOCK_SIZE):
    """Run fn(rng, count) over consecutive blocks and concatenate in block order.

    fn returns an array or a tuple of arrays, one entry per sample.
    """
    if n < 1:
        raise ValueError("need at least one sample")
    sizes = [min(block_size, n - start) for start in range(0, n, block_size)]

    def run(b):
        return fn(block_rng(seed, b), sizes[b])

    if workers <= 1:
        parts = [run(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    if isinstance(parts[0], tuple):
        return tuple(np.concatenate([p[i] for p in parts]) for i in range(len(parts[0])))
    return np.concatenate(parts)


def summarize(samples, seed: int, binomial: bool = False) -> McEstimate:
    x = np.asarray(samples, dtype=float)
    n = x.size
    mean = float(np.sum(x) / n)
    std = float(np.sqrt(np.sum((x - mean) ** 2) / (n - 1))) if n > 1 else 0.0
    return McEstimate(mean, std / math.sqrt(n), n, seed, binomial)


def draw_gains(model, n: int, seed: int, workers: int = 1):
    from .fading import sample_gains

    return map_blocks(lambda rng, k: sample_gains(rng, model, k), n, seed, workers)


def per_sample_metric(kind: str, cfg: SystemConfig, model, g, rho, snr_sense: float,
                      snr_comm: float, target_rate: float):
    L = cfg.frame_len
    r2 = np.abs(rho) ** 2
    if kind == "g_c":
        return g
    if kind == "rho_sq":
        return r2
    if kind == "ecr_sc":
        return np.log2(1.0 + snr_comm * r2 / model.G_t)
    if kind == "op_sc":
        return (np.log2(1.0 + snr_comm * r2 / model.G_t) < target_rate).astype(float)
    if kind == "ecr_cc":
        return np.log2(1.0 + snr_comm * g)
    if kind == "op_cc":
        return (np.log2(1.0 + snr_comm * g) < target_rate).astype(float)
    if kind == "avg_sr_cc":
        return np.log2(1.0 + L * cfg.rcs_power * snr_sense * model.G_r * r2 / g) / L
    raise ValueError(f"unknown metric kind {kind!r}")


def estimate(kind: str, cfg: SystemConfig, n: int | None = None, seed: int | None = None,
             model=None, workers: int = 1, snr_sense: float | None = None,
             snr_comm: float | None = None, target_rate: float | None = None) -> McEstimate:
    """Monte Carlo estimate of one metric from joint (g_c, rho) channel draws.

    ``sr_sc`` is deterministic; its estimate is the rate built from
    quadrature-integrated aperture gains, with zero standard error.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown metric kind {kind!r}; expected one of {', '.join(KINDS)}")
    n = cfg.mc_samples if n is None else n
    seed = cfg.seed if seed is None else seed
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    snr_s = cfg.snr_sense if snr_sense is None else snr_sense
    snr_c = cfg.snr_comm if snr_comm is None else snr_comm
    R0 = cfg.target_rate if target_rate is None else target_rate
    if kind == "sr_sc":
        gt = aperture_gain_quadrature(tx_interval(cfg), cfg.target_pos, cfg.quadrature_order)
        gr = aperture_gain_quadrature(rx_interval(cfg), cfg.target_pos, cfg.quadrature_order)
        L = cfg.frame_len
        value = math.log2(1.0 + snr_s * L * cfg.rcs_power * gt * gr) / L
        return McEstimate(value, 0.0, n, seed)
    if model is None:
        from .fading import build_channel_model
        model = build_channel_model(cfg)

    def block(rng, k):
        from .fading import sample_gains
        g, rho = sample_gains(rng, model, k)
        return per_sample_metric(kind, cfg, model, g, rho, snr_s, snr_c, R0)

    samples = map_blocks(block, n, seed, workers)
    return summarize(samples, seed, binomial=kind in BINOMIAL_KINDS)
