"""Closed-form versus Monte Carlo check suite shared by the CLI and the tests."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig
from .fading import build_channel_model, gain_cdf, q_spectrum, sample_full_gain
from .metrics import avg_sr_cc, ecr_cc, ecr_sc, op_cc, op_sc, sr_sc
from .montecarlo import draw_gains, estimate, map_blocks, summarize
from .spectral import polarization_census


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def ks_distance(dist, samples) -> float:
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    F = gain_cdf(dist, x)
    upper = np.arange(1, n + 1) / n - F
    lower = F - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def closed_forms(cfg: SystemConfig, model, snr: float, method: str = "auto") -> dict:
    dist = model.distribution()
    Xi = model.xi_model
    return {
        "sr_sc": sr_sc(cfg, model.G_t, model.G_r, snr).value,
        "ecr_sc": ecr_sc(cfg, model.G_t, Xi, snr).value,
        "op_sc": op_sc(cfg, model.G_t, Xi, snr).value,
        "ecr_cc": ecr_cc(dist, snr).value,
        "op_cc": op_cc(dist, snr, cfg.target_rate).value,
        "avg_sr_cc": avg_sr_cc(q_spectrum(model, snr), dist, cfg.frame_len, Xi, method).value,
    }


def run_checks(cfg: SystemConfig, snrs_db=None, n: int | None = None, n_op: int | None = None,
               workers: int = 1, model=None) -> list[CheckResult]:
    n = cfg.mc_samples if n is None else n
    n_op = 10 * n if n_op is None else n_op
    snrs_db = [30.0, 40.0, 50.0] if not snrs_db else list(snrs_db)
    model = build_channel_model(cfg) if model is None else model
    spec = model.spectrum
    dist = model.distribution()
    out = []

    trace = float(spec.eigenvalues.sum())
    rel = abs(trace / cfg.tx_length - 1.0)
    out.append(CheckResult("trace identity", rel < 1e-3, f"sum lambda = {trace:.6g}, rel err {rel:.2e}"))

    census = polarization_census(spec, 0.5)
    width = math.ceil(math.log(spec.dof)) if spec.dof > 1 else 1
    out.append(CheckResult("eigenvalue census", abs(census - spec.dof) <= width,
                           f"census {census}, DoF {spec.dof} +/- {width}"))

    full = map_blocks(lambda rng, k: sample_full_gain(rng, spec, k), n, cfg.seed, workers)
    est = summarize(full, cfg.seed)
    out.append(CheckResult("full-field gain mean", est.agrees(trace),
                           f"MC {est.mean:.6g} +/- {est.stderr:.2g}, trace {trace:.6g}"))

    g, _ = draw_gains(model, n, cfg.seed, workers)
    est = summarize(g, cfg.seed)
    out.append(CheckResult("retained gain mean", est.agrees(dist.mean),
                           f"MC {est.mean:.6g} +/- {est.stderr:.2g}, analytic {dist.mean:.6g}"))
    ks = ks_distance(dist, g)
    out.append(CheckResult("gain KS distance", ks < 0.01, f"KS = {ks:.4f}"))

    for db in snrs_db:
        snr = 10.0 ** (db / 10.0)
        exact = closed_forms(cfg, model, snr)
        for kind, value in exact.items():
            size = n_op if kind.startswith("op") else n
            mc = estimate(kind, cfg, size, cfg.seed, model=model, workers=workers,
                          snr_sense=snr, snr_comm=snr)
            if mc.binomial:
                lo, hi = mc.wilson(3.0)
                detail = f"closed {value:.6g}, MC {mc.mean:.6g} in [{lo:.3g}, {hi:.3g}]"
            else:
                detail = f"closed {value:.6g}, MC {mc.mean:.6g} +/- {mc.stderr:.2g}"
            out.append(CheckResult(f"{kind} @ {db:g} dB", mc.agrees(value), detail))
    return out

