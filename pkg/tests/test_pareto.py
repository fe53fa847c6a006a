import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capa_isac.metrics import ecr_cc, sr_sc
from capa_isac.montecarlo import draw_gains
from capa_isac.pareto import (kkt_residual, pareto_gains_batch, pareto_objective, pareto_oracle,
                              pareto_weights, region_from_samples, region_from_samples_fixed,
                              region_sweep, subspace_rep)


def random_rep(rng):
    G = rng.uniform(0.01, 1.0)
    g = rng.uniform(0.01, 2.0)
    r = math.sqrt(G * g) * rng.uniform(0.0, 0.999)
    return subspace_rep(G, g, r * np.exp(1j * rng.uniform(0, 2 * np.pi)))


def test_orthogonal_thresholds():
    rep = subspace_rep(0.02, 1.2, 0.0)
    assert rep.tau_lo == 0.0 and rep.tau_hi == 1.0


def test_parallel_channels_thresholds():
    G, g = 0.02, 1.2
    rep = subspace_rep(G, g, math.sqrt(G * g) * np.exp(0.3j))
    assert rep.tau_lo == pytest.approx(G / (G + g), rel=1e-12)
    assert rep.tau_hi == pytest.approx(rep.tau_lo, rel=1e-12)
    for tau in np.linspace(0, 1, 21):
        assert pareto_weights(rep, tau).branch != "interior"


def test_cauchy_schwarz_guard():
    with pytest.raises(ValueError):
        subspace_rep(1.0, 1.0, 1.5)
    with pytest.raises(ValueError):
        subspace_rep(1.0, 0.0, 0.0)


def test_gram_vectors():
    rep = subspace_rep(0.3, 0.8, 0.2 - 0.1j)
    a, b = rep.vectors()
    assert np.vdot(a, a).real == pytest.approx(0.3)
    assert np.vdot(b, b).real == pytest.approx(0.8)
    assert np.vdot(b, a) == pytest.approx(0.2 - 0.1j)


def test_endpoints_exact():
    rep = subspace_rep(0.3, 0.8, 0.2 - 0.1j)
    a, b = rep.vectors()
    p0 = pareto_weights(rep, 0.0)
    assert p0.branch == "comm"
    assert np.array_equal(p0.weights, np.conj(b) / math.sqrt(0.8))
    p1 = pareto_weights(rep, 1.0)
    assert p1.branch == "sense"
    assert np.array_equal(p1.weights, np.conj(a) / math.sqrt(0.3))
    assert p1.ups_s == pytest.approx(0.3) and p0.ups_c == pytest.approx(0.8)


def test_symmetric_water_level():
    rep = subspace_rep(0.5, 0.5, 0.0)
    p = pareto_weights(rep, 0.5)
    assert p.branch == "interior"
    assert p.ups_s == pytest.approx(p.ups_c, rel=1e-12)
    o = pareto_oracle(rep, 0.5, 1000)
    # the grid misses the kink of the min, so agreement is first order in the step
    assert o <= p.objective() <= o * (1 + 5e-3)


def test_vanishing_comm_channel():
    rep = subspace_rep(0.02, 1e-9, 1e-6 * math.sqrt(0.02 * 1e-9))
    for tau in (0.0, 0.3, 0.7, 1.0):
        p = pareto_weights(rep, tau)
        o = pareto_oracle(rep, tau, 1000)
        assert p.objective() >= o * (1 - 1e-3)


def test_invalid_tau():
    rep = subspace_rep(0.3, 0.8, 0.1)
    with pytest.raises(ValueError):
        pareto_weights(rep, 1.5)


def test_oracle_dominated_on_grid():
    rng = np.random.default_rng(0)
    for _ in range(5):
        rep = random_rep(rng)
        for tau in np.linspace(0, 1, 11):
            o = pareto_oracle(rep, tau, 300)
            assert pareto_weights(rep, tau).objective() >= o * (1 - 1e-3)


gram = st.tuples(st.floats(min_value=1e-3, max_value=10), st.floats(min_value=1e-3, max_value=10),
                 st.floats(min_value=0.0, max_value=0.999), st.floats(min_value=0, max_value=6.3))


def rep_from(t):
    G, g, c, ph = t
    return subspace_rep(G, g, c * math.sqrt(G * g) * np.exp(1j * ph))


@settings(max_examples=150, deadline=None)
@given(gram, st.floats(min_value=0.0, max_value=1.0))
def test_unit_norm_and_active_constraint(t, tau):
    rep = rep_from(t)
    p = pareto_weights(rep, tau)
    assert np.linalg.norm(p.weights) == pytest.approx(1.0, abs=1e-12)
    if p.branch == "interior":
        G, g, r = rep.G_t, rep.g_c, abs(rep.rho)
        lhs = p.eps1 ** 2 * G + p.eps2 ** 2 * g + 2 * p.eps1 * p.eps2 * r
        assert lhs == pytest.approx(p.varsigma ** 2, rel=1e-12)
        # Upsilon_s / tau = Upsilon_c / (1 - tau), on amplitudes so tiny tau does not underflow
        amp_s = (p.eps1 * G + p.eps2 * r) * math.sqrt(1 - tau)
        amp_c = (p.eps1 * r + p.eps2 * g) * math.sqrt(tau)
        assert amp_s == pytest.approx(amp_c, rel=1e-9)
        assert kkt_residual(rep, p) < 1e-8 * max(1.0, rep.G_t + rep.g_c)


@settings(max_examples=100, deadline=None)
@given(gram)
def test_branch_continuity(t):
    rep = rep_from(t)
    scale = rep.G_t + rep.g_c

    def jump(thr, h):
        below, above = pareto_weights(rep, thr - h), pareto_weights(rep, thr + h)
        return max(abs(below.ups_s - above.ups_s), abs(below.ups_c - above.ups_c))

    for thr in (rep.tau_lo, rep.tau_hi):
        if not 1e-5 < thr < 1 - 1e-5:
            continue
        # a jump would not shrink with the step
        assert jump(thr, 1e-9) <= 1e-2 * jump(thr, 1e-6) + 1e-12 * scale


@settings(max_examples=100, deadline=None)
@given(gram, st.floats(min_value=0.0, max_value=1.0))
def test_batch_matches_scalar(t, tau):
    rep = rep_from(t)
    p = pareto_weights(rep, tau)
    us, uc = pareto_gains_batch(rep.G_t, np.array([rep.g_c]), np.array([rep.rho]), tau)
    assert us[0] == pytest.approx(p.ups_s, rel=1e-10, abs=1e-14)
    assert uc[0] == pytest.approx(p.ups_c, rel=1e-10, abs=1e-14)


def test_kkt_interior_only():
    rep = subspace_rep(0.3, 0.8, 0.1)
    with pytest.raises(ValueError):
        kkt_residual(rep, pareto_weights(rep, 0.0))


def test_objective_ends():
    assert pareto_objective(0.0, 1.0, 2.0) == 2.0
    assert pareto_objective(1.0, 1.0, 2.0) == 1.0


@pytest.fixture(scope="module")
def draws(model):
    return draw_gains(model, 40_000, 17)


def test_region_endpoints_and_monotone(cfg, model, dist, draws):
    g, rho = draws
    taus = np.linspace(0, 1, 41)
    pts = region_from_samples(cfg, model.G_t, model.G_r, g, rho, taus)
    sr = np.array([p.sr for p in pts])
    cr = np.array([p.cr for p in pts])
    assert np.all(np.diff(sr) >= -1e-12)
    assert np.all(np.diff(cr) <= 1e-12)
    assert pts[-1].sr == pytest.approx(sr_sc(cfg, model.G_t, model.G_r).value, rel=1e-12)
    assert abs(pts[0].cr - ecr_cc(dist, cfg.snr_comm).value) < 3 * pts[0].cr_stderr


def test_fixed_beamformer_is_worse(cfg, model, draws):
    g, rho = draws
    taus = np.linspace(0.05, 0.95, 7)
    adaptive = region_from_samples(cfg, model.G_t, model.G_r, g, rho, taus)
    fixed = region_from_samples_fixed(cfg, model.G_t, model.G_r, g, rho, taus)
    for f in fixed:
        assert any(a.sr >= f.sr - 1e-12 and a.cr >= f.cr - 1e-12 for a in adaptive)


def test_region_sweep_deterministic(cfg, model):
    a = region_sweep(cfg, [0.0, 0.5, 1.0], 2000, model=model, seed=3)
    b = region_sweep(cfg, [0.0, 0.5, 1.0], 2000, model=model, seed=3, workers=3)
    assert a == b
