import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from capa_isac.config import SystemConfig
from capa_isac.spectral import (build_spectrum, dof, eigenfunction_interp, kernel_matrix,
                                nystrom_matrix, polarization_census, quadrature_rule,
                                retained_count, sinc_kernel)

K0 = 2 * math.pi / 0.125


def test_sinc_values():
    assert sinc_kernel(0.3, 0.3, K0) == 1.0
    assert sinc_kernel(math.pi / K0, 0.0, K0) == pytest.approx(0.0, abs=1e-15)
    assert sinc_kernel(math.pi / (2 * K0), 0.0, K0) == pytest.approx(2 / math.pi, rel=1e-14)


def test_sinc_small_argument_branch():
    x = np.array([1e-9, 5e-5, 9.9e-5, 1.01e-4, 1e-3]) / K0
    ref = np.array([math.sin(v * K0) / (v * K0) for v in x])
    assert np.allclose(sinc_kernel(x, 0.0, K0), ref, rtol=1e-15, atol=0)


def test_quadrature_rule(cfg):
    rule = quadrature_rule(cfg)
    assert rule.weights.sum() == pytest.approx(2.0, rel=1e-13)
    assert np.all(np.diff(rule.nodes) > 0)
    assert rule.points.min() > cfg.gap / 2 and rule.points.max() < cfg.gap / 2 + cfg.tx_length
    assert rule.scaled_weights.sum() == pytest.approx(cfg.tx_length, rel=1e-13)


def test_dof_examples():
    lam = 0.125
    assert dof(SystemConfig(tx_length=10 * lam)) == 20
    assert dof(SystemConfig(tx_length=lam / 2)) == 1
    assert dof(SystemConfig(tx_length=6.25 * lam)) == 13


@pytest.fixture(scope="module")
def spec10(cfg):
    return build_spectrum(cfg)


def test_step_profile(spec10):
    eps = spec10.epsilon
    assert np.all(eps[:17] > 0.99)
    assert eps[19] == pytest.approx(0.6744485058294745, rel=1e-6)
    assert eps[22] < 0.05
    assert np.all(np.diff(spec10.eigenvalues) <= 0)
    assert spec10.eigenvalues.min() >= 0


def test_trace_and_bound(spec10, cfg):
    assert spec10.epsilon.sum() == pytest.approx(2 * cfg.tx_length / cfg.wavelength, rel=1e-3)
    assert spec10.eigenvalues.sum() == pytest.approx(cfg.tx_length, rel=1e-3)
    assert spec10.epsilon[0] <= 1 + 1e-6
    assert spec10.eigenvalues[0] <= cfg.wavelength / 2 * (1 + 1e-6)


def test_weighted_orthonormality(spec10):
    phi = spec10.node_values[:, :30]
    gram = phi.T @ (spec10.rule.scaled_weights[:, None] * phi)
    assert np.allclose(gram, np.eye(30), atol=1e-10)


def test_symmetrized_matches_nystrom(cfg):
    c = cfg.replace(quadrature_order=200)
    spec = build_spectrum(c)
    Z = nystrom_matrix(spec.rule, spec.wavenumber)
    direct = np.sort(np.linalg.eigvals(Z).real)[::-1]
    assert np.allclose(direct[:40], spec.eigenvalues[:40], atol=1e-12)
    # eigenvector relation Z phi = lambda phi on the nodes
    for n in range(5):
        assert np.allclose(Z @ spec.node_values[:, n], spec.eigenvalues[n] * spec.node_values[:, n],
                           atol=1e-10)


def test_small_aperture_two_modes(small_cfg):
    spec = build_spectrum(small_cfg)
    assert spec.dof == 2
    assert polarization_census(spec, 0.5) == 2
    assert spec.epsilon[:5] == pytest.approx(
        [0.9810462777520577, 0.7496201982798525, 0.24359301555167948, 0.02464654705906294,
         0.00106605975350362], rel=1e-8)


def test_census(spec10, cfg):
    assert abs(polarization_census(spec10, 0.5) - 20) <= math.ceil(math.log(20))
    spec20 = build_spectrum(cfg.replace(tx_length=20 * cfg.wavelength))
    ratio = polarization_census(spec20, 0.5) / polarization_census(spec10, 0.5)
    assert ratio == pytest.approx(2.0, abs=0.1)
    # threshold to zero: the count becomes the numerical rank
    assert polarization_census(spec10, 1e-12 * spec10.epsilon[0]) == spec10.numerical_rank()
    with pytest.raises(ValueError):
        polarization_census(spec10, 1.0)


@settings(max_examples=50, deadline=None)
@given(a=st.floats(min_value=0.01, max_value=0.98), b=st.floats(min_value=0.01, max_value=0.98))
def test_census_monotone(spec10, a, b):
    lo, hi = sorted((a, b))
    assert polarization_census(spec10, lo) >= polarization_census(spec10, hi)


def test_interp_reproduces_nodes(spec10):
    z = spec10.rule.points
    for n in (0, 5, 19, 25):
        assert np.allclose(eigenfunction_interp(spec10, n, z), spec10.node_values[:, n], atol=1e-10)


def test_interp_orthonormal_and_rayleigh(cfg):
    spec = build_spectrum(cfg.replace(quadrature_order=400))
    # independent, finer rule for the checks
    from capa_isac.sensing import gl_rule
    z, w = gl_rule(cfg.gap / 2, cfg.gap / 2 + cfg.tx_length, 700)
    modes = [0, 3, 10, 19]
    phi = np.stack([eigenfunction_interp(spec, n, z) for n in modes], axis=1)
    gram = phi.T @ (w[:, None] * phi)
    assert np.allclose(gram, np.eye(len(modes)), atol=1e-6)
    R = sinc_kernel(z[:, None], z[None, :], spec.wavenumber)
    for j, n in enumerate(modes):
        v = w * phi[:, j]
        assert v @ R @ v == pytest.approx(spec.eigenvalues[n], rel=1e-6)


def test_interp_rejects_null_mode(spec10):
    n = spec10.numerical_rank() + 5
    with pytest.raises(ValueError):
        eigenfunction_interp(spec10, n, 0.5)
    with pytest.raises(IndexError):
        eigenfunction_interp(spec10, 10_000, 0.5)


def test_min_order_enforced(cfg):
    with pytest.raises(ValueError, match="4\\*DoF"):
        build_spectrum(cfg, order=40)


def test_retained_count(spec10):
    assert retained_count(spec10) == 20


def test_kernel_matrix_symmetric(spec10):
    rule = quadrature_rule(SystemConfig(quadrature_order=100))
    K = kernel_matrix(rule, K0)
    assert np.array_equal(K, K.T)
    assert np.all(np.diag(K) == 1.0)
