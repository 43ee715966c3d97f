import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.special import beta as beta_fn, roots_jacobi

from localize import kernels as kn
from localize import quadrature as qd
from localize.special_fn import DomainError, surface_area


@pytest.mark.parametrize("alpha", [-0.5, 0.0, 0.5, 1.0, 2.5])
@pytest.mark.parametrize("n", [1, 2, 7, 40, 200])
def test_nodes_match_scipy(alpha, n):
    rule = qd.gauss_jacobi(n, alpha)
    x, _ = roots_jacobi(n, alpha, alpha)
    np.testing.assert_allclose(rule.nodes, np.sort(x), atol=1e-13)
    assert rule.newton_converged


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([-0.5, 0.0, 0.5, 1.0]), st.integers(1, 60), st.integers(0, 119))
def test_rule_is_exact_for_low_degree(alpha, n, k):
    # an n-point Gauss rule integrates polynomials of degree <= 2n-1 exactly
    k = k % (2 * n)
    rule = qd.gauss_jacobi(n, alpha)
    exact = 0.0 if k % 2 else beta_fn((k + 1) / 2, alpha + 1)
    assert rule.integrate(lambda u: u**k) == pytest.approx(exact, rel=1e-12, abs=1e-14)


def test_weights_sum_to_moment_and_are_symmetric():
    for alpha in (-0.5, 0.0, 1.5):
        rule = qd.gauss_jacobi(301, alpha)
        assert rule.weights.sum() == pytest.approx(qd.jacobi_moment(alpha), rel=1e-13)
        np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])
        np.testing.assert_array_equal(rule.weights, rule.weights[::-1])
        assert np.all(rule.weights > 0)


def test_rule_arrays_are_read_only():
    rule = qd.gauss_jacobi(8, 0.0)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


def test_rule_domain():
    with pytest.raises(DomainError):
        qd.gauss_jacobi(0, 0.0)
    with pytest.raises(DomainError):
        qd.gauss_jacobi(4, -1.0)


def test_large_rule():
    rule = qd.gauss_jacobi(3200, 0.5)
    assert rule.integrate(lambda u: u**800) == pytest.approx(beta_fn(400.5, 1.5), rel=1e-11)


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_zonal_integral_of_one_is_surface_area(d):
    est = qd.zonal_integral_estimate(lambda t: np.ones_like(t), d, 1.0)
    assert est.value == pytest.approx(surface_area(d), rel=1e-13)


@pytest.mark.parametrize("d, m, eps", [(2, 1, 1.0), (3, 2, 0.1), (2, 4, 0.02), (5, 3, 0.05)])
def test_colzani_integrates_to_one(d, m, eps):
    assert qd.zonal_integral(kn.make_kernel("colzani", d, m, eps)) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("m", [1, 2, 3, 5])
@pytest.mark.parametrize("eps", [1.0, 0.1])
def test_s1_integral(m, eps):
    ref = math.pi * math.factorial(2 * m - 2) / (math.factorial(m - 1) * math.factorial(m))
    assert qd.zonal_integral(kn.make_kernel("s1_second", 2, m, eps)) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("d, m, eps", [(3, 1, 1.0), (2, 3, 0.5), (4, 2, 0.1), (5, 5, 0.02)])
def test_main_integral_is_mean_value(d, m, eps):
    p = kn.KernelParams(d, m, eps)
    val = qd.zonal_integral(kn.ZonalKernel(p))
    assert val == pytest.approx(surface_area(d) * kn.center_value_closed(p), rel=1e-10)
    if (d, m, eps) == (3, 1, 1.0):
        assert val == pytest.approx(math.pi, abs=1e-10)


@pytest.mark.parametrize("d", [2, 3, 4, 5])
@pytest.mark.parametrize("m", [1, 2, 4])
@pytest.mark.parametrize("eps", [0.01, 1.0, 3.0])
def test_flat_integral_closed_form(d, m, eps):
    # scale free: omega_{d-1} C B((d-1)/2, m - 1/2) / 2 with C the prefactor
    p = kn.KernelParams(d, m, eps, "flat")
    omega = 2.0 if d == 2 else surface_area(d - 1)
    ref = omega * kn.flat_prefactor(p) * 0.5 * beta_fn((d - 1) / 2, m - 0.5)
    assert qd.flat_integral(kn.ZonalKernel(p)) == pytest.approx(ref, rel=1e-10)


def test_flat_d3_m1_is_two_pi():
    for eps in (0.01, 1.0, 2.0):
        assert qd.flat_integral(kn.make_kernel("flat", 3, 1, eps)) == pytest.approx(2 * math.pi, abs=1e-9)


def test_integral_family_checks():
    with pytest.raises(DomainError):
        qd.zonal_integral(kn.make_kernel("flat", 3, 1, 1.0))
    with pytest.raises(DomainError):
        qd.flat_integral(kn.make_kernel("main", 3, 1, 1.0))


def test_estimate_reports_convergence():
    est = qd.zonal_integral_estimate(kn.make_kernel("main", 3, 2, 0.1), 3, 0.1)
    assert est.rel_change <= qd.RTOL
    assert est.nodes >= 2 * 160


def test_non_convergent_integral_raises(monkeypatch):
    monkeypatch.setattr(qd, "MAX_NODES", 256)
    rough = lambda t: np.sign(t - 0.1234567)
    with pytest.raises(qd.QuadratureError):
        qd.zonal_integral_estimate(rough, 3, 1.0)


def test_normalize_kernel():
    k = qd.normalize_kernel(kn.make_kernel("main", 4, 2, 0.2))
    assert k.normalization > 0
    assert qd.zonal_integral(k) == pytest.approx(1.0, rel=1e-10)
    c = qd.normalize_kernel(kn.make_kernel("colzani", 3, 2, 0.2))
    assert c.scale == pytest.approx(1.0, abs=1e-10)
    f = qd.normalize_kernel(kn.make_kernel("flat", 2, 3, 0.5))
    assert qd.flat_integral(f) == pytest.approx(1.0, rel=1e-10)


def test_normalize_rejects_non_positive_integral(monkeypatch):
    monkeypatch.setattr(qd, "kernel_integral", lambda k: -1.0)
    with pytest.raises(qd.NormalizationError):
        qd.normalize_kernel(kn.make_kernel("main", 3, 2, 0.2))
