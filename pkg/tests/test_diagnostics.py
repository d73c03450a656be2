import numpy as np
import pytest
from scipy import integrate, stats

from pmeans.diagnostics import (AdjointEvalConfig, lstar_one_p2, lstar_scaling_study,
                                wrapped_gaussian_cdf, wrapped_gaussian_ks)
from pmeans.geometry import PI, canonical, canonical_array, grid
from pmeans.measures import Empirical, TrigPolyDensity, Uniform, VonMisesMixture
from pmeans.potential import u_hess, u_value

ALPHAS = (1e-4, 3e-4, 1e-3, 3e-3)


def test_config_bounds():
    c = AdjointEvalConfig(0.01, 2.0)
    assert c.eta == pytest.approx(0.02 / 0.98)
    for a, b in ((0.0, 2.0), (0.01, 0.5), (0.3, 2.0), (0.2, 2.0)):
        with pytest.raises(ValueError):
            AdjointEvalConfig(a, b)


def test_uniform_is_invariant():
    x = np.linspace(-3, 3, 13)
    for a, b in ((1e-4, 2.0), (1e-2, 5.0), (0.1, 2.0)):
        assert np.max(np.abs(lstar_one_p2(Uniform(), a, b, x))) < 1e-6


def test_errors():
    with pytest.raises(ValueError):
        lstar_one_p2(Uniform(), 0.5, 2.0, 0.0)
    with pytest.raises(ValueError):
        lstar_one_p2(Empirical([0.0]), 1e-3, 2.0, 0.0)


def test_symmetry_point_matches_reduced_display():
    # density symmetric about 0, so U_2'(0) = 0 and only three terms remain
    m = TrigPolyDensity(cos=(0.5, 0.2))
    a, b = 1e-2, 2.0
    ab = a * b
    eta = ab / (1 - ab)
    R = (1 - ab) * PI
    u0 = u_value(2, m, 0.0)

    def f(y):
        return np.exp(b * (u0 - u_value(2, m, canonical(-eta * y)))) * m.density(y) / (2 * PI)

    integral = integrate.quad(f, -R, R, epsabs=1e-12, epsrel=1e-12, limit=200)[0]
    reduced = -0.5 * b * u_hess(2, m, 0.0) - 1 / a + integral / (a * (1 - ab))
    assert lstar_one_p2(m, a, b, 0.0) == pytest.approx(reduced, abs=1e-6)


def test_rotation_equivariance():
    m = VonMisesMixture((0.0, 2.5), (6.0, 6.0), (0.65, 0.35))
    rng = np.random.default_rng(17)
    base = lstar_one_p2(m, 1e-3, 3.0, np.array([-1.0, 0.4, 2.0]))
    for phi in rng.uniform(-PI, PI, 10):
        rot = VonMisesMixture(tuple(canonical_array(np.array(m.locations) + phi)), m.concentrations,
                              m.weights)
        v = lstar_one_p2(rot, 1e-3, 3.0, canonical_array(np.array([-1.0, 0.4, 2.0]) + phi))
        assert np.allclose(v, base, atol=1e-8)


@pytest.mark.parametrize("m", [TrigPolyDensity(cos=(0.5, 0.2), sin=(0.1, -0.3)),
                               VonMisesMixture((0.0, 2.5), (6.0, 6.0), (0.65, 0.35))])
def test_quadrature_converged(m):
    x = grid(16)
    a = lstar_one_p2(m, 1e-4, 2.0, x, n_quad=8192)
    b = lstar_one_p2(m, 1e-4, 2.0, x, n_quad=16384)
    assert np.max(np.abs(a - b)) < 1e-7


def test_scaling_table_smooth(trig):
    t = lstar_scaling_study(trig, ALPHAS, (2.0, 4.0), grid_n=128)
    assert len(t.rows) == 8
    assert all(np.isfinite(v) and v >= 0 for *_, v in t.rows)
    assert not t.null
    assert t.slopes[2.0] == pytest.approx(1.0, abs=0.15)
    assert t.slope_ok and t.beta_ok and t.passed
    for *_, ratio, ok in t.beta_growth:
        assert ok and ratio <= 16 * 1.2


def test_scaling_table_uniform():
    t = lstar_scaling_study(Uniform(), ALPHAS, (2.0,), grid_n=32, n_quad=1024)
    assert all(v < 1e-6 for *_, v in t.rows)
    assert t.null and t.passed


def test_scaling_rejects_invalid_pairs(trig):
    with pytest.raises(ValueError):
        lstar_scaling_study(trig, (0.2,), (2.0,))


def test_wrapped_cdf_endpoints():
    for s in (0.25, 1.0, 4.0, 40.0):
        assert wrapped_gaussian_cdf(-PI, s) == pytest.approx(0.0, abs=1e-15)
        assert wrapped_gaussian_cdf(PI, s) == pytest.approx(1.0, abs=1e-12)
    assert wrapped_gaussian_cdf(0.0, 1.0) == pytest.approx(0.5)


def test_ks_null_pvalues():
    rng = np.random.default_rng(0)
    p = [wrapped_gaussian_ks(canonical_array(0.3 + rng.normal(0, 1.0, 400)), 1.0, 0.3).pvalue
         for _ in range(100)]
    assert 0.35 < np.median(p) < 0.65
    assert stats.kstest(p, "uniform").pvalue > 0.001


def test_ks_small_variance_is_plain_gaussian():
    s = 1e-4
    x = np.random.default_rng(1).normal(0.2, np.sqrt(s), 1000)
    w = wrapped_gaussian_ks(x, s, 0.2)
    plain = stats.kstest(x, "norm", args=(0.2, np.sqrt(s)))
    assert w.statistic == pytest.approx(plain.statistic, abs=1e-12)
    z = np.linspace(0.1, 0.3, 101)
    assert np.allclose(wrapped_gaussian_cdf(z, s, 0.2), stats.norm.cdf(z, 0.2, np.sqrt(s)), atol=1e-12)


def test_ks_rejects_wrong_variance():
    x = canonical_array(np.random.default_rng(2).normal(0, 1.0, 20000))
    assert wrapped_gaussian_ks(x, 1.0).pvalue > 0.01
    assert wrapped_gaussian_ks(x, 1.3).pvalue < 1e-6
    with pytest.raises(ValueError):
        wrapped_gaussian_ks(x, 0.0)
