import numpy as np
import pytest
from scipy import stats

from pmeans.errors import NoDensityError
from pmeans.geometry import PI, TWO_PI, canonical_array, dist_array
from pmeans.measures import (Empirical, Holder, PiecewiseLinearDensity, TrigPolyDensity, Uniform,
                             VonMisesMixture, density, from_spec, kernel_sample, sample,
                             smoothed_density)


def rng(seed=0):
    return np.random.default_rng(seed)


def density_variants(bimodal, trig, piecewise):
    return {"uniform": Uniform(), "trig": trig, "vonmises": bimodal, "piecewise": piecewise}


def test_density_examples():
    assert density(Uniform(), 0.3) == 1.0
    assert density(TrigPolyDensity(cos=(0.5,)), 0.0) == pytest.approx(1.5)
    with pytest.raises(NoDensityError):
        density(Empirical([0.0]), 0.0)


def test_trigpoly_rejects_negative():
    with pytest.raises(ValueError):
        TrigPolyDensity(cos=(1.2,))


def test_empirical_validation():
    with pytest.raises(ValueError):
        Empirical([0.0, 1.0], [0.5, 0.6])
    with pytest.raises(ValueError):
        Empirical([0.0, 0.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        Empirical([0.0, 1.0], [1.0, 0.0])


def test_vonmises_validation():
    with pytest.raises(ValueError):
        VonMisesMixture((0.0, 1.0), (1.0, 1.0), (0.5, 0.6))


def test_normalization(bimodal, trig, piecewise, trimodal):
    x = np.linspace(-PI, PI, 200_001)
    for m in (Uniform(), bimodal, trig, piecewise, trimodal):
        d = m.density(x)
        assert d.min() >= 0.0
        assert np.trapezoid(d, x) / TWO_PI == pytest.approx(1.0, abs=1e-8)


def test_declared_holder_holds(bimodal, trig, piecewise):
    r = rng(3)
    for m in (bimodal, trig, piecewise):
        h = m.holder
        x, y = r.uniform(-PI, PI, (2, 10_000))
        lhs = np.abs(m.density(x) - m.density(y))
        assert np.all(lhs <= h.A * dist_array(x, y) ** h.a + 1e-12)


def test_holder_override():
    m = TrigPolyDensity(cos=(0.5,), holder=Holder(0.5, 3.0))
    assert m.holder == Holder(0.5, 3.0)


def test_sample_examples():
    u = Uniform().sample_n(rng(1), 100_000)
    assert abs(np.cos(u).mean()) < 0.01
    assert np.all(Empirical([0.0]).sample_n(rng(2), 1000) == 0.0)
    vm = VonMisesMixture((1.0,), (4.0,), (1.0,))
    s = vm.sample_n(rng(3), 100_000)
    assert np.angle(np.exp(1j * s).mean()) == pytest.approx(1.0, abs=0.01)


def test_single_sample_consumes_like_batch(bimodal):
    a = [sample(bimodal, g) for g in [rng(5)] for _ in range(50)]
    b = bimodal.sample_n(rng(5), 50)
    assert np.array_equal(np.array(a), b)


@pytest.mark.parametrize("name", ["uniform", "trig", "vonmises", "piecewise"])
def test_sampler_matches_density_ks(name, bimodal, trig, piecewise):
    m = density_variants(bimodal, trig, piecewise)[name]
    n = 100_000
    s = m.sample_n(rng(7), n)
    ks = stats.kstest(s, m.cdf)
    assert ks.statistic < 1.63 / np.sqrt(n)


def test_empirical_sampler_frequencies():
    m = Empirical([-1.0, 0.5, 2.0], [0.2, 0.5, 0.3])
    s = m.sample_n(rng(8), 100_000)
    freq = [(s == a).mean() for a in m.atoms]
    assert np.allclose(freq, m.weights, atol=0.006)


def test_kernel_sample_examples():
    r = rng(9)
    v = np.array([kernel_sample(0.0, 10.0, r) for _ in range(100_000)])
    assert abs(v.mean()) < 0.002
    assert v.var() == pytest.approx(1 / 600, rel=0.1)
    assert np.all(np.abs(v) <= 0.1)


def test_kernel_rejects_small_kappa():
    with pytest.raises(ValueError):
        kernel_sample(0.0, 1.0 / PI, rng())
    with pytest.raises(ValueError):
        smoothed_density(Uniform(), 0.2, 0.0)


def test_smoothed_density_examples(bimodal):
    assert smoothed_density(Uniform(), 3.0, 0.7) == pytest.approx(1.0, abs=1e-12)
    assert smoothed_density(Empirical([0.0]), 10.0, 0.0) == pytest.approx(TWO_PI * 10)
    z = np.linspace(-PI, PI, 512, endpoint=False)
    for m in (bimodal, Empirical([0.0, 1.0])):
        assert smoothed_density(m, 10.0, z).max() <= TWO_PI * 10 + 1e-9


@pytest.mark.parametrize("kappa", [0.5, 2.0, 10.0])
def test_smoothed_density_normalized(bimodal, kappa):
    # atomic case: triangles with off-grid kinks need a fine outer grid
    for m, n in ((bimodal, 8193), (Empirical([0.0, 1.0, -2.0]), (1 << 20) + 1)):
        z = np.linspace(-PI, PI, n)
        f = smoothed_density(m, kappa, z)
        assert np.trapezoid(f, z) / TWO_PI == pytest.approx(1.0, abs=1e-6)


def test_smoothed_density_lipschitz(bimodal):
    r = rng(10)
    kappa = 4.0
    for m in (bimodal, Empirical([0.0, 2.0], [0.3, 0.7])):
        x, y = r.uniform(-PI, PI, (2, 2000))
        lhs = np.abs(smoothed_density(m, kappa, x) - smoothed_density(m, kappa, y))
        assert np.all(lhs <= TWO_PI * kappa ** 2 * dist_array(x, y) + 1e-9)


def test_piecewise_interpolates_and_normalizes():
    m = PiecewiseLinearDensity((1.0, 3.0))
    # values rescaled to mean 1
    assert m.density(-PI) == pytest.approx(0.5)
    assert m.density(0.0) == pytest.approx(1.5)


def test_from_spec_variants():
    assert isinstance(from_spec({"type": "uniform"}), Uniform)
    m = from_spec({"type": "trigpoly", "cos": [0.5]})
    assert m.density(0.0) == pytest.approx(1.5)
    vm = from_spec({"type": "vonmises_mixture", "locations": [0.0], "concentrations": [2.0],
                    "weights": [1.0]})
    assert vm.density(0.0) > vm.density(PI)
    e = from_spec({"type": "empirical", "sample": {"from": {"type": "uniform"}, "n": 20, "seed": 4}})
    e2 = from_spec({"type": "empirical", "sample": {"from": {"type": "uniform"}, "n": 20, "seed": 4}})
    assert e.atoms.size == 20 and np.array_equal(e.atoms, e2.atoms)
    with pytest.raises(ValueError):
        from_spec({"type": "cauchy"})


def test_fourier_coefficients(bimodal, trig, piecewise):
    x = np.linspace(-PI, PI, 1 << 14, endpoint=False)
    for m in (bimodal, trig, piecewise):
        a, b = m.fourier(6)
        d = m.density(x)
        for k in range(1, 7):
            assert a[k - 1] == pytest.approx(np.mean(d * np.cos(k * x)), abs=1e-7)
            assert b[k - 1] == pytest.approx(np.mean(d * np.sin(k * x)), abs=1e-7)


def test_mass_and_cdf(bimodal):
    assert bimodal.mass(-PI, PI) == pytest.approx(1.0, abs=1e-9)
    assert bimodal.cdf(PI) == pytest.approx(1.0)
    assert float(bimodal.cdf(0.0)) == pytest.approx(bimodal.mass(-PI, 0.0), abs=1e-7)
    e = Empirical([0.0, 1.0], [0.25, 0.75])
    assert e.cdf(0.5) == pytest.approx(0.25)
    assert canonical_array([e.atoms[0]])[0] == 0.0
