"""The compiled kernels and the pure-Python fallback must agree bit for bit."""

import numpy as np
import pytest

from pmeans import _fallback
from pmeans.measures import Empirical, PiecewiseLinearDensity, TrigPolyDensity, Uniform, VonMisesMixture
from pmeans.schedules import LogBeta, PowerAlpha, PowerKappa, Schedule
from pmeans.simulator import trajectory_streams

kernels = pytest.importorskip("pmeans._kernels")

MEASURES = {
    "uniform": Uniform(),
    "trig": TrigPolyDensity(cos=(0.5, 0.2), sin=(0.1, -0.3)),
    "vm": VonMisesMixture((0.0, 2.5), (6.0, 6.0), (0.65, 0.35)),
    "piecewise": PiecewiseLinearDensity(tuple(1 + 0.5 * np.sin(np.arange(16)))),
    "empirical": Empirical([-2.0, 0.1, 0.4, 1.5, 3.0], [0.1, 0.3, 0.2, 0.25, 0.15]),
}
SCHED = Schedule(PowerAlpha(1.0, 1.0, 1.5), LogBeta(0.5, 2.0), PowerKappa(1.0, 1.0, 0.25)).kernel_tuple()
CK = (0.5, 3.0, 3.1, 12.0)


@pytest.mark.parametrize("name", sorted(MEASURES))
def test_targets_identical(name):
    spec = MEASURES[name].sampler_spec()
    a = kernels.draw_targets(*spec, trajectory_streams(1, 0)[0], 2000)
    b = _fallback.draw_targets(*spec, trajectory_streams(1, 0)[0], 2000)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("name", sorted(MEASURES))
@pytest.mark.parametrize("use_kernel", [False, True])
@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_jump_identical(name, use_kernel, p):
    spec = MEASURES[name].sampler_spec()
    for i in range(3):
        a = kernels.simulate_jump(*spec, p, SCHED, use_kernel, 12.0, CK, 0.3, *trajectory_streams(9, i))
        b = _fallback.simulate_jump(*spec, p, SCHED, use_kernel, 12.0, CK, 0.3, *trajectory_streams(9, i))
        assert np.array_equal(a[0], b[0])
        assert a[1] == b[1] and a[2] == b[2]


@pytest.mark.parametrize("name", sorted(MEASURES))
@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_xtilde_identical(name, p):
    spec = MEASURES[name].sampler_spec()
    a = kernels.simulate_xtilde(*spec, p, SCHED, 3.0, (0.5, 3.0), -1.0, 1e-2, trajectory_streams(4, 0)[0])
    b = _fallback.simulate_xtilde(*spec, p, SCHED, 3.0, (0.5, 3.0), -1.0, 1e-2, trajectory_streams(4, 0)[0])
    assert np.array_equal(a[0], b[0])
    assert a[1] == b[1] and a[2] == b[2]


def test_errors_match():
    spec = MEASURES["vm"].sampler_spec()
    bad = Schedule(PowerAlpha(0.01, 1, 1), LogBeta(1.0), PowerKappa(0.1, 1, 0.25)).kernel_tuple()
    for mod in (kernels, _fallback):
        with pytest.raises(ValueError):
            mod.simulate_jump(*spec, 2.0, bad, True, 1.0, (1.0,), 0.0, *trajectory_streams(0, 0))


def test_backend_switch(monkeypatch):
    import importlib

    import pmeans._core as core
    monkeypatch.setenv("PMEANS_PURE", "1")
    try:
        assert importlib.reload(core).BACKEND == "python"
    finally:
        monkeypatch.delenv("PMEANS_PURE")
        assert importlib.reload(core).BACKEND == "compiled"
