import math

import numpy as np
import pytest
from scipy.integrate import quad

from pmeans.schedules import (LogBeta, PowerAlpha, PowerKappa, Schedule, a_p, a_tilde,
                              contraction_rate, evaluate, min_rate_for_contraction,
                              next_jump_time, validate)


def test_evaluate_examples():
    s = Schedule(PowerAlpha(1, 1, 1), LogBeta(1, 1))
    al, be, ka, bp = evaluate(s, 0.0)
    assert (al, be, ka) == (1.0, 0.0, None)
    assert bp == 1.0
    assert evaluate(s, math.e - 1)[1] == pytest.approx(1.0)
    assert evaluate(Schedule(PowerAlpha(c=2)), 3.0)[0] == 0.0625
    sk = Schedule(kappa=PowerKappa(2.0, 1.0, 0.5))
    assert evaluate(sk, 3.0)[2] == pytest.approx(4.0)
    assert evaluate(Schedule(beta=LogBeta(2.0, 3.0)), 1.0)[3] == pytest.approx(1 / 8)
    with pytest.raises(ValueError):
        evaluate(s, -1.0)


def test_parameter_validation():
    for bad in (lambda: PowerAlpha(C1=0), lambda: PowerAlpha(c=-1), lambda: LogBeta(b=0),
                lambda: LogBeta(r2=0.5), lambda: PowerKappa(k=0)):
        with pytest.raises(ValueError):
            bad()


def test_monotone_profiles():
    s = Schedule(PowerAlpha(2, 1.5, 0.7), LogBeta(0.3, 2), PowerKappa(1, 1, 0.25))
    t = np.linspace(0, 1e4, 2001)
    assert np.all(np.diff(s.alpha(t)) < 0)
    assert np.all(np.diff(s.beta(t)) > 0)
    assert np.all(np.diff(s.kappa(t)) > 0)


def test_next_jump_time_examples():
    const = Schedule(PowerAlpha(c=0.0))
    assert next_jump_time(const, 0.0, 2.0) == pytest.approx(2.0, abs=1e-9)
    assert next_jump_time(Schedule(PowerAlpha(1, 1, 1)), 0.0, 4.0) == pytest.approx(2.0, abs=1e-14)
    with pytest.raises(ValueError):
        next_jump_time(const, 0.0, 0.0)


def test_next_jump_time_reintegrates():
    rng = np.random.default_rng(0)
    for _ in range(50):
        a = PowerAlpha(rng.uniform(0.1, 3), rng.uniform(0.1, 3), rng.uniform(0.1, 3))
        t0, tau = rng.uniform(0, 50), rng.exponential()
        T = next_jump_time(Schedule(a), t0, tau)
        assert T > t0
        back = quad(lambda v: 1.0 / a(v), t0, T, epsabs=1e-13, epsrel=1e-13)[0]
        assert back == pytest.approx(tau, abs=1e-8)


def test_next_jump_time_strictly_increasing():
    s = Schedule(PowerAlpha(1.3, 0.5, 1.5))
    taus = np.linspace(0.01, 5, 50)
    assert np.all(np.diff([next_jump_time(s, 1.0, t) for t in taus]) > 0)
    ts = np.linspace(0, 20, 50)
    assert np.all(np.diff([next_jump_time(s, t, 0.7) for t in ts]) > 0)


def test_closed_form_matches_bisection():
    rng = np.random.default_rng(1)
    worst = 0.0
    for _ in range(1000):
        a = PowerAlpha(rng.uniform(0.1, 3), rng.uniform(0.1, 3), rng.uniform(0.05, 3))
        t0, tau = rng.uniform(0, 20), rng.exponential()
        cf = next_jump_time(a, t0, tau)
        bi = next_jump_time(a, t0, tau, method="bisect")
        worst = max(worst, abs(cf - bi))
    assert worst < 1e-8


def test_exponents():
    assert a_p(1.0, 0.7) == 0.7
    assert a_p(1.5, 0.7) == pytest.approx(0.5)
    assert a_p(1.9, 0.7) == 0.7
    assert a_p(2.0, 0.7) == 0.7 and a_p(3.0) == 1.0
    assert a_tilde(1.0) == 1.0
    assert a_tilde(1.25) == pytest.approx(0.5)
    assert a_tilde(1.5) == 1.0 and a_tilde(2.0) == 1.0
    with pytest.raises(ValueError):
        a_p(0.5)
    with pytest.raises(ValueError):
        a_tilde(0.9)


def test_contraction_floor():
    al = PowerAlpha(1, 1, 1)
    # sup_t ln(1+t)/(1+t) = 1/e
    assert min_rate_for_contraction(al, 1.0, 2.0) == pytest.approx(1 / math.e, rel=1e-5)
    s = Schedule(al, LogBeta(1 / math.e, 1.0))
    assert contraction_rate(s, 2.0) == pytest.approx(1.0, rel=1e-5)


def test_validate_all_pass():
    # the log-grid scan stops at 1e12, so t* must fall before it
    b_est = 2.0
    rep = validate(Schedule(PowerAlpha(1, 1, 1 / a_p(2.0)), LogBeta(2 * b_est, 1.0)), 2.0, b_est)
    assert rep.passed, rep.warnings
    assert rep.b_ok and rep.divergence_ok
    assert rep.t_star is not None and math.isfinite(rep.t_star)
    assert rep.kernel_ok is None
    assert rep.b_recommended == pytest.approx(2.2)
    assert len(rep.lines()) >= 4


def test_validate_too_fast():
    rep = validate(Schedule(PowerAlpha(), LogBeta(0.2, 1.0)), 2.0, 0.4)
    assert not rep.b_ok and not rep.divergence_ok
    assert any("annealing too fast" in w for w in rep.warnings)


def test_validate_near_threshold():
    rep = validate(Schedule(PowerAlpha(), LogBeta(0.42, 1.0)), 2.0, 0.4)
    assert rep.b_ok
    assert any("10%" in w for w in rep.warnings)


def test_validate_kernel_constraint():
    bad = Schedule(PowerAlpha(c=0.5), LogBeta(1.0), PowerKappa(1, 1, 0.25))
    rep = validate(bad, 2.0, 0.1)
    assert rep.kernel_ok is False
    assert any("c >= 2k + 1" in w for w in rep.warnings)
    good = Schedule(PowerAlpha(c=1.5), LogBeta(1.0), PowerKappa(1, 1, 0.25))
    assert validate(good, 2.0, 0.1).kernel_ok


def test_validate_kappa_warmup():
    rep = validate(Schedule(PowerAlpha(c=1.5), LogBeta(1.0), PowerKappa(0.1, 1, 0.25)), 2.0, 0.1)
    assert rep.kappa_start_ok is False
    assert 0.1 * (1 + rep.kappa_warmup) ** 0.25 == pytest.approx(1 / math.pi)


def test_validate_overshoot():
    rep = validate(Schedule(PowerAlpha(5.0, 1, 1), LogBeta(0.5, 1.0)), 2.0, 0.1)
    assert rep.contraction > 1
    assert any("overshoot" in w for w in rep.warnings)


def test_spec_roundtrip():
    s = Schedule(PowerAlpha(2, 3, 1.5), LogBeta(0.7, 2), PowerKappa(1, 2, 0.25))
    assert Schedule.from_spec(s.to_spec()) == s
    assert s.kernel_tuple() == (2.0, 3.0, 1.5, 0.7, 2.0, 1.0, 2.0, 0.25)
    assert Schedule().kernel_tuple()[-3:] == (1.0, 1.0, 0.0)
