"""Annealing schedules and the speeded-up Poisson clock.

``alpha_t = C1 (r1 + t)^-c`` (jump-rate scale), ``beta_t = ln(r2 + t) / b``
(inverse temperature), and optionally ``kappa_t = C2 (r3 + t)^k`` (kernel
concentration of the smoothed algorithm).
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from .geometry import PI

KAPPA_MIN = 1.0 / PI
SCAN_T_MAX = 1e12
SCAN_POINTS = 4000
RECOMMEND_MARGIN = 1.1


@dataclass(frozen=True)
class PowerAlpha:
    C1: float = 1.0
    r1: float = 1.0
    c: float = 1.0

    def __post_init__(self):
        if not (self.C1 > 0 and self.r1 > 0 and self.c >= 0):
            raise ValueError(f"need C1 > 0, r1 > 0, c >= 0: {self}")

    def __call__(self, t):
        return self.C1 * np.power(self.r1 + np.asarray(t, dtype=float), -self.c)


@dataclass(frozen=True)
class LogBeta:
    b: float = 1.0
    r2: float = 1.0

    def __post_init__(self):
        if not (self.b > 0 and self.r2 >= 1):
            raise ValueError(f"need b > 0, r2 >= 1: {self}")

    def __call__(self, t):
        return np.log(self.r2 + np.asarray(t, dtype=float)) / self.b

    def derivative(self, t):
        return 1.0 / (self.b * (self.r2 + np.asarray(t, dtype=float)))


@dataclass(frozen=True)
class PowerKappa:
    C2: float = 1.0
    r3: float = 1.0
    k: float = 0.25

    def __post_init__(self):
        if not (self.C2 > 0 and self.r3 > 0 and self.k > 0):
            raise ValueError(f"need C2 > 0, r3 > 0, k > 0: {self}")

    def __call__(self, t):
        return self.C2 * np.power(self.r3 + np.asarray(t, dtype=float), self.k)


@dataclass(frozen=True)
class Schedule:
    alpha: PowerAlpha = field(default_factory=PowerAlpha)
    beta: LogBeta = field(default_factory=LogBeta)
    kappa: PowerKappa = None

    def kernel_tuple(self):
        """Flat ``(C1, r1, c, b, r2, C2, r3, k)`` consumed by the trajectory kernels."""
        a, be, ka = self.alpha, self.beta, self.kappa
        C2, r3, k = (ka.C2, ka.r3, ka.k) if ka is not None else (1.0, 1.0, 0.0)
        return (float(a.C1), float(a.r1), float(a.c), float(be.b), float(be.r2),
                float(C2), float(r3), float(k))

    @classmethod
    def from_spec(cls, spec):
        kap = spec.get("kappa")
        return cls(PowerAlpha(**spec.get("alpha", {})), LogBeta(**spec.get("beta", {})),
                   PowerKappa(**kap) if kap is not None else None)

    def to_spec(self):
        k = self.kappa
        return {"alpha": {"C1": self.alpha.C1, "r1": self.alpha.r1, "c": self.alpha.c},
                "beta": {"b": self.beta.b, "r2": self.beta.r2},
                "kappa": None if k is None else {"C2": k.C2, "r3": k.r3, "k": k.k}}


def evaluate(s, t):
    """``(alpha, beta, kappa, beta_prime)`` at time ``t``; ``kappa`` is None without a kernel."""
    if not t >= 0:
        raise ValueError("t must be >= 0")
    kap = float(s.kappa(t)) if s.kappa is not None else None
    return float(s.alpha(t)), float(s.beta(t)), kap, float(s.beta.derivative(t))


def _bisect_jump_time(alpha, t_now, tau, tol=1e-10):
    # alpha is nonincreasing, so 1/alpha >= 1/alpha(t_now) and T - t_now <= tau alpha(t_now)
    def excess(T):
        return quad(lambda v: 1.0 / alpha(v), t_now, T, epsabs=1e-13, epsrel=1e-13, limit=200)[0] - tau

    lo, hi = t_now, t_now + tau * float(alpha(t_now))
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def next_jump_time(s, t_now, tau, method="auto"):
    """The ``T > t_now`` with ``int_{t_now}^T ds / alpha_s = tau``.

    Closed form for the power family; ``method="bisect"`` (and the
    constant-rate case ``c = 0``) integrate numerically and bisect.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    a = s.alpha if isinstance(s, Schedule) else s
    if method == "bisect" or a.c == 0:
        return _bisect_jump_time(a, float(t_now), float(tau))
    cp1 = a.c + 1.0
    u = (a.r1 + t_now) ** cp1 + cp1 * a.C1 * tau
    return u ** (1.0 / cp1) - a.r1


def a_p(p, a=1.0):
    """Exponent ``a(p)``: ``a`` for ``p = 1`` or ``p >= 2``, ``min(a, p - 1)`` in between."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if 1.0 < p < 2.0:
        return min(a, p - 1.0)
    return a


def a_tilde(p):
    """Exponent ``2(p - 1)`` for ``p`` in ``(1, 3/2)``, else 1."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return 2.0 * (p - 1.0) if 1.0 < p < 1.5 else 1.0


def contraction_rate(s, p, t=None):
    """``sup_t (p/2) alpha_t beta_t``: the fraction of ``d^(p-1)`` covered by one jump.

    Above 1 a jump overshoots its target.
    """
    ts = _scan_times() if t is None else np.asarray(t, dtype=float)
    return float(np.max(0.5 * p * s.alpha(ts) * s.beta(ts)))


def min_rate_for_contraction(alpha, r2, p):
    """Smallest ``b`` with ``(p/2) alpha_t ln(r2 + t) / b <= 1`` for all scanned ``t``."""
    ts = _scan_times()
    return float(np.max(0.5 * p * alpha(ts) * np.log(r2 + ts)))


def _scan_times():
    return np.concatenate(([0.0], np.logspace(-6, math.log10(SCAN_T_MAX), SCAN_POINTS)))


@dataclass
class ValidationReport:
    b: float
    b_estimate: float
    b_recommended: float
    b_ok: bool
    t_star: float = None
    divergence_ok: bool = False
    kernel_ok: bool = None
    kappa_start_ok: bool = None
    kappa_warmup: float = None
    contraction: float = None
    warnings: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.warnings

    def lines(self):
        out = [
            f"(i)   b = {self.b:.6g} vs estimated critical depth {self.b_estimate:.6g}: "
            + ("ok" if self.b_ok else "FAIL") + f" (recommended b >= {self.b_recommended:.6g})",
        ]
        if self.kernel_ok is not None:
            out.append("(ii)  kernel exponents k > 0 and c >= 2k + 1: "
                       + ("ok" if self.kernel_ok else "FAIL"))
        else:
            out.append("(ii)  no kernel schedule")
        ts = "never on [0, 1e12]" if self.t_star is None else f"{self.t_star:.6g}"
        out.append(f"(iii) dominance of exp(-b_est beta_t) holds from t* = {ts}")
        out.append("(iv)  int (1 v beta)^-3 exp(-b_est beta) dt diverges: "
                   + ("yes" if self.divergence_ok else "no"))
        out.append(f"      sup (p/2) alpha beta = {self.contraction:.6g}")
        out.extend("warning: " + w for w in self.warnings)
        return out


def validate(s, p, b_estimate, a=1.0):
    """Check a schedule against the sufficient conditions for convergence.

    Never raises on a bad schedule; problems are listed in ``warnings``.
    """
    b = s.beta.b
    rep = ValidationReport(b=b, b_estimate=b_estimate,
                           b_recommended=RECOMMEND_MARGIN * b_estimate, b_ok=b > b_estimate)
    if not rep.b_ok:
        rep.warnings.append(f"annealing too fast: b = {b:.6g} <= estimated depth {b_estimate:.6g}")
    elif b < rep.b_recommended:
        rep.warnings.append("b within 10% of the estimated depth; grid depth may underestimate it")

    ts = _scan_times()[1:]
    al, be = s.alpha(ts), s.beta(ts)
    lhs = np.maximum.reduce([al ** a_p(p, a) * be ** 4, al ** a_tilde(p) * be ** 3,
                             np.abs(s.beta.derivative(ts))])
    ok = lhs < np.exp(-b_estimate * be)
    bad = np.nonzero(~ok)[0]
    if bad.size == 0:
        rep.t_star = float(ts[0])
    elif bad[-1] + 1 < ts.size:
        rep.t_star = float(ts[bad[-1] + 1])
    else:
        rep.warnings.append("rate conditions fail up to t = 1e12")
    # (1 v beta)^-3 exp(-b_est beta) ~ (ln t)^-3 t^(-b_est/b): divergent iff b > b_est
    rep.divergence_ok = b > b_estimate
    if not rep.divergence_ok:
        rep.warnings.append("time integral of the escape rate converges")

    if s.kappa is not None:
        k, c = s.kappa.k, s.alpha.c
        rep.kernel_ok = k > 0 and c >= 2 * k + 1
        if not rep.kernel_ok:
            rep.warnings.append(f"kernel schedule needs c >= 2k + 1 (c = {c:.6g}, k = {k:.6g})")
        kap0 = float(s.kappa(0.0))
        rep.kappa_start_ok = kap0 > KAPPA_MIN
        if not rep.kappa_start_ok:
            # first time kappa exceeds 1/pi
            rep.kappa_warmup = float((KAPPA_MIN / s.kappa.C2) ** (1.0 / k) - s.kappa.r3)
            rep.warnings.append(f"kappa_0 = {kap0:.6g} <= 1/pi; kernel undefined before "
                                f"t = {rep.kappa_warmup:.6g}")

    rep.contraction = contraction_rate(s, p)
    if rep.contraction > 1.0:
        rep.warnings.append(f"jumps overshoot their targets: sup (p/2) alpha beta = "
                            f"{rep.contraction:.6g} > 1")
    return rep
