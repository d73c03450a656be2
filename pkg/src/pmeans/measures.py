"""Probability measures on the circle.

Densities are taken with respect to the normalized uniform measure
``lambda = dx / 2pi``, so the uniform law has density 1 everywhere. A value
``f`` w.r.t. lambda corresponds to ``f / (2 pi)`` w.r.t. Lebesgue measure.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.special import i0e, ive

from . import _core
from .errors import NoDensityError
from .geometry import PI, TWO_PI, canonical, canonical_array, dist_array, grid

# sampler codes shared with the kernels
UNIFORM, TRIGPOLY, VONMISES, PIECEWISE, EMPIRICAL = range(5)

ENVELOPE_SAFETY = 1.001
SCAN_N = 4096
CDF_N = 1 << 16


@dataclass(frozen=True)
class Holder:
    a: float
    A: float


class CircleMeasure:
    """Base class. Subclasses are immutable after construction."""

    has_density = True
    holder = None

    def density(self, x):
        """Density w.r.t. lambda at ``x`` (scalar or array)."""
        raise NotImplementedError

    def sample(self, rng):
        """One exact draw, consuming ``rng`` exactly as the kernels do."""
        kind, a, b, c, env = self.sampler_spec()
        return _core.draw_target(kind, a, b, c, env, rng)

    def sample_n(self, rng, n):
        kind, a, b, c, env = self.sampler_spec()
        return _core.draw_targets(kind, a, b, c, env, rng, int(n))

    def sampler_spec(self):
        raise NotImplementedError

    def fourier(self, kmax):
        """Fourier coefficients ``(a_k, b_k)``, k = 1..kmax, of the density.

        ``a_k = int nu cos(k y) dlambda`` and likewise for sine.
        """
        raise NotImplementedError

    def density_derivative(self, x):
        raise NotImplementedError

    def _default_holder(self):
        x = grid(SCAN_N)
        A = float(np.max(np.abs(self.density_derivative(x))))
        return Holder(1.0, A * ENVELOPE_SAFETY if A > 0 else 0.0)

    @cached_property
    def _cdf_table(self):
        xs = np.linspace(-PI, PI, CDF_N + 1)
        d = self.density(xs)
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (d[1:] + d[:-1])) / CDF_N))
        return xs, cum / cum[-1]

    def cdf(self, x):
        """``nu((-pi, x])`` for canonical ``x``, from a fine cumulative table."""
        xs, cum = self._cdf_table
        return np.interp(np.asarray(x, dtype=float), xs, cum)

    def mass(self, lo, hi, n=4096):
        """``nu`` of the arc from ``lo`` anticlockwise to ``hi`` (unwrapped, hi >= lo)."""
        z = np.linspace(lo, hi, n + 1)
        f = self.density(canonical_array(z))
        return float(np.trapezoid(f, z) / TWO_PI)


@dataclass(frozen=True, eq=False)
class Uniform(CircleMeasure):
    holder: Holder = field(default_factory=lambda: Holder(1.0, 0.0))

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        return float(out) if out.ndim == 0 else out

    def density_derivative(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    def sampler_spec(self):
        e = np.zeros(0)
        return UNIFORM, e, e, e, 1.0

    def fourier(self, kmax):
        return np.zeros(kmax), np.zeros(kmax)

    def cdf(self, x):
        return (np.asarray(x, dtype=float) + PI) / TWO_PI


@dataclass(frozen=True, eq=False)
class TrigPolyDensity(CircleMeasure):
    """``1 + sum_k c_k cos(k x) + s_k sin(k x)``."""

    cos: tuple = ()
    sin: tuple = ()
    holder: Holder = None

    def __post_init__(self):
        K = max(len(self.cos), len(self.sin))
        c = np.zeros(K)
        s = np.zeros(K)
        c[: len(self.cos)] = self.cos
        s[: len(self.sin)] = self.sin
        object.__setattr__(self, "cos", tuple(float(v) for v in c))
        object.__setattr__(self, "sin", tuple(float(v) for v in s))
        scan = self.density(grid(SCAN_N))
        if scan.min() < -1e-9:
            raise ValueError(f"trigonometric density is negative (min {scan.min():.3g})")
        object.__setattr__(self, "_envelope", float(scan.max()) * ENVELOPE_SAFETY)
        if self.holder is None:
            object.__setattr__(self, "holder", self._default_holder())

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.ones_like(x)
        for k, (c, s) in enumerate(zip(self.cos, self.sin), start=1):
            out = out + c * np.cos(k * x) + s * np.sin(k * x)
        return float(out) if out.ndim == 0 else out

    def density_derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for k, (c, s) in enumerate(zip(self.cos, self.sin), start=1):
            out = out - k * c * np.sin(k * x) + k * s * np.cos(k * x)
        return out

    def sampler_spec(self):
        return (TRIGPOLY, np.array(self.cos), np.array(self.sin), np.zeros(0),
                self._envelope)

    def fourier(self, kmax):
        a = np.zeros(kmax)
        b = np.zeros(kmax)
        K = min(kmax, len(self.cos))
        a[:K] = np.array(self.cos[:K]) / 2.0
        b[:K] = np.array(self.sin[:K]) / 2.0
        return a, b

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = (x + PI) / TWO_PI
        for k, (c, s) in enumerate(zip(self.cos, self.sin), start=1):
            out = out + (c * np.sin(k * x) - s * (np.cos(k * x) - np.cos(k * PI))) / (k * TWO_PI)
        return out


@dataclass(frozen=True, eq=False)
class VonMisesMixture(CircleMeasure):
    locations: tuple = (0.0,)
    concentrations: tuple = (1.0,)
    weights: tuple = (1.0,)
    holder: Holder = None

    def __post_init__(self):
        mu = tuple(canonical(m) for m in self.locations)
        kap = tuple(float(k) for k in self.concentrations)
        w = np.asarray(self.weights, dtype=float)
        if not (len(mu) == len(kap) == len(w)) or len(mu) == 0:
            raise ValueError("locations, concentrations and weights must have equal nonzero length")
        if min(kap) < 0:
            raise ValueError("concentrations must be nonnegative")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        object.__setattr__(self, "locations", mu)
        object.__setattr__(self, "concentrations", kap)
        object.__setattr__(self, "weights", tuple(float(v) for v in w))
        if self.holder is None:
            object.__setattr__(self, "holder", self._default_holder())

    def density(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m, k, w in zip(self.locations, self.concentrations, self.weights):
            out = out + w * np.exp(k * (np.cos(x - m) - 1.0)) / i0e(k)
        return float(out) if out.ndim == 0 else out

    def density_derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m, k, w in zip(self.locations, self.concentrations, self.weights):
            out = out - w * k * np.sin(x - m) * np.exp(k * (np.cos(x - m) - 1.0)) / i0e(k)
        return out

    def sampler_spec(self):
        cum = np.cumsum(self.weights)
        return (VONMISES, cum, np.array(self.locations), np.array(self.concentrations),
                1.0)

    def fourier(self, kmax):
        k = np.arange(1, kmax + 1)
        a = np.zeros(kmax)
        b = np.zeros(kmax)
        for m, kap, w in zip(self.locations, self.concentrations, self.weights):
            rho = ive(k, kap) / i0e(kap) if kap > 0 else np.zeros(kmax)
            a += w * rho * np.cos(k * m)
            b += w * rho * np.sin(k * m)
        return a, b


@dataclass(frozen=True, eq=False)
class PiecewiseLinearDensity(CircleMeasure):
    """Linear interpolation of ``values`` at ``-pi + 2 pi j / M``.

    Values are rescaled to unit mass.
    """

    values: tuple = (1.0,)
    holder: Holder = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("need at least two grid values")
        if np.any(v < 0) or v.sum() <= 0:
            raise ValueError("grid values must be nonnegative with positive mass")
        v = v / v.mean()
        object.__setattr__(self, "values", tuple(float(t) for t in v))
        object.__setattr__(self, "_envelope", float(v.max()) * ENVELOPE_SAFETY)
        if self.holder is None:
            h = TWO_PI / v.size
            A = float(np.max(np.abs(np.roll(v, -1) - v)) / h)
            object.__setattr__(self, "holder", Holder(1.0, A))

    def density(self, x):
        v = np.asarray(self.values)
        M = v.size
        x = np.asarray(x, dtype=float)
        u = (x + PI) / TWO_PI * M
        j = np.floor(u)
        frac = u - j
        j = j.astype(np.int64) % M
        out = v[j] * (1.0 - frac) + v[(j + 1) % M] * frac
        return float(out) if out.ndim == 0 else out

    def density_derivative(self, x):
        v = np.asarray(self.values)
        M = v.size
        u = (np.asarray(x, dtype=float) + PI) / TWO_PI * M
        j = np.floor(u).astype(np.int64) % M
        return (v[(j + 1) % M] - v[j]) * (M / TWO_PI)

    def sampler_spec(self):
        return PIECEWISE, np.array(self.values), np.zeros(0), np.zeros(0), self._envelope

    def fourier(self, kmax):
        v = np.asarray(self.values)
        M = v.size
        h = TWO_PI / M
        k = np.arange(1, kmax + 1)
        nodes = -PI + h * np.arange(M)
        # hat function of half-width h: transform h * sinc^2(k h / 2)
        half = k * h / 2.0
        sinc2 = (np.sin(half) / half) ** 2
        ph = np.outer(k, nodes)
        a = (h / TWO_PI) * sinc2 * (np.cos(ph) @ v)
        b = (h / TWO_PI) * sinc2 * (np.sin(ph) @ v)
        return a, b


class Empirical(CircleMeasure):
    """Weighted atoms. Has no density; samples by categorical draw."""

    has_density = False

    def __init__(self, atoms, weights=None):
        atoms = canonical_array(np.atleast_1d(np.asarray(atoms, dtype=float)))
        if weights is None:
            weights = np.full(atoms.size, 1.0 / atoms.size)
        w = np.asarray(weights, dtype=float)
        if w.shape != atoms.shape or atoms.size == 0:
            raise ValueError("atoms and weights must have equal nonzero length")
        if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be positive and sum to 1")
        if np.unique(atoms).size != atoms.size:
            raise ValueError("atoms must be distinct")
        self.atoms = atoms
        self.weights = w
        self.atoms.flags.writeable = False
        self.weights.flags.writeable = False

    def __repr__(self):
        return f"Empirical(n={self.atoms.size})"

    def density(self, x):
        raise NoDensityError("an empirical measure has no density")

    density_derivative = density

    def sampler_spec(self):
        return EMPIRICAL, np.cumsum(self.weights), self.atoms.copy(), np.zeros(0), 1.0

    def fourier(self, kmax):
        k = np.arange(1, kmax + 1)
        ph = np.outer(k, self.atoms)
        return np.cos(ph) @ self.weights, np.sin(ph) @ self.weights

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        order = np.argsort(self.atoms)
        cum = np.cumsum(self.weights[order])
        idx = np.searchsorted(self.atoms[order], x, side="right")
        return np.where(idx > 0, cum[np.maximum(idx - 1, 0)], 0.0)


def density(m, x):
    return m.density(x)


def sample(m, rng):
    return m.sample(rng)


def check_kappa(kappa):
    if not kappa > 1.0 / PI:
        raise ValueError(f"kernel needs kappa > 1/pi, got {kappa!r}")


def kernel_sample(y, kappa, rng):
    """Draw from ``K_{y,kappa}``: triangular offset on ``[-1/kappa, 1/kappa]``."""
    check_kappa(kappa)
    u1 = rng.random()
    u2 = rng.random()
    return canonical(y + (u1 - u2) / kappa)


def smoothed_density(m, kappa, z, n=2048):
    """Density of ``nu_kappa`` w.r.t. lambda at ``z`` (scalar or array)."""
    check_kappa(kappa)
    z = np.asarray(z, dtype=float)
    if isinstance(m, Empirical):
        d = dist_array(z[..., None], m.atoms)
        out = TWO_PI * kappa * (np.clip(1.0 - kappa * d, 0.0, None) @ m.weights)
    else:
        v = np.linspace(-1.0 / kappa, 1.0 / kappa, n + 1)
        w = np.full(n + 1, 2.0 / (kappa * n))
        w[0] *= 0.5
        w[-1] *= 0.5
        tri = 1.0 - kappa * np.abs(v)
        f = m.density(canonical_array(z[..., None] + v))
        out = kappa * (f * tri) @ w
    return float(out) if out.ndim == 0 else out


def from_spec(spec):
    """Build a measure from its JSON schema dict (see README)."""
    spec = dict(spec)
    kind = spec.pop("type")
    holder = spec.pop("holder", None)
    if holder is not None:
        holder = Holder(float(holder["a"]), float(holder["A"]))
    if kind == "uniform":
        m = Uniform()
    elif kind == "trigpoly":
        m = TrigPolyDensity(cos=tuple(spec.get("cos", ())), sin=tuple(spec.get("sin", ())),
                            holder=holder)
    elif kind == "vonmises_mixture":
        m = VonMisesMixture(tuple(spec["locations"]), tuple(spec["concentrations"]),
                            tuple(spec["weights"]), holder=holder)
    elif kind == "piecewise":
        m = PiecewiseLinearDensity(tuple(spec["values"]), holder=holder)
    elif kind == "empirical":
        if "sample" in spec:
            src = spec["sample"]
            base = from_spec(src["from"])
            atoms = base.sample_n(np.random.Generator(np.random.PCG64(int(src["seed"]))),
                                  int(src["n"]))
            m = Empirical(atoms)
        else:
            m = Empirical(spec["atoms"], spec.get("weights"))
    else:
        raise ValueError(f"unknown measure type {kind!r}")
    if holder is not None and kind in ("uniform",):
        object.__setattr__(m, "holder", holder)
    return m
