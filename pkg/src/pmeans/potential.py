"""The p-mean cost ``U_p(x) = int d(x, y)^p nu(dy)`` and its landscape.

Values come from a chart-aligned trapezoid rule centred on ``x`` with
Euler-Maclaurin corrections for the two non-smooth points of the integrand
(the kink or power singularity at ``y = x`` and the cut at the antipode).
Derivatives use Gauss-Jacobi rules whose weight absorbs the factor
``z^(p-1)`` or ``z^(p-2)``, so the integrable singularity at ``z = 0`` is
integrated exactly rather than excluded.
"""

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, zeta

from ._search import golden_section
from .errors import NoDensityError, SingularPointError
from .geometry import PI, TWO_PI, canonical, canonical_array, grid, signed_gap_array
from .measures import Empirical

DEFAULT_N = 4096
GAUSS_NODES = 384
DEGENERATE_RTOL = 1e-10
_CHUNK = 1 << 22


def _check_p(p):
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p!r}")


def _scalar_or_array(out, x):
    return float(out) if np.ndim(x) == 0 else out


def _atom_gaps(m, x):
    return signed_gap_array(np.asarray(x, dtype=float)[..., None], m.atoms)


def _correction(p, h, nu_x, nu_anti):
    # trapezoid minus integral, per unit lambda: h^2/12 jump of f' at the cut,
    # plus the generalized Euler-Maclaurin term of |z|^p at the origin
    return (-(h * h / 12.0) * 2.0 * p * PI ** (p - 1.0) * nu_anti
            - 2.0 * zeta(-p) * h ** (p + 1.0) * nu_x) / TWO_PI


def u_value(p, m, x, n=DEFAULT_N):
    """``U_p(x)``; exact for :class:`Empirical`, quadrature with ``n`` panels otherwise."""
    _check_p(p)
    x = np.asarray(x, dtype=float)
    if isinstance(m, Empirical):
        out = np.abs(_atom_gaps(m, x)) ** p @ m.weights
        return _scalar_or_array(out, x)
    if n % 2:
        raise ValueError("n must be even")
    h = TWO_PI / n
    z = -PI + h * np.arange(n + 1)
    w = np.full(n + 1, h / TWO_PI)
    w[0] *= 0.5
    w[-1] *= 0.5
    kern = w * np.abs(z) ** p
    flat = np.atleast_1d(x).ravel()
    out = np.empty(flat.size)
    step = max(1, _CHUNK // (n + 1))
    for s in range(0, flat.size, step):
        xs = flat[s:s + step]
        out[s:s + step] = m.density(canonical_array(xs[:, None] + z)) @ kern
    nu_x = m.density(canonical_array(flat))
    nu_anti = m.density(canonical_array(flat + PI))
    out += _correction(p, h, nu_x, nu_anti)
    return _scalar_or_array(out.reshape(x.shape), x)


def u_grid(p, m, n=DEFAULT_N):
    """``U_p`` on :func:`geometry.grid` ``(n)``.

    Uses the same quadrature as :func:`u_value`, evaluated for all grid
    points at once as a circular convolution.
    """
    _check_p(p)
    theta = grid(n)
    if isinstance(m, Empirical):
        return theta, np.asarray(u_value(p, m, theta))
    if n % 2:
        raise ValueError("n must be even")
    h = TWO_PI / n
    off = h * np.arange(n)
    kern = np.minimum(off, TWO_PI - off) ** p * (h / TWO_PI)
    nu = m.density(theta)
    vals = np.fft.irfft(np.fft.rfft(nu) * np.fft.rfft(kern), n)
    vals += _correction(p, h, nu, np.roll(nu, -(n // 2)))
    return theta, vals


@lru_cache(maxsize=32)
def _jacobi(beta_exp, nq):
    # int_0^pi z^beta_exp g(z) dz = sum w_i g(z_i)
    t, w = roots_jacobi(nq, 0.0, beta_exp)
    return PI * (1.0 + t) / 2.0, w * (PI / 2.0) ** (beta_exp + 1.0)


def _half_integral(m, x, beta_exp, sign, nq):
    """``int_0^pi z^beta_exp (nu(x+z) + sign nu(x-z)) dz`` for each ``x``."""
    z, w = _jacobi(float(beta_exp), nq)
    xs = np.atleast_1d(x).ravel()[:, None]
    f = m.density(canonical_array(xs + z)) + sign * m.density(canonical_array(xs - z))
    return f @ w


def u_grad(p, m, x, nq=GAUSS_NODES):
    """``U_p'(x)``.

    For atomic ``nu`` the derivative does not exist at an atom's antipode
    (any ``p``) or, for ``p = 1``, at an atom; both raise
    :class:`SingularPointError`.
    """
    _check_p(p)
    x = np.asarray(x, dtype=float)
    if isinstance(m, Empirical):
        g = _atom_gaps(m, x)
        if np.any(g == PI) or (p == 1.0 and np.any(g == 0.0)):
            raise SingularPointError(f"U_{p}' is undefined at an atom or its antipode")
        out = -p * (np.sign(g) * np.abs(g) ** (p - 1.0)) @ m.weights
        return _scalar_or_array(out, x)
    # U' = -p/2pi int_0^pi z^(p-1) (nu(x+z) - nu(x-z)) dz
    out = -p / TWO_PI * _half_integral(m, x, p - 1.0, -1.0, nq)
    return _scalar_or_array(out.reshape(x.shape), x)


def u_hess(p, m, x, nq=GAUSS_NODES):
    """``U_p''(x)`` for a continuous density.

    ``p(p-1) int d^(p-2) dnu - p pi^(p-2) nu(x')``, and
    ``(nu(x) - nu(x')) / pi`` for ``p = 1``.
    """
    _check_p(p)
    if isinstance(m, Empirical):
        raise NoDensityError("U_p'' of an atomic measure exists only as a distribution")
    x = np.asarray(x, dtype=float)
    flat = np.atleast_1d(x).ravel()
    nu_anti = m.density(canonical_array(flat + PI))
    if p == 1.0:
        out = (m.density(flat) - nu_anti) / PI
    else:
        integral = _half_integral(m, flat, p - 2.0, 1.0, nq) / TWO_PI
        out = p * (p - 1.0) * integral - p * PI ** (p - 2.0) * nu_anti
    return _scalar_or_array(out.reshape(x.shape), x)


class U2Spectral:
    """Fourier-series evaluator of ``U_2`` and its derivatives for a density.

    ``d^2`` as a function of the gap has the series
    ``pi^2/3 + sum 4 (-1)^k cos(k z) / k^2``, so ``U_2`` only needs the
    density's Fourier coefficients. Vectorized and accurate to rounding
    once the coefficients have decayed.
    """

    def __init__(self, m, kmax=4096, cutoff=1e-17):
        if isinstance(m, Empirical):
            raise NoDensityError("spectral U_2 needs a density")
        a, b = m.fourier(kmax)
        k = np.arange(1, kmax + 1, dtype=float)
        ca = 4.0 * (-1.0) ** k / k ** 2 * a
        cb = 4.0 * (-1.0) ** k / k ** 2 * b
        big = np.nonzero(np.maximum(np.abs(ca), np.abs(cb)) > cutoff)[0]
        K = int(big[-1]) + 1 if big.size else 0
        self.k, self.ca, self.cb = k[:K], ca[:K], cb[:K]

    def _parts(self, x):
        ph = np.multiply.outer(np.asarray(x, dtype=float), self.k)
        return np.cos(ph), np.sin(ph)

    def value(self, x):
        c, s = self._parts(x)
        return PI * PI / 3.0 + c @ self.ca + s @ self.cb

    def grad(self, x):
        c, s = self._parts(x)
        return (c @ (self.k * self.cb)) - (s @ (self.k * self.ca))

    def hess(self, x):
        c, s = self._parts(x)
        k2 = self.k ** 2
        return -(c @ (k2 * self.ca)) - (s @ (k2 * self.cb))


@dataclass(frozen=True)
class Minima:
    """Global minimizers ``(x, U)``; ``degenerate`` flags a constant potential."""

    points: tuple = ()
    degenerate: bool = False

    def __iter__(self):
        return iter(self.points)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, i):
        return self.points[i]

    @property
    def locations(self):
        return [x for x, _ in self.points]


@dataclass(frozen=True, eq=False)
class PotentialGrid:
    """``U_p`` sampled on the midpoint grid of size ``n``."""

    p: float
    theta: np.ndarray
    values: np.ndarray
    minima: Minima = field(default_factory=Minima)

    @property
    def n(self):
        return self.values.size

    @property
    def spacing(self):
        return TWO_PI / self.n

    @property
    def lipschitz(self):
        """Largest secant slope between neighbouring grid points."""
        return float(np.max(np.abs(np.diff(self.values, append=self.values[0]))) / self.spacing)

    @classmethod
    def from_values(cls, values, p=float("nan")):
        """Wrap hand-built grid values; minima are the grid points at the global minimum."""
        v = np.array(values, dtype=float)
        theta = grid(v.size)
        v.flags.writeable = False
        g = cls(p, theta, v)
        object.__setattr__(g, "minima", _grid_only_minima(g))
        return g


def _is_flat(v):
    return float(v.max() - v.min()) <= DEGENERATE_RTOL * (1.0 + abs(float(v.max())))


def _local_min_indices(v):
    prev, nxt = np.roll(v, 1), np.roll(v, -1)
    return np.nonzero((v < prev) & (v <= nxt))[0]


def _grid_only_minima(g):
    v = g.values
    if _is_flat(v):
        return Minima((), True)
    lim = v.min() + g.lipschitz * g.spacing
    idx = [i for i in _local_min_indices(v) if v[i] <= lim]
    return Minima(tuple((float(g.theta[i]), float(v[i])) for i in idx), False)


def _refine(p, m, g, tol, n_quad):
    v, h = g.values, g.spacing
    if _is_flat(v):
        return Minima((), True)

    def f(x):
        return u_value(p, m, canonical(x), n=n_quad)

    cands = []
    for i in _local_min_indices(v):
        x, fx = golden_section(f, g.theta[i] - h, g.theta[i] + h, tol)
        cands.append((canonical(x), float(fx)))
    best = min(fx for _, fx in cands)
    lim = best + g.lipschitz * h + tol
    kept = []
    for x, fx in sorted(cands, key=lambda c: c[1]):
        if fx <= lim and all(abs(canonical(x - y)) > h for y, _ in kept):
            kept.append((x, fx))
    kept.sort()
    return Minima(tuple(kept), False)


def build_grid(p, m, n=DEFAULT_N, tol=1e-10, n_quad=DEFAULT_N):
    """Sample ``U_p`` on an ``n``-grid and locate its global minima."""
    _check_p(p)
    theta, vals = u_grid(p, m, n) if n_quad == n else (grid(n), u_value(p, m, grid(n), n_quad))
    vals = np.asarray(vals, dtype=float)
    vals.flags.writeable = False
    g = PotentialGrid(float(p), theta, vals)
    object.__setattr__(g, "minima", _refine(p, m, g, tol, n_quad))
    return g


def minima(p, m, n=DEFAULT_N, tol=1e-10):
    """Global minimizers of ``U_p``: grid scan, golden-section refinement, filter.

    A constant potential returns an empty :class:`Minima` with
    ``degenerate=True``.
    """
    if n < 64:
        raise ValueError("n must be at least 64")
    return build_grid(p, m, n, tol).minima


def _elevation_row(v, i):
    """Elevations from grid index ``i`` to every index (absolute order)."""
    r = np.roll(v, -i)
    ccw = np.maximum.accumulate(r)
    suffix = np.maximum.accumulate(r[::-1])[::-1]
    cw = np.maximum(r[0], suffix)
    cw[0] = r[0]
    return np.roll(np.minimum(ccw, cw), i)


def elevation(g, i, j):
    """Minimal elevation between grid points ``i`` and ``j``.

    The two arcs joining them are the only simple paths on the circle, so
    the minimum over paths of the running maximum is the smaller of the two
    arc maxima.
    """
    n = g.n
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError("grid index out of range")
    return float(_elevation_row(g.values, i)[j])


def critical_depth(g):
    """``(b, b_alt, b_prime)`` for the grid potential.

    ``b`` is the largest well depth over all pairs, ``b_alt`` the same
    quantity seen from one global minimizer, and ``b_prime`` its minimum
    over all global minimizers.
    """
    v = g.values
    vmin = float(v.min())
    b = -math.inf
    for i in range(g.n):
        e = _elevation_row(v, i)
        b = max(b, float(np.max(e - v)) - float(v[i]) + vmin)
    i0 = int(np.argmin(v))
    b_alt = float(np.max(_elevation_row(v, i0) - v))
    if g.minima.degenerate or not len(g.minima):
        starts = [i0]
    else:
        starts = sorted({int(np.argmin(np.abs(canonical_array(g.theta - x)))) for x in g.minima.locations})
    b_prime = min(float(np.max(_elevation_row(v, i) - v)) - float(v[i]) + vmin for i in starts)
    return max(b, 0.0), max(b_alt, 0.0), max(b_prime, 0.0)
