"""Gibbs measures ``mu_beta(dx) = exp(-beta U(x)) / Z_beta lambda(dx)`` on a grid.

All grid densities are w.r.t. lambda on the midpoint grid, for which the
periodic trapezoid rule is the plain mean.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLimitError
from .geometry import PI, canonical_array, dist_array, grid
from .measures import Empirical


@dataclass(frozen=True, eq=False)
class GibbsGrid:
    beta: float
    theta: np.ndarray
    density: np.ndarray
    log_Z: float

    @property
    def Z(self):
        return float(np.exp(self.log_Z))


def gibbs_build(g, beta):
    """Normalized Gibbs density of the grid potential ``g`` at inverse temperature ``beta``."""
    if not beta >= 0.0:
        raise ValueError(f"beta must be >= 0, got {beta!r}")
    v = g.values
    vmin = float(v.min())
    e = np.exp(-beta * (v - vmin))
    mean = float(e.mean())
    dens = e / mean
    dens.flags.writeable = False
    return GibbsGrid(float(beta), g.theta, dens, float(np.log(mean) - beta * vmin))


def coarsen(density, bins):
    """Average a grid density onto ``bins`` equal bins (grid size must be a multiple)."""
    d = np.asarray(density, dtype=float)
    if d.size % bins:
        raise ValueError(f"grid of {d.size} points does not split into {bins} bins")
    return d.reshape(bins, -1).mean(axis=1)


def gibbs_mass(g, centers, delta):
    """``mu_beta`` of the union of closed arcs of half-width ``delta`` around ``centers``."""
    if not delta > 0.0:
        raise ValueError("delta must be positive")
    c = np.atleast_1d(np.asarray(centers, dtype=float))
    if delta >= PI:
        return 1.0
    if c.size == 0:
        return 0.0
    near = np.any(dist_array(g.theta[:, None], c) <= delta, axis=1)
    return float(np.mean(g.density * near))


def _same_grid(d1, d2):
    d1 = np.asarray(d1, dtype=float)
    d2 = np.asarray(d2, dtype=float)
    if d1.shape != d2.shape:
        raise ValueError(f"grid mismatch: {d1.shape} vs {d2.shape}")
    return d1, d2


def tv_grid(d1, d2):
    """Total variation ``1/2 int |d1 - d2| dlambda`` between two grid densities."""
    d1, d2 = _same_grid(d1, d2)
    return float(0.5 * np.mean(np.abs(d1 - d2)))


def chi2_grid(hist, gibbs_density):
    """``int (h/mu - 1)^2 dmu`` on the grid.

    ``gibbs_density`` is a density array or a :class:`GibbsGrid`; every
    cell must be positive.
    """
    mu = gibbs_density.density if isinstance(gibbs_density, GibbsGrid) else gibbs_density
    h, mu = _same_grid(hist, mu)
    if np.any(mu <= 0.0):
        raise ValueError("Gibbs density vanishes on some cell")
    return float(np.mean((h - mu) ** 2 / mu))


def histogram_density(positions, bins):
    """Histogram of circle points as a density w.r.t. lambda on ``bins`` equal bins."""
    x = np.asarray(positions, dtype=float)
    idx = np.floor((x + PI) / (2.0 * PI) * bins).astype(np.int64)
    idx = np.clip(idx, 0, bins - 1)
    counts = np.bincount(idx, minlength=bins).astype(float)
    return counts / max(x.size, 1) * bins


def bin_centers(bins):
    return grid(bins)


def zero_temperature_weights(minima, m):
    """Zero-temperature limit weights ``(1 - nu(x'))^(-1/2)``, normalized."""
    if isinstance(m, Empirical):
        raise ValueError("limit weights need a density variant")
    xs = np.array([c[0] if isinstance(c, tuple) else c for c in minima], dtype=float)
    if xs.size == 0:
        raise ValueError("no minimizers given")
    nu_anti = np.atleast_1d(m.density(canonical_array(xs + PI)))
    if np.any(nu_anti >= 1.0):
        raise DegenerateLimitError(f"nu(x') >= 1 at a minimizer: {nu_anti.tolist()}")
    w = (1.0 - nu_anti) ** -0.5
    return (w / w.sum()).tolist()
