"""Ground-truth p-means.

:func:`grid_minimize` works for any measure and exponent; for empirical
measures at ``p = 2`` :func:`exact_mean_p2_empirical` finds the means
exactly in ``O(N^2)``.
"""

import numpy as np

from ._search import golden_section
from .geometry import PI, TWO_PI, canonical, canonical_array, dist_array, grid
from .potential import DEGENERATE_RTOL, Minima, u_value

INTERIOR_TOL = 1e-12


def grid_minimize(p, m, n=8192, tol=1e-12, n_quad=4096):
    """Brute-force minimization of ``U_p`` on an ``n``-grid with golden-section polish.

    Every grid value is evaluated directly (no convolution shortcut), so
    this is independent of :func:`potential.build_grid`.
    """
    if n < 256:
        raise ValueError("n must be at least 256")
    theta = grid(n)
    h = TWO_PI / n
    vals = np.asarray(u_value(p, m, theta, n=n_quad))
    if float(vals.max() - vals.min()) <= DEGENERATE_RTOL * (1.0 + abs(float(vals.max()))):
        return Minima((), True)
    lip = float(np.max(np.abs(np.diff(vals, append=vals[0])))) / h
    local = np.nonzero((vals < np.roll(vals, 1)) & (vals <= np.roll(vals, -1)))[0]

    def f(x):
        return u_value(p, m, canonical(x), n=n_quad)

    cands = [golden_section(f, theta[i] - h, theta[i] + h, tol) for i in local]
    best = min(fx for _, fx in cands)
    kept = []
    for x, fx in sorted(cands, key=lambda c: c[1]):
        x = canonical(x)
        if fx <= best + lip * h + tol and all(abs(canonical(x - y)) > h for y, _ in kept):
            kept.append((x, float(fx)))
    return Minima(tuple(sorted(kept)), False)


def exact_mean_p2_empirical(atoms, weights=None):
    """Exact intrinsic means (``p = 2``) of a weighted atom set.

    Between consecutive antipodes of atoms the unrolling of the atoms
    around ``x`` is fixed, so ``U_2`` is a convex quadratic there with its
    vertex at the weighted mean of the unrolled atoms. A vertex is a
    candidate iff it falls strictly inside its own arc.
    """
    a = canonical_array(np.atleast_1d(np.asarray(atoms, dtype=float)))
    if a.size == 0:
        raise ValueError("need at least one atom")
    w = np.full(a.size, 1.0 / a.size) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != a.shape:
        raise ValueError("atoms and weights must have equal nonzero length")
    if np.any(w <= 0) or abs(w.sum() - 1.0) > 1e-12:
        raise ValueError("weights must be positive and sum to 1")
    if np.unique(a).size != a.size:
        raise ValueError("atoms must be distinct")
    cuts = np.sort(canonical_array(a + PI))
    nxt = np.append(cuts[1:], cuts[0] + TWO_PI)
    found = []
    for lo, hi in zip(cuts, nxt):
        mid = 0.5 * (lo + hi)
        u = mid + canonical_array(a - mid)
        mean = float(u @ w)
        if mean - lo > INTERIOR_TOL and hi - mean > INTERIOR_TOL:
            found.append((canonical(mean), float(((u - mean) ** 2) @ w)))
    assert found, "no admissible candidate; impossible for a finite atom set"
    best = min(v for _, v in found)
    return sorted((x, v) for x, v in found if v <= best + 1e-12 * (1.0 + best))


def neighborhood_mass(hist, minima, delta):
    """Histogram mass of bins whose centres are within ``delta`` of a minimizer.

    ``hist`` holds bin masses (summing to 1) on equal bins of the circle.
    A degenerate (flat) minima set counts the whole circle.
    """
    h = np.asarray(hist, dtype=float)
    width = TWO_PI / h.size
    if delta < width * (1.0 - 1e-12):
        raise ValueError(f"delta = {delta!r} is below the bin width {width!r}")
    if delta >= PI or getattr(minima, "degenerate", False):
        return float(h.sum())
    locs = minima.locations if isinstance(minima, Minima) else [
        c[0] if isinstance(c, tuple) else c for c in minima]
    near = np.any(dist_array(grid(h.size)[:, None], np.asarray(locs, dtype=float)) <= delta, axis=1)
    return float(h[near].sum())
