"""Circle arithmetic on T = R / 2piZ.

Angles are plain floats. The canonical representative of a point is the
one in ``(-pi, pi]``; every function here returns canonical values.

The scalar routines are mirrored operation-for-operation by the compiled
kernels in ``_kernels.pyx``, so any change here must be carried over there
or the two backends stop being bit-identical.
"""

import math

import numpy as np

PI = math.pi
TWO_PI = 2.0 * math.pi

CirclePoint = float


def canonical(angle):
    """Reduce ``angle`` to its representative in ``(-pi, pi]``."""
    angle = float(angle)
    if -PI < angle <= PI:
        return angle
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    y = math.fmod(angle, TWO_PI)
    if y > PI:
        y -= TWO_PI
    elif y <= -PI:
        y += TWO_PI
    return y


def canonical_array(angles):
    """Vectorized :func:`canonical`; same result elementwise."""
    a = np.asarray(angles, dtype=float)
    if not np.all(np.isfinite(a)):
        raise ValueError("angles must be finite")
    inside = (a > -PI) & (a <= PI)
    y = np.fmod(a, TWO_PI)
    y = np.where(y > PI, y - TWO_PI, np.where(y <= -PI, y + TWO_PI, y))
    return np.where(inside, a, y)


def signed_gap(x, y):
    """Representative of ``y - x`` in ``(-pi, pi]``.

    The antipode gets ``+pi``: the minimal geodesic to it is taken
    anticlockwise.
    """
    return canonical(y - x)


def dist(x, y):
    """Geodesic distance, in ``[0, pi]``."""
    return abs(signed_gap(x, y))


def signed_gap_array(x, y):
    return canonical_array(np.asarray(y, dtype=float) - np.asarray(x, dtype=float))


def dist_array(x, y):
    return np.abs(signed_gap_array(x, y))


def geodesic_point(x, y, s):
    """Point at arclength ``s`` along the minimal geodesic from ``x`` to ``y``.

    ``s`` may exceed ``dist(x, y)``, in which case the geodesic runs past
    ``y``.
    """
    g = signed_gap(x, y)
    if g == 0.0:
        if s != 0.0:
            raise ValueError("geodesic direction undefined for x == y")
        return canonical(x)
    if g > 0.0:
        return canonical(x + s)
    return canonical(x - s)


def jump_target(x, y, p, s):
    """Move from ``x`` toward ``y`` by arclength ``s * d(x, y)**(p - 1)``.

    For ``p == 1`` the arclength is ``s`` itself. A jump onto the current
    position is a no-op.
    """
    g = signed_gap(x, y)
    if g == 0.0:
        return x
    d = abs(g)
    if p == 1.0:
        arc = s
    elif p == 2.0:
        arc = s * d
    else:
        arc = s * math.pow(d, p - 1.0)
    if g > 0.0:
        return canonical(x + arc)
    return canonical(x - arc)


def grid(n):
    """Midpoint grid of ``n`` points, ``-pi + (i + 1/2) 2pi/n``."""
    return -PI + (np.arange(n) + 0.5) * (TWO_PI / n)
