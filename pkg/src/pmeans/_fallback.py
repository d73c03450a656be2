"""Pure-Python trajectory kernels.

Reference implementation of the hot loops. ``_kernels.pyx`` mirrors every
floating-point operation and random draw in the same order, so both
backends return bit-identical results for the same generators.

Schedules are passed flat as ``(C1, r1, c, b, r2, C2, r3, k)``:
``alpha_t = C1 (r1+t)^-c``, ``beta_t = ln(r2+t)/b``, ``kappa_t = C2 (r3+t)^k``.
"""

import math
from bisect import bisect_right

import numpy as np

from .errors import StepSizeError
from .geometry import PI, TWO_PI, canonical, jump_target, signed_gap

UNIFORM, TRIGPOLY, VONMISES, PIECEWISE, EMPIRICAL = range(5)
KAPPA_MIN = 1.0 / PI


def _trig_density(a, b, x):
    d = 1.0
    for k in range(len(a)):
        kk = k + 1
        d = d + a[k] * math.cos(kk * x)
        d = d + b[k] * math.sin(kk * x)
    return d


def _piecewise_density(a, x):
    M = len(a)
    u = (x + PI) / TWO_PI * M
    j = math.floor(u)
    frac = u - j
    j = int(j) % M
    return a[j] * (1.0 - frac) + a[(j + 1) % M] * frac


def _first_above(cum, u):
    i = bisect_right(cum, u)
    return i if i < len(cum) else len(cum) - 1


def draw_target(kind, a, b, c, env, gen):
    if kind == UNIFORM:
        return canonical(-PI + TWO_PI * gen.random())
    if kind == TRIGPOLY or kind == PIECEWISE:
        a_l = list(a)
        b_l = list(b)
        while True:
            x = -PI + TWO_PI * gen.random()
            u = gen.random()
            d = _trig_density(a_l, b_l, x) if kind == TRIGPOLY else _piecewise_density(a_l, x)
            if u * env <= d:
                return canonical(x)
    if kind == VONMISES:
        i = 0
        if len(a) > 1:
            i = _first_above(list(a), gen.random())
        return canonical(gen.vonmises(b[i], c[i]))
    if kind == EMPIRICAL:
        i = _first_above(list(a), gen.random())
        return float(b[i])
    raise ValueError(f"unknown sampler kind {kind}")


def draw_targets(kind, a, b, c, env, gen, n):
    return np.array([draw_target(kind, a, b, c, env, gen) for _ in range(n)])


def _clock_start(sched):
    C1, r1, c = sched[0], sched[1], sched[2]
    cp1 = c + 1.0
    return cp1, cp1 * C1, math.pow(r1, cp1)


def simulate_jump(kind, a, b, c, env, p, sched, use_kernel, t_end, checkpoints, x0,
                  gen, gen_kernel, gen_bridge):
    """One trajectory of the jump algorithm (X, or Z when ``use_kernel``).

    Returns ``(positions at checkpoints, jump count, final position)``.
    """
    C1, r1, _, bb, r2, C2, r3, k = (float(v) for v in sched)
    cp1, cp1C1, u = _clock_start(sched)
    half_p = 0.5 * p
    same_r2 = r2 == r1
    same_r3 = r3 == r1
    ck = [float(v) for v in checkpoints]
    nck = len(ck)
    out = np.empty(nck)
    ci = 0
    x = float(x0)
    t = 0.0
    jumps = 0
    while True:
        tau = gen.standard_exponential()
        u = u + cp1C1 * tau
        L = math.log(u) / cp1
        rT = math.exp(L)
        T = rT - r1
        seg_end = T if T <= t_end else t_end
        G = math.sqrt(seg_end - t) * gen.standard_normal()
        # interior checkpoints: Brownian bridge toward the drawn endpoint
        ta = t
        wa = 0.0
        while ci < nck and ck[ci] < seg_end:
            tc = ck[ci]
            den = seg_end - ta
            mean = wa + ((tc - ta) / den) * (G - wa)
            sd = math.sqrt((tc - ta) * (seg_end - tc) / den)
            wa = mean + sd * gen_bridge.standard_normal()
            ta = tc
            out[ci] = canonical(x + wa)
            ci += 1
        x = canonical(x + G)
        if T > t_end:
            break
        alpha = C1 * rT / u
        beta = (L if same_r2 else math.log(r2 + T)) / bb
        s = half_p * alpha * beta
        y = draw_target(kind, a, b, c, env, gen)
        if use_kernel:
            kap = C2 * math.exp(k * L) if same_r3 else C2 * math.pow(r3 + T, k)
            if not kap > KAPPA_MIN:
                raise ValueError(f"kappa={kap!r} <= 1/pi at jump time {T!r}")
            u1 = gen_kernel.random()
            u2 = gen_kernel.random()
            y = canonical(y + (u1 - u2) / kap)
        x = jump_target(x, y, p, s)
        jumps += 1
        t = T
        while ci < nck and ck[ci] <= t:
            out[ci] = x
            ci += 1
    while ci < nck:
        out[ci] = x
        ci += 1
    return out, jumps, x


def simulate_xtilde(kind, a, b, c, env, p, sched, t_end, checkpoints, x0, dt_max, gen):
    """Euler-Maruyama for the drift variant; steps land on jumps and checkpoints."""
    C1, r1, _, bb, r2, _, _, _ = (float(v) for v in sched)
    cp1, cp1C1, u = _clock_start(sched)
    half_p = 0.5 * p
    ck = [float(v) for v in checkpoints]
    nck = len(ck)
    out = np.empty(nck)
    ci = 0
    x = float(x0)
    t = 0.0
    jumps = 0
    y = draw_target(kind, a, b, c, env, gen)
    u = u + cp1C1 * gen.standard_exponential()
    Tn = math.exp(math.log(u) / cp1) - r1
    while t < t_end:
        stop = t_end
        if Tn < stop:
            stop = Tn
        if ci < nck and ck[ci] < stop:
            stop = ck[ci]
        span = stop - t
        n = int(math.ceil(span / dt_max))
        if n > 0:
            h = span / n
            sq = math.sqrt(h)
            for i in range(n):
                beta = math.log(r2 + (t + i * h)) / bb
                g = signed_gap(x, y)
                drift = 0.0
                if g != 0.0:
                    d = abs(g)
                    if p == 1.0:
                        mag = h * half_p * beta
                    elif p == 2.0:
                        mag = h * half_p * beta * d
                    else:
                        mag = h * half_p * beta * math.pow(d, p - 1.0)
                    if mag > 0.5 * PI:
                        raise StepSizeError(f"drift step {mag!r} exceeds pi/2 at t={t!r}")
                    drift = mag if g > 0.0 else -mag
                x = canonical(x + sq * gen.standard_normal() + drift)
        t = stop
        if t == Tn:
            y = draw_target(kind, a, b, c, env, gen)
            jumps += 1
            u = u + cp1C1 * gen.standard_exponential()
            Tn = math.exp(math.log(u) / cp1) - r1
        while ci < nck and ck[ci] <= t:
            out[ci] = x
            ci += 1
    while ci < nck:
        out[ci] = x
        ci += 1
    return out, jumps, x
