# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled trajectory kernels.

Operation-for-operation mirror of ``_fallback.py``; random draws go through
numpy's C distribution functions on the caller's bit generators, so the
results are bit-identical to the pure-Python path.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport ceil, cos, exp, fabs, floor, fmod, log, pow, sin, sqrt
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_standard_exponential,
    random_standard_normal,
    random_standard_uniform,
    random_vonmises,
)

from .errors import StepSizeError

cdef double PI = 3.141592653589793
cdef double TWO_PI = 2.0 * PI
cdef double KAPPA_MIN = 1.0 / PI

cdef enum:
    UNIFORM = 0
    TRIGPOLY = 1
    VONMISES = 2
    PIECEWISE = 3
    EMPIRICAL = 4

cdef enum:
    OK = 0
    ERR_KAPPA = 1
    ERR_STEP = 2


cdef bitgen_t* _bitgen(gen) except NULL:
    capsule = gen.bit_generator.capsule
    if not PyCapsule_IsValid(capsule, "BitGenerator"):
        raise ValueError("invalid bit generator")
    return <bitgen_t*> PyCapsule_GetPointer(capsule, "BitGenerator")


cdef inline double canon(double a) noexcept nogil:
    cdef double y
    if a > -PI and a <= PI:
        return a
    y = fmod(a, TWO_PI)
    if y > PI:
        y -= TWO_PI
    elif y <= -PI:
        y += TWO_PI
    return y


cdef inline double jump_to(double x, double y, double p, double s) noexcept nogil:
    cdef double g = canon(y - x)
    cdef double d, arc
    if g == 0.0:
        return x
    d = fabs(g)
    if p == 1.0:
        arc = s
    elif p == 2.0:
        arc = s * d
    else:
        arc = s * pow(d, p - 1.0)
    if g > 0.0:
        return canon(x + arc)
    return canon(x - arc)


cdef struct Sampler:
    int kind
    const double* a
    const double* b
    const double* c
    Py_ssize_t na
    double env


cdef inline Py_ssize_t first_above(const double* cum, Py_ssize_t n, double u) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) // 2
        if u < cum[mid]:
            hi = mid
        else:
            lo = mid + 1
    if lo < n:
        return lo
    return n - 1


cdef inline double trig_density(const Sampler* sm, double x) noexcept nogil:
    cdef double d = 1.0
    cdef Py_ssize_t k
    cdef double kk
    for k in range(sm.na):
        kk = <double>(k + 1)
        d = d + sm.a[k] * cos(kk * x)
        d = d + sm.b[k] * sin(kk * x)
    return d


cdef inline double piecewise_density(const Sampler* sm, double x) noexcept nogil:
    cdef Py_ssize_t M = sm.na
    cdef double u = (x + PI) / TWO_PI * <double>M
    cdef double fj = floor(u)
    cdef double frac = u - fj
    cdef Py_ssize_t j = (<Py_ssize_t>fj) % M
    if j < 0:
        j += M
    return sm.a[j] * (1.0 - frac) + sm.a[(j + 1) % M] * frac


cdef double draw(const Sampler* sm, bitgen_t* bg) noexcept nogil:
    cdef double x, u, d
    cdef Py_ssize_t i
    if sm.kind == UNIFORM:
        return canon(-PI + TWO_PI * random_standard_uniform(bg))
    if sm.kind == TRIGPOLY or sm.kind == PIECEWISE:
        while True:
            x = -PI + TWO_PI * random_standard_uniform(bg)
            u = random_standard_uniform(bg)
            if sm.kind == TRIGPOLY:
                d = trig_density(sm, x)
            else:
                d = piecewise_density(sm, x)
            if u * sm.env <= d:
                return canon(x)
    if sm.kind == VONMISES:
        i = 0
        if sm.na > 1:
            i = first_above(sm.a, sm.na, random_standard_uniform(bg))
        return canon(random_vonmises(bg, sm.b[i], sm.c[i]))
    # EMPIRICAL
    i = first_above(sm.a, sm.na, random_standard_uniform(bg))
    return sm.b[i]


cdef Sampler make_sampler(int kind, const double[::1] a, const double[::1] b,
                          const double[::1] c, double env):
    cdef Sampler sm
    sm.kind = kind
    sm.na = a.shape[0]
    sm.a = &a[0] if a.shape[0] > 0 else NULL
    sm.b = &b[0] if b.shape[0] > 0 else NULL
    sm.c = &c[0] if c.shape[0] > 0 else NULL
    sm.env = env
    return sm


def _arr(v):
    return np.ascontiguousarray(v, dtype=np.float64)


def draw_target(int kind, a, b, c, double env, gen):
    a, b, c = _arr(a), _arr(b), _arr(c)
    cdef Sampler sm = make_sampler(kind, a, b, c, env)
    cdef bitgen_t* bg = _bitgen(gen)
    with gen.bit_generator.lock:
        return draw(&sm, bg)


def draw_targets(int kind, a, b, c, double env, gen, Py_ssize_t n):
    a, b, c = _arr(a), _arr(b), _arr(c)
    cdef Sampler sm = make_sampler(kind, a, b, c, env)
    cdef bitgen_t* bg = _bitgen(gen)
    out = np.empty(n)
    cdef double[::1] o = out
    cdef Py_ssize_t i
    with gen.bit_generator.lock, nogil:
        for i in range(n):
            o[i] = draw(&sm, bg)
    return out


def simulate_jump(int kind, a, b, c, double env, double p, sched, bint use_kernel,
                  double t_end, checkpoints, double x0, gen, gen_kernel, gen_bridge):
    a, b, c = _arr(a), _arr(b), _arr(c)
    cdef Sampler sm = make_sampler(kind, a, b, c, env)
    cdef double C1 = sched[0], r1 = sched[1], cc = sched[2], bb = sched[3]
    cdef double r2 = sched[4], C2 = sched[5], r3 = sched[6], k = sched[7]
    cdef double cp1 = cc + 1.0
    cdef double cp1C1 = cp1 * C1
    cdef double u = pow(r1, cp1)
    cdef double half_p = 0.5 * p
    cdef bint same_r2 = r2 == r1
    cdef bint same_r3 = r3 == r1
    ck_arr = _arr(checkpoints)
    cdef const double[::1] ck = ck_arr
    cdef Py_ssize_t nck = ck.shape[0]
    out = np.empty(nck)
    cdef double[::1] o = out
    cdef bitgen_t* bg = _bitgen(gen)
    cdef bitgen_t* bgk = _bitgen(gen_kernel)
    cdef bitgen_t* bgb = _bitgen(gen_bridge)
    cdef Py_ssize_t ci = 0
    cdef double x = x0, t = 0.0
    cdef long jumps = 0
    cdef int status = OK
    cdef double tau, L, rT, T, seg_end, G, ta, wa, tc, den, mean, sd
    cdef double alpha, beta, s, y, kap, u1, u2
    with nogil:
        while True:
            tau = random_standard_exponential(bg)
            u = u + cp1C1 * tau
            L = log(u) / cp1
            rT = exp(L)
            T = rT - r1
            seg_end = T if T <= t_end else t_end
            G = sqrt(seg_end - t) * random_standard_normal(bg)
            ta = t
            wa = 0.0
            while ci < nck and ck[ci] < seg_end:
                tc = ck[ci]
                den = seg_end - ta
                mean = wa + ((tc - ta) / den) * (G - wa)
                sd = sqrt((tc - ta) * (seg_end - tc) / den)
                wa = mean + sd * random_standard_normal(bgb)
                ta = tc
                o[ci] = canon(x + wa)
                ci += 1
            x = canon(x + G)
            if T > t_end:
                break
            alpha = C1 * rT / u
            if same_r2:
                beta = L / bb
            else:
                beta = log(r2 + T) / bb
            s = half_p * alpha * beta
            y = draw(&sm, bg)
            if use_kernel:
                if same_r3:
                    kap = C2 * exp(k * L)
                else:
                    kap = C2 * pow(r3 + T, k)
                if not kap > KAPPA_MIN:
                    status = ERR_KAPPA
                    break
                u1 = random_standard_uniform(bgk)
                u2 = random_standard_uniform(bgk)
                y = canon(y + (u1 - u2) / kap)
            x = jump_to(x, y, p, s)
            jumps += 1
            t = T
            while ci < nck and ck[ci] <= t:
                o[ci] = x
                ci += 1
        while ci < nck:
            o[ci] = x
            ci += 1
    if status == ERR_KAPPA:
        raise ValueError(f"kappa={kap!r} <= 1/pi at jump time {T!r}")
    return out, jumps, x


def simulate_xtilde(int kind, a, b, c, double env, double p, sched, double t_end,
                    checkpoints, double x0, double dt_max, gen):
    a, b, c = _arr(a), _arr(b), _arr(c)
    cdef Sampler sm = make_sampler(kind, a, b, c, env)
    cdef double C1 = sched[0], r1 = sched[1], cc = sched[2], bb = sched[3]
    cdef double r2 = sched[4]
    cdef double cp1 = cc + 1.0
    cdef double cp1C1 = cp1 * C1
    cdef double u = pow(r1, cp1)
    cdef double half_p = 0.5 * p
    ck_arr = _arr(checkpoints)
    cdef const double[::1] ck = ck_arr
    cdef Py_ssize_t nck = ck.shape[0]
    out = np.empty(nck)
    cdef double[::1] o = out
    cdef bitgen_t* bg = _bitgen(gen)
    cdef Py_ssize_t ci = 0, i, n
    cdef double x = x0, t = 0.0
    cdef long jumps = 0
    cdef int status = OK
    cdef double y, Tn, stop, span, h, sq, beta, g, d, mag, drift
    with nogil:
        y = draw(&sm, bg)
        u = u + cp1C1 * random_standard_exponential(bg)
        Tn = exp(log(u) / cp1) - r1
        while t < t_end:
            stop = t_end
            if Tn < stop:
                stop = Tn
            if ci < nck and ck[ci] < stop:
                stop = ck[ci]
            span = stop - t
            n = <Py_ssize_t>ceil(span / dt_max)
            if n > 0:
                h = span / <double>n
                sq = sqrt(h)
                for i in range(n):
                    beta = log(r2 + (t + <double>i * h)) / bb
                    g = canon(y - x)
                    drift = 0.0
                    if g != 0.0:
                        d = fabs(g)
                        if p == 1.0:
                            mag = h * half_p * beta
                        elif p == 2.0:
                            mag = h * half_p * beta * d
                        else:
                            mag = h * half_p * beta * pow(d, p - 1.0)
                        if mag > 0.5 * PI:
                            status = ERR_STEP
                            break
                        drift = mag if g > 0.0 else -mag
                    x = canon(x + sq * random_standard_normal(bg) + drift)
                if status != OK:
                    break
            t = stop
            if t == Tn:
                y = draw(&sm, bg)
                jumps += 1
                u = u + cp1C1 * random_standard_exponential(bg)
                Tn = exp(log(u) / cp1) - r1
            while ci < nck and ck[ci] <= t:
                o[ci] = x
                ci += 1
        while ci < nck:
            o[ci] = x
            ci += 1
    if status == ERR_STEP:
        raise StepSizeError(f"drift step {mag!r} exceeds pi/2 at t={t!r}")
    return out, jumps, x
