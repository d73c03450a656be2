"""Trajectories of the annealing algorithms and deterministic ensembles.

Three algorithms share one clock, the speeded-up Poisson process with
jump times ``T_n`` solving ``int_{T_n}^{T_{n+1}} ds / alpha_s = tau_{n+1}``:

``X``
    Brownian motion between jumps; at ``T_n`` jump from ``x`` toward a
    fresh draw ``Y ~ nu`` by ``(p/2) alpha beta d^(p-1)`` along the
    geodesic.
``Z``
    As ``X`` with the target smoothed by the triangular kernel of width
    ``1 / kappa_T``, so atomic ``nu`` is allowed.
``XTilde``
    Euler-Maruyama for the drift ``(p/2) beta_t d^(p-1)`` toward the
    current target, which is refreshed at every clock event.

Random streams
--------------
Trajectory ``i`` of a run with master seed ``s`` draws from three PCG64
generators seeded by ``SeedSequence(s, spawn_key=(i, j))``:

* ``j = 0``: initial point, clock, Brownian endpoints, targets;
* ``j = 1``: kernel offsets (``Z`` only);
* ``j = 2``: Brownian-bridge values at checkpoints inside a segment.

Checkpoints therefore never shift the main stream: adding or removing one
leaves the trajectory at every other time unchanged. Because ``X`` and
``Z`` consume the main stream identically, runs of the two algorithms with
the same seed are coupled.
"""

import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _core
from .errors import ConfigError
from .geometry import PI, TWO_PI, canonical
from .gibbs import chi2_grid, coarsen, gibbs_build, histogram_density, tv_grid
from .measures import Empirical
from .oracle import neighborhood_mass
from .potential import build_grid
from .schedules import evaluate

ALGORITHMS = ("X", "Z", "XTilde")
EULER_DT_MAX = 1e-2
DEFAULT_BINS = 128


@dataclass(frozen=True)
class SimConfig:
    algorithm: str = "X"
    p: float = 2.0
    t_end: float = 1.0
    checkpoints: tuple = ()
    seed: int = 0
    euler_dt: float = None
    x0: object = "uniform"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ConfigError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if not self.p >= 1:
            raise ConfigError("p must be >= 1")
        if not self.t_end > 0:
            raise ConfigError("t_end must be positive")
        ck = tuple(float(c) for c in (self.checkpoints or (self.t_end,)))
        if any(b <= a for a, b in zip(ck, ck[1:])):
            raise ConfigError("checkpoints must be strictly increasing")
        if ck[0] <= 0 or ck[-1] > self.t_end:
            raise ConfigError("checkpoints must lie in (0, t_end]")
        object.__setattr__(self, "checkpoints", ck)
        if self.algorithm == "XTilde":
            if self.euler_dt is None or not 0 < self.euler_dt <= EULER_DT_MAX:
                raise ConfigError(f"XTilde needs 0 < euler_dt <= {EULER_DT_MAX}")
        if not (self.x0 == "uniform" or isinstance(self.x0, (int, float))):
            raise ConfigError("x0 must be a number or 'uniform'")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


@dataclass
class TrajectoryRecord:
    checkpoints: tuple
    positions: np.ndarray
    jumps: int
    final: float


@dataclass
class CheckpointStats:
    t: float
    alpha: float
    beta: float
    kappa: float
    hist: list
    tv: float
    chi2: float
    nbhd_mass: float


@dataclass
class EnsembleSummary:
    checkpoints: list
    n_traj: int
    jumps: np.ndarray = field(repr=False)
    positions: np.ndarray = field(repr=False)
    minima: list = None
    delta: float = None
    wall_time: float = None

    def jsonl_lines(self):
        return [dumps(asdict(c)) for c in self.checkpoints]

    def write_jsonl(self, path):
        with open(path, "w") as f:
            for line in self.jsonl_lines():
                f.write(line + "\n")

    def jump_stats(self):
        j = self.jumps
        return {"mean": float(j.mean()), "min": int(j.min()), "max": int(j.max()),
                "total": int(j.sum())}


def _fmt(v):
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "null"
        return "%.17g" % v
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        return "{" + ", ".join(f"{_fmt(str(k))}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dumps(obj):
    """JSON with every float written to 17 significant digits."""
    return _fmt(obj)


def trajectory_streams(seed, index):
    """The (main, kernel, bridge) generators of trajectory ``index``."""
    return tuple(np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(int(seed), spawn_key=(int(index), j)))) for j in range(3))


def _streams(cfg, rng, index):
    if rng is None:
        return trajectory_streams(cfg.seed, index)
    if isinstance(rng, np.random.Generator):
        k, b = rng.spawn(2)
        return rng, k, b
    return tuple(rng)


def _start(cfg, gen):
    if cfg.x0 == "uniform":
        return canonical(-PI + TWO_PI * gen.random())
    return canonical(float(cfg.x0))


def _run(m, s, cfg, streams):
    gen, gk, gb = streams
    kind, a, b, c, env = m.sampler_spec()
    x0 = _start(cfg, gen)
    sched = s.kernel_tuple()
    if cfg.algorithm == "XTilde":
        out, jumps, x = _core.simulate_xtilde(kind, a, b, c, env, float(cfg.p), sched,
                                              float(cfg.t_end), cfg.checkpoints, x0,
                                              float(cfg.euler_dt), gen)
    else:
        use_kernel = cfg.algorithm == "Z"
        if use_kernel and s.kappa is None:
            raise ConfigError("algorithm Z needs a kappa schedule")
        out, jumps, x = _core.simulate_jump(kind, a, b, c, env, float(cfg.p), sched, use_kernel,
                                            float(cfg.t_end), cfg.checkpoints, x0, gen, gk, gb)
    return TrajectoryRecord(cfg.checkpoints, out, int(jumps), float(x))


def _expect(cfg, algorithm):
    if cfg.algorithm != algorithm:
        raise ConfigError(f"config is for {cfg.algorithm}, not {algorithm}")


def run_X(m, s, cfg, rng=None, index=0):
    """One trajectory of the jump algorithm.

    ``rng`` may be None (streams derived from ``cfg.seed`` and ``index``),
    a ``(main, kernel, bridge)`` triple, or a single generator whose two
    auxiliary streams are spawned from it.
    """
    _expect(cfg, "X")
    if isinstance(m, Empirical):
        warnings.warn("the jump algorithm's guarantees assume nu has a density", stacklevel=2)
    return _run(m, s, cfg, _streams(cfg, rng, index))


def run_Z(m, s, cfg, rng=None, index=0):
    """One trajectory of the kernel-smoothed jump algorithm."""
    _expect(cfg, "Z")
    return _run(m, s, cfg, _streams(cfg, rng, index))


def run_Xtilde(m, s, cfg, rng=None, index=0):
    """One Euler-Maruyama trajectory of the drift variant."""
    _expect(cfg, "XTilde")
    return _run(m, s, cfg, _streams(cfg, rng, index))


def run_trajectory(m, s, cfg, index):
    return _run(m, s, cfg, trajectory_streams(cfg.seed, index))


def simulate_positions(m, s, cfg, n_traj, threads=1):
    """Checkpoint positions ``(n_traj, n_checkpoints)`` and jump counts, in index order."""
    n_traj = int(n_traj)
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    if cfg.algorithm == "Z" and s.kappa is None:
        raise ConfigError("algorithm Z needs a kappa schedule")
    pos = np.empty((n_traj, len(cfg.checkpoints)))
    jumps = np.empty(n_traj, dtype=np.int64)

    def work(lo, hi):
        for i in range(lo, hi):
            r = run_trajectory(m, s, cfg, i)
            pos[i] = r.positions
            jumps[i] = r.jumps

    threads = max(1, int(threads))
    if threads == 1:
        work(0, n_traj)
    else:
        edges = np.linspace(0, n_traj, threads + 1).astype(int)
        with ThreadPoolExecutor(threads) as ex:
            list(ex.map(lambda k: work(edges[k], edges[k + 1]), range(threads)))
    return pos, jumps


def summarize(pos, jumps, s, cfg, potential=None, minima=None, bins=DEFAULT_BINS, delta=0.1):
    """Per-checkpoint histograms and their comparison with the Gibbs measures."""
    if minima is None and potential is not None:
        minima = potential.minima
    stats = []
    for j, t in enumerate(cfg.checkpoints):
        alpha, beta, kappa, _ = evaluate(s, t)
        if cfg.algorithm != "Z":
            kappa = None
        dens = histogram_density(pos[:, j], bins)
        hist = dens / bins
        tv = chi2 = None
        if potential is not None:
            mu = coarsen(gibbs_build(potential, beta).density, bins)
            tv = tv_grid(dens, mu)
            try:
                chi2 = chi2_grid(dens, mu)
            except ValueError:
                chi2 = None
        mass = neighborhood_mass(hist, minima, delta) if minima is not None else None
        stats.append(CheckpointStats(float(t), alpha, beta, kappa, hist.tolist(), tv, chi2, mass))
    return stats


def run_ensemble(m, s, cfg, n_traj, potential=None, minima=None, bins=DEFAULT_BINS,
                 delta=0.1, threads=1, potential_n=4096):
    """``n_traj`` independent trajectories reduced to an :class:`EnsembleSummary`.

    ``potential`` defaults to the grid ``U_p`` of ``m``; ``minima`` (the
    neighbourhood centres) default to the grid potential's minima. Output
    does not depend on ``threads``.
    """
    t0 = time.perf_counter()
    if potential is None:
        potential = build_grid(cfg.p, m, potential_n)
    pos, jumps = simulate_positions(m, s, cfg, n_traj, threads)
    stats = summarize(pos, jumps, s, cfg, potential, minima, bins, delta)
    mins = minima if minima is not None else potential.minima
    locs = mins.locations if hasattr(mins, "locations") else [
        c[0] if isinstance(c, tuple) else float(c) for c in mins]
    return EnsembleSummary(stats, int(n_traj), jumps, pos, locs, delta,
                           time.perf_counter() - t0)
