"""Compiled vs pure-Python trajectory kernels.

Usage: python benchmarks/bench_kernels.py [--t-end 200] [--repeat 3]

Prints jumps per second for each backend and the speed-up. Both backends
are run on identical streams and their outputs are checked for equality.
"""

import argparse
import time

import numpy as np

from pmeans import _fallback
from pmeans.measures import Empirical, Uniform, VonMisesMixture
from pmeans.schedules import LogBeta, PowerAlpha, PowerKappa, Schedule
from pmeans.simulator import trajectory_streams

try:
    from pmeans import _kernels
except ImportError:
    _kernels = None

CASES = {
    "X uniform": (Uniform(), False),
    "X von Mises": (VonMisesMixture((0.0, 2.5), (6.0, 6.0), (0.65, 0.35)), False),
    "Z empirical(200)": (Empirical(np.random.default_rng(0).uniform(-np.pi, np.pi, 200)), True),
}


def bench(mod, m, use_kernel, sched, t_end, repeat):
    spec = m.sampler_spec()
    best, out = float("inf"), None
    for _ in range(repeat):
        streams = trajectory_streams(1, 0)
        t0 = time.perf_counter()
        out = mod.simulate_jump(*spec, 2.0, sched, use_kernel, t_end, (t_end,), 0.0, *streams)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t-end", type=float, default=200.0)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _kernels is None:
        raise SystemExit("compiled extension not built; run pip install -e . first")
    sched = Schedule(PowerAlpha(1, 1, 1), LogBeta(0.5, 1), PowerKappa(1, 1, 0.25)).kernel_tuple()
    print(f"{'case':<20}{'jumps':>10}{'compiled/s':>14}{'python/s':>14}{'speed-up':>10}")
    for name, (m, kern) in CASES.items():
        tc, oc = bench(_kernels, m, kern, sched, args.t_end, args.repeat)
        tp, op = bench(_fallback, m, kern, sched, args.t_end, 1)
        assert np.array_equal(oc[0], op[0]) and oc[1] == op[1], "backends disagree"
        n = oc[1]
        print(f"{name:<20}{n:>10d}{n / tc:>14.3g}{n / tp:>14.3g}{tp / tc:>10.1f}")


if __name__ == "__main__":
    main()
