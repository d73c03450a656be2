"""``pmeans`` command line.

Exit codes: 0 success, 1 runtime failure, 2 configuration error.
"""

import argparse
import csv
import json
import os
import sys
import time

import jsonschema
import numpy as np

from . import _core
from .diagnostics import NULL_LEVEL, lstar_scaling_study
from .errors import ConfigError
from .gibbs import gibbs_build, gibbs_mass
from .measures import Empirical, from_spec
from .oracle import exact_mean_p2_empirical, grid_minimize
from .potential import Minima, build_grid, critical_depth
from .schedules import Schedule, validate
from .simulator import SimConfig, dumps, run_ensemble, run_trajectory

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_nums = {"type": "array", "items": _num}


def _obj(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


_holder = _obj({"a": _pos, "A": {"type": "number", "minimum": 0}}, ["a", "A"])


def _measure(kind, props, required=()):
    p = {"type": {"const": kind}, "holder": _holder}
    p.update(props)
    return _obj(p, ["type", *required])


MEASURE_SCHEMA = {"oneOf": [
    _measure("uniform", {}),
    _measure("trigpoly", {"cos": _nums, "sin": _nums}),
    _measure("vonmises_mixture", {"locations": _nums, "concentrations": _nums, "weights": _nums},
             ["locations", "concentrations", "weights"]),
    _measure("piecewise", {"values": _nums}, ["values"]),
    _measure("empirical", {"atoms": _nums, "weights": _nums,
                           "sample": _obj({"from": {"type": "object"},
                                           "n": {"type": "integer", "minimum": 1},
                                           "seed": {"type": "integer", "minimum": 0}},
                                          ["from", "n", "seed"])}),
]}

SCHEDULE_SCHEMA = _obj({
    "alpha": _obj({"C1": _pos, "r1": _pos, "c": {"type": "number", "minimum": 0}}),
    "beta": _obj({"b": _pos, "r2": {"type": "number", "minimum": 1}}),
    "kappa": {"oneOf": [{"type": "null"}, _obj({"C2": _pos, "r3": _pos, "k": _pos})]},
})

SIM_SCHEMA = _obj({
    "algorithm": {"enum": ["X", "Z", "XTilde"]},
    "t_end": _pos,
    "checkpoints": _nums,
    "n_traj": {"type": "integer", "minimum": 1},
    "seed": {"type": "integer", "minimum": 0},
    "bins": {"type": "integer", "minimum": 1},
    "delta": _pos,
    "euler_dt": {"oneOf": [{"type": "null"}, _pos]},
    "x0": {"oneOf": [_num, {"const": "uniform"}]},
})

CONFIG_SCHEMA = _obj({
    "measure": MEASURE_SCHEMA,
    "p": {"type": "number", "minimum": 1},
    "schedule": SCHEDULE_SCHEMA,
    "sim": SIM_SCHEMA,
    "potential": _obj({"n": {"type": "integer", "minimum": 64}, "b_estimate": _num}),
    "oracle": _obj({"n": {"type": "integer", "minimum": 256}, "tol": _pos}),
    "gibbs": _obj({"betas": _nums}),
    "diagnose": _obj({"alphas": _nums, "betas": _nums, "grid_n": {"type": "integer", "minimum": 8},
                      "n_quad": {"type": "integer", "minimum": 16}}),
    "output": {"type": "string"},
    "threads": {"type": "integer", "minimum": 1},
}, ["measure"])


def _skip_ws(text, i):
    while i < len(text) and text[i] in " \t\r\n":
        i += 1
    return i


_DEC = json.JSONDecoder()


def _members(text, i):
    """Yield ``(key, key_offset, value_offset)`` for the JSON object starting at ``i``."""
    i = _skip_ws(text, i + 1)
    while i < len(text) and text[i] == '"':
        at = i
        key, i = _DEC.raw_decode(text, i)
        i = _skip_ws(text, _skip_ws(text, i) + 1)
        yield key, at, i
        _, i = _DEC.raw_decode(text, i)
        i = _skip_ws(text, i)
        if i < len(text) and text[i] == ",":
            i = _skip_ws(text, i + 1)


def _items(text, i):
    """Yield element offsets of the JSON array starting at ``i``."""
    i = _skip_ws(text, i + 1)
    while i < len(text) and text[i] != "]":
        yield i
        _, i = _DEC.raw_decode(text, i)
        i = _skip_ws(text, i)
        if i < len(text) and text[i] == ",":
            i = _skip_ws(text, i + 1)


def _locate(text, path):
    """Character offset of the value at ``path`` (deepest reachable prefix)."""
    i = _skip_ws(text, 0)
    for step in path:
        if i >= len(text):
            break
        if text[i] == "{":
            nxt = next((v for k, _, v in _members(text, i) if k == step), None)
        elif text[i] == "[" and isinstance(step, int):
            nxt = next((v for n, v in enumerate(_items(text, i)) if n == step), None)
        else:
            nxt = None
        if nxt is None:
            break
        i = nxt
    return i


def _key_offset(text, path, key):
    """Offset of ``key`` inside the object at ``path``."""
    i = _locate(text, path)
    if i < len(text) and text[i] == "{":
        for k, at, _ in _members(text, i):
            if k == key:
                return at
    return i


def _line_col(text, offset):
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _best_error(err):
    # descend into oneOf branches that got furthest, preferring the branch
    # whose "type" const matched
    while err.context:
        subs = [e for e in err.context if e.validator != "const"]
        err = max(subs or err.context, key=lambda e: len(e.absolute_path))
    return err


def load_config(path):
    """Parse and validate a config file; raises :class:`ConfigError` with ``file:line:col``."""
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(cfg), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        err = _best_error(errors[0])
        where = list(err.absolute_path)
        if err.validator == "additionalProperties":
            allowed = set(err.schema.get("properties", {}))
            extra = sorted(k for k in err.instance if k not in allowed)
            off = _key_offset(text, where, extra[0]) if extra else _locate(text, where)
            msg = f"unknown key {extra[0]!r}" if extra else err.message
        else:
            off = _locate(text, where)
            msg = err.message
        line, col = _line_col(text, off)
        loc = "/".join(map(str, where)) or "<root>"
        raise ConfigError(f"{path}:{line}:{col}: {loc}: {msg}")
    return cfg


class Run:
    """Objects built from a validated config."""

    def __init__(self, cfg, args):
        self.cfg = cfg
        self.p = float(cfg.get("p", 2.0))
        try:
            self.measure = from_spec(cfg["measure"])
            self.schedule = Schedule.from_spec(cfg.get("schedule", {}))
        except (ValueError, TypeError) as e:
            raise ConfigError(str(e)) from None
        sim = dict(cfg.get("sim", {}))
        if args.seed is not None:
            sim["seed"] = args.seed
        self.sim = sim
        self.seed = int(sim.get("seed", 0))
        self.threads = args.threads or int(cfg.get("threads", 1))
        self.out = args.out or cfg.get("output", "pmeans-out")
        self.pot_n = int(cfg.get("potential", {}).get("n", 4096))
        self._grid = None

    def sim_config(self):
        s = self.sim
        t_end = float(s.get("t_end", 1.0))
        return SimConfig(s.get("algorithm", "X"), self.p, t_end,
                         tuple(s.get("checkpoints", (t_end,))), self.seed,
                         s.get("euler_dt"), s.get("x0", "uniform"))

    @property
    def grid(self):
        if self._grid is None:
            self._grid = build_grid(self.p, self.measure, self.pot_n)
        return self._grid

    def b_estimate(self):
        override = self.cfg.get("potential", {}).get("b_estimate")
        return float(override) if override is not None else critical_depth(self.grid)[0]

    def oracle_minima(self):
        """``(method, [(x, U)], degenerate)`` for the configured measure."""
        if isinstance(self.measure, Empirical) and self.p == 2.0:
            pts = exact_mean_p2_empirical(self.measure.atoms, self.measure.weights)
            return "exact_p2_empirical", pts, False
        oc = self.cfg.get("oracle", {})
        mins = grid_minimize(self.p, self.measure, int(oc.get("n", 8192)), float(oc.get("tol", 1e-12)))
        return "grid", list(mins.points), mins.degenerate

    def outdir(self):
        os.makedirs(self.out, exist_ok=True)
        return self.out

    def warn_schedule(self):
        rep = validate(self.schedule, self.p, self.b_estimate())
        for w in rep.warnings:
            print(f"warning: {w}")
        return rep


def _write(path, text):
    with open(path, "w") as f:
        f.write(text)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow(["%.17g" % v if isinstance(v, float) else v for v in r])


def _meta(run, t0):
    return {"wall_time": time.perf_counter() - t0,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            "backend": _core.BACKEND}


def cmd_simulate(run):
    t0 = time.perf_counter()
    cfg = run.sim_config()
    run.warn_schedule()
    rec = run_trajectory(run.measure, run.schedule, cfg, 0)
    out = run.outdir()
    lines = [dumps({"t": t, "x": float(x)}) for t, x in zip(cfg.checkpoints, rec.positions)]
    _write(os.path.join(out, "trajectory.jsonl"), "".join(line + "\n" for line in lines))
    summary = {"config": run.cfg, "seed": run.seed, "final": rec.final, "jumps": rec.jumps,
               "meta": _meta(run, t0)}
    _write(os.path.join(out, "summary.json"), dumps(summary) + "\n")
    print(f"final position {rec.final:.17g}")
    print(f"jumps {rec.jumps}")
    return EXIT_OK


def cmd_ensemble(run):
    t0 = time.perf_counter()
    cfg = run.sim_config()
    run.warn_schedule()
    _, pts, degenerate = run.oracle_minima()
    mins = Minima(tuple(pts), degenerate)
    s = run.sim
    summ = run_ensemble(run.measure, run.schedule, cfg, int(s.get("n_traj", 1)),
                        potential=run.grid, minima=mins, bins=int(s.get("bins", 128)),
                        delta=float(s.get("delta", 0.1)), threads=run.threads)
    out = run.outdir()
    summ.write_jsonl(os.path.join(out, "ensemble.jsonl"))
    bins = len(summ.checkpoints[0].hist)
    centers = -np.pi + (np.arange(bins) + 0.5) * (2 * np.pi / bins)
    rows = [(c.t, float(th), float(h)) for c in summ.checkpoints for th, h in zip(centers, c.hist)]
    _write_csv(os.path.join(out, "histograms.csv"), ["t", "bin_center", "mass"], rows)
    summary = {"config": run.cfg, "seed": run.seed, "n_traj": summ.n_traj,
               "minima": [x for x, _ in pts], "jumps": summ.jump_stats(), "meta": _meta(run, t0)}
    _write(os.path.join(out, "summary.json"), dumps(summary) + "\n")
    for c in summ.checkpoints:
        print(f"t={c.t:g} nbhd_mass={c.nbhd_mass:.4f} tv={c.tv:.4f}")
    return EXIT_OK


def cmd_oracle(run):
    method, pts, degenerate = run.oracle_minima()
    out = run.outdir()
    res = {"method": method, "degenerate": degenerate,
           "minimizers": [x for x, _ in pts], "values": [v for _, v in pts]}
    _write(os.path.join(out, "oracle.json"), dumps(res) + "\n")
    if degenerate:
        print("degenerate: constant potential")
    for x, v in pts:
        print(f"{x:.17g} U={v:.17g}")
    return EXIT_OK


def cmd_gibbs(run, betas):
    if betas is None:
        betas = run.cfg.get("gibbs", {}).get("betas", [0.0])
    g = run.grid
    out = run.outdir()
    _write_csv(os.path.join(out, "potential.csv"), ["theta", "U_p"],
               [(float(t), float(v)) for t, v in zip(g.theta, g.values)])
    gibbs = [gibbs_build(g, float(b)) for b in betas]
    _write_csv(os.path.join(out, "gibbs.csv"), ["theta"] + [f"beta={b:g}" for b in betas],
               [(float(t), *(float(gb.density[i]) for gb in gibbs)) for i, t in enumerate(g.theta)])
    locs = g.minima.locations
    for b, gb in zip(betas, gibbs):
        mass = 1.0 if g.minima.degenerate else gibbs_mass(gb, locs, 0.1)
        print(f"beta={b:g} log_Z={gb.log_Z:.17g} mass(minima, 0.1)={mass:.6f}")
    return EXIT_OK


def cmd_diagnose(run):
    d = run.cfg.get("diagnose", {})
    tab = lstar_scaling_study(run.measure, d.get("alphas", [1e-4, 3e-4, 1e-3, 3e-3]),
                              d.get("betas", [2.0, 4.0]), int(d.get("grid_n", 256)),
                              int(d.get("n_quad", 8192)))
    out = run.outdir()
    _write_csv(os.path.join(out, "lstar_scaling.csv"), ["alpha", "beta", "sup_abs_lstar"], tab.rows)
    for a, b, v in tab.rows:
        print(f"alpha={a:g} beta={b:g} sup|L*1|={v:.6g}")
    for b, s in tab.slopes.items():
        print(f"slope in alpha at beta={b:g}: {s:.4f}")
    if tab.null:
        print(f"all entries below {NULL_LEVEL:g}: invariant measure, nothing to scale")
    print("scaling " + ("pass" if tab.passed else "FAIL"))
    return EXIT_OK


def cmd_validate_schedule(run):
    rep = validate(run.schedule, run.p, run.b_estimate())
    for line in rep.lines():
        print(line)
    return EXIT_OK


def _parse_betas(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def build_parser():
    ap = argparse.ArgumentParser(prog="pmeans", description="Annealing for intrinsic p-means on the circle.")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("simulate", "ensemble", "oracle", "gibbs", "diagnose", "validate-schedule"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True)
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int)
        sp.add_argument("--out")
        if name == "gibbs":
            sp.add_argument("--beta", type=_parse_betas, help="comma-separated inverse temperatures")
    return ap


COMMANDS = {"simulate": cmd_simulate, "ensemble": cmd_ensemble, "oracle": cmd_oracle,
            "diagnose": cmd_diagnose, "validate-schedule": cmd_validate_schedule}


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code else EXIT_OK
    try:
        run = Run(load_config(args.config), args)
        if run.sim:
            run.sim_config()
        if args.command == "gibbs":
            return cmd_gibbs(run, args.beta)
        return COMMANDS[args.command](run)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as e:  # noqa: BLE001 - report and map to the runtime exit code
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
