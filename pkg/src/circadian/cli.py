"""``circadian`` command-line front end.

Exit codes: 0 success / positive result, 1 usage or config error,
2 analysis-negative (conditions fail, two-cycle, infeasible parameters),
3 numerical failure (non-finite state, no bracket, no convergence,
iteration cap).
"""
from __future__ import annotations

import argparse
import dataclasses
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import characteristics as ch
from . import smallgain as sg
from .errors import (
    ConstraintViolation,
    InsufficientData,
    NoBracket,
    NonFinite,
    NotConverged,
    SaturationExceeded,
    UsageError,
)
from .integrate import COMPONENTS, integrate_dde, integrate_ode, oscillation_metrics
from .model import FullState, ModelParams
from .svg import LinePlot

PARAM_KEYS = ModelParams.field_names()
OSC_THRESHOLD = 1e-3


@dataclass
class RunConfig:
    params: ModelParams = field(default_factory=ModelParams)
    mbar: float = ch.DEFAULT_MBAR
    dt: float | None = None
    tol: float | None = None
    t_end: float = 2000.0
    max_iter: int = sg.DEFAULT_MAX_ITER
    seeds: list = field(default_factory=lambda: list(sg.DEFAULT_SEEDS))
    delay: float = 0.0
    transient_cut: float = 500.0
    init: list = field(default_factory=lambda: [0.2])
    u0: float = 0.0
    stride: int = 1
    mode: str = "ode"
    system: str = "mrna"
    grid_points: int = 101
    vs_grid: list = field(default_factory=lambda: [0.3, 0.4, 0.5, 0.6])
    delay_grid: list = field(default_factory=lambda: [0.0, 10.0, 100.0])
    workers: int | None = None
    out: str | None = None
    svg: str | None = None

    def knobs(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d.pop("params")
        d.pop("out")
        d.pop("svg")
        return d

    def echo(self) -> dict:
        """Every resolved value, in the config-file key set."""
        return {**self.params.to_dict(), **self.knobs()}

    def initial_state(self) -> FullState:
        return FullState.from_sequence(self.init)


KNOB_KEYS = tuple(f.name for f in dataclasses.fields(RunConfig) if f.name != "params")
_LIST_KEYS = {"seeds", "init", "vs_grid", "delay_grid"}
_INT_KEYS = {"max_iter", "stride", "grid_points", "workers", "n"}
_STR_KEYS = {"mode", "system", "out", "svg"}


def _coerce(key, value):
    try:
        if value is None:
            return None
        if key in _LIST_KEYS:
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            elif not isinstance(value, (list, tuple)):
                value = [value]
            return [float(v) for v in value]
        if key in _STR_KEYS:
            return str(value)
        if key in _INT_KEYS:
            f = float(value)
            if f != int(f):
                raise ValueError
            return int(f)
        return float(value)
    except (TypeError, ValueError):
        raise UsageError(f"invalid value for {key!r}: {value!r}") from None


def parse_config(path: str | None, flags: dict | None = None, command: str | None = None) -> RunConfig:
    """Merge built-in defaults < config file < flags.

    ``flags`` maps config keys to values (``None`` meaning not given).
    """
    merged: dict = {}
    if path is not None:
        try:
            with open(path) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise UsageError(f"config {path} must be a flat JSON object")
        merged.update(data)
    for key, value in (flags or {}).items():
        if value is not None:
            merged[key] = value

    unknown = sorted(set(merged) - set(PARAM_KEYS) - set(KNOB_KEYS))
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")

    param_values = {k: _coerce(k, merged[k]) for k in PARAM_KEYS if k in merged}
    try:
        params = ModelParams(**param_values)
    except ConstraintViolation as exc:
        raise UsageError(str(exc)) from None
    knobs = {k: _coerce(k, merged[k]) for k in KNOB_KEYS if k in merged}
    cfg = RunConfig(params=params, **knobs)

    if cfg.mode not in ("ode", "dde"):
        raise UsageError(f"mode must be 'ode' or 'dde', got {cfg.mode!r}")
    if cfg.system not in ("mrna", "per"):
        raise UsageError(f"system must be 'mrna' or 'per', got {cfg.system!r}")
    if cfg.stride < 1 or cfg.max_iter < 1 or cfg.grid_points < 2:
        raise UsageError("stride and max_iter must be >= 1, grid_points >= 2")
    if len(cfg.init) not in (1, 5):
        raise UsageError(f"init takes 1 or 5 values, got {len(cfg.init)}")
    if cfg.dt is None:
        long_run = command == "sweep" or (command == "simulate" and cfg.mode == "dde")
        cfg.dt = 0.05 if long_run else 0.01
    if cfg.tol is None:
        cfg.tol = sg.BISECTION_TOL if command == "equilibrium" else sg.DEFAULT_TOL
    return cfg


def _fmt(x) -> str:
    return f"{x:.17e}" if isinstance(x, float) else str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _emit(cfg: RunConfig, text: str):
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
        with open(cfg.out + ".config.json", "w") as fh:
            json.dump(cfg.echo(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)
        print("# config " + json.dumps(cfg.echo(), sort_keys=True), file=sys.stderr)


def _note(msg):
    print(msg, file=sys.stderr)


def cmd_check(cfg: RunConfig) -> int:
    p = cfg.params
    cond = ch.check_proposition_conditions(p, ch.default_c_max(p, cfg.mbar))
    space = ch.check_state_space(p, cfg.mbar)
    lines = ["PER-block conditions (c_max = ks*mbar = %.6g):" % cond.c_max]
    lines += ["  " + i.describe() for i in cond.items()]
    lines.append(f"  overall: {cond.overall}")
    lines.append(f"state space (mbar = {cfg.mbar:.6g}):")
    lines += ["  " + i.describe() for i in space.items()]
    lines.append(f"  overall: {space.overall}")
    text = "\n".join(lines) + "\n"
    if cfg.out:
        _emit(cfg, json.dumps({"conditions": cond.to_dict(), "state_space": space.to_dict()}, indent=2) + "\n")
    else:
        print("# config " + json.dumps(cfg.echo(), sort_keys=True), file=sys.stderr)
    sys.stdout.write(text)
    return 0 if cond.overall and space.overall else 2


def cmd_char(cfg: RunConfig) -> int:
    p = cfg.params
    if cfg.system == "mrna":
        grid = np.linspace(0.0, 3.0, cfg.grid_points)
        rows = [(float(u), ch.char_mrna(float(u), p)) for u in grid]
    else:
        grid = np.linspace(0.0, ch.default_c_max(p, cfg.mbar), cfg.grid_points)
        rows = [(float(c), ch.char_per(float(c), p).PN) for c in grid]
    _emit(cfg, _csv(("u", "value"), rows))
    return 0


def spiderweb_svg(trace: sg.SpiderwebTrace, p: ModelParams, mbar: float) -> LinePlot:
    """Both characteristics in the (PN, PER input) plane with the iteration path."""
    u_max = max(max(trace.iterates), 1e-3) * 1.2
    us = np.linspace(0.0, u_max, 200)
    mrna_curve = [(u, p.ks * ch.char_mrna(u, p)) for u in us]
    c_top = min(ch.default_c_max(p, mbar), p.vd * (1 - 1e-6))
    per_curve = []
    for c in np.linspace(0.0, c_top, 200):
        try:
            per_curve.append((ch.char_per(c, p).PN, c))
        except SaturationExceeded:
            break
    per_curve = [(x, y) for x, y in per_curve if x <= u_max]
    path = []
    for u_k, u_next in zip(trace.iterates, trace.iterates[1:]):
        c_k = p.ks * ch.char_mrna(u_k, p)
        path += [(u_k, c_k), (u_next, c_k)]
    plot = LinePlot(title=f"spiderweb, vs={p.vs:g}: {trace.verdict.name}")
    plot.xlabel = "nuclear PER (u1)"
    plot.ylabel = "PER input ks*M (u2)"
    plot.add(mrna_curve, color="#1f77b4", dash="6,3", label="mRNA characteristic")
    plot.add(per_curve, color="#2ca02c", dash="2,2", label="PER characteristic")
    plot.add(path, color="#d62728", label="iteration")
    return plot


def cmd_spiderweb(cfg: RunConfig) -> int:
    p = cfg.params
    trace = sg.iterate_spiderweb(cfg.u0, p, cfg.max_iter, cfg.tol)
    _emit(cfg, _csv(("step", "u", "F_u"), trace.rows()))
    v = trace.verdict
    if cfg.svg:
        spiderweb_svg(trace, p, cfg.mbar).save(cfg.svg)
    if isinstance(v, sg.Converged):
        _note(f"Converged u*={v.u_star:.12g} after {v.iterations} iterations")
        return 0
    if isinstance(v, sg.TwoCycle):
        _note(f"TwoCycle lo={v.lo:.12g} hi={v.hi:.12g} after {v.iterations} iterations")
        return 2
    _note(f"MaxIterReached after {v.iterations} iterations")
    return 3


def cmd_equilibrium(cfg: RunConfig) -> int:
    eq = sg.closed_loop_equilibrium(cfg.params, cfg.tol)
    _emit(cfg, _csv(COMPONENTS, [eq.as_array().tolist()]))
    return 0


def _simulate(p, x0, delay, t_end, dt, mode):
    if mode == "dde" and delay > 0:
        return integrate_dde(x0, p, delay, t_end, dt)
    return integrate_ode(x0, p, t_end, dt)


def cmd_simulate(cfg: RunConfig) -> int:
    traj = _simulate(cfg.params, cfg.initial_state(), cfg.delay, cfg.t_end, cfg.dt, cfg.mode)
    rows = (
        [float(traj.times[i])] + traj.y[i].tolist() for i in range(0, len(traj), cfg.stride)
    )
    _emit(cfg, _csv(("t",) + COMPONENTS, rows))
    cut = min(cfg.transient_cut, float(traj.times[-1]) * 0.5)
    try:
        m = oscillation_metrics(traj, cut)
        amp, period, std, ncyc = m.amplitude, m.period, m.period_std, m.n_cycles
    except InsufficientData as exc:
        amp, period, std, ncyc = exc.amplitude, None, None, 0
    oscillating = amp["M"] > OSC_THRESHOLD and period is not None
    _note(f"after t={cut:g} h: " + ", ".join(f"amp[{k}]={v:.6g}" for k, v in amp.items()))
    if period is None:
        _note("period: n/a (fewer than two peaks of M)")
    else:
        _note(f"period={period:.6g} h (std {std:.3g} over {ncyc} cycles)")
    _note("sustained oscillation" if oscillating else "no sustained oscillation")
    if cfg.svg:
        plot = LinePlot(width=640, height=360, title=f"vs={cfg.params.vs:g}, delay={cfg.delay:g}")
        plot.xlabel = "t (h)"
        plot.ylabel = "concentration (uM)"
        step = max(1, len(traj) // 2000)
        plot.add(zip(traj.times[::step], traj.column("M")[::step]), color="#1f77b4", label="M")
        plot.add(zip(traj.times[::step], traj.column("PN")[::step]), color="#d62728", label="PN")
        plot.save(cfg.svg)
    return 0


def sweep_point(args):
    """One (vs, delay) grid point -> (vs, delay, verdict, PN_eq_or_amp, period)."""
    params, delay, cfg = args
    try:
        verdict = sg.small_gain_verdict(params, cfg.seeds, cfg.max_iter, cfg.tol)
    except (ConstraintViolation, SaturationExceeded):
        verdict = None
    if verdict is sg.Verdict.STABLE:
        eq = sg.closed_loop_equilibrium(params)
        return (params.vs, delay, "stable", eq.PN, "")
    traj = _simulate(params, cfg.initial_state(), delay, cfg.t_end, cfg.dt, "dde")
    cut = min(cfg.transient_cut, float(traj.times[-1]) * 0.5)
    try:
        m = oscillation_metrics(traj, cut)
        amp, period = m.amplitude["M"], m.period
    except InsufficientData as exc:
        amp, period = exc.amplitude["M"], ""
    label = "oscillating" if amp > OSC_THRESHOLD and period != "" else "damped"
    return (params.vs, delay, label, amp, period)


def _workers(cfg):
    if cfg.workers:
        return cfg.workers
    env = os.environ.get("CIRCADIAN_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"CIRCADIAN_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def cmd_sweep(cfg: RunConfig) -> int:
    tasks = [
        (cfg.params.replace(vs=vs), delay, cfg)
        for vs in cfg.vs_grid
        for delay in cfg.delay_grid
    ]
    n = _workers(cfg)
    if n == 1 or len(tasks) == 1:
        rows = [sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            rows = list(pool.map(sweep_point, tasks))
    _emit(cfg, _csv(("vs", "delay", "verdict", "PN_eq_or_amp", "period"), rows))
    return 0


HANDLERS = {
    "check": cmd_check,
    "char": cmd_char,
    "spiderweb": cmd_spiderweb,
    "equilibrium": cmd_equilibrium,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    add = common.add_argument
    add("--config", default=None, help="flat JSON config file")
    add("--vs", type=float)
    add("--mbar", type=float)
    add("--delay", type=float)
    add("--t-end", dest="t_end", type=float)
    add("--dt", type=float)
    add("--init", help="one value for all five states, or five comma-separated")
    add("--u0", type=float)
    add("--seeds", help="comma-separated spiderweb seeds")
    add("--max-iter", dest="max_iter", type=int)
    add("--tol", type=float)
    add("--transient-cut", dest="transient_cut", type=float)
    add("--stride", type=int)
    add("--grid-points", dest="grid_points", type=int)
    add("--out")
    add("--svg")
    add("--set", action="append", default=[], metavar="KEY=VALUE", help="override any parameter or knob")

    parser = _Parser(prog="circadian", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("check", parents=[common], help="check stability hypotheses")
    p_char = sub.add_parser("char", parents=[common], help="tabulate a characteristic")
    p_char.add_argument("--system", choices=("mrna", "per"))
    sub.add_parser("spiderweb", parents=[common], help="iterate the composed characteristic")
    sub.add_parser("equilibrium", parents=[common], help="closed-loop equilibrium")
    p_sim = sub.add_parser("simulate", parents=[common], help="integrate the closed loop")
    p_sim.add_argument("--mode", choices=("ode", "dde"))
    p_sweep = sub.add_parser("sweep", parents=[common], help="classify a (vs, delay) grid")
    p_sweep.add_argument("--vs-grid", dest="vs_grid")
    p_sweep.add_argument("--delay-grid", dest="delay_grid")
    p_sweep.add_argument("--workers", type=int)
    return parser


def _flags(ns: argparse.Namespace) -> dict:
    flags = {k: v for k, v in vars(ns).items() if k not in ("command", "config", "set")}
    for item in ns.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        flags[key.strip()] = value.strip()
    return flags


def main(argv=None) -> int:
    try:
        ns = build_parser().parse_args(argv)
        cfg = parse_config(ns.config, _flags(ns), ns.command)
        return HANDLERS[ns.command](cfg)
    except UsageError as exc:
        print(f"circadian: error: {exc}", file=sys.stderr)
        return 1
    except (ConstraintViolation, SaturationExceeded) as exc:
        print(f"circadian: infeasible parameters: {exc}", file=sys.stderr)
        return 2
    except (NonFinite, NoBracket, NotConverged) as exc:
        print(f"circadian: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
