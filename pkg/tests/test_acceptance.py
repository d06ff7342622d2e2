"""Exit criteria. Each test prints one PASS/FAIL line (also collected in the
terminal summary) and enforces its tolerance and time budget."""
import json
import time

import numpy as np
import pytest

from circadian import (
    Converged,
    FullState,
    ModelParams,
    TwoCycle,
    char_mrna,
    char_per,
    check_proposition_conditions,
    check_state_space,
    closed_loop_equilibrium,
    integrate_dde,
    integrate_ode,
    iterate_spiderweb,
    mm_rate,
    oscillation_metrics,
)
from circadian.cli import main
from circadian.integrate import amplitudes, mrna_steady_state, per_steady_state
from circadian.smallgain import DEFAULT_SEEDS, fixed_point, map_derivative

INIT = FullState.uniform(0.2)


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0


def test_criterion_1_condition_suite(criterion, table):
    with Timer() as tm:
        rep = check_proposition_conditions(table, table.ks * 2.45)
        space = check_state_space(table.replace(vs=0.4), 2.45)
    sides = [(rep.C1.lhs, rep.C1.rhs), (rep.C2.lhs, rep.C2.rhs), (rep.C4.lhs, rep.C4.rhs), (rep.C3.lhs, rep.C3.rhs)]
    expected = [(2.53, 3.2), (5.7, 6.58), (3.45, 5.0), (0.931, 0.95)]
    ok = (
        rep.overall
        and all(i.holds for i in rep.items())
        and np.allclose(sides, expected, atol=1e-12)
        and space.overall
        and main(["check", "--vs", "0.4"]) == 0
        and tm.elapsed < 1.0
    )
    criterion(1, "Proposition/Theorem inequalities hold for the table", ok, f"{tm.elapsed:.3f}s")
    assert ok


def test_criterion_2_characteristic_consistency(criterion, table, rng):
    p = table.replace(vs=0.4)
    with Timer() as tm:
        us = np.linspace(0.0, 3.0, 50)
        err_m = max(abs(mrna_steady_state(u, p) - char_mrna(u, p)) for u in us)
        err_p = 0.0
        for c in np.linspace(0.0, 0.9, 20):
            target = char_per(c, table).as_array()
            for x0 in rng.uniform(0.0, 5.0, size=(10, 4)):
                err_p = max(err_p, np.abs(per_steady_state(c, table, x0) - target).max())
    ok = err_m < 1e-6 and err_p < 1e-5 and tm.elapsed < 30
    criterion(2, "closed-form characteristics match simulated steady states", ok,
              f"mRNA err {err_m:.2e}, PER err {err_p:.2e}, {tm.elapsed:.1f}s")
    assert ok


def test_criterion_3_stability_regime(criterion, p04, rng):
    with Timer() as tm:
        traces = [iterate_spiderweb(s, p04, tol=1e-9) for s in DEFAULT_SEEDS]
        limits = [t.verdict.u_star for t in traces if isinstance(t.verdict, Converged)]
        web_ok = len(limits) == len(DEFAULT_SEEDS) and max(limits) - min(limits) < 1e-8
        eq = closed_loop_equilibrium(p04).as_array()
        ode_err = 0.0
        for _ in range(10):
            x0 = FullState(rng.uniform(0, 2.45), *rng.uniform(0, 5, 4))
            ode_err = max(ode_err, np.abs(integrate_ode(x0, p04, 1000.0, 0.01).y[-1] - eq).max())
        dde_amp = {}
        for tau in (10.0, 100.0):
            tr = integrate_dde(INIT, p04, tau, 2000.0, 0.05)
            dde_amp[tau] = max(amplitudes(tr, 1500.0).values())
    ok = web_ok and ode_err < 1e-4 and all(a < 1e-3 for a in dde_amp.values()) and tm.elapsed < 120
    criterion(3, "vs=0.4 stable: spiderweb, ODE and delayed loop converge", ok,
              f"u*={limits[0]:.9f}, ODE err {ode_err:.1e}, DDE amp {dde_amp}, {tm.elapsed:.1f}s")
    assert ok


def test_criterion_4_iteration_instability(criterion, p05):
    with Timer() as tm:
        verdicts = [iterate_spiderweb(s, p05, tol=1e-9).verdict for s in DEFAULT_SEEDS]
        slope = map_derivative(fixed_point(p05), p05)
    ok = all(isinstance(v, TwoCycle) for v in verdicts) and abs(slope) > 1 and tm.elapsed < 5
    cycle = verdicts[0]
    criterion(4, "vs=0.5 spiderweb splits into a two-cycle", ok,
              f"cycle ({cycle.lo:.5f}, {cycle.hi:.5f}), dF/du={slope:.4f}, {tm.elapsed:.2f}s")
    assert ok


def test_criterion_5_delay_induced_oscillation(criterion, p05):
    with Timer() as tm:
        tr = integrate_dde(INIT, p05, 100.0, 2000.0, 0.05)
        amp = amplitudes(tr, 1500.0)["M"]
        m = oscillation_metrics(tr, 500.0)
    rel_std = m.period_std / m.period
    ok = amp > 0.1 and rel_std < 0.02 and m.n_cycles >= 2 and tm.elapsed < 60
    criterion(5, "vs=0.5, delay 100 oscillates", ok,
              f"M amp {amp:.3f}, period {m.period:.1f} h, std {100 * rel_std:.2f}% over {m.n_cycles} cycles, {tm.elapsed:.1f}s")
    assert ok


def test_criterion_6_goldbeter_limit_cycle(criterion, table):
    with Timer() as tm:
        tr = integrate_ode(INIT, table, 500.0, 0.01)
        m = oscillation_metrics(tr, 200.0)
    ok = m.amplitude["M"] > 0.5 and 24 * 0.8 <= m.period <= 24 * 1.2 and tm.elapsed < 60
    criterion(6, "table parameters: limit cycle near 24 h", ok,
              f"period {m.period:.2f} h, M amp {m.amplitude['M']:.3f}, {tm.elapsed:.1f}s")
    assert ok


def test_criterion_7_numerics(criterion, p04, tmp_path):
    ref = integrate_ode(INIT, p04, 10.0, 1e-4).y[-1]
    e02 = np.abs(integrate_ode(INIT, p04, 10.0, 0.02).y[-1] - ref).max()
    e01 = np.abs(integrate_ode(INIT, p04, 10.0, 0.01).y[-1] - ref).max()
    ratio = e02 / e01

    dde_gap = np.abs(integrate_ode(INIT, p04, 50.0, 0.01).y - integrate_dde(INIT, p04, 0.01, 50.0, 0.01).y).max()

    def residual(h):
        tr = integrate_ode(INIT, p04, 20.0, h)
        total = tr.y[:, 1:].sum(axis=1)
        dtotal = (total[2:] - total[:-2]) / (2 * h)
        expected = p04.ks * tr.y[1:-1, 0] - mm_rate(p04.vd, p04.kd, tr.y[1:-1, 3])
        return np.abs(dtotal - expected).max()

    mb_ratio = residual(0.02) / residual(0.01)

    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["simulate", "--mode", "dde", "--delay", "100", "--vs", "0.5", "--t-end", "400"]
    main(args + ["--out", str(a)])
    main(["simulate", "--config", str(a) + ".config.json", "--out", str(b)])
    echo_ok = a.read_bytes() == b.read_bytes() and json.loads((tmp_path / "a.csv.config.json").read_text())["vs"] == 0.5
    det_ok = integrate_dde(INIT, p04, 10.0, 100.0).y.tobytes() == integrate_dde(INIT, p04, 10.0, 100.0).y.tobytes()

    ok = 12 <= ratio <= 20 and dde_gap < 1e-3 and 3.5 < mb_ratio < 4.5 and echo_ok and det_ok
    criterion(7, "RK4 order, DDE->ODE limit, mass balance O(h^2), reproducibility", ok,
              f"step-halving ratio {ratio:.2f}, DDE gap {dde_gap:.1e}, mass-balance ratio {mb_ratio:.2f}")
    assert ok
