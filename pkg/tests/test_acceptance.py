"""Acceptance gates. Each test prints one PASS/FAIL line at the stated tolerance."""

import random
import time

import numpy as np
import pytest

from spsbsim.battery import (
    BatteryParams,
    BatteryState,
    CurrentProfile,
    CurrentSegment,
    advance,
    constant_profile,
    end_of_life,
    sigma_constant,
    simulate_profile,
)
from spsbsim.hybrid import current_profile, run_hybrid, run_scenario
from spsbsim.multisched import check_proposition1, schedule
from spsbsim.oracle import diff, simulate
from spsbsim.pairsched import run_pair
from spsbsim.randomsets import random_schedulable
from spsbsim.taskmodel import PeriodicSpec, TaskInstance, TaskTrace, WindowSpec, expand_periodic

from battery_oracles import integrate_profile, lifetime_root
from conftest import iset, k, verdict

PARAMS = BatteryParams(40375, 0.273, 10)
I_BUSY = 200.0
N_RANDOM = 1000


@pytest.fixture(scope="module")
def random_suite():
    """Criterion 3's task sets with analytic and oracle results, timed once."""
    t_start = time.perf_counter()
    cases = []
    for seed in range(N_RANDOM):
        rs = random_schedulable(seed)
        w = schedule(rs.traces, rs.window, rs.residues)
        sim = simulate(rs.traces, rs.window, rs.residues)
        cases.append((rs, w, sim))
    return cases, time.perf_counter() - t_start


def test_c01_demo_windows_exact(demo):
    t_start = time.perf_counter()
    runs = run_scenario(demo)
    oracle_res = dict(demo.residues)
    bad = []
    for r in runs:
        traces = demo.traces(r.window, r.order)
        sim = simulate(traces, r.window, oracle_res)
        oracle_res = dict(sim.residues)
        if diff(r.waveform.busy, sim.busy) or r.waveform.residues != sim.residues:
            bad.append(r.window)
    elapsed = time.perf_counter() - t_start
    requested = [r for r in runs if r.requested]
    ok = not bad and len(requested) == 2 and elapsed < 1.0
    assert verdict(1, ok, f"demo windows [50,57.1) and [110,120): {len(bad)} mismatching windows "
                          f"(bridges included), {elapsed:.3f} s (< 1 s)")


def test_c02_hand_trace():
    win = WindowSpec(0, k(30))
    a = expand_periodic(PeriodicSpec(k(1), k(0.2)), win, "tau1")
    b = expand_periodic(PeriodicSpec(k(1.5), k(0.3), k(0.3)), win, "tau2")
    res = run_pair(a, b, win)
    zs = [s.z for s in res.segments[:27]]
    ps = [s.P for s in res.segments[:27]]
    ok = (
        zs == [k(0.3), k(0.8), k(1.3)] * 9
        and ps == [0, 0, k(0.1)] * 9
        and res.segments[2].busy == iset((2, 2.3))
        and res.waveform == simulate([a, b], win).busy
    )
    assert verdict(2, ok, "periodic pair: z = 0.3, 0.8, 1.3, ... and P = 0, 0, 0.1, ... (3-periodic), "
                          "segment n=3 busy [2, 2.3)")


def test_c03_random_equivalence(random_suite):
    cases, elapsed = random_suite
    mismatches = sum(1 for _, w, sim in cases if diff(w.busy, sim.busy))
    sizes = {len(rs.traces) for rs, _, _ in cases}
    mixed = any(any(rs.periodic) and not all(rs.periodic) for rs, _, _ in cases)
    with_residues = sum(1 for rs, _, _ in cases if rs.residues)
    ok = mismatches == 0 and elapsed < 60 and sizes == {2, 3, 4, 5} and mixed and with_residues > 0
    assert verdict(3, ok, f"{len(cases)} random schedulable sets ({min(sizes)}-{max(sizes)} tasks, "
                          f"{with_residues} with residues): {mismatches} mismatches, {elapsed:.1f} s (< 60 s)")


def test_c04_battery_exactness():
    worst_rel = 0.0
    for t in (1.0, 10.0, 100.0):
        y = advance(BatteryState.fresh(), PARAMS, I_BUSY, t).y
        ref = sigma_constant(PARAMS, I_BUSY, t)
        worst_rel = max(worst_rel, abs(y - ref) / ref)
    rng = random.Random(4)
    worst_abs = 0.0
    for _ in range(20):
        segs = [CurrentSegment(rng.uniform(0.05, 3.0), I_BUSY if i % 2 == 0 else 0.0)
                for i in range(rng.randint(2, 40))]
        prof = CurrentProfile(0.0, segs)
        _, ys = integrate_profile(PARAMS, np.zeros(PARAMS.m + 1), prof)
        traj = simulate_profile(PARAMS, BatteryState.fresh(), prof)
        worst_abs = max(worst_abs, float(np.max(np.abs(ys - [r.y_total for _, r in traj]))))
    ok = worst_rel <= 1e-12 and worst_abs <= 1e-6
    assert verdict(4, ok, f"closed form rel err {worst_rel:.2e} (<= 1e-12); "
                          f"pulsed vs DOP853 abs err {worst_abs:.2e} (<= 1e-6)")


def test_c05_lifetime_root():
    root = lifetime_root(PARAMS, I_BUSY)
    eol = end_of_life(PARAMS, BatteryState.fresh(), constant_profile(I_BUSY, 400.0))
    err = abs(eol - root)
    assert verdict(5, err <= 1e-6, f"end_of_life {eol:.9f} vs root {root:.9f} min, |diff| {err:.1e} (<= 1e-6)")


def test_c06_recovery_property():
    rng = random.Random(6)
    violations = 0
    for _ in range(200):
        current = rng.uniform(20.0, 600.0)
        segs = []
        for _ in range(rng.randint(1, 15)):
            segs.append(CurrentSegment(rng.uniform(0.01, 5.0), current))
            segs.append(CurrentSegment(rng.uniform(0.01, 5.0), 0.0))
        state = BatteryState.fresh()
        for seg in segs:
            ts = np.linspace(0.0, seg.duration, 12)[1:]
            ys = [state.y]
            for t in ts:
                nxt = advance(state, PARAMS, seg.current, t)
                if np.any(nxt.x < 0):
                    violations += 1
                ys.append(nxt.y)
            steps = np.diff(ys)
            if seg.current > 0 and not np.all(steps > 0):
                violations += 1
            if seg.current == 0 and not np.all(steps <= 0):
                violations += 1
            state = advance(state, PARAMS, seg.current, seg.duration)
    assert verdict(6, violations == 0, f"200 random pulsed profiles: {violations} violations of "
                                       "busy-increasing / idle-non-increasing / x >= 0")


def test_c07_proposition1(random_suite):
    cases, _ = random_suite
    folds = violations = 0
    for rs, w, _ in cases:
        for f in w.folds:
            if f.combined is None:
                continue
            folds += 1
            seen_alpha = TaskTrace(f.alpha.name, tuple(TaskInstance(s.t, s.C_alpha) for s in f.pair.segments))
            if not check_proposition1(f.combined, seen_alpha, rs.window):
                violations += 1
    assert verdict(7, violations == 0 and folds > 0,
                   f"{folds} combined tasks across the random suite: {violations} violations")


def test_c08_window_chaining():
    rng = random.Random(8)
    worst_y = 0.0
    mismatches = 0
    for i in range(100):
        rs = random_schedulable(50_000 + i)
        win = rs.window
        cut = win.t0 + rng.randint(1, win.L // 100_000 - 1) * 100_000
        first_win = WindowSpec(win.t0, cut - win.t0)
        second_win = WindowSpec(cut, win.end - cut)
        whole = run_hybrid(rs.traces, win, PARAMS, I_BUSY, residues=rs.residues)
        first = run_hybrid(rs.traces, first_win, PARAMS, I_BUSY, residues=rs.residues)
        second = run_hybrid(rs.traces, second_win, PARAMS, I_BUSY, first.battery_state, first.residues)
        if (first.waveform.busy | second.waveform.busy) != whole.waveform.busy:
            mismatches += 1
        if second.residues != whole.residues:
            mismatches += 1
        worst_y = max(worst_y, abs(second.battery_state.y - whole.battery_state.y))
    ok = mismatches == 0 and worst_y <= 1e-9
    assert verdict(8, ok, f"100 random split windows: {mismatches} waveform/residue mismatches, "
                          f"max |dy| {worst_y:.1e} (<= 1e-9)")


def test_c09_conservation(random_suite):
    cases, _ = random_suite
    bad = 0
    for rs, w, _ in cases:
        demand = sum(t.demand for t in rs.traces) + sum(rs.residues.values())
        if w.busy.measure() + sum(w.residues.values()) != demand:
            bad += 1
    assert verdict(9, bad == 0, f"{len(cases)} random sets: busy + end residues == demand in ticks, {bad} failures")


def test_c10_truncation_stability():
    coarse, fine = BatteryParams(40375, 0.273, 10), BatteryParams(40375, 0.273, 50)
    const = constant_profile(I_BUSY, 400.0)
    eol10 = end_of_life(coarse, BatteryState.fresh(coarse.m), const)
    eol50 = end_of_life(fine, BatteryState.fresh(fine.m), const)
    rel_const = abs(eol10 - eol50) / eol50

    win = WindowSpec(0, k(600))
    pair = [expand_periodic(PeriodicSpec(k(1), k(0.2)), win, "tau1"),
            expand_periodic(PeriodicSpec(k(1.5), k(0.3), k(0.3)), win, "tau2")]
    prof = current_profile(schedule(pair, win), I_BUSY)
    p10 = end_of_life(coarse, BatteryState.fresh(coarse.m), prof)
    p50 = end_of_life(fine, BatteryState.fresh(fine.m), prof)
    rel_pulsed = abs(p10 - p50) / p50

    ok = rel_const < 1e-3 and rel_pulsed < 1e-3
    assert verdict(10, ok, f"end_of_life m=10 vs m=50: constant {eol10:.4f} vs {eol50:.4f} min "
                           f"({rel_const:.3%}), pulsed {p10:.3f} vs {p50:.3f} min ({rel_pulsed:.3%}); "
                           "needs < 0.1%")
