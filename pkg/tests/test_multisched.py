import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spsbsim.hybrid import run_scenario
from spsbsim.multisched import (
    check_proposition1,
    combine,
    combine_segment,
    phi_at,
    phi_samples,
    schedule,
)
from spsbsim.oracle import simulate
from spsbsim.pairsched import Segment, run_pair
from spsbsim.randomsets import random_schedulable
from spsbsim.taskmodel import PeriodicSpec, TaskInstance, TaskTrace, WindowSpec, expand_periodic
from spsbsim.timebase import EMPTY

from conftest import iset, k

# busy sets produced by the oracle simulator for the bundled six-task demo,
# with residues chained through the bridge windows from t=0
DEMO_BUSY_50 = iset(
    (50, 50.9), (51, 51.2), (51.3, 52.4), (52.8, 53.9), (54, 54.2),
    (54.3, 54.6), (55, 55.2), (55.3, 55.7), (55.8, 56.6), (57, 57.1),
)
DEMO_BUSY_110 = iset(
    (110, 110.3), (111, 111.2), (111.3, 111.7), (112, 112.2), (112.5, 112.9),
    (113, 114.4), (114.9, 115.5), (116, 116.6), (117, 117.9), (118, 118.2),
    (118.5, 118.9), (119, 119.2), (119.7, 120),
)


def seg(mode, t, C_alpha, R, z=0, offset=0, served=0, T=1):
    return Segment(n=1, t=k(t), T_alpha=k(T), C_alpha=k(C_alpha), z=k(z), P=k(R), R=k(R), mode=mode,
                   offset=k(offset), C_beta=k(served), served_beta=k(served), busy=EMPTY)


def test_combine_segment_examples():
    assert combine_segment(seg(2, 2, 0.2, 0.1, z=1.3, offset=1)) == [TaskInstance(k(2), k(0.3))]
    assert combine_segment(seg(1, 0, 0.2, 0, z=0.3, offset=0.3, served=0.3)) == [
        TaskInstance(0, k(0.2)), TaskInstance(k(0.3), k(0.3))]
    assert combine_segment(seg(1, 4, 1, 0, z=0.5, offset=1, served=0)) == [TaskInstance(k(4), k(1))]


def test_combine_segment_merges_pieces_requested_together():
    assert combine_segment(seg(1, 3, 0, 0, z=0, offset=0, served=0.4)) == [TaskInstance(k(3), k(0.4))]


def test_combined_trace_reproduces_pair_waveform():
    win = WindowSpec(0, k(30))
    a = expand_periodic(PeriodicSpec(k(1), k(0.2)), win, "a")
    b = expand_periodic(PeriodicSpec(k(1.5), k(0.3), k(0.3)), win, "b")
    pair = run_pair(a, b, win)
    cmb = combine(pair, "ab")
    assert simulate([cmb.trace], win).busy == pair.waveform
    assert check_proposition1(cmb, a, win)
    assert cmb.sources[:3] == ((1, 1), (1, 2), (2, 1))


def test_single_task_schedule():
    win = WindowSpec(0, k(3))
    a = expand_periodic(PeriodicSpec(k(1), k(0.2)), win, "a")
    w = schedule([a], win)
    assert w.busy == iset((0, 0.2), (1, 1.2), (2, 2.2))
    assert w.folds == [] and w.order == ["a"]


def test_empty_schedule():
    w = schedule([TaskTrace("a")], WindowSpec(0, k(3)))
    assert w.busy == EMPTY and w.residues == {"a": 0}
    assert phi_at(w, 0) == 0


@pytest.mark.parametrize("index, expected", [(0, DEMO_BUSY_50), (1, DEMO_BUSY_110)])
def test_demo_windows_match_oracle(demo, index, expected):
    runs = [r for r in run_scenario(demo) if r.requested]
    r = runs[index]
    traces = demo.traces(r.window, r.order)
    sim = simulate(traces, r.window, r.carried_in)
    assert r.waveform.busy == sim.busy == expected
    assert r.waveform.residues == sim.residues
    assert r.waveform.diagnostics == []
    assert all(f.proposition1 for f in r.waveform.folds)


def test_demo_residues_into_windows(demo):
    runs = [r for r in run_scenario(demo) if r.requested]
    assert {n: v for n, v in runs[0].carried_in.items() if v} == {"tau2": k(0.1)}
    assert {n: v for n, v in runs[1].carried_in.items() if v} == {"tau2": k(0.1)}
    assert {n: v for n, v in runs[1].waveform.residues.items() if v} == {"tau5": k(0.1)}


def test_phi_at_demo(demo):
    w = next(r for r in run_scenario(demo) if r.requested).waveform
    assert phi_at(w, k(51.1)) == 1 == int(DEMO_BUSY_50.contains(k(51.1)))
    assert phi_at(w, k(50.95)) == 0
    with pytest.raises(ValueError):
        phi_at(w, k(57.1))
    samples = phi_samples(w, k(0.1))
    assert len(samples) == 71 and samples[0] == (k(50), 1)
    assert sum(p for _, p in phi_samples(w, 1)) == w.busy.measure()


def test_mode2_only_fold_keeps_intervals():
    win = WindowSpec(0, k(6))
    a = expand_periodic(PeriodicSpec(k(1), k(0.2)), win, "a")
    b = TaskTrace("b", ())
    pair = run_pair(a, b, win, {"b": k(0.3)})
    cmb = combine(pair, "c")
    assert cmb.trace.request_times == a.request_times
    assert check_proposition1(cmb, a, win)


def test_proposition1_rejects_stretched_intervals():
    win = WindowSpec(0, k(4))
    a = TaskTrace("a", tuple(TaskInstance(k(t), k(0.1)) for t in range(4)))
    stretched = TaskTrace("c", (TaskInstance(0, k(0.1)), TaskInstance(k(2), k(0.1))))
    assert not check_proposition1(stretched, a, win)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 100_000))
def test_random_sets_match_oracle(seed):
    rs = random_schedulable(seed)
    w = schedule(rs.traces, rs.window, rs.residues)
    sim = simulate(rs.traces, rs.window, rs.residues)
    assert w.busy == sim.busy
    assert w.residues == sim.residues
    assert all(f.proposition1 for f in w.folds)
    assert len(w.folds) == len(w.order) - 1 or len(w.order) == 1
