"""Coupling of the processor waveform to the battery model.

A busy processor draws a constant current and an idle one draws nothing,
so the busy set of a window maps directly to a piecewise-constant profile.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .battery import (
    BatteryParams,
    BatteryState,
    CapacityReport,
    CurrentProfile,
    CurrentSegment,
    end_of_life,
    final_state,
    simulate_profile,
)
from .multisched import UtilizationWaveform, schedule
from .taskmodel import TaskTrace, WindowSpec
from .timebase import DEFAULT_TIMEBASE, TimeBase


@dataclass
class HybridResult:
    waveform: UtilizationWaveform
    profile: CurrentProfile
    trajectory: list[tuple[float, CapacityReport]]
    end_of_life: Optional[float]
    battery_state: BatteryState
    residues: dict[str, int] = field(default_factory=dict)

    @property
    def survives(self) -> bool:
        return self.end_of_life is None


def current_profile(
    w: UtilizationWaveform, I_busy: float, timebase: TimeBase = DEFAULT_TIMEBASE
) -> CurrentProfile:
    """Alternating busy/idle segments covering exactly the window."""
    if not I_busy > 0:
        raise ValueError(f"busy current must be positive, got {I_busy}")
    win = w.window
    busy = w.busy.clip(win.t0, win.end)
    segs = []
    cursor = win.t0
    for a, b in busy:
        if a > cursor:
            segs.append(CurrentSegment(timebase.minutes(a - cursor), 0.0))
        segs.append(CurrentSegment(timebase.minutes(b - a), float(I_busy)))
        cursor = b
    if cursor < win.end:
        segs.append(CurrentSegment(timebase.minutes(win.end - cursor), 0.0))
    return CurrentProfile(timebase.minutes(win.t0), tuple(segs))


def run_hybrid(
    traces: Sequence[TaskTrace],
    window: WindowSpec,
    params: BatteryParams,
    I_busy: float,
    state: Optional[BatteryState] = None,
    residues: Optional[Mapping[str, int]] = None,
    sample_step: Optional[float] = None,
    timebase: TimeBase = DEFAULT_TIMEBASE,
) -> HybridResult:
    """Schedule the window, then drive the battery with the resulting current."""
    state = BatteryState.fresh(params.m) if state is None else state
    w = schedule(traces, window, residues)
    profile = current_profile(w, I_busy, timebase)
    traj = simulate_profile(params, state, profile, sample_step)
    eol = end_of_life(params, state, profile)
    return HybridResult(
        waveform=w,
        profile=profile,
        trajectory=traj,
        end_of_life=eol,
        battery_state=final_state(params, state, profile),
        residues=dict(w.residues),
    )


@dataclass
class WindowRun:
    window: WindowSpec
    requested: bool
    order: list[str]
    carried_in: dict[str, int]
    waveform: UtilizationWaveform
    hybrid: Optional[HybridResult] = None


def run_scenario(
    scenario,
    params: Optional[BatteryParams] = None,
    I_busy: Optional[float] = None,
    state: Optional[BatteryState] = None,
    sample_step: Optional[float] = None,
) -> list[WindowRun]:
    """Run every window of a scenario in time order.

    Gaps between requested windows are scheduled as bridge windows so that
    residues (and battery state, when ``params`` is given) carry over.
    """
    residues = dict(scenario.residues)
    if params is not None:
        state = BatteryState.fresh(params.m) if state is None else state
    runs = []
    for sw, requested in scenario.timeline():
        order = scenario.priority(sw)
        traces = scenario.traces(sw.window, order)
        carried = dict(residues)
        if params is not None:
            h = run_hybrid(traces, sw.window, params, I_busy, state, carried,
                           sample_step if requested else None, scenario.timebase)
            w = h.waveform
            state = h.battery_state
        else:
            h = None
            w = schedule(traces, sw.window, carried)
        runs.append(WindowRun(sw.window, requested, order, carried, w, h))
        residues = dict(w.residues)
    return runs
