"""Event-driven preemptive fixed-priority simulator used as ground truth.

Independent of the difference-equation model: it keeps a FIFO job queue per
task and, between consecutive events, always runs the highest-priority task
with pending work.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Mapping, Optional, Sequence

from .pairsched import Diagnostic
from .taskmodel import TaskTrace, WindowSpec
from .timebase import IntervalSet


class EventKind(IntEnum):
    # requests sort first so an arrival preempts at its own tick
    REQUEST = 0
    COMPLETION = 1


@dataclass(frozen=True, order=True)
class SimEvent:
    time: int
    kind: EventKind
    rank: int
    work: int = field(default=0, compare=False)


@dataclass
class SimResult:
    busy: IntervalSet
    per_task: dict[str, IntervalSet]
    residues: dict[str, int]
    deadline_misses: list[Diagnostic] = field(default_factory=list)
    trace: list[tuple[int, int, str]] = field(default_factory=list)  # (start, end, task)


def simulate(
    traces: Sequence[TaskTrace],
    window: WindowSpec,
    residues: Optional[Mapping[str, int]] = None,
) -> SimResult:
    """Simulate ``traces`` (highest priority first) over the window.

    Carried-in residues are queued at ``t0`` as the leftover of a virtual
    earlier instance. A deadline miss is recorded whenever a task is
    requested while an earlier instance of it still has work.
    """
    residues = dict(residues or {})
    names = [t.name for t in traces]
    queues: list[deque[int]] = [deque() for _ in traces]
    events: list[SimEvent] = []
    for rank, tr in enumerate(traces):
        carried = residues.get(tr.name, 0)
        if carried < 0:
            raise ValueError(f"negative residue for {tr.name!r}")
        if carried:
            queues[rank].append(carried)
        for inst in tr.instances:
            if inst.request_time in window:
                heapq.heappush(events, SimEvent(inst.request_time, EventKind.REQUEST, rank, inst.computing_time))

    misses: list[Diagnostic] = []
    runs: list[tuple[int, int, str]] = []
    now = window.t0
    running: Optional[int] = None

    def pick() -> Optional[int]:
        for r, q in enumerate(queues):
            if q:
                return r
        return None

    while True:
        while events and events[0].time == now:
            ev = heapq.heappop(events)
            if ev.kind is EventKind.REQUEST:
                q = queues[ev.rank]
                if q:
                    misses.append(Diagnostic("deadline-miss", names[ev.rank], now,
                                             f"{sum(q)} ticks of earlier work pending at request"))
                q.append(ev.work)
                while q and q[0] == 0:
                    q.popleft()
        running = pick()
        horizon = events[0].time if events else window.end
        horizon = min(horizon, window.end)
        if running is None:
            if not events or now >= window.end:
                break
            now = horizon
            continue
        q = queues[running]
        finish = now + q[0]
        stop = min(finish, horizon)
        if stop > now:
            runs.append((now, stop, names[running]))
        q[0] -= stop - now
        if q[0] == 0:
            q.popleft()
            if stop < horizon:
                heapq.heappush(events, SimEvent(stop, EventKind.COMPLETION, running))
        now = stop
        if now >= window.end:
            break

    per_task = {n: IntervalSet([(a, b) for a, b, who in runs if who == n]) for n in names}
    busy = IntervalSet([(a, b) for a, b, _ in runs])
    left = {n: sum(queues[r]) for r, n in enumerate(names)}
    return SimResult(busy, per_task, left, misses, runs)


def diff(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Symmetric difference; empty exactly when the two sets are equal."""
    return a.symmetric_difference(b)


def simulate_timeline(
    traces: Sequence[TaskTrace],
    windows: Sequence[tuple[WindowSpec, Sequence[str]]],
    residues: Optional[Mapping[str, int]] = None,
) -> list[SimResult]:
    """Run consecutive windows, chaining residues.

    ``windows`` pairs each (contiguous) window with the priority order of
    task names valid inside it.
    """
    by_name = {t.name: t for t in traces}
    carried = dict(residues or {})
    out = []
    for win, order in windows:
        missing = [n for n, v in carried.items() if v > 0 and n not in order]
        if missing:
            raise ValueError(f"tasks with pending work missing from priority order: {missing}")
        res = simulate([by_name[n] for n in order], win, carried)
        carried = dict(res.residues)
        out.append(res)
    return out
