"""Task traces, observation windows and carried-in residues."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

ResidueRecord = dict  # task name -> residue in ticks


@dataclass(frozen=True)
class TaskInstance:
    request_time: int
    computing_time: int

    def __post_init__(self):
        if self.computing_time < 0:
            raise ValueError(f"negative computing time at t={self.request_time}")


@dataclass(frozen=True)
class WindowSpec:
    t0: int
    L: int

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError(f"window length must be positive, got {self.L}")

    @property
    def end(self) -> int:
        return self.t0 + self.L

    def __contains__(self, t: int) -> bool:
        return self.t0 <= t < self.end


@dataclass(frozen=True)
class TaskTrace:
    """Instances of one task in request order."""

    name: str
    instances: tuple[TaskInstance, ...] = ()

    def __post_init__(self):
        inst = tuple(self.instances)
        object.__setattr__(self, "instances", inst)
        for a, b in zip(inst, inst[1:]):
            if b.request_time <= a.request_time:
                raise ValueError(
                    f"task {self.name!r}: request times must strictly increase "
                    f"({a.request_time} then {b.request_time})"
                )

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def request_times(self) -> list[int]:
        return [i.request_time for i in self.instances]

    @property
    def demand(self) -> int:
        return sum(i.computing_time for i in self.instances)

    def request_intervals(self, window_end: int) -> list[int]:
        """``T(n) = t(n+1) - t(n)``; the last instance runs to ``window_end``."""
        times = self.request_times
        if not times:
            return []
        return [b - a for a, b in zip(times, times[1:])] + [window_end - times[-1]]

    def complete_intervals(self) -> list[int]:
        """Intervals closed by a later request (no window truncation)."""
        times = self.request_times
        return [b - a for a, b in zip(times, times[1:])]

    def restrict(self, window: WindowSpec) -> "TaskTrace":
        return TaskTrace(self.name, tuple(i for i in self.instances if i.request_time in window))


@dataclass(frozen=True)
class PeriodicSpec:
    period: int
    computing: int
    start: int = 0
    stop: Optional[int] = None

    def __post_init__(self):
        if not 0 < self.computing <= self.period:
            raise ValueError(
                f"periodic task needs 0 < computing <= period, got C={self.computing}, T={self.period}"
            )


def expand_periodic(spec: PeriodicSpec, window: WindowSpec, name: str = "task") -> TaskTrace:
    """Requests at ``start + k*period`` falling in the window (and before ``stop``)."""
    hi = window.end if spec.stop is None else min(window.end, spec.stop)
    if window.t0 <= spec.start:
        k = 0
    else:
        k = -(-(window.t0 - spec.start) // spec.period)
    out = []
    t = spec.start + k * spec.period
    while t < hi:
        out.append(TaskInstance(t, spec.computing))
        t += spec.period
    return TaskTrace(name, tuple(out))


@dataclass(frozen=True)
class Assumption1Violation:
    higher: str
    lower: str
    higher_max: int
    lower_min: int
    level: int = 0  # index of the higher-priority task (or fold) in the ordering

    def __str__(self) -> str:
        return (
            f"priority order {self.higher!r} > {self.lower!r} needs max request interval "
            f"of {self.higher!r} ({self.higher_max} ticks) < min request interval of "
            f"{self.lower!r} ({self.lower_min} ticks)"
        )


class AssumptionError(ValueError):
    def __init__(self, violation: Assumption1Violation):
        super().__init__(str(violation))
        self.violation = violation


def upper_intervals(trace: TaskTrace, window: WindowSpec, leading: bool = False) -> list[int]:
    """Intervals that bound how far apart this task's requests can be.

    Includes the truncated last interval. With ``leading`` the gap from the
    window start to the first request counts too: the highest-priority task
    gets a synthetic instance at ``t0`` and that gap becomes its first interval.
    """
    out = trace.request_intervals(window.end)
    if leading:
        first = trace.instances[0].request_time if trace.instances else window.end
        if first > window.t0:
            out = [first - window.t0] + out
    return out


def check_assumption1(
    traces: Sequence[TaskTrace], window: WindowSpec
) -> Optional[Assumption1Violation]:
    """Verify that every task's requests are spaced closer than any lower task's.

    ``traces`` are in priority order (highest first) and restricted to the
    window. Returns None when the ordering is consistent.
    """
    traces = [t.restrict(window) for t in traces]
    for i, hi in enumerate(traces):
        ups = upper_intervals(hi, window, leading=(i == 0))
        if not ups:
            continue
        hi_max = max(ups)
        for lo in traces[i + 1:]:
            lows = lo.complete_intervals()
            if lows and not hi_max < min(lows):
                return Assumption1Violation(hi.name, lo.name, hi_max, min(lows), level=i)
    return None


def init_window(trace: TaskTrace, window: WindowSpec, residue: int = 0) -> TaskTrace:
    """Anchor the trace at ``t0``, carrying ``residue`` ticks of earlier work.

    When the first request is later than ``t0`` a synthetic instance
    ``(t0, residue)`` is prepended; its request interval reaches the first
    real request. When a request sits exactly at ``t0`` the leftover work is
    queued ahead of it, so it is folded into that instance's computing time.
    """
    if residue < 0:
        raise ValueError(f"residue must be nonnegative, got {residue}")
    trace = trace.restrict(window)
    inst = trace.instances
    if inst and inst[0].request_time == window.t0:
        if residue == 0:
            return trace
        head = TaskInstance(window.t0, inst[0].computing_time + residue)
        return TaskTrace(trace.name, (head,) + inst[1:])
    return TaskTrace(trace.name, (TaskInstance(window.t0, residue),) + inst)


def active_tasks(
    traces: Sequence[TaskTrace], window: WindowSpec, residues: Mapping[str, int]
) -> list[TaskTrace]:
    """Window-restricted traces, dropping tasks with neither requests nor residue."""
    out = []
    for t in traces:
        r = t.restrict(window)
        if r.instances or residues.get(t.name, 0) > 0:
            out.append(r)
    return out


def total_demand(traces: Sequence[TaskTrace], window: WindowSpec, residues: Mapping[str, int]) -> int:
    return sum(t.restrict(window).demand for t in traces) + sum(
        residues.get(t.name, 0) for t in traces
    )


def export_residues(result) -> ResidueRecord:
    """Per-task unfinished work at the end of a scheduled window.

    Accepts anything carrying a ``residues`` mapping (analytic schedule or
    oracle simulation result).
    """
    return {name: int(v) for name, v in result.residues.items()}
