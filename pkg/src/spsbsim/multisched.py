"""N-task waveform by folding the two-task model down the priority list.

Each fold schedules the running combination against the next task and
re-expresses the pair's busy pattern as a synthetic task whose instances
reproduce it; that task becomes the higher-priority side of the next fold.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .pairsched import Diagnostic, PairResult, Segment, run_pair
from .taskmodel import (
    Assumption1Violation,
    AssumptionError,
    TaskInstance,
    TaskTrace,
    WindowSpec,
    active_tasks,
    check_assumption1,
    upper_intervals,
)
from .timebase import EMPTY, IntervalSet


@dataclass(frozen=True)
class CombinedTrace:
    trace: TaskTrace
    sources: tuple[tuple[int, int], ...]  # (segment n, piece 1|2) per instance

    @property
    def name(self) -> str:
        return self.trace.name


@dataclass
class Fold:
    level: int
    alpha: TaskTrace
    beta: TaskTrace
    pair: PairResult
    combined: Optional[CombinedTrace]
    proposition1: bool


@dataclass
class UtilizationWaveform:
    window: WindowSpec
    busy: IntervalSet
    diagnostics: list[Diagnostic] = field(default_factory=list)
    residues: dict[str, int] = field(default_factory=dict)
    folds: list[Fold] = field(default_factory=list)
    order: list[str] = field(default_factory=list)


def combine_segment(seg: Segment) -> list[TaskInstance]:
    """Instances of the combined task contributed by one interval.

    The leading piece (``alpha`` work plus served residue) is kept even when
    empty so that request intervals never grow; a second piece appears only
    when a ``beta`` instance is served inside the interval.
    """
    first = TaskInstance(seg.t, seg.C_alpha + seg.R)
    if seg.mode == 2 or seg.served_beta == 0:
        return [first]
    second = TaskInstance(seg.t + seg.offset, seg.served_beta)
    if seg.offset == 0:
        # both pieces requested at t_a(n); alpha and R are empty here
        return [TaskInstance(seg.t, first.computing_time + second.computing_time)]
    return [first, second]


def combine(pair: PairResult, name: str) -> CombinedTrace:
    instances, sources = [], []
    for seg in pair.segments:
        parts = combine_segment(seg)
        for k, inst in enumerate(parts, start=1):
            instances.append(inst)
            sources.append((seg.n, k))
    return CombinedTrace(TaskTrace(name, tuple(instances)), tuple(sources))


def check_proposition1(cmb: CombinedTrace | TaskTrace, alpha_trace: TaskTrace, window: WindowSpec) -> bool:
    """Combined task never stretches the longest request interval of its ``alpha``."""
    trace = cmb.trace if isinstance(cmb, CombinedTrace) else cmb
    c = upper_intervals(trace, window, leading=True)
    a = upper_intervals(alpha_trace, window, leading=True)
    if not c:
        return True
    return bool(a) and max(c) <= max(a)


def schedule(
    traces: Sequence[TaskTrace],
    window: WindowSpec,
    residues: Optional[Mapping[str, int]] = None,
    check: bool = True,
) -> UtilizationWaveform:
    """Processor busy set for tasks in priority order (highest first).

    Raises :class:`AssumptionError` when the request-interval ordering does
    not hold, either for the input or for a combined task at some fold.
    Deadline misses are reported in ``diagnostics``; the waveform is still
    computed.
    """
    residues = dict(residues or {})
    tasks = active_tasks(traces, window, residues)
    out = UtilizationWaveform(window, EMPTY, order=[t.name for t in tasks])
    all_names = [t.name for t in traces]
    out.residues = {n: 0 for n in all_names}
    if not tasks:
        return out
    if check:
        v = check_assumption1(tasks, window)
        if v is not None:
            raise AssumptionError(v)

    if len(tasks) == 1:
        pair = run_pair(tasks[0], None, window, residues)
        out.busy = pair.waveform
        out.diagnostics = list(pair.diagnostics)
        out.residues.update(pair.residues)
        return out

    alpha: TaskTrace = tasks[0]
    for level, beta in enumerate(tasks[1:], start=1):
        if level > 1 and check:
            ups = upper_intervals(alpha, window, leading=True)
            lows = beta.complete_intervals()
            if ups and lows and not max(ups) < min(lows):
                raise AssumptionError(
                    Assumption1Violation(alpha.name, beta.name, max(ups), min(lows), level=level)
                )
        pair = run_pair(alpha, beta, window, residues)
        out.diagnostics.extend(pair.diagnostics)
        if level == 1:
            out.residues[alpha.name] = pair.residues[alpha.name]
        out.residues[beta.name] = pair.residues[beta.name]
        last = level == len(tasks) - 1
        cmb = None if last else combine(pair, f"cmb{level}")
        # the pair's alpha as the model saw it (anchored at t0)
        seen_alpha = TaskTrace(alpha.name, tuple(TaskInstance(s.t, s.C_alpha) for s in pair.segments))
        prop1 = True if cmb is None else check_proposition1(cmb, seen_alpha, window)
        if not prop1:
            raise AssertionError(f"combined task at fold {level} stretches request intervals")
        out.folds.append(Fold(level, alpha, beta, pair, cmb, prop1))
        if last:
            out.busy = pair.waveform
        else:
            alpha = cmb.trace
    return out


def phi_at(w: UtilizationWaveform, t: int) -> int:
    if t not in w.window:
        raise ValueError(f"tick {t} outside window [{w.window.t0}, {w.window.end})")
    return 1 if w.busy.contains(t) else 0


def phi_samples(w: UtilizationWaveform, step: int) -> list[tuple[int, int]]:
    if step <= 0:
        raise ValueError("sample step must be positive")
    return [(t, phi_at(w, t)) for t in range(w.window.t0, w.window.end, step)]
