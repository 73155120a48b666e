"""Difference-equation model of two prioritized tasks on one processor.

The higher-priority task ``alpha`` cuts the window into its request
intervals ``[t_a(n), t_a(n) + T_a(n))``. Per interval the model tracks

* ``y`` - index of the first ``beta`` request at or after ``t_a(n)``,
* ``z`` - phase from ``t_a(n)`` to that request,
* ``P`` - unfinished ``beta`` work requested before ``t_a(n)``,
* ``R`` - the part of ``P`` that fits into this interval's idle time,

and each interval's busy pattern is one of two shapes: a ``beta`` request
lands inside the interval (``z < T_a``, two pieces) or it does not (one
piece).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Mapping, Optional

from .taskmodel import TaskTrace, WindowSpec, init_window
from .timebase import EMPTY, IntervalSet

log = logging.getLogger(__name__)


class ModelError(RuntimeError):
    """The pair violates a structural premise of the model (e.g. two beta requests per interval)."""


@dataclass(frozen=True)
class PairState:
    n: int
    t_alpha: int
    y: int
    z: int
    P: int
    R: int = 0


@dataclass(frozen=True)
class StepInput:
    T_alpha: int
    C_alpha: int
    T_beta_at_y: int
    C_beta_at_y: int

    def __post_init__(self):
        if self.T_alpha <= 0:
            raise ValueError(f"T_alpha must be positive, got {self.T_alpha}")
        if self.C_alpha < 0:
            raise ValueError(f"C_alpha must be nonnegative, got {self.C_alpha}")


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    task: str
    time: int
    detail: str = ""

    def to_dict(self, timebase=None) -> dict:
        t = self.time if timebase is None else timebase.minutes(self.time)
        return {"kind": self.kind, "task": self.task, "time": t, "detail": self.detail}


@dataclass(frozen=True)
class Segment:
    """Bookkeeping for one request interval of ``alpha``."""

    n: int
    t: int
    T_alpha: int
    C_alpha: int
    z: int
    P: int
    R: int
    mode: int
    offset: int  # max(C_alpha, z): where beta's new instance may start
    C_beta: int
    served_beta: int
    busy: IntervalSet


@dataclass
class PairResult:
    alpha: str
    beta: Optional[str]
    waveform: IntervalSet
    segments: list[Segment]
    residues: dict[str, int]
    diagnostics: list[Diagnostic] = field(default_factory=list)
    states: list[PairState] = field(default_factory=list)


def allocatable(T_alpha: int, C_alpha: int, P: int) -> int:
    """``R = min(T_a - C_a, P)``, with the slack floored at zero."""
    return min(max(0, T_alpha - C_alpha), P)


def is_mode1(state: PairState, inp: StepInput) -> bool:
    return 0 <= state.z < inp.T_alpha


def init_pair(
    trace_alpha: TaskTrace, trace_beta: TaskTrace, residue_beta: int, window: WindowSpec
) -> PairState:
    """Initial state; ``trace_alpha`` must already start at ``t0``."""
    if not trace_alpha.instances or trace_alpha.instances[0].request_time != window.t0:
        raise ValueError("alpha trace must be anchored at the window start (see init_window)")
    if residue_beta < 0:
        raise ValueError("residue must be nonnegative")
    first = trace_alpha.instances[0]
    T1 = trace_alpha.request_intervals(window.end)[0]
    t_beta = trace_beta.instances[0].request_time if trace_beta.instances else window.end
    return PairState(
        n=1,
        t_alpha=window.t0,
        y=1,
        z=t_beta - window.t0,
        P=residue_beta,
        R=allocatable(T1, first.computing_time, residue_beta),
    )


def step(state: PairState, inp: StepInput) -> PairState:
    """Advance from interval ``n`` to ``n + 1``.

    ``R`` of the returned state is left at 0; it depends on the next
    interval's ``T_a`` and ``C_a`` and is filled in by :func:`with_allocation`.
    """
    T, C, z, P = inp.T_alpha, inp.C_alpha, state.z, state.P
    if 0 <= z < T:
        start = max(C, z)
        P_next = max(0, inp.C_beta_at_y - max(0, T - start))
        y_next = state.y + 1
        z_next = z + inp.T_beta_at_y - T
    else:
        P_next = max(0, P - max(0, T - C))
        y_next = state.y
        z_next = z - T
    return PairState(n=state.n + 1, t_alpha=state.t_alpha + T, y=y_next, z=z_next, P=P_next)


def with_allocation(state: PairState, T_alpha: int, C_alpha: int) -> PairState:
    return replace(state, R=allocatable(T_alpha, C_alpha, state.P))


def segment_waveform(state: PairState, inp: StepInput) -> IntervalSet:
    """Busy set over ``[t_a(n), t_a(n) + T_a(n))``."""
    t, T, C = state.t_alpha, inp.T_alpha, inp.C_alpha
    pieces = [(t, t + min(C + state.R, T))]
    if 0 <= state.z < T:
        start = max(C, state.z)
        width = min(inp.C_beta_at_y, max(0, T - start))
        if width > 0:
            pieces.append((t + start, t + start + width))
    return IntervalSet(pieces)


def run_pair(
    trace_alpha: TaskTrace,
    trace_beta: Optional[TaskTrace],
    window: WindowSpec,
    residues: Optional[Mapping[str, int]] = None,
) -> PairResult:
    """Evolve the pair over the whole window.

    ``trace_beta`` may be None (single task). ``residues`` maps task names to
    work carried in at ``t0``. Once ``beta`` runs out of requests a
    zero-cost sentinel request at the window end stands in, which keeps every
    later interval in the one-piece shape and lets ``P`` drain.
    """
    residues = dict(residues or {})
    beta = trace_beta.restrict(window) if trace_beta is not None else TaskTrace("")
    alpha = init_window(trace_alpha, window, residues.get(trace_alpha.name, 0))
    res_beta = residues.get(beta.name, 0) if trace_beta is not None else 0

    a_times = alpha.request_times
    a_T = alpha.request_intervals(window.end)
    b_inst = beta.instances
    b_T = beta.request_intervals(window.end)

    state = init_pair(alpha, beta, res_beta, window)
    diagnostics: list[Diagnostic] = []
    segments: list[Segment] = []
    states = [state]
    busy = EMPTY
    last = len(a_times) - 1

    for idx, inst in enumerate(alpha.instances):
        T, C = a_T[idx], inst.computing_time
        if state.y <= len(b_inst):
            Tb, Cb = b_T[state.y - 1], b_inst[state.y - 1].computing_time
        else:
            Tb, Cb = 0, 0
        inp = StepInput(T, C, Tb, Cb)
        mode1 = is_mode1(state, inp)

        if idx < last and C > T:
            diagnostics.append(
                Diagnostic("deadline-miss", alpha.name, inst.request_time + T,
                           f"{C - T} ticks of work left at next request")
            )
        if mode1 and state.P > 0 and state.z < C + state.P:
            diagnostics.append(
                Diagnostic("deadline-miss", beta.name, state.t_alpha + state.z,
                           f"{C + state.P - state.z} ticks of earlier work pending at request")
            )

        piece = segment_waveform(state, inp)
        start = max(C, state.z)
        served = min(Cb, max(0, T - start)) if mode1 else 0
        segments.append(Segment(
            n=state.n, t=state.t_alpha, T_alpha=T, C_alpha=C, z=state.z, P=state.P, R=state.R,
            mode=1 if mode1 else 2, offset=start if mode1 else T, C_beta=Cb if mode1 else 0,
            served_beta=served, busy=piece,
        ))
        busy = busy | piece

        nxt = step(state, inp)
        if nxt.z < 0:
            raise ModelError(
                f"{beta.name!r} requests twice inside one request interval of "
                f"{alpha.name!r} (at tick {state.t_alpha})"
            )
        if idx < last:
            nxt = with_allocation(nxt, a_T[idx + 1], alpha.instances[idx + 1].computing_time)
        state = nxt
        states.append(state)

    overflow = max(0, alpha.instances[-1].computing_time - a_T[-1])
    out = {alpha.name: overflow}
    if trace_beta is not None:
        out[beta.name] = state.P
    for d in diagnostics:
        log.debug("%s", d)
    return PairResult(alpha.name, beta.name if trace_beta is not None else None,
                      busy, segments, out, diagnostics, states)
