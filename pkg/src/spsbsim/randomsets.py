"""Random task sets that respect the request-interval ordering by construction.

Each task draws its request intervals from its own band ``[lo, hi]`` and the
bands are stacked so that every band lies strictly above the previous one.
Sets with deadline misses (checked with the oracle) are redrawn.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from .oracle import simulate
from .taskmodel import TaskInstance, TaskTrace, WindowSpec


@dataclass
class RandomScenario:
    traces: list[TaskTrace]
    window: WindowSpec
    residues: dict[str, int]
    periodic: list[bool]
    seed: Optional[int] = None


def _bands(rng: random.Random, n: int, unit: int) -> list[tuple[int, int]]:
    out = []
    lo = rng.randint(4, 12)
    for _ in range(n):
        hi = lo + rng.choice([0, 0, rng.randint(1, 6)])
        out.append((lo * unit, hi * unit))
        lo = hi + rng.randint(1, 6)
    return out


def random_task_set(
    rng: random.Random,
    window: WindowSpec,
    n_tasks: Optional[int] = None,
    unit: int = 100_000,
    utilization: Optional[float] = None,
) -> RandomScenario:
    """One random (not necessarily schedulable) task set on ``window``.

    ``unit`` is the time grid in ticks; a coarse grid makes simultaneous
    requests and back-to-back execution common.
    """
    n = n_tasks if n_tasks is not None else rng.randint(2, 5)
    bands = _bands(rng, n, unit)
    total_u = utilization if utilization is not None else rng.uniform(0.3, 0.95)
    shares = [rng.random() + 0.05 for _ in range(n)]
    s = sum(shares)
    traces, periodic, residues = [], [], {}
    for k, (lo, hi) in enumerate(bands):
        name = f"t{k + 1}"
        is_periodic = lo == hi and rng.random() < 0.7
        u = total_u * shares[k] / s
        if k == 0:
            # the top task's lead-in gap counts as one of its intervals
            first = window.t0 + rng.randint(0, lo // unit) * unit
        else:
            first = window.t0 + rng.randint(0, hi // unit) * unit
        times = []
        t = first
        while t < window.end:
            times.append(t)
            t += lo if is_periodic else rng.randint(lo // unit, hi // unit) * unit
        base_c = max(unit, int(u * lo) // unit * unit)
        inst = []
        for t in times:
            if is_periodic:
                c = base_c
            elif rng.random() < 0.05:
                c = 0
            else:
                c = rng.randint(1, max(1, 2 * base_c // unit)) * unit
                c = min(c, lo)
            inst.append(TaskInstance(t, c))
        traces.append(TaskTrace(name, tuple(inst)))
        periodic.append(is_periodic)
        if rng.random() < 0.4:
            residues[name] = rng.randint(1, max(1, lo // (3 * unit))) * unit
    return RandomScenario(traces, window, residues, periodic)


def random_schedulable(
    seed: int,
    window: Optional[WindowSpec] = None,
    n_tasks: Optional[int] = None,
    max_tries: int = 200,
    unit: int = 100_000,
) -> RandomScenario:
    """Draw until the oracle reports no deadline misses."""
    rng = random.Random(seed)
    for _ in range(max_tries):
        win = window or WindowSpec(rng.randint(0, 100) * unit, rng.randint(60, 400) * unit)
        sc = random_task_set(rng, win, n_tasks, unit)
        if not simulate(sc.traces, sc.window, sc.residues).deadline_misses:
            sc.seed = seed
            return sc
    raise RuntimeError(f"no schedulable set found for seed {seed}")
