"""Task-set files, window timelines and the bundled demo scenario.

Task-set JSON::

    {
      "tasks": [
        {"name": "t1", "priority_rank": 1,
         "periodic": {"period": 1, "computing": 0.2, "start": 0, "stop": 110}},
        {"name": "t3", "priority_rank": 4,
         "instances": [{"t": 50, "c": 0.5}, {"t": 51.6, "c": 0.6}]}
      ],
      "windows": [{"t0": 50, "L": 7.1}],
      "residues": {"t2": 0.1},
      "origin": 0
    }

Times are decimal minutes with at most six decimals. ``residues`` is the
work pending at ``origin`` when given, otherwise at the first window start.
A window may carry ``"order": [names...]`` to override ``priority_rank``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence, Union

from .taskmodel import PeriodicSpec, TaskInstance, TaskTrace, WindowSpec
from .timebase import DEFAULT_TIMEBASE, TimeBase


@dataclass(frozen=True)
class TaskSpec:
    name: str
    priority_rank: int
    periodic: Optional[PeriodicSpec] = None
    trace: Optional[TaskTrace] = None

    def __post_init__(self):
        if (self.periodic is None) == (self.trace is None):
            raise ValueError(f"task {self.name!r} needs exactly one of periodic/instances")

    def expand(self, window: WindowSpec) -> TaskTrace:
        """Requests of this task inside ``window``."""
        if self.periodic is not None:
            from .taskmodel import expand_periodic

            return expand_periodic(self.periodic, window, self.name)
        return self.trace.restrict(window)


@dataclass(frozen=True)
class ScenarioWindow:
    window: WindowSpec
    order: Optional[tuple[str, ...]] = None


@dataclass
class Scenario:
    tasks: list[TaskSpec]
    windows: list[ScenarioWindow] = field(default_factory=list)
    residues: dict[str, int] = field(default_factory=dict)
    origin: Optional[int] = None
    timebase: TimeBase = DEFAULT_TIMEBASE

    def __post_init__(self):
        names = [t.name for t in self.tasks]
        if len(set(names)) != len(names):
            raise ValueError("duplicate task names")
        unknown = set(self.residues) - set(names)
        if unknown:
            raise ValueError(f"residues for unknown tasks: {sorted(unknown)}")
        for sw in self.windows:
            if sw.order is not None:
                bad = set(sw.order) - set(names)
                if bad:
                    raise ValueError(f"window order names unknown tasks: {sorted(bad)}")

    def task(self, name: str) -> TaskSpec:
        for t in self.tasks:
            if t.name == name:
                return t
        raise KeyError(name)

    def priority(self, window: Optional[ScenarioWindow] = None) -> list[str]:
        if window is not None and window.order is not None:
            return list(window.order)
        return [t.name for t in sorted(self.tasks, key=lambda t: (t.priority_rank, t.name))]

    def traces(self, window: WindowSpec, order: Optional[Sequence[str]] = None) -> list[TaskTrace]:
        """Priority-ordered traces restricted to ``window``."""
        names = list(order) if order is not None else self.priority()
        return [self.task(n).expand(window) for n in names]

    # -- files ------------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict, timebase: TimeBase = DEFAULT_TIMEBASE) -> "Scenario":
        tk = timebase.ticks
        tasks = []
        for i, item in enumerate(data.get("tasks", [])):
            try:
                name = str(item["name"])
                rank = int(item.get("priority_rank", i + 1))
            except KeyError:
                raise ValueError(f"task #{i} has no name") from None
            if "periodic" in item:
                p = item["periodic"]
                spec = PeriodicSpec(
                    period=tk(p["period"]),
                    computing=tk(p["computing"]),
                    start=tk(p.get("start", 0)),
                    stop=tk(p["stop"]) if p.get("stop") is not None else None,
                )
                tasks.append(TaskSpec(name, rank, periodic=spec))
            elif "instances" in item:
                inst = tuple(TaskInstance(tk(x["t"]), tk(x["c"])) for x in item["instances"])
                tasks.append(TaskSpec(name, rank, trace=TaskTrace(name, inst)))
            else:
                raise ValueError(f"task {name!r} needs 'periodic' or 'instances'")
        windows = []
        for w in data.get("windows", []):
            order = tuple(w["order"]) if w.get("order") is not None else None
            windows.append(ScenarioWindow(WindowSpec(tk(w["t0"]), tk(w["L"])), order))
        residues = {str(k): tk(v) for k, v in (data.get("residues") or {}).items()}
        if any(v < 0 for v in residues.values()):
            raise ValueError("residues must be nonnegative")
        origin = tk(data["origin"]) if data.get("origin") is not None else None
        return cls(tasks, windows, residues, origin, timebase)

    def to_dict(self) -> dict:
        fmt = lambda v: _number(self.timebase.format(v))  # noqa: E731
        tasks = []
        for t in self.tasks:
            item = {"name": t.name, "priority_rank": t.priority_rank}
            if t.periodic is not None:
                p = t.periodic
                item["periodic"] = {"period": fmt(p.period), "computing": fmt(p.computing), "start": fmt(p.start)}
                if p.stop is not None:
                    item["periodic"]["stop"] = fmt(p.stop)
            else:
                item["instances"] = [
                    {"t": fmt(i.request_time), "c": fmt(i.computing_time)} for i in t.trace.instances
                ]
            tasks.append(item)
        windows = []
        for sw in self.windows:
            w = {"t0": fmt(sw.window.t0), "L": fmt(sw.window.L)}
            if sw.order is not None:
                w["order"] = list(sw.order)
            windows.append(w)
        out = {"tasks": tasks, "windows": windows, "residues": {k: fmt(v) for k, v in self.residues.items()}}
        if self.origin is not None:
            out["origin"] = fmt(self.origin)
        return out

    @classmethod
    def load(cls, path: Union[str, Path], timebase: TimeBase = DEFAULT_TIMEBASE) -> "Scenario":
        with open(path, encoding="utf-8") as fh:
            # parse floats as Decimal-compatible strings to keep decimals exact
            data = json.load(fh, parse_float=str)
        return cls.from_dict(data, timebase)

    def dump(self, path: Union[str, Path]):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n", encoding="utf-8")

    # -- timelines --------------------------------------------------------

    def timeline(self) -> list[tuple[ScenarioWindow, bool]]:
        """Windows to run in order, with gaps bridged.

        Returns ``(window, requested)`` pairs; bridge windows fill the gaps
        between requested windows (and from ``origin``) so that residues
        and battery state can be chained without simulating from scratch.
        """
        wins = sorted(self.windows, key=lambda s: s.window.t0)
        out: list[tuple[ScenarioWindow, bool]] = []
        cursor = self.origin if self.origin is not None else (wins[0].window.t0 if wins else None)
        for sw in wins:
            if cursor is not None and sw.window.t0 < cursor:
                raise ValueError("windows overlap or start before origin")
            if cursor is not None and sw.window.t0 > cursor:
                out.append((ScenarioWindow(WindowSpec(cursor, sw.window.t0 - cursor)), False))
            out.append((sw, True))
            cursor = sw.window.end
        return out


def _number(text: str):
    """JSON number from an exact decimal string (int when integral)."""
    if "." in text:
        return float(text)
    return int(text)


def demo_scenario() -> Scenario:
    """Six-task scenario with windows [50, 57.1) and [110, 120)."""
    data = resources.files("spsbsim.data").joinpath("demo_tasks.json").read_text(encoding="utf-8")
    return Scenario.from_dict(json.loads(data, parse_float=str))


def demo_battery() -> dict:
    data = resources.files("spsbsim.data").joinpath("demo_battery.json").read_text(encoding="utf-8")
    return json.loads(data)
