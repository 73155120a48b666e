"""Command-line front end.

    spsbsim validate    --tasks FILE [--window T0:L ...]
    spsbsim waveform    --tasks FILE [--window T0:L ...] [--sample-step MIN] --out DIR
    spsbsim oracle-diff --tasks FILE | --seeds N  --out DIR
    spsbsim hybrid      --tasks FILE --battery FILE [--current-ma I] [--sample-step MIN] --out DIR

Exit status: 0 success, 1 analytic/oracle mismatch, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .battery import BatteryState, load_params
from .hybrid import run_hybrid
from .multisched import phi_samples, schedule
from .oracle import diff, simulate
from .randomsets import random_schedulable
from .scenario import Scenario, ScenarioWindow
from .taskmodel import AssumptionError, WindowSpec, check_assumption1
from .timebase import PrecisionError, TimeBase

log = logging.getLogger("spsbsim")

EXIT_OK, EXIT_DIFF, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _parse_window(text: str, tb: TimeBase) -> ScenarioWindow:
    try:
        t0, length = text.split(":")
        return ScenarioWindow(WindowSpec(tb.ticks(t0), tb.ticks(length)))
    except (ValueError, PrecisionError) as exc:
        raise InputError(f"bad --window {text!r} (expected T0:L in minutes): {exc}") from None


def _load_scenario(args) -> Scenario:
    tb = args.timebase
    if not args.tasks:
        raise InputError("--tasks is required")
    try:
        sc = Scenario.load(args.tasks, tb)
    except FileNotFoundError:
        raise InputError(f"task file not found: {args.tasks}") from None
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"{args.tasks}: {exc}") from None
    if args.window:
        sc.windows = [_parse_window(w, tb) for w in args.window]
    if not sc.windows:
        raise InputError("no windows given (file 'windows' or --window)")
    return sc


def _label(win: WindowSpec, tb: TimeBase) -> str:
    return f"{tb.format(win.t0)}_{tb.format(win.end)}"


def _write_intervals(path: Path, busy, tb: TimeBase):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["start_min", "end_min"])
        for a, b in busy:
            w.writerow([tb.format(a), tb.format(b)])


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _analytic_timeline(sc: Scenario):
    """Analytic schedules for every timeline window, residues chained."""
    res = dict(sc.residues)
    for sw, requested in sc.timeline():
        order = sc.priority(sw)
        traces = sc.traces(sw.window, order)
        w = schedule(traces, sw.window, res)
        yield sw, requested, traces, dict(res), w
        res = dict(w.residues)


def cmd_validate(args) -> int:
    sc = _load_scenario(args)
    tb = sc.timebase
    status = EXIT_OK
    for sw, requested in sc.timeline():
        traces = sc.traces(sw.window, sc.priority(sw))
        v = check_assumption1([t for t in traces if t.instances], sw.window)
        kind = "window" if requested else "bridge"
        span = f"[{tb.format(sw.window.t0)}, {tb.format(sw.window.end)})"
        if v is None:
            print(f"{kind} {span}: ok")
        else:
            print(f"{kind} {span}: violation: {v}", file=sys.stderr)
            status = EXIT_INPUT
    return status


def cmd_waveform(args) -> int:
    sc = _load_scenario(args)
    tb = sc.timebase
    out = _out_dir(args)
    step = tb.ticks(args.sample_step)
    for sw, requested, traces, _, w in _analytic_timeline(sc):
        for d in w.diagnostics:
            log.warning("%s %s at %s min: %s", d.kind, d.task, tb.format(d.time), d.detail)
        if not requested:
            continue
        label = _label(sw.window, tb)
        _write_intervals(out / f"waveform_{label}.csv", w.busy, tb)
        with open(out / f"phi_{label}.csv", "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["t_min", "phi"])
            for t, phi in phi_samples(w, step):
                wr.writerow([tb.format(t), phi])
        print(f"[{tb.format(sw.window.t0)}, {tb.format(sw.window.end)}): "
              f"busy {tb.format(w.busy.measure())} min in {len(w.busy)} intervals")
    return EXIT_OK


def _oracle_diff_scenario(args) -> int:
    sc = _load_scenario(args)
    tb = sc.timebase
    out = _out_dir(args)
    oracle_res = dict(sc.residues)
    status = EXIT_OK
    for sw, requested, traces, _, w in _analytic_timeline(sc):
        sim = simulate(traces, sw.window, oracle_res)
        oracle_res = dict(sim.residues)
        delta = diff(w.busy, sim.busy)
        if delta:
            status = EXIT_DIFF
        if requested or delta:
            label = _label(sw.window, tb)
            _write_intervals(out / f"diff_{label}.csv", delta, tb)
            verdict = "equal" if not delta else f"DIFFERENT ({tb.format(delta.measure())} min)"
            print(f"[{tb.format(sw.window.t0)}, {tb.format(sw.window.end)}): {verdict}")
    return status


def _oracle_diff_seeds(args) -> int:
    out = _out_dir(args)
    status = EXIT_OK
    failures = 0
    with open(out / "seeds.csv", "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["seed", "n_tasks", "t0_min", "L_min", "diff_min"])
        for seed in range(args.seed_start, args.seed_start + args.seeds):
            rs = random_schedulable(seed)
            w = schedule(rs.traces, rs.window, rs.residues)
            sim = simulate(rs.traces, rs.window, rs.residues)
            delta = diff(w.busy, sim.busy)
            if delta:
                failures += 1
                status = EXIT_DIFF
            tb = args.timebase
            wr.writerow([seed, len(rs.traces), tb.format(rs.window.t0), tb.format(rs.window.L),
                         tb.format(delta.measure())])
    print(f"{args.seeds} random task sets, {failures} mismatches")
    return status


def cmd_oracle_diff(args) -> int:
    if args.seeds:
        return _oracle_diff_seeds(args)
    return _oracle_diff_scenario(args)


def _load_battery(args):
    if not args.battery:
        raise InputError("--battery is required")
    try:
        data = json.loads(Path(args.battery).read_text(encoding="utf-8"))
        params, current = load_params(data)
    except FileNotFoundError:
        raise InputError(f"battery file not found: {args.battery}") from None
    except (ValueError, TypeError, json.JSONDecodeError) as exc:
        raise InputError(f"{args.battery}: {exc}") from None
    if args.current_ma is not None:
        if not args.current_ma > 0:
            raise InputError("--current-ma must be positive")
        current = args.current_ma
    state = BatteryState.fresh(params.m)
    if data.get("state") is not None:
        if len(data["state"]) != params.m + 1:
            raise InputError(f"battery 'state' needs {params.m + 1} entries")
        state = BatteryState([float(v) for v in data["state"]])
    return params, current, state


def cmd_hybrid(args) -> int:
    sc = _load_scenario(args)
    params, current, state = _load_battery(args)
    tb = sc.timebase
    out = _out_dir(args)
    res = dict(sc.residues)
    for sw, requested in sc.timeline():
        traces = sc.traces(sw.window, sc.priority(sw))
        h = run_hybrid(traces, sw.window, params, current, state, res,
                       args.sample_step if requested else None, tb)
        res = dict(h.residues)
        state = h.battery_state
        if not requested:
            continue
        label = _label(sw.window, tb)
        with open(out / f"trajectory_{label}.csv", "w", newline="", encoding="utf-8") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["t_min", "y", "x0", "temporary"])
            for t, rep in h.trajectory:
                wr.writerow([repr(round(t, 9)), repr(rep.y_total), repr(rep.permanent), repr(rep.temporary)])
        report = {"busy_time_min": tb.minutes(h.waveform.busy.measure())}
        if h.end_of_life is None:
            report["survives"] = True
        else:
            report["end_of_life_min"] = h.end_of_life
        report["diagnostics"] = [d.to_dict(tb) for d in h.waveform.diagnostics]
        (out / f"report_{label}.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
        final = h.trajectory[-1][1]
        eol = "survives" if h.end_of_life is None else f"end of life at {h.end_of_life:.6f} min"
        print(f"[{tb.format(sw.window.t0)}, {tb.format(sw.window.end)}): y={final.y_total:.6f}, {eol}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spsbsim", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, battery=False):
        sp.add_argument("--tasks", help="task-set JSON file")
        sp.add_argument("--window", action="append", metavar="T0:L",
                        help="window start and length in minutes (repeatable; overrides the file)")
        sp.add_argument("--tick", default="1e-6", help="tick length in minutes (default 1e-6)")
        sp.add_argument("--out", default="out", help="output directory")
        if battery:
            sp.add_argument("--battery", help="battery JSON file")
            sp.add_argument("--current-ma", type=float, help="busy current in mA (overrides the battery file)")

    sp = sub.add_parser("validate", help="check request-interval ordering per window")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("waveform", help="write busy intervals and sampled phi per window")
    common(sp)
    sp.add_argument("--sample-step", default="0.1", help="phi sampling step in minutes")
    sp.set_defaults(func=cmd_waveform)

    sp = sub.add_parser("oracle-diff", help="compare the analytic waveform against the simulator")
    common(sp)
    sp.add_argument("--seeds", type=int, default=0, help="run N random task sets instead of --tasks")
    sp.add_argument("--seed-start", type=int, default=0)
    sp.set_defaults(func=cmd_oracle_diff)

    sp = sub.add_parser("hybrid", help="battery capacity trajectory per window")
    common(sp, battery=True)
    sp.add_argument("--sample-step", type=float, default=None, help="trajectory sampling step in minutes")
    sp.set_defaults(func=cmd_hybrid)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        args.timebase = TimeBase.from_tick(args.tick)
        return args.func(args)
    except (InputError, AssumptionError, PrecisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
