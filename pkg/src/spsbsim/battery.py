"""Linear state-space battery model with recovery effect.

State ``x = (x_0, x_1, ..., x_m)``: ``x_0`` is the permanent capacity loss
(integrated charge over ``alpha``) and ``x_1..x_m`` are temporary losses that
relax at rates ``lambda_j = beta * j**2`` once the current stops. The total
loss is ``y = sum(x)``; the discharge cycle ends when ``y`` reaches 1.

Units follow the usual convention for this model: current in mA, time in
minutes, ``alpha`` in mA*min, ``beta`` in 1/min.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

DEFAULT_ORDER = 10
LIFETIME_TOL = 1e-9  # minutes


@dataclass(frozen=True)
class BatteryParams:
    alpha: float
    beta: float
    m: int = DEFAULT_ORDER

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"m must be a positive integer, got {self.m}")

    @property
    def rates(self) -> np.ndarray:
        """Decay rates ``lambda_1..lambda_m``."""
        j = np.arange(1, self.m + 1, dtype=float)
        return self.beta * j * j

    @property
    def input_gain(self) -> np.ndarray:
        """Input vector ``b = [1, 2, ..., 2] / alpha``."""
        b = np.full(self.m + 1, 2.0 / self.alpha)
        b[0] = 1.0 / self.alpha
        return b


@dataclass(frozen=True)
class BatteryState:
    x: np.ndarray = field(repr=False)

    def __post_init__(self):
        x = np.array(self.x, dtype=float)
        x.setflags(write=False)
        object.__setattr__(self, "x", x)

    @classmethod
    def fresh(cls, m: int = DEFAULT_ORDER) -> "BatteryState":
        return cls(np.zeros(m + 1))

    @property
    def y(self) -> float:
        return float(self.x.sum())

    @property
    def permanent(self) -> float:
        return float(self.x[0])

    @property
    def temporary(self) -> float:
        return float(self.x[1:].sum())

    def __repr__(self) -> str:
        return f"BatteryState(y={self.y:.12g}, x0={self.permanent:.12g})"


@dataclass(frozen=True)
class CapacityReport:
    y_total: float
    permanent: float
    temporary: float
    alive: bool


@dataclass(frozen=True)
class CurrentSegment:
    duration: float
    current: float

    def __post_init__(self):
        if not self.duration > 0:
            raise ValueError(f"segment duration must be positive, got {self.duration}")
        if self.current < 0:
            raise ValueError(f"current must be nonnegative, got {self.current}")


@dataclass(frozen=True)
class CurrentProfile:
    """Piecewise-constant current starting at ``start`` (minutes)."""

    start: float
    segments: tuple[CurrentSegment, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))

    @property
    def end(self) -> float:
        return self.start + sum(s.duration for s in self.segments)

    def boundaries(self) -> list[float]:
        out = [self.start]
        for seg in self.segments:
            out.append(out[-1] + seg.duration)
        return out


def _check_params(state: BatteryState, params: BatteryParams):
    if state.x.shape != (params.m + 1,):
        raise ValueError(
            f"state has {state.x.shape[0]} components, params expect {params.m + 1}"
        )


def advance(state: BatteryState, params: BatteryParams, current: float, dt: float) -> BatteryState:
    """Exact solution after holding ``current`` for ``dt`` minutes."""
    if dt < 0:
        raise ValueError(f"dt must be nonnegative, got {dt}")
    if current < 0:
        raise ValueError(f"current must be nonnegative, got {current}")
    _check_params(state, params)
    if dt == 0:
        return state
    lam = params.rates
    decay = np.exp(-lam * dt)
    x = np.empty(params.m + 1)
    x[0] = state.x[0] + current * dt / params.alpha
    # -expm1 keeps 1 - e^{-lam dt} accurate for short segments
    x[1:] = state.x[1:] * decay + (2.0 * current / (params.alpha * lam)) * -np.expm1(-lam * dt)
    return BatteryState(x)


def sigma_constant(params: BatteryParams, current: float, t: float) -> float:
    """Total loss after ``t`` minutes of constant ``current`` from a fresh battery."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    lam = params.rates
    return current / params.alpha * (t + 2.0 * float(np.sum(-np.expm1(-lam * t) / lam)))


def capacity_report(state: BatteryState) -> CapacityReport:
    y = state.y
    return CapacityReport(y_total=y, permanent=state.permanent, temporary=state.temporary, alive=y < 1.0)


def simulate_profile(
    params: BatteryParams,
    start_state: BatteryState,
    profile: CurrentProfile,
    sample_step: Optional[float] = None,
) -> list[tuple[float, CapacityReport]]:
    """Capacity trajectory along ``profile``.

    Every segment boundary is reported. With ``sample_step`` the interior of
    each segment is sampled too, each sample advanced directly from the
    segment-start state so sampling never perturbs the boundary values.
    """
    if sample_step is not None and not sample_step > 0:
        raise ValueError("sample_step must be positive")
    t = profile.start
    state = start_state
    out = [(t, capacity_report(state))]
    for seg in profile.segments:
        if sample_step is not None:
            k = 1
            while k * sample_step < seg.duration - 1e-12:
                dt = k * sample_step
                out.append((t + dt, capacity_report(advance(state, params, seg.current, dt))))
                k += 1
        state = advance(state, params, seg.current, seg.duration)
        t += seg.duration
        out.append((t, capacity_report(state)))
    return out


def final_state(params: BatteryParams, start_state: BatteryState, profile: CurrentProfile) -> BatteryState:
    state = start_state
    for seg in profile.segments:
        state = advance(state, params, seg.current, seg.duration)
    return state


def _first_crossing(params, state, current, duration) -> Optional[float]:
    """Offset of the first ``y >= 1`` inside one segment, or None."""
    if current == 0:
        # pure relaxation, y cannot rise
        return None
    end_y = advance(state, params, current, duration).y
    lo, hi = 0.0, None
    if end_y >= 1.0:
        hi = duration
    # x_j at or below its steady level 2I/(alpha lambda_j) means every x_j
    # rises, so y is monotone; otherwise scan for an interior peak
    steady = 2.0 * current / (params.alpha * params.rates)
    monotone = bool(np.all(state.x[1:] <= steady))
    grid = [] if monotone else np.linspace(0.0, duration, 65)[1:-1]
    for g in grid:
        if advance(state, params, current, g).y >= 1.0:
            hi = g
            break
        lo = g
    if hi is None:
        return None
    while hi - lo > LIFETIME_TOL:
        mid = 0.5 * (lo + hi)
        if advance(state, params, current, mid).y >= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def end_of_life(
    params: BatteryParams, start_state: BatteryState, profile: CurrentProfile
) -> Optional[float]:
    """Earliest time at which ``y >= 1``; None when the battery survives the profile."""
    t = profile.start
    state = start_state
    if state.y >= 1.0:
        return t
    for seg in profile.segments:
        hit = _first_crossing(params, state, seg.current, seg.duration)
        if hit is not None:
            return float(t + hit)
        state = advance(state, params, seg.current, seg.duration)
        t += seg.duration
    return None


def constant_profile(current: float, duration: float, start: float = 0.0) -> CurrentProfile:
    return CurrentProfile(start, (CurrentSegment(duration, current),))


def pulsed_profile(
    current: float, on: float, off: float, cycles: int, start: float = 0.0
) -> CurrentProfile:
    segs: list[CurrentSegment] = []
    for _ in range(cycles):
        segs.append(CurrentSegment(on, current))
        segs.append(CurrentSegment(off, 0.0))
    return CurrentProfile(start, tuple(segs))


def load_params(data: dict) -> tuple[BatteryParams, float]:
    """Parse a battery config mapping; returns (params, busy current in mA)."""
    try:
        params = BatteryParams(
            alpha=float(data["alpha"]),
            beta=float(data["beta"]),
            m=int(data.get("m", DEFAULT_ORDER)),
        )
        current = float(data["busy_current_mA"])
    except KeyError as exc:
        raise ValueError(f"battery config missing key {exc.args[0]!r}") from None
    if not current > 0 or not math.isfinite(current):
        raise ValueError(f"busy_current_mA must be positive, got {current}")
    return params, current
