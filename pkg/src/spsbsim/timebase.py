"""Exact integer time base and normalized busy-interval sets.

All scheduling arithmetic happens on integer ticks. One tick is
``1 / ticks_per_minute`` minutes (a microminute by default), so any time
written with at most six decimals of minutes maps to an exact integer.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

DEFAULT_TICKS_PER_MINUTE = 1_000_000


class PrecisionError(ValueError):
    """A time value cannot be represented exactly at the configured resolution."""


@dataclass(frozen=True)
class TimeBase:
    ticks_per_minute: int = DEFAULT_TICKS_PER_MINUTE

    def __post_init__(self):
        if self.ticks_per_minute <= 0:
            raise ValueError("ticks_per_minute must be positive")

    @classmethod
    def from_tick(cls, tick_minutes) -> "TimeBase":
        """Build a time base from the length of one tick in minutes (e.g. ``1e-6``)."""
        per = 1 / Fraction(Decimal(str(tick_minutes)))
        if per.denominator != 1:
            raise PrecisionError(f"tick {tick_minutes} does not divide one minute")
        return cls(int(per))

    def ticks(self, minutes) -> int:
        """Convert minutes to ticks, refusing to round.

        Floats go through ``repr`` so that ``0.3`` means the decimal 0.3 and
        not the binary fraction closest to it.
        """
        if isinstance(minutes, bool):
            raise TypeError("bool is not a time value")
        if isinstance(minutes, int):
            return minutes * self.ticks_per_minute
        if isinstance(minutes, Fraction):
            exact = minutes
        else:
            try:
                exact = Fraction(Decimal(str(minutes)))
            except (InvalidOperation, ValueError) as exc:
                raise ValueError(f"not a time value: {minutes!r}") from exc
        scaled = exact * self.ticks_per_minute
        if scaled.denominator != 1:
            raise PrecisionError(
                f"{minutes} min is not a whole number of ticks "
                f"(resolution 1/{self.ticks_per_minute} min)"
            )
        return int(scaled)

    def minutes(self, ticks: int) -> float:
        return ticks / self.ticks_per_minute

    def exact_minutes(self, ticks: int) -> Fraction:
        return Fraction(ticks, self.ticks_per_minute)

    def format(self, ticks: int) -> str:
        """Shortest decimal string for ``ticks`` (exact, no trailing zeros)."""
        q = Decimal(ticks) / Decimal(self.ticks_per_minute)
        text = format(q, "f")
        if "." in text:
            text = text.rstrip("0").rstrip(".")
        return text or "0"


DEFAULT_TIMEBASE = TimeBase()


def ticks(minutes, timebase: TimeBase = DEFAULT_TIMEBASE) -> int:
    return timebase.ticks(minutes)


class Interval(NamedTuple):
    """Half-open ``[start, end)`` in ticks."""

    start: int
    end: int

    @property
    def width(self) -> int:
        return self.end - self.start


def _normalize(pieces: Iterable[tuple[int, int]]) -> tuple[Interval, ...]:
    out: list[Interval] = []
    for start, end in sorted(p for p in pieces if p[1] > p[0]):
        if out and start <= out[-1].end:
            if end > out[-1].end:
                out[-1] = Interval(out[-1].start, end)
        else:
            out.append(Interval(start, end))
    return tuple(out)


class IntervalSet:
    """Immutable union of half-open integer intervals.

    Stored intervals are sorted, disjoint and non-adjacent; overlapping or
    touching inputs are merged and zero-width inputs vanish.
    """

    __slots__ = ("_intervals",)

    def __init__(self, intervals: Iterable[tuple[int, int]] = ()):
        intervals = list(intervals)
        for start, end in intervals:
            if end < start:
                raise ValueError(f"interval end before start: [{start}, {end})")
        self._intervals = _normalize(intervals)

    @classmethod
    def _trusted(cls, intervals: tuple[Interval, ...]) -> "IntervalSet":
        obj = cls.__new__(cls)
        obj._intervals = intervals
        return obj

    @property
    def intervals(self) -> tuple[Interval, ...]:
        return self._intervals

    def __iter__(self) -> Iterator[Interval]:
        return iter(self._intervals)

    def __len__(self) -> int:
        return len(self._intervals)

    def __bool__(self) -> bool:
        return bool(self._intervals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return self._intervals == other._intervals

    def __hash__(self) -> int:
        return hash(self._intervals)

    def __repr__(self) -> str:
        body = ", ".join(f"[{a}, {b})" for a, b in self._intervals)
        return f"IntervalSet({{{body}}})"

    def __contains__(self, t: int) -> bool:
        return self.contains(t)

    def __or__(self, other: "IntervalSet") -> "IntervalSet":
        return self.union(other)

    def __and__(self, other: "IntervalSet") -> "IntervalSet":
        return self.intersection(other)

    def __sub__(self, other: "IntervalSet") -> "IntervalSet":
        return self.difference(other)

    def __xor__(self, other: "IntervalSet") -> "IntervalSet":
        return self.symmetric_difference(other)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return IntervalSet._trusted(_normalize(self._intervals + other._intervals))

    def contains(self, t: int) -> bool:
        lo, hi = 0, len(self._intervals)
        while lo < hi:
            mid = (lo + hi) // 2
            if self._intervals[mid].end <= t:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(self._intervals) and self._intervals[lo].start <= t

    def measure(self) -> int:
        return sum(b - a for a, b in self._intervals)

    def intersection(self, other: "IntervalSet") -> "IntervalSet":
        out = []
        i = j = 0
        a, b = self._intervals, other._intervals
        while i < len(a) and j < len(b):
            lo = max(a[i].start, b[j].start)
            hi = min(a[i].end, b[j].end)
            if lo < hi:
                out.append((lo, hi))
            if a[i].end < b[j].end:
                i += 1
            else:
                j += 1
        return IntervalSet(out)

    def complement(self, start: int, end: int) -> "IntervalSet":
        """Gaps of this set inside ``[start, end)``."""
        out = []
        cursor = start
        for a, b in self.clip(start, end):
            if a > cursor:
                out.append((cursor, a))
            cursor = b
        if cursor < end:
            out.append((cursor, end))
        return IntervalSet._trusted(tuple(Interval(a, b) for a, b in out))

    def difference(self, other: "IntervalSet") -> "IntervalSet":
        if not self._intervals:
            return self
        lo, hi = self._intervals[0].start, self._intervals[-1].end
        return self.intersection(other.complement(lo, hi))

    def symmetric_difference(self, other: "IntervalSet") -> "IntervalSet":
        return self.difference(other).union(other.difference(self))

    def clip(self, start: int, end: int) -> "IntervalSet":
        return self.intersection(IntervalSet([(start, end)]))

    def shift(self, offset: int) -> "IntervalSet":
        return IntervalSet._trusted(
            tuple(Interval(a + offset, b + offset) for a, b in self._intervals)
        )


EMPTY = IntervalSet()


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    return a.union(b)


def contains(s: IntervalSet, t: int) -> bool:
    return s.contains(t)


def measure(s: IntervalSet) -> int:
    return s.measure()
