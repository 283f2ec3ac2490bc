"""Finite representations of cadlag step paths on [0, 1].

A path is an initial value at time 0 followed by an ordered list of events
``(time, value)``.  Between events the path is constant, so every path is a
right-continuous step function with exact left limits.  Continuous processes
are represented by their skeletons on a fine grid.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Union

import numpy as np

from .exceptions import DomainError


def _as_times(t) -> np.ndarray:
    return np.asarray(t, dtype=float)


def _check_unit_interval(t: np.ndarray, left_open: bool = False) -> None:
    lo_bad = np.any(t <= 0.0) if left_open else np.any(t < 0.0)
    if lo_bad or np.any(t > 1.0) or np.any(np.isnan(t)):
        interval = "(0, 1]" if left_open else "[0, 1]"
        raise DomainError(f"time outside {interval}: {t}")


@dataclass(frozen=True, eq=False)
class CadlagPath:
    """Right-continuous step path on [0, 1].

    Parameters
    ----------
    times : array_like
        Strictly increasing event times in (0, 1].
    values : array_like
        Path value from each event time until the next one.
    initial_value : float
        Value on [0, first event).
    """

    times: np.ndarray
    values: np.ndarray
    initial_value: float = 0.0
    _all_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        times = np.array(self.times, dtype=float).reshape(-1)
        values = np.array(self.values, dtype=float).reshape(-1)
        if times.shape != values.shape:
            raise ValueError("times and values must have the same length")
        if times.size:
            if times[0] <= 0.0 or times[-1] > 1.0:
                raise DomainError("event times must lie in (0, 1]")
            if np.any(np.diff(times) <= 0.0):
                raise ValueError("event times must be strictly increasing")
        if not np.all(np.isfinite(values)) or not np.isfinite(self.initial_value):
            raise ValueError("path values must be finite")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "initial_value", float(self.initial_value))
        all_values = np.concatenate(([self.initial_value], values))
        all_values.setflags(write=False)
        object.__setattr__(self, "_all_values", all_values)

    @classmethod
    def from_grid(cls, grid, values) -> "CadlagPath":
        """Skeleton path from values on a grid whose first point is 0."""
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.size == 0 or grid[0] != 0.0:
            raise ValueError("grid must start at 0")
        return cls(grid[1:], values[1:], float(values[0]))

    @classmethod
    def constant(cls, value: float) -> "CadlagPath":
        return cls(np.empty(0), np.empty(0), value)

    def __len__(self) -> int:
        return self.times.size

    def __call__(self, t):
        return self.value_at(t)

    def value_at(self, t):
        """Right-continuous evaluation; accepts a scalar or an array of times."""
        t = _as_times(t)
        _check_unit_interval(t)
        idx = np.searchsorted(self.times, t, side="right")
        out = self._all_values[idx]
        return float(out) if out.ndim == 0 else out

    def left_limit_at(self, t):
        """Left limit at ``t`` in (0, 1]."""
        t = _as_times(t)
        _check_unit_interval(t, left_open=True)
        idx = np.searchsorted(self.times, t, side="left")
        out = self._all_values[idx]
        return float(out) if out.ndim == 0 else out

    def increments(self) -> np.ndarray:
        """Jump sizes at every event, zero-size ones included."""
        return np.diff(self._all_values)

    def jumps(self) -> list[tuple[float, float]]:
        inc = self.increments()
        keep = inc != 0.0
        return list(zip(self.times[keep].tolist(), inc[keep].tolist()))

    def total_variation(self, t: float = 1.0) -> float:
        t = float(t)
        _check_unit_interval(np.asarray(t))
        k = np.searchsorted(self.times, t, side="right")
        return float(np.sum(np.abs(self.increments()[:k])))

    def on_grid(self, grid) -> np.ndarray:
        return self.value_at(np.asarray(grid, dtype=float))

    def to_csv(self) -> str:
        """Serialize as ``time,value`` rows; the initial value is the row at time 0.

        Floats are written with ``repr`` so that a round trip is bit-exact.
        """
        buf = io.StringIO()
        buf.write("time,value\n")
        buf.write(f"0.0,{self.initial_value!r}\n")
        for s, v in zip(self.times.tolist(), self.values.tolist()):
            buf.write(f"{s!r},{v!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "CadlagPath":
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or [c.strip() for c in rows[0]] != ["time", "value"]:
            raise ValueError("expected header 'time,value'")
        body = [(float(a), float(b)) for a, b in rows[1:] if (a, b) != ("", "")]
        if not body or body[0][0] != 0.0:
            raise ValueError("first row must carry the initial value at time 0")
        times = [s for s, _ in body[1:]]
        values = [v for _, v in body[1:]]
        return cls(np.array(times), np.array(values), body[0][1])

    def __eq__(self, other):
        if not isinstance(other, CadlagPath):
            return NotImplemented
        return (
            self.initial_value == other.initial_value
            and np.array_equal(self.times, other.times)
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def value_at(p: CadlagPath, t):
    return p.value_at(t)


def left_limit_at(p: CadlagPath, t):
    return p.left_limit_at(t)


def jumps(p: CadlagPath) -> list[tuple[float, float]]:
    return p.jumps()


def total_variation(p: CadlagPath, t: float = 1.0) -> float:
    return p.total_variation(t)


@dataclass(frozen=True, eq=False)
class ClockProcess:
    """Nondecreasing path used as the averaging measure ``dA``."""

    base: CadlagPath

    def __post_init__(self):
        if self.base.initial_value < 0.0:
            raise ValueError("clock must start at a nonnegative value")
        if np.any(self.base.increments() < 0.0):
            raise ValueError("clock must be nondecreasing")

    @classmethod
    def from_grid(cls, grid, values) -> "ClockProcess":
        return cls(CadlagPath.from_grid(grid, values))

    @classmethod
    def identity(cls, grid) -> "ClockProcess":
        grid = np.asarray(grid, dtype=float)
        return cls.from_grid(grid, grid)

    @property
    def times(self) -> np.ndarray:
        return self.base.times

    def value_at(self, t):
        return self.base.value_at(t)

    __call__ = value_at

    def atoms(self) -> tuple[np.ndarray, np.ndarray]:
        """Masses of ``dA`` including the atom ``A_0`` at time 0 (A vanishes before 0)."""
        times = np.concatenate(([0.0], self.base.times))
        masses = np.concatenate(([self.base.initial_value], self.base.increments()))
        return times, masses

    def is_regular(self, grid, atol: float = 0.0) -> bool:
        """True when ``A_t - A_s >= t - s`` for consecutive grid times."""
        grid = np.asarray(grid, dtype=float)
        return bool(np.all(np.diff(self.value_at(grid)) - np.diff(grid) >= -atol))


def regularize_clock(a: ClockProcess, grid) -> ClockProcess:
    """Grid clock with values ``a(t) + t``, so that ``A_t - A_s >= t - s``."""
    grid = np.asarray(grid, dtype=float)
    return ClockProcess.from_grid(grid, a.value_at(grid) + grid)


class Mode(str, enum.Enum):
    AT_POINT = "at_point"
    LEFT_LIMIT = "left_limit"


Source = Union[CadlagPath, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class SampledIntegrand:
    """An integrand ``t -> func(t, source(t))`` with an optional bound.

    ``source`` is either a :class:`CadlagPath` or a vectorized callable of
    time.  In ``LEFT_LIMIT`` mode the source is read through its left limit,
    which requires a path; at time 0 the initial value is used.
    """

    source: Source
    bound: Optional[float] = None
    mode: Mode = Mode.AT_POINT
    func: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def __post_init__(self):
        if self.bound is not None and self.bound < 0:
            raise ValueError("bound must be nonnegative")
        if self.mode is Mode.LEFT_LIMIT and not isinstance(self.source, CadlagPath):
            raise TypeError("left-limit sampling needs a CadlagPath source")

    def _base(self, t: np.ndarray) -> np.ndarray:
        if self.mode is Mode.LEFT_LIMIT:
            out = np.empty_like(t)
            pos = t > 0.0
            out[pos] = self.source.left_limit_at(t[pos])
            out[~pos] = self.source.initial_value
            return out
        if isinstance(self.source, CadlagPath):
            return self.source.value_at(t)
        return np.broadcast_to(np.asarray(self.source(t), dtype=float), t.shape).copy()

    def __call__(self, t):
        t = np.atleast_1d(_as_times(t))
        base = self._base(t)
        out = base if self.func is None else np.asarray(self.func(t, base), dtype=float)
        out = np.broadcast_to(out, t.shape).astype(float)
        if self.bound is not None and np.any(np.abs(out) > self.bound):
            raise ValueError(f"integrand exceeds its declared bound {self.bound}")
        return out


def uniform_grid(exponent: int) -> np.ndarray:
    """Uniform partition of [0, 1] with mesh ``2**-exponent``."""
    if exponent < 0:
        raise ValueError("grid exponent must be nonnegative")
    return np.arange(2**exponent + 1, dtype=float) / 2**exponent


def paths_from_rows(grid, rows: Iterable) -> list[CadlagPath]:
    return [CadlagPath.from_grid(grid, r) for r in rows]
