"""Exact Lebesgue-Stieltjes calculus on step paths.

Every integral here is a finite sum over event times, so results are exact up
to floating-point rounding.  The pathwise approximant of a stochastic integral
is assembled from three pieces:

* the window average ``H^n`` of the integrand against a clock ``A``,
* the integration-by-parts integral ``H^n X - int X_- dH^n``,
* the plain sum of the integrand against the large jumps of ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError
from .paths import CadlagPath, ClockProcess, Mode, SampledIntegrand, regularize_clock


@dataclass(frozen=True)
class AveragedIntegrand:
    """Path of the window-averaged integrand for window ``1/n``."""

    n: int
    values: CadlagPath

    def __call__(self, t):
        return self.values.value_at(t)


@dataclass(frozen=True)
class IntegrationResult:
    """Running integral ``t -> int_0^t ...`` with the settings that produced it."""

    path: CadlagPath
    n: int
    mode: str

    def __call__(self, t):
        return self.path.value_at(t)


def ls_integral_path(phi: SampledIntegrand, g: CadlagPath) -> CadlagPath:
    """Running Stieltjes integral of ``phi`` against ``g`` on the events of ``g``."""
    if len(g) == 0:
        return CadlagPath.constant(0.0)
    running = np.cumsum(phi(g.times) * g.increments())
    return CadlagPath(g.times, running, 0.0)


def ls_integral(phi: SampledIntegrand, g: CadlagPath, t):
    """Sum of ``phi(s) * dg(s)`` over event times ``s`` of ``g`` in ``(0, t]``.

    ``phi`` is read in its own mode, so a path integrand in ``LEFT_LIMIT`` mode
    contributes ``phi(s-)``.  Vectorized over ``t``.
    """
    return ls_integral_path(phi, g).value_at(t)


def averaging_operator(
    h: SampledIntegrand, a: ClockProcess, n: int, eval_times
) -> AveragedIntegrand:
    """Average of ``h`` against ``dA`` over the trailing window ``(t - 1/n, t]``.

    Parameters
    ----------
    h : SampledIntegrand
        Integrand; read at the atoms of ``dA`` in its own mode.
    a : ClockProcess
        Averaging clock.  ``A`` and ``h`` are taken to vanish before time 0,
        so the value ``A_0`` acts as an atom at 0.
    n : int
        Inverse window length.
    eval_times : array_like
        Increasing times at which the average is materialized.  The result is
        the step path through these values, with value 0 at time 0.

    Returns
    -------
    AveragedIntegrand

    Raises
    ------
    ArithmeticError
        If the clock does not charge some window (an unregularized flat clock).
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    t = np.asarray(eval_times, dtype=float)
    if t.size and np.any(np.diff(t) <= 0.0):
        raise ValueError("eval_times must be strictly increasing")
    t = t[t > 0.0]

    atom_t, atom_m = a.atoms()
    hv = h(atom_t)
    # Centering makes constant integrands exact and keeps window sums small.
    ref = hv[0]
    partial = np.concatenate(([0.0], np.cumsum((hv - ref) * atom_m)))

    start = t - 1.0 / n
    hi = np.searchsorted(atom_t, t, side="right")
    lo = np.searchsorted(atom_t, start, side="right")
    a_hi = a.value_at(t)
    a_lo = np.where(start < 0.0, 0.0, a.value_at(np.clip(start, 0.0, 1.0)))
    denom = a_hi - a_lo
    if np.any(denom <= 0.0):
        bad = t[denom <= 0.0][0]
        raise ArithmeticError(f"clock puts no mass on the window ending at {bad}")

    values = ref + (partial[hi] - partial[lo]) / denom
    if h.bound is not None:
        values = np.clip(values, -h.bound, h.bound)
    return AveragedIntegrand(n, CadlagPath(t, values, 0.0))


def ibp_path(hn, x: CadlagPath) -> CadlagPath:
    """``H X - int X_- dH`` on the union of event times of ``H`` and ``x``."""
    h = hn.values if isinstance(hn, AveragedIntegrand) else hn
    if x.initial_value != 0.0:
        raise DomainError("integrator must start at 0")
    times = np.union1d(h.times, x.times)
    if times.size == 0:
        return CadlagPath.constant(0.0)
    x_left = SampledIntegrand(x, mode=Mode.LEFT_LIMIT)
    correction = ls_integral(x_left, h, times)
    values = h.value_at(times) * x.value_at(times) - correction
    return CadlagPath(times, values, 0.0)


def ibp_integral(hn, x: CadlagPath, t):
    """Integral of the finite-variation integrand ``hn`` against ``x`` via integration by parts.

    For step paths this equals ``sum hn(s) * dx(s)`` exactly.
    """
    return ibp_path(hn, x).value_at(t)


def jump_truncation(x: CadlagPath, threshold: float = 1.0) -> tuple[CadlagPath, CadlagPath]:
    """Split ``x`` into its jumps larger than ``threshold`` and the rest.

    Returns ``(check, remainder)`` where ``check`` is the running sum of the
    large jumps and ``remainder = x - check``.
    """
    inc = x.increments()
    big = np.abs(inc) > threshold
    check = CadlagPath(x.times[big], np.cumsum(inc[big]), 0.0)
    remainder = CadlagPath(x.times, x.values - check.value_at(x.times), x.initial_value)
    return check, remainder


def integrand_truncation(h: SampledIntegrand, level: float) -> SampledIntegrand:
    """``h * 1{|h| <= level}``, declared bounded by ``level``."""
    if level <= 0:
        raise ValueError("truncation level must be positive")
    inner = h.func

    def truncated(t, base):
        v = base if inner is None else np.asarray(inner(t, base), dtype=float)
        return np.where(np.abs(v) <= level, v, 0.0)

    return SampledIntegrand(h.source, bound=float(level), mode=h.mode, func=truncated)


def approximate_integral(
    h: SampledIntegrand,
    x: CadlagPath,
    clock: ClockProcess,
    n: int,
    grid,
    *,
    regularize: bool = True,
    jump_threshold: float = 1.0,
    mode: str = "averaged",
) -> IntegrationResult:
    """Pathwise approximant of ``int h dX`` built from the paths alone.

    The large jumps of ``x`` are integrated as a plain sum; the remainder,
    whose jumps are bounded by ``jump_threshold``, is integrated against the
    window average of ``h`` through integration by parts.
    """
    grid = np.asarray(grid, dtype=float)
    if regularize:
        clock = regularize_clock(clock, grid)
    x0 = x.initial_value
    if x0 != 0.0:
        x = CadlagPath(x.times, x.values - x0, 0.0)
    check, remainder = jump_truncation(x, jump_threshold)
    hn = averaging_operator(h, clock, n, grid)
    values = ibp_integral(hn, remainder, grid) + ls_integral(h, check, grid)
    return IntegrationResult(CadlagPath.from_grid(grid, values), n, mode)
