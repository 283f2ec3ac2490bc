"""Level-crossing Riemann sums and the pathwise quadratic variation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .paths import CadlagPath


@dataclass(frozen=True)
class CrossingSchedule:
    """Sampling times at which the integrand has moved by at least ``2**-n``."""

    n: int
    times: np.ndarray


def _crossing_indices(values: np.ndarray, level: float) -> list[int]:
    # Sequential by nature: each threshold is relative to the last sampled value.
    out = [0]
    ref = values[0]
    for i, v in enumerate(values.tolist()):
        if abs(v - ref) >= level:
            out.append(i)
            ref = v
    return out


def level_crossing_times(g: CadlagPath, n: int) -> CrossingSchedule:
    """Crossing times of ``g`` on the grid of mesh ``2**-n``, starting at 0.

    Only event times are inspected; on a skeleton the overshoot past a level
    is at most one grid increment.
    """
    values = np.concatenate(([g.initial_value], g.values))
    idx = _crossing_indices(values, 2.0**-n)
    times = np.concatenate(([0.0], g.times))[idx]
    return CrossingSchedule(n, times)


def karandikar_path(g: CadlagPath, x: CadlagPath, n: int) -> CadlagPath:
    """Running level-crossing sum ``sum g(tau_k) (x(tau_{k+1} ^ t) - x(tau_k ^ t))``.

    The result is materialized on the event times of ``x``.
    """
    sched = level_crossing_times(g, n).times
    if len(x) == 0:
        return CadlagPath.constant(0.0)
    g_samples = g.value_at(sched)
    # Integrand value active on (tau_k, tau_{k+1}] is g(tau_k).
    k = np.searchsorted(sched, x.times, side="left") - 1
    running = np.cumsum(g_samples[k] * x.increments())
    return CadlagPath(x.times, running, 0.0)


def karandikar_integral(g: CadlagPath, x: CadlagPath, n: int, t):
    return karandikar_path(g, x, n).value_at(t)


def pathwise_qv(x: CadlagPath, n: int) -> CadlagPath:
    """``x(t)**2 - x(0)**2 - 2 int x_- dx`` with the level-crossing integral.

    Meaningful for skeletons of continuous paths; converges to the quadratic
    variation as ``n`` grows.
    """
    integral = karandikar_path(x, x, n)
    if len(x) == 0:
        return CadlagPath.constant(0.0)
    values = x.values**2 - x.initial_value**2 - 2.0 * integral.values
    return CadlagPath(x.times, values, 0.0)
