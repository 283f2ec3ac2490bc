"""Path generators for families of laws, and the per-law reference integral.

Each :class:`Scenario` stands for one law under which the integrator is a
semimartingale.  Time-changed Brownian motions with different time changes
have different quadratic variations, so their laws are mutually singular,
yet the same pathwise integration routine is applied to all of them.

Sampling uses NumPy's ``PCG64`` bit generator seeded by
``SeedSequence([seed, index])`` and the ziggurat normal sampler of
``numpy.random.Generator``, so a path depends only on ``(scenario, index)``.
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .bichteler import pathwise_qv
from .exceptions import ConfigError
from .paths import CadlagPath, ClockProcess, SampledIntegrand, uniform_grid
from .stieltjes import ls_integral, ls_integral_path


@dataclass(frozen=True)
class TimeChange:
    """Increasing continuous ``f`` with ``f(0) = 0``, parsed from a spec string.

    Supported specs: ``linear:k`` (``k t``), ``power:a`` (``t**a``, ``a >= 1``)
    and ``piecewise:[(t1, v1), ...]`` (linear interpolation from ``(0, 0)``,
    constant after the last knot).
    """

    spec: str
    _knots: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        kind, _, raw = self.spec.partition(":")
        try:
            if kind == "linear":
                k = float(raw)
                if k < 0:
                    raise ConfigError("linear time change needs k >= 0")
                knots = None
            elif kind == "power":
                a = float(raw)
                if a < 1:
                    raise ConfigError("power time change needs exponent >= 1")
                knots = None
            elif kind == "piecewise":
                pts = [(float(t), float(v)) for t, v in ast.literal_eval(raw)]
                ts = np.array([0.0] + [t for t, _ in pts])
                vs = np.array([0.0] + [v for _, v in pts])
                if np.any(np.diff(ts) <= 0) or ts[-1] > 1:
                    raise ConfigError("piecewise knots need increasing times in (0, 1]")
                if np.any(np.diff(vs) < 0):
                    raise ConfigError("piecewise time change must be nondecreasing")
                knots = (ts, vs)
            else:
                raise ConfigError(f"unknown time change {self.spec!r}")
        except (ValueError, SyntaxError, TypeError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"cannot parse time change {self.spec!r}") from None
        object.__setattr__(self, "_knots", knots)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        kind, _, raw = self.spec.partition(":")
        if kind == "linear":
            return float(raw) * t
        if kind == "power":
            return t ** float(raw)
        ts, vs = self._knots
        return np.interp(t, ts, vs)


@dataclass(frozen=True)
class TimeChangedBM:
    f: TimeChange

    kind = "time_changed_bm"


@dataclass(frozen=True)
class JumpDiffusion:
    """Euler skeleton of ``drift dt + vol dW`` plus compound Poisson jumps.

    Jump sizes are uniform on ``[-jump_bound, jump_bound]`` or, with
    ``jump_dist="two_point"``, equal to ``+-jump_bound``.
    """

    drift: float = 0.0
    vol: float = 1.0
    jump_rate: float = 0.0
    jump_bound: float = 1.0
    jump_dist: str = "uniform"

    kind = "jump_diffusion"

    def __post_init__(self):
        if self.vol < 0 or self.jump_rate < 0 or self.jump_bound < 0:
            raise ConfigError("vol, jump_rate and jump_bound must be nonnegative")
        if self.jump_dist not in ("uniform", "two_point"):
            raise ConfigError(f"unknown jump distribution {self.jump_dist!r}")

    def truncated_second_moment(self) -> float:
        """``E[min(J**2, 1)]`` for the jump size ``J``."""
        b = self.jump_bound
        if self.jump_dist == "two_point":
            return min(b * b, 1.0)
        if b <= 1:
            return b * b / 3.0
        return (1.0 / 3.0 + (b - 1.0)) / b


@dataclass(frozen=True)
class Scenario:
    """One law: a path model, a grid and a seed.

    ``clock`` selects the averaging clock attached to each path: ``"model"``
    uses the known dominating clock, ``"pathwise_qv"`` uses the running
    maximum of the level-crossing quadratic variation of the path itself.
    """

    kind: Union[TimeChangedBM, JumpDiffusion]
    grid_exponent: int = 14
    seed: int = 0
    name: str = ""
    clock: str = "model"
    qv_level: int = 8

    def __post_init__(self):
        if not 0 <= self.grid_exponent <= 24:
            raise ConfigError("grid_exponent must be in [0, 24]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.clock not in ("model", "pathwise_qv"):
            raise ConfigError(f"unknown clock {self.clock!r}")

    @property
    def scenario_id(self) -> str:
        if self.name:
            return self.name
        k = self.kind
        if isinstance(k, TimeChangedBM):
            return f"tcbm-{k.f.spec}"
        return f"jd-{k.drift:g}-{k.vol:g}-{k.jump_rate:g}-{k.jump_bound:g}"

    @property
    def grid(self) -> np.ndarray:
        return uniform_grid(self.grid_exponent)

    @classmethod
    def from_dict(cls, d: dict, default_seed: int = 0) -> "Scenario":
        d = dict(d)
        kind = d.pop("kind", None)
        common = {
            "grid_exponent": int(d.pop("grid_exponent", 14)),
            "seed": int(d.pop("seed", default_seed)),
            "name": str(d.pop("id", d.pop("name", ""))),
            "clock": d.pop("clock", "model"),
            "qv_level": int(d.pop("qv_level", 8)),
        }
        if kind == "time_changed_bm":
            model = TimeChangedBM(TimeChange(str(d.pop("f", "linear:1"))))
        elif kind == "jump_diffusion":
            try:
                model = JumpDiffusion(
                    drift=float(d.pop("drift", 0.0)),
                    vol=float(d.pop("vol", 1.0)),
                    jump_rate=float(d.pop("jump_rate", 0.0)),
                    jump_bound=float(d.pop("jump_bound", 1.0)),
                    jump_dist=str(d.pop("jump_dist", "uniform")),
                )
            except (TypeError, ValueError) as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"bad jump_diffusion parameters: {exc}") from None
        else:
            raise ConfigError(f"unknown scenario kind {kind!r}")
        if d:
            raise ConfigError(f"unknown scenario fields: {sorted(d)}")
        return cls(model, **common)

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        k = self.kind
        if isinstance(k, TimeChangedBM):
            out = {"kind": k.kind, "f": k.f.spec}
        else:
            out = {
                "kind": k.kind,
                "drift": k.drift,
                "vol": k.vol,
                "jump_rate": k.jump_rate,
                "jump_bound": k.jump_bound,
                "jump_dist": k.jump_dist,
            }
        out.update(
            grid_exponent=self.grid_exponent,
            seed=self.seed,
            id=self.scenario_id,
            clock=self.clock,
            qv_level=self.qv_level,
        )
        return out


@dataclass(frozen=True)
class PathSample:
    x: CadlagPath
    clock: ClockProcess


def _generators(s: Scenario, index: int):
    seq = np.random.SeedSequence([s.seed, index])
    return [np.random.Generator(np.random.PCG64(c)) for c in seq.spawn(2)]


def _jump_cells(rng, rate: float, n_cells: int) -> list[int]:
    cells: list[int] = []
    taken = set()
    t = 0.0
    while rate > 0:
        t += rng.exponential(1.0 / rate)
        if t > 1.0:
            break
        cell = max(1, math.ceil(t * n_cells))
        if cell in taken:
            # At most one jump per grid cell: discard and draw the next arrival.
            continue
        taken.add(cell)
        cells.append(cell)
    return cells


def scenario_clock(s: Scenario) -> ClockProcess:
    """The model clock dominating the characteristics of the scenario."""
    grid = s.grid
    k = s.kind
    if isinstance(k, TimeChangedBM):
        return ClockProcess.from_grid(grid, k.f(grid))
    kappa = math.ceil(abs(k.drift) + k.vol**2 + k.jump_rate * k.truncated_second_moment())
    return ClockProcess.from_grid(grid, kappa * grid)


def pathwise_clock(x: CadlagPath, level: int) -> ClockProcess:
    """Nondecreasing clock computed from the path alone (running max of its QV)."""
    qv = pathwise_qv(x, level)
    values = np.maximum.accumulate(np.maximum(qv.values, 0.0))
    return ClockProcess(CadlagPath(qv.times, values, 0.0))


def sample_path(s: Scenario, index: int) -> PathSample:
    """Skeleton of ``X`` on the scenario grid; deterministic in ``(s, index)``."""
    if index < 0:
        raise ValueError("path index must be nonnegative")
    grid = s.grid
    n_cells = grid.size - 1
    dt = 1.0 / n_cells
    gauss, jumps = _generators(s, index)
    k = s.kind
    if isinstance(k, TimeChangedBM):
        var = np.maximum(np.diff(k.f(grid)), 0.0)
        inc = np.sqrt(var) * gauss.standard_normal(n_cells)
    else:
        inc = k.drift * dt + k.vol * math.sqrt(dt) * gauss.standard_normal(n_cells)
        cells = _jump_cells(jumps, k.jump_rate, n_cells)
        if cells:
            if k.jump_dist == "uniform":
                sizes = jumps.uniform(-k.jump_bound, k.jump_bound, len(cells))
            else:
                sizes = k.jump_bound * jumps.choice([-1.0, 1.0], len(cells))
            inc[np.array(cells) - 1] += sizes
    x = CadlagPath(grid[1:], np.cumsum(inc), 0.0)
    if s.clock == "pathwise_qv":
        clock = pathwise_clock(x, s.qv_level)
    else:
        clock = scenario_clock(s)
    return PathSample(x, clock)


def reference_ito_integral(h: SampledIntegrand, p: PathSample, t):
    """Riemann-Stieltjes sum of ``h`` against the skeleton of ``X`` up to ``t``.

    ``h`` is read predictably at each grid time, so for a path integrand in
    left-limit mode this is the left-point sum ``sum h(t_{i-1}) dX_i``.
    """
    return ls_integral(h, p.x, t)


def reference_path(h: SampledIntegrand, x: CadlagPath) -> CadlagPath:
    return ls_integral_path(h, x)
