"""Monte Carlo verification of pathwise approximants against per-law oracles.

Every experiment applies the same pathwise routine
(:func:`pathwise.stieltjes.approximate_integral`) to paths drawn from a
scenario and measures the sup-distance on the grid to the reference
Riemann-Stieltjes sum of that path.  Statistics are reduced from sorted
samples, so reports do not depend on the number of worker threads.
"""

from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .bichteler import pathwise_qv
from .exceptions import ConfigError, DomainError
from .integrands import IntegrandFactory, integrand_factory
from .paths import CadlagPath, ClockProcess
from .scenarios import PathSample, Scenario, TimeChangedBM, reference_path, sample_path
from .stieltjes import approximate_integral, integrand_truncation

CSV_COLUMNS = (
    "scenario_id",
    "n",
    "median_sup_error",
    "p90_sup_error",
    "mean_min1_error",
    "num_paths",
    "grid_exponent",
    "seed",
)

# The oracle grid must be this many dyadic levels finer than any window 1/n.
ORACLE_MARGIN_LEVELS = 4


def fmt(x: float) -> str:
    return format(float(x), ".9g")


@dataclass(frozen=True)
class ErrorStats:
    median_sup_error: float
    p90_sup_error: float
    mean_min1_error: float

    @classmethod
    def from_samples(cls, errors: Iterable[float]) -> "ErrorStats":
        e = np.sort(np.asarray(list(errors), dtype=float))
        if e.size == 0:
            raise ValueError("no samples")
        return cls(
            float(np.median(e)),
            float(np.percentile(e, 90)),
            math.fsum(np.minimum(e, 1.0).tolist()) / e.size,
        )


@dataclass
class ConvergenceReport:
    """Per-``n`` error statistics for one scenario.

    For truncation experiments the ``n`` keys are truncation levels.
    ``converged`` is True when the final median error vanishes, or when the
    medians are monotone (10% slack) and drop by at least a quarter over the
    tested range; ``None`` when a single ``n`` cannot show a trend.
    """

    scenario_id: str
    n_values: tuple
    per_n: dict
    num_paths: int
    grid_exponent: int
    seed: int
    converged: Optional[bool] = None
    sup_errors: dict = field(default_factory=dict, repr=False)

    def medians(self) -> list[float]:
        return [self.per_n[n].median_sup_error for n in self.n_values]

    def is_monotone(self, slack: float = 0.1) -> bool:
        """Median sup-errors non-increasing up to a relative slack."""
        m = self.medians()
        return all(b <= (1.0 + slack) * a for a, b in zip(m, m[1:]))

    def is_strictly_decreasing(self) -> bool:
        m = self.medians()
        return all(b < a for a, b in zip(m, m[1:]))

    def final_median(self) -> float:
        return self.medians()[-1]

    def rows(self) -> list[list[str]]:
        return [
            [
                self.scenario_id,
                str(n),
                fmt(self.per_n[n].median_sup_error),
                fmt(self.per_n[n].p90_sup_error),
                fmt(self.per_n[n].mean_min1_error),
                str(self.num_paths),
                str(self.grid_exponent),
                str(self.seed),
            ]
            for n in self.n_values
        ]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(CSV_COLUMNS) + "\n")
        for row in self.rows():
            out.write(",".join(row) + "\n")
        return out.getvalue()


def ucp_distance(y: CadlagPath, z: CadlagPath, times) -> float:
    """Largest ``|y(t) - z(t)|`` over the given times."""
    times = np.asarray(times, dtype=float)
    if times.size == 0:
        raise DomainError("ucp_distance needs at least one time")
    return float(np.max(np.abs(y.value_at(times) - z.value_at(times))))


# A converging sequence must shed at least this fraction of its first error.
MIN_ERROR_DROP = 0.25


def _trend(medians: Sequence[float], slack: float = 0.1, atol: float = 1e-9) -> Optional[bool]:
    if medians[-1] <= atol:
        return True
    if len(medians) < 2:
        return None
    monotone = all(b <= (1.0 + slack) * a for a, b in zip(medians, medians[1:]))
    return monotone and medians[-1] <= (1.0 - MIN_ERROR_DROP) * medians[0]


def _check_oracle_mesh(grid_exponent: int, n_max: int) -> None:
    if n_max * 2**ORACLE_MARGIN_LEVELS > 2**grid_exponent:
        raise ConfigError(
            f"oracle grid 2^-{grid_exponent} is not {ORACLE_MARGIN_LEVELS} levels "
            f"finer than the window 1/{n_max}"
        )


def _check_n_values(n_values: Sequence[int], what: str = "n_values") -> tuple:
    n_values = tuple(int(n) for n in n_values)
    if not n_values:
        raise ConfigError(f"{what} must be nonempty")
    if any(n < 1 for n in n_values) or any(b <= a for a, b in zip(n_values, n_values[1:])):
        raise ConfigError(f"{what} must be positive and strictly increasing")
    return n_values


def _bounded(factory: IntegrandFactory, bound: Optional[float]) -> IntegrandFactory:
    def make(x):
        h = factory(x)
        if h.bound is None:
            if bound is None:
                raise ConfigError("integrand is unbounded; pass a truncation bound")
            h = integrand_truncation(h, bound)
        return h

    return make


def path_errors(
    sample: PathSample,
    grid,
    integrand: Union[str, IntegrandFactory],
    n_values: Sequence[int],
    *,
    bound: Optional[float] = None,
    identity_clock: bool = False,
    jump_threshold: float = 1.0,
) -> np.ndarray:
    """Sup-errors on one path for each ``n`` (``len(n_values)`` floats)."""
    grid = np.asarray(grid, dtype=float)
    make = _bounded(integrand_factory(integrand), bound)
    h = make(sample.x)
    ref = reference_path(h, sample.x)
    if identity_clock:
        clock, regularize = ClockProcess.identity(grid), False
    else:
        clock, regularize = sample.clock, True
    out = np.empty(len(n_values))
    for i, n in enumerate(n_values):
        y = approximate_integral(
            h, sample.x, clock, n, grid, regularize=regularize, jump_threshold=jump_threshold
        )
        out[i] = ucp_distance(y.path, ref, grid)
    return out


def truncation_path_errors(sample, grid, integrand, levels, fixed_n, jump_threshold=1.0) -> np.ndarray:
    """Sup-errors of the truncated integrand's approximant against the untruncated oracle."""
    h_full = integrand_factory(integrand)(sample.x)
    ref = reference_path(h_full, sample.x)
    out = np.empty(len(levels))
    for i, m in enumerate(levels):
        h = integrand_truncation(h_full, m)
        y = approximate_integral(h, sample.x, sample.clock, fixed_n, grid, jump_threshold=jump_threshold)
        out[i] = ucp_distance(y.path, ref, grid)
    return out


def _fan_out(fn, indices: Sequence[int], threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in indices]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, indices))


def build_report(
    scenario_id: str,
    n_values: Sequence[int],
    errors: np.ndarray,
    grid_exponent: int,
    seed: int,
) -> ConvergenceReport:
    """Reduce a ``(num_paths, len(n_values))`` error matrix to a report."""
    errors = np.atleast_2d(np.asarray(errors, dtype=float))
    per_n = {n: ErrorStats.from_samples(errors[:, i]) for i, n in enumerate(n_values)}
    sup = {n: np.sort(errors[:, i]) for i, n in enumerate(n_values)}
    medians = [per_n[n].median_sup_error for n in n_values]
    return ConvergenceReport(
        scenario_id,
        tuple(n_values),
        per_n,
        errors.shape[0],
        grid_exponent,
        seed,
        _trend(medians),
        sup,
    )


def evaluate_samples(
    samples: Sequence[PathSample],
    grid,
    integrand: Union[str, IntegrandFactory],
    n_values: Sequence[int],
    *,
    scenario_id: str = "samples",
    seed: int = 0,
    bound: Optional[float] = None,
    identity_clock: bool = False,
) -> ConvergenceReport:
    """Run the approximation pipeline on explicit path samples."""
    grid = np.asarray(grid, dtype=float)
    n_values = _check_n_values(n_values)
    errors = np.array(
        [path_errors(s, grid, integrand, n_values, bound=bound, identity_clock=identity_clock) for s in samples]
    )
    exponent = int(round(math.log2(grid.size - 1))) if grid.size > 1 else 0
    return build_report(scenario_id, n_values, errors, exponent, seed)


def _check_num_paths(num_paths: int) -> None:
    if num_paths < 1:
        raise ConfigError("num_paths must be at least 1")


def approximation_experiment(
    s: Scenario,
    integrand: Union[str, IntegrandFactory],
    n_values: Sequence[int],
    num_paths: int,
    *,
    bound: Optional[float] = None,
    threads: int = 1,
    identity_clock: bool = False,
) -> ConvergenceReport:
    """Sup-error of the averaged approximant against the reference sum, per ``n``.

    Unbounded integrands are truncated at ``bound`` first.
    """
    n_values = _check_n_values(n_values)
    _check_num_paths(num_paths)
    _check_oracle_mesh(s.grid_exponent, max(n_values))
    grid = s.grid

    def one(i):
        return path_errors(
            sample_path(s, i), grid, integrand, n_values, bound=bound, identity_clock=identity_clock
        )

    errors = np.array(_fan_out(one, range(num_paths), threads))
    return build_report(s.scenario_id, n_values, errors, s.grid_exponent, s.seed)


def truncation_experiment(
    s: Scenario,
    integrand: Union[str, IntegrandFactory],
    levels: Sequence[float],
    fixed_n: int,
    num_paths: int,
    *,
    threads: int = 1,
) -> ConvergenceReport:
    """Sup-error of the approximant of the truncated integrand against the untruncated oracle."""
    levels = _check_n_values(levels, "levels")
    _check_num_paths(num_paths)
    _check_oracle_mesh(s.grid_exponent, fixed_n)
    grid = s.grid

    def one(i):
        return truncation_path_errors(sample_path(s, i), grid, integrand, levels, fixed_n, 1.0)

    errors = np.array(_fan_out(one, range(num_paths), threads))
    return build_report(s.scenario_id, levels, errors, s.grid_exponent, s.seed)


def aggregation_experiment(
    family: Sequence[Scenario],
    integrand: Union[str, IntegrandFactory],
    n: Union[int, Sequence[int]],
    num_paths: int,
    *,
    bound: Optional[float] = None,
    threads: int = 1,
) -> dict[str, ConvergenceReport]:
    """Run one pathwise routine on every law of a family.

    Nothing about the law reaches the computation except the path data
    (the integrator path and its clock path).
    """
    if not family:
        raise ConfigError("family must contain at least one scenario")
    if len({s.grid_exponent for s in family}) != 1:
        raise ConfigError("all scenarios of a family must share grid_exponent")
    ids = [s.scenario_id for s in family]
    if len(set(ids)) != len(ids):
        raise ConfigError("scenario ids must be distinct")
    n_values = (n,) if isinstance(n, int) else tuple(n)
    return {
        s.scenario_id: approximation_experiment(s, integrand, n_values, num_paths, bound=bound, threads=threads)
        for s in family
    }


def left_continuous_mode(
    s: Scenario,
    integrand: Union[str, IntegrandFactory],
    n_values: Sequence[int],
    num_paths: int,
    *,
    bound: Optional[float] = None,
    threads: int = 1,
) -> ConvergenceReport:
    """Approximation experiment with the clock forced to ``A_t = t``.

    Meant for left-continuous integrands.  Other integrands are not
    rejected; a lack of convergence shows up as ``report.converged`` False.
    """
    return approximation_experiment(
        s, integrand, n_values, num_paths, bound=bound, threads=threads, identity_clock=True
    )


def pathwise_purity_check(
    s: Scenario,
    integrand: Union[str, IntegrandFactory],
    n: int,
    indices: Iterable[int],
    *,
    bound: Optional[float] = None,
) -> list[int]:
    """Indices whose approximant differs after a CSV round trip of the path data.

    The recomputation sees only the serialized integrator and clock paths.
    """
    grid = s.grid
    make = _bounded(integrand_factory(integrand), bound)
    mismatches = []
    for i in indices:
        sample = sample_path(s, i)
        direct = approximate_integral(make(sample.x), sample.x, sample.clock, n, grid)
        x = CadlagPath.from_csv(sample.x.to_csv())
        clock = ClockProcess(CadlagPath.from_csv(sample.clock.base.to_csv()))
        again = approximate_integral(make(x), x, clock, n, grid)
        if not np.array_equal(direct.path.values, again.path.values):
            mismatches.append(i)
    return mismatches


@dataclass
class QVReport:
    scenario_id: str
    n: int
    qv_at_one: np.ndarray = field(repr=False)
    expected: Optional[float]
    grid_exponent: int
    seed: int

    @property
    def median(self) -> float:
        return float(np.median(self.qv_at_one))

    @property
    def quartiles(self) -> tuple[float, float]:
        q25, q75 = np.percentile(self.qv_at_one, [25, 75])
        return float(q25), float(q75)

    def median_abs_error(self) -> Optional[float]:
        if self.expected is None:
            return None
        return float(np.median(np.abs(self.qv_at_one - self.expected)))

    def to_csv(self) -> str:
        q25, q75 = self.quartiles
        err = self.median_abs_error()
        head = "scenario_id,n,median_qv,q25_qv,q75_qv,expected_qv,median_abs_error,num_paths,grid_exponent,seed\n"
        row = [
            self.scenario_id,
            str(self.n),
            fmt(self.median),
            fmt(q25),
            fmt(q75),
            "" if self.expected is None else fmt(self.expected),
            "" if err is None else fmt(err),
            str(self.qv_at_one.size),
            str(self.grid_exponent),
            str(self.seed),
        ]
        return head + ",".join(row) + "\n"


def qv_experiment(s: Scenario, n: int, num_paths: int, *, threads: int = 1) -> QVReport:
    """Distribution of the level-crossing quadratic variation at time 1."""
    _check_num_paths(num_paths)
    qv1 = _fan_out(lambda i: pathwise_qv(sample_path(s, i).x, n).value_at(1.0), range(num_paths), threads)
    expected = float(s.kind.f(1.0)) if isinstance(s.kind, TimeChangedBM) else None
    return QVReport(s.scenario_id, n, np.array(qv1), expected, s.grid_exponent, s.seed)


def quartiles_disjoint(a: QVReport, b: QVReport) -> bool:
    a25, a75 = a.quartiles
    b25, b75 = b.quartiles
    return a75 < b25 or b75 < a25
