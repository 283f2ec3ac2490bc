"""Scikit-learn compatible transformers over batches of sampled paths.

Input ``X`` is an array of shape ``(n_paths, n_grid)`` holding path values on
the uniform grid ``linspace(0, 1, n_grid)``.  Every transformer maps it to an
array of the same shape holding the running integral (or quadratic variation)
on that grid.  The computation for one row uses that row only.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .bichteler import karandikar_path, pathwise_qv
from .integrands import make_integrand, parse_integrand
from .paths import CadlagPath, ClockProcess
from .scenarios import pathwise_clock, reference_path
from .stieltjes import approximate_integral, integrand_truncation


def check_paths(X, n_grid=None):
    """Validate a batch of grid paths and return ``(X, grid)``.

    Paths are shifted to start at 0, which does not change any integral.
    """
    X = check_array(X, dtype=np.float64, ensure_min_features=2)
    if n_grid is not None and X.shape[1] != n_grid:
        raise ValueError(f"X has {X.shape[1]} grid points, expected {n_grid}")
    grid = np.linspace(0.0, 1.0, X.shape[1])
    return X - X[:, :1], grid


class _PathTransformer(TransformerMixin, BaseEstimator):
    def fit(self, X, y=None):
        X, _ = check_paths(X)
        self.n_grid_ = X.shape[1]
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_grid_")
        X, grid = check_paths(X, self.n_grid_)
        return np.vstack([self._transform_row(row, grid) for row in X])

    def _transform_row(self, row, grid):
        raise NotImplementedError


class AveragedIntegrator(_PathTransformer):
    """Window-averaged pathwise approximant of ``int h dX``.

    Parameters
    ----------
    n : int
        Inverse window length of the averaging.
    integrand : str
        Integrand spec, see :mod:`pathwise.integrands`.
    bound : float, optional
        Truncation level applied when the integrand has no declared bound.
    clock : {"time", "pathwise_qv"}
        Averaging clock.  ``"pathwise_qv"`` derives it from each path through
        the level-crossing quadratic variation at level ``qv_level``.
    jump_threshold : float
        Jumps larger than this are integrated as a plain sum.
    """

    def __init__(
        self,
        n=64,
        integrand="clip:3",
        bound=None,
        clock="time",
        qv_level=8,
        jump_threshold=1.0,
    ):
        self.n = n
        self.integrand = integrand
        self.bound = bound
        self.clock = clock
        self.qv_level = qv_level
        self.jump_threshold = jump_threshold

    def fit(self, X, y=None):
        if self.clock not in ("time", "pathwise_qv"):
            raise ValueError(f"unknown clock {self.clock!r}")
        if int(self.n) < 1:
            raise ValueError("n must be a positive integer")
        self.integrand_spec_ = parse_integrand(self.integrand)
        return super().fit(X, y)

    def _integrand(self, x):
        h = make_integrand(self.integrand_spec_, x)
        if h.bound is None:
            if self.bound is None:
                raise ValueError("integrand is unbounded; set bound")
            h = integrand_truncation(h, self.bound)
        return h

    def _transform_row(self, row, grid):
        x = CadlagPath.from_grid(grid, row)
        if self.clock == "time":
            clock = ClockProcess.identity(grid)
        else:
            clock = pathwise_clock(x, self.qv_level)
        y = approximate_integral(
            self._integrand(x), x, clock, int(self.n), grid, jump_threshold=self.jump_threshold
        )
        return y.path.on_grid(grid)

    def reference(self, X):
        """Riemann-Stieltjes sums of the same integrand, for comparison."""
        check_is_fitted(self, "n_grid_")
        X, grid = check_paths(X, self.n_grid_)
        rows = []
        for row in X:
            x = CadlagPath.from_grid(grid, row)
            rows.append(reference_path(self._integrand(x), x).on_grid(grid))
        return np.vstack(rows)

    def score(self, X, y=None):
        """Negative median sup-distance to the reference sums."""
        err = np.max(np.abs(self.transform(X) - self.reference(X)), axis=1)
        return -float(np.median(err))


class LevelCrossingIntegrator(_PathTransformer):
    """Running ``int X_- dX`` sampled at the level crossings of ``X`` at mesh ``2**-n``."""

    def __init__(self, n=8):
        self.n = n

    def _transform_row(self, row, grid):
        x = CadlagPath.from_grid(grid, row)
        return karandikar_path(x, x, int(self.n)).on_grid(grid)


class PathwiseQuadraticVariation(_PathTransformer):
    """Quadratic variation of each path via level-crossing sums."""

    def __init__(self, n=8):
        self.n = n

    def _transform_row(self, row, grid):
        return pathwise_qv(CadlagPath.from_grid(grid, row), int(self.n)).on_grid(grid)
