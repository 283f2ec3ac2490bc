import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from pathwise.bichteler import pathwise_qv
from pathwise.estimators import (
    AveragedIntegrator,
    LevelCrossingIntegrator,
    PathwiseQuadraticVariation,
    check_paths,
)
from pathwise.integrands import make_integrand
from pathwise.paths import ClockProcess
from pathwise.scenarios import Scenario, sample_path
from pathwise.stieltjes import approximate_integral


@pytest.fixture(scope="module")
def batch():
    s = Scenario.from_dict({"kind": "time_changed_bm", "f": "linear:1", "grid_exponent": 10, "seed": 9})
    paths = [sample_path(s, i).x for i in range(6)]
    return s, paths, np.vstack([p.value_at(s.grid) for p in paths])


def test_params_round_trip():
    est = AveragedIntegrator(n=16, integrand="x_left", bound=2.0)
    assert est.get_params()["n"] == 16
    est.set_params(n=32)
    other = clone(est)
    assert other.get_params() == est.get_params() and other is not est


def test_transform_matches_functional_api(batch):
    s, paths, X = batch
    out = AveragedIntegrator(n=16).fit_transform(X)
    assert out.shape == X.shape
    for row, x in zip(out, paths):
        y = approximate_integral(make_integrand("clip:3", x), x, ClockProcess.identity(s.grid), 16, s.grid)
        np.testing.assert_array_equal(row, y.path.value_at(s.grid))


def test_rows_are_independent(batch):
    _, _, X = batch
    est = AveragedIntegrator(n=8).fit(X)
    np.testing.assert_array_equal(est.transform(X[2:3]), est.transform(X)[2:3])


def test_score_improves_with_n(batch):
    _, _, X = batch
    coarse = AveragedIntegrator(n=2).fit(X).score(X)
    fine = AveragedIntegrator(n=64).fit(X).score(X)
    assert fine > coarse


def test_pathwise_qv_clock(batch):
    _, _, X = batch
    out = AveragedIntegrator(n=16, clock="pathwise_qv").fit_transform(X)
    assert np.all(np.isfinite(out))


def test_qv_transformer(batch):
    s, paths, X = batch
    out = PathwiseQuadraticVariation(n=6).fit_transform(X)
    np.testing.assert_array_equal(out[0], pathwise_qv(paths[0], 6).value_at(s.grid))


def test_level_crossing_in_pipeline(batch):
    _, _, X = batch
    pipe = make_pipeline(FunctionTransformer(lambda a: 2 * a), LevelCrossingIntegrator(n=30))
    out = pipe.fit_transform(X)
    # fine mesh: the level-crossing sum is the left-point sum of 2X against 2X
    v = 2 * X
    np.testing.assert_allclose(out[:, -1], np.sum(v[:, :-1] * np.diff(v, axis=1), axis=1), atol=1e-9)


def test_validation():
    with pytest.raises(NotFittedError):
        AveragedIntegrator().transform(np.zeros((1, 5)))
    with pytest.raises(ValueError):
        AveragedIntegrator(clock="sundial").fit(np.zeros((1, 5)))
    with pytest.raises(ValueError):
        AveragedIntegrator(integrand="x_left").fit_transform(np.zeros((1, 5)))
    est = AveragedIntegrator().fit(np.zeros((2, 5)))
    with pytest.raises(ValueError):
        est.transform(np.zeros((2, 6)))
    with pytest.raises(ValueError):
        check_paths(np.array([[0.0, np.nan]]))


def test_paths_are_shifted_to_start_at_zero():
    X, grid = check_paths(np.array([[2.0, 3.0, 1.0]]))
    np.testing.assert_array_equal(X, [[0.0, 1.0, -1.0]])
    np.testing.assert_array_equal(grid, [0.0, 0.5, 1.0])
