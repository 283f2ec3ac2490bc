import numpy as np
import pytest

from conftest import brownian_skeleton
from pathwise.bichteler import karandikar_integral, level_crossing_times, pathwise_qv
from pathwise.paths import CadlagPath, uniform_grid
from pathwise.scenarios import Scenario, sample_path


def line(exponent=14):
    grid = uniform_grid(exponent)
    return CadlagPath.from_grid(grid, grid)


def left_point_sum(x: CadlagPath) -> float:
    v = np.concatenate(([x.initial_value], x.values))
    return float(np.sum(v[:-1] * np.diff(v)))


class TestLevelCrossing:
    def test_constant_path(self):
        np.testing.assert_array_equal(level_crossing_times(CadlagPath.constant(2.0), 3).times, [0.0])

    def test_monotone_line(self):
        np.testing.assert_array_equal(level_crossing_times(line(), 2).times, [0, 0.25, 0.5, 0.75, 1.0])

    def test_single_jump(self):
        g = CadlagPath([0.5], [0.3], 0.0)
        np.testing.assert_array_equal(level_crossing_times(g, 2).times, [0.0, 0.5])

    def test_consecutive_samples_differ_by_mesh(self, rng):
        _, x = brownian_skeleton(rng, 12)
        sched = level_crossing_times(x, 5)
        assert np.all(np.abs(np.diff(x.value_at(sched.times))) >= 2**-5)


class TestKarandikarIntegral:
    @pytest.mark.parametrize("n", [0, 3, 9])
    def test_constant_integrand(self, rng, n):
        _, x = brownian_skeleton(rng, 10)
        g = CadlagPath.constant(1.5)
        for t in (0.3, 1.0):
            assert karandikar_integral(g, x, n, t) == pytest.approx(1.5 * x.value_at(t), abs=1e-12)

    def test_line_against_closed_form(self):
        # closed form: int_0^1 s ds = 1/2
        x = line()
        assert abs(karandikar_integral(x, x, 10, 1.0) - 0.5) <= 2**-9

    @pytest.mark.parametrize("n", [2, 4, 7])
    def test_monotone_error_bounded_by_mesh_times_variation(self, n):
        grid = uniform_grid(12)
        x = CadlagPath.from_grid(grid, grid**2)
        closed = grid**2 * grid**2 / 2  # int_0^t s^2 d(s^2) = t^4 / 2
        out = karandikar_integral(x, x, n, grid)
        assert np.max(np.abs(out - closed)) <= 2.0**-n * x.total_variation(1.0)

    def test_brownian_against_left_point_sum(self):
        s = Scenario.from_dict({"kind": "time_changed_bm", "f": "linear:1", "grid_exponent": 14, "seed": 3})
        gaps = []
        for i in range(200):
            x = sample_path(s, i).x
            gaps.append(abs(karandikar_integral(x, x, 6, 1.0) - left_point_sum(x)))
        assert np.median(gaps) < 0.02


class TestPathwiseQv:
    def test_line_has_no_quadratic_variation(self):
        assert abs(pathwise_qv(line(), 10).value_at(1.0)) <= 2**-8

    @pytest.mark.parametrize("f, expected, tol", [("linear:1", 1.0, 0.1), ("linear:2", 2.0, 0.15)])
    def test_time_changed_brownian(self, f, expected, tol):
        s = Scenario.from_dict({"kind": "time_changed_bm", "f": f, "grid_exponent": 14, "seed": 11})
        qv = [pathwise_qv(sample_path(s, i).x, 8).value_at(1.0) for i in range(500)]
        assert abs(np.median(qv) - expected) <= tol

    def test_nearly_nondecreasing(self):
        s = Scenario.from_dict({"kind": "time_changed_bm", "f": "linear:1", "grid_exponent": 14, "seed": 5})
        for i in range(20):
            qv = pathwise_qv(sample_path(s, i).x, 10)
            assert np.min(np.diff(qv.values)) >= -0.02

    def test_materialized_on_event_times(self, rng):
        _, x = brownian_skeleton(rng, 8)
        qv = pathwise_qv(x, 6)
        np.testing.assert_array_equal(qv.times, x.times)
        assert qv.initial_value == 0.0
