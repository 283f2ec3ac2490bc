import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import step_paths
from pathwise.exceptions import DomainError
from pathwise.paths import (
    CadlagPath,
    ClockProcess,
    Mode,
    SampledIntegrand,
    jumps,
    left_limit_at,
    regularize_clock,
    total_variation,
    uniform_grid,
    value_at,
)


def jump_at_half():
    return CadlagPath([0.5], [3.0], 0.0)


class TestEvaluation:
    def test_value_at_is_right_continuous(self):
        p = jump_at_half()
        assert value_at(p, 0.5) == 3.0
        assert value_at(p, 0.4999) == 0.0

    def test_value_at_empty(self):
        assert value_at(CadlagPath.constant(7.0), 1.0) == 7.0

    def test_left_limit(self):
        p = jump_at_half()
        assert left_limit_at(p, 0.5) == 0.0
        assert left_limit_at(p, 0.7) == 3.0
        assert left_limit_at(CadlagPath([1.0], [2.0], 1.0), 1.0) == 1.0

    @pytest.mark.parametrize("t", [-0.1, 1.5, np.nan])
    def test_value_at_domain(self, t):
        with pytest.raises(DomainError):
            value_at(jump_at_half(), t)

    def test_left_limit_at_zero_is_undefined(self):
        with pytest.raises(DomainError):
            left_limit_at(jump_at_half(), 0.0)

    def test_vectorized(self):
        p = jump_at_half()
        np.testing.assert_array_equal(p.value_at([0.0, 0.5, 1.0]), [0.0, 3.0, 3.0])


class TestConstruction:
    def test_rejects_duplicate_times(self):
        with pytest.raises(ValueError):
            CadlagPath([0.5, 0.5], [1.0, 2.0])

    def test_rejects_time_zero_event(self):
        with pytest.raises(DomainError):
            CadlagPath([0.0, 0.5], [1.0, 2.0])

    def test_immutable(self):
        p = jump_at_half()
        with pytest.raises(ValueError):
            p.values[0] = 1.0


class TestJumpsAndVariation:
    def test_zero_jumps_omitted(self):
        p = CadlagPath([0.3, 0.6], [1.0, 1.0], 0.0)
        assert jumps(p) == [(0.3, 1.0)]

    def test_skeleton_lists_every_step(self):
        grid = uniform_grid(4)
        assert len(jumps(CadlagPath.from_grid(grid, grid))) == 16

    def test_empty(self):
        assert jumps(CadlagPath.constant(1.0)) == []
        assert total_variation(CadlagPath.constant(1.0), 1.0) == 0.0

    def test_total_variation(self):
        assert total_variation(CadlagPath([0.3, 0.6], [1.0, 0.0], 0.0), 1.0) == 2.0

    def test_monotone_variation(self):
        grid = uniform_grid(6)
        p = CadlagPath.from_grid(grid, grid**2)
        assert total_variation(p, 0.75) == pytest.approx(p.value_at(0.75) - p.initial_value)


class TestClock:
    def test_regularize_zero(self):
        grid = np.array([0.0, 0.5, 1.0])
        a = ClockProcess(CadlagPath.constant(0.0))
        np.testing.assert_array_equal(regularize_clock(a, grid).value_at(grid), [0.0, 0.5, 1.0])

    def test_regularize_identity(self):
        grid = uniform_grid(5)
        a = ClockProcess.identity(grid)
        np.testing.assert_array_equal(regularize_clock(a, grid).value_at(grid), 2 * grid)

    def test_regularize_jump(self):
        grid = np.array([0.0, 0.5, 1.0])
        a = ClockProcess(CadlagPath([0.5], [1.0], 0.0))
        assert regularize_clock(a, grid).value_at(0.5) == 1.5

    def test_rejects_decreasing(self):
        with pytest.raises(ValueError):
            ClockProcess(CadlagPath([0.5], [-1.0], 0.0))

    def test_atoms_include_initial_mass(self):
        t, m = ClockProcess(CadlagPath([0.5], [3.0], 1.0)).atoms()
        np.testing.assert_array_equal(t, [0.0, 0.5])
        np.testing.assert_array_equal(m, [1.0, 2.0])


class TestSampledIntegrand:
    def test_left_limit_mode(self):
        h = SampledIntegrand(jump_at_half(), mode=Mode.LEFT_LIMIT)
        np.testing.assert_array_equal(h([0.0, 0.5, 0.75]), [0.0, 0.0, 3.0])

    def test_left_limit_needs_path(self):
        with pytest.raises(TypeError):
            SampledIntegrand(lambda t: t, mode=Mode.LEFT_LIMIT)

    def test_bound_is_enforced(self):
        h = SampledIntegrand(lambda t: 2 * t, bound=1.0)
        with pytest.raises(ValueError):
            h([0.9])


class TestCsv:
    def test_round_trip_is_bit_exact(self, rng):
        p = CadlagPath(np.sort(rng.uniform(0.01, 1, 20)), rng.normal(size=20), 0.1 + 1e-17)
        text = p.to_csv()
        assert text.startswith("time,value\n0.0,")
        assert CadlagPath.from_csv(text) == p

    def test_rejects_missing_initial_row(self):
        with pytest.raises(ValueError):
            CadlagPath.from_csv("time,value\n0.5,1.0\n")


@settings(max_examples=200, deadline=None)
@given(step_paths(), st.integers(1, 1024))
def test_jump_equals_value_minus_left_limit(p, tick):
    t = tick / 1024
    reported = dict(p.jumps()).get(t, 0.0)
    assert p.value_at(t) - p.left_limit_at(t) == reported


@settings(max_examples=200, deadline=None)
@given(step_paths(), st.integers(0, 1024), st.integers(0, 1024))
def test_total_variation_additive_and_dominating(p, i, j):
    s, t = sorted((i / 1024, j / 1024))
    tv_s, tv_t = p.total_variation(s), p.total_variation(t)
    inner = np.sum(np.abs(np.diff(p.value_at(np.concatenate(([s], p.times[(p.times > s) & (p.times <= t)]))))))
    assert tv_t == pytest.approx(tv_s + inner, abs=1e-9)
    assert tv_t >= abs(p.value_at(t) - p.initial_value) - 1e-12


def _clock_from(p):
    return ClockProcess(CadlagPath(p.times, np.maximum.accumulate(np.abs(p.values)), 0.0))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 2**20), min_size=1, max_size=30))
def test_regularization_adds_identity_exactly_on_dyadic_clocks(ticks):
    grid = uniform_grid(8)
    values = np.cumsum(np.array(ticks, dtype=float) / 2**16)
    times = np.arange(1, len(ticks) + 1) / 32
    a = ClockProcess(CadlagPath(times, values, 0.0))
    reg = regularize_clock(a, grid)
    assert np.array_equal(reg.value_at(grid) - a.value_at(grid), grid)


@settings(max_examples=100, deadline=None)
@given(step_paths(initial=0.0))
def test_regularization_adds_identity_up_to_rounding(p):
    grid = uniform_grid(8)
    a = _clock_from(p)
    reg = regularize_clock(a, grid)
    gap = reg.value_at(grid) - a.value_at(grid) - grid
    assert np.max(np.abs(gap)) <= 4 * np.finfo(float).eps * (1 + np.max(np.abs(a.value_at(grid))))
    assert reg.is_regular(grid, atol=1e-12)
