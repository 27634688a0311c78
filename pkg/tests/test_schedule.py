import numpy as np
import pytest

from weinorman.schedule import ControlSchedule, PiecewiseControl, time_grid


def test_piecewise_constant_left_continuous():
    u = PiecewiseControl((0.0, 1.0, 2.0), (3.0, -1.0))
    assert u(0.0) == 3.0
    assert u(0.5) == 3.0
    assert u(1.0) == 3.0  # the breakpoint belongs to the segment ending there
    assert u(1.0 + 1e-12) == -1.0
    assert u(2.0) == -1.0
    assert u(5.0) == -1.0


def test_piecewise_linear_and_scale():
    u = PiecewiseControl((0.0, 2.0), (0.0, 4.0), kind="linear", scale=0.5)
    assert u(1.0) == pytest.approx(1.0)
    assert u(2.0) == pytest.approx(2.0)


@pytest.mark.parametrize("bp,vals,kind", [
    ((0.0,), (), "constant"),
    ((0.0, 1.0), (1.0, 2.0), "constant"),
    ((0.0, 1.0), (1.0,), "linear"),
    ((1.0, 0.0), (1.0,), "constant"),
    ((0.0, 1.0), (np.nan,), "constant"),
    ((0.0, 1.0), (1.0,), "cubic"),
])
def test_piecewise_validation(bp, vals, kind):
    with pytest.raises(ValueError):
        PiecewiseControl(bp, vals, kind=kind)


def test_schedule_coefficients():
    s = ControlSchedule(np.array([0.0, 0.0, 1.0]), {2: lambda t: 2 * t}, 1.0)
    np.testing.assert_allclose(s.coefficients(0.5), [0.0, 1.0, 1.0])
    assert s.n == 3


def test_schedule_validation():
    with pytest.raises(ValueError):
        ControlSchedule(np.zeros(3), {4: lambda t: 0.0}, 1.0)
    with pytest.raises(ValueError):
        ControlSchedule(np.zeros(3), {}, -1.0)
    with pytest.raises(ValueError):
        ControlSchedule(np.array([np.inf, 0, 0]), {}, 1.0)
    with pytest.raises(ValueError):
        ControlSchedule(np.zeros(3), {1: PiecewiseControl((0.0, 0.5), (1.0,))}, 1.0)


def test_non_finite_control_value():
    s = ControlSchedule(np.zeros(3), {1: lambda t: np.nan}, 1.0)
    with pytest.raises(ValueError):
        s.coefficients(0.1)


def test_time_grid():
    g = time_grid(1.0, 1e-3)
    assert g.size == 1001 and g[-1] == 1.0
    g = time_grid(np.pi, 1e-3)
    assert g[-1] == np.pi and np.max(np.diff(g)) <= 1e-3
    assert time_grid(0.5, 1.0).size == 2
    with pytest.raises(ValueError):
        time_grid(1.0, 0.0)
