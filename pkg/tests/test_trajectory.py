import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from legopt.errors import InvalidDurationError, OutOfRangeError
from legopt.trajectory import (
    BoundaryConditions,
    Waypoints,
    constant_trajectory,
    default_waypoints,
    eval_quintic,
    plan_swing,
    solve_quintic,
)

PI = math.pi
finite = st.floats(-10, 10, allow_nan=False)


def linear_solve_coeffs(bc):
    """Reference: solve the 6x6 boundary system directly."""
    T = bc.duration
    A = np.array(
        [
            [1, 0, 0, 0, 0, 0],
            [0, 1, 0, 0, 0, 0],
            [0, 0, 2, 0, 0, 0],
            [1, T, T**2, T**3, T**4, T**5],
            [0, 1, 2 * T, 3 * T**2, 4 * T**3, 5 * T**4],
            [0, 0, 2, 6 * T, 12 * T**2, 20 * T**3],
        ],
        dtype=float,
    )
    b = [bc.theta_a, bc.omega_a, bc.alpha_a, bc.theta_b, bc.omega_b, bc.alpha_b]
    return np.linalg.solve(A, b)


class TestSolveQuintic:
    def test_rest_to_rest_is_minimum_jerk(self):
        seg = solve_quintic(BoundaryConditions(0, 0, 0, 1, 0, 0, 1.0))
        np.testing.assert_allclose(seg.coeffs, [0, 0, 0, 10, -15, 6], atol=1e-14)

    def test_zero_motion(self):
        seg = solve_quintic(BoundaryConditions(0.3, 0, 0, 0.3, 0, 0, 2.0))
        np.testing.assert_allclose(seg.coeffs, [0.3, 0, 0, 0, 0, 0], atol=1e-15)

    @pytest.mark.parametrize("T", [0.0, -1.0, math.inf, math.nan])
    def test_bad_duration(self, T):
        with pytest.raises(InvalidDurationError):
            solve_quintic(BoundaryConditions(0, 0, 0, 1, 0, 0, T))

    @settings(max_examples=200, deadline=None)
    @given(
        st.tuples(finite, finite, finite, finite, finite, finite),
        st.floats(0.2, 5.0),
    )
    def test_matches_linear_solve(self, vals, T):
        bc = BoundaryConditions(*vals, T)
        ref = linear_solve_coeffs(bc)
        np.testing.assert_allclose(solve_quintic(bc).coeffs, ref, rtol=1e-9, atol=1e-9)

    @settings(max_examples=200, deadline=None)
    @given(st.tuples(finite, finite, finite, finite, finite, finite), st.floats(0.2, 5.0))
    def test_hits_boundary_conditions(self, vals, T):
        bc = BoundaryConditions(*vals, T)
        seg = solve_quintic(bc)
        start = eval_quintic(seg, 0.0)
        end = eval_quintic(seg, T)
        np.testing.assert_allclose(start, vals[:3], atol=1e-12)
        np.testing.assert_allclose(end, vals[3:], rtol=1e-9, atol=1e-8)


class TestEvalQuintic:
    def test_derivatives_consistent(self):
        seg = solve_quintic(BoundaryConditions(-0.2, 0.5, 1.0, 0.7, -0.3, 0.4, 1.5))
        t = np.linspace(0.01, 1.49, 50)
        h = 1e-6
        th_p, om_p, _ = eval_quintic(seg, t + h)
        th_m, om_m, _ = eval_quintic(seg, t - h)
        _, om, al = eval_quintic(seg, t)
        np.testing.assert_allclose((th_p - th_m) / (2 * h), om, atol=1e-7)
        np.testing.assert_allclose((om_p - om_m) / (2 * h), al, atol=1e-6)

    @pytest.mark.parametrize("t", [-1e-9, 1.0 + 1e-9, math.nan])
    def test_out_of_range(self, t):
        seg = solve_quintic(BoundaryConditions(0, 0, 0, 1, 0, 0, 1.0))
        with pytest.raises(OutOfRangeError):
            eval_quintic(seg, t)

    def test_scalar_returns_floats(self):
        seg = solve_quintic(BoundaryConditions(0, 0, 0, 1, 0, 0, 1.0))
        th, om, al = eval_quintic(seg, 0.5)
        assert isinstance(th, float)
        assert th == pytest.approx(0.5)


class TestPlanSwing:
    def test_shape_and_grid(self, traj):
        assert len(traj) == 201
        assert traj.time[0] == 0.0 and traj.time[-1] == 2.0
        np.testing.assert_allclose(np.diff(traj.time), 0.01, atol=1e-15)
        assert traj.duration == 2.0

    def test_waypoints_hit(self, traj):
        wp = default_waypoints()
        for k, idx in enumerate([0, 100, 200]):
            np.testing.assert_allclose(traj.theta[idx], wp.theta[k], atol=1e-14)
            np.testing.assert_allclose(traj.omega[idx], wp.omega[k], atol=1e-13)
            np.testing.assert_allclose(traj.alpha[idx], wp.alpha[k], atol=1e-12)

    def test_continuous_through_join(self, traj):
        eps = 1e-9
        before = np.array(traj.state_at([1.0 - eps]))
        after = np.array(traj.state_at([1.0 + eps]))
        np.testing.assert_allclose(before, after, atol=1e-6)

    def test_state_at_matches_samples(self, traj):
        th, om, al = traj.state_at(traj.time)
        np.testing.assert_allclose(th, traj.theta, atol=1e-13)
        np.testing.assert_allclose(om, traj.omega, atol=1e-12)
        np.testing.assert_allclose(al, traj.alpha, atol=1e-11)

    def test_samples_iterate(self, traj):
        samples = list(traj.samples())
        assert len(samples) == 201
        np.testing.assert_array_equal(samples[7].theta, traj.theta[7])

    def test_knee_mid_pose(self, traj):
        assert traj.theta[100, 2] == pytest.approx(-3 * PI / 4, abs=1e-15)

    @pytest.mark.parametrize("n", [1, 10, 100, 250])
    def test_sample_count(self, n):
        assert len(plan_swing(samples_per_phase=n)) == 2 * n + 1

    def test_bad_total_time(self):
        with pytest.raises(InvalidDurationError):
            plan_swing(total_time=0.0)

    def test_waypoint_shape_checked(self):
        with pytest.raises(ValueError):
            Waypoints(np.zeros((2, 3)), np.zeros((3, 3)), np.zeros((3, 3)))

    def test_constant_trajectory(self):
        c = constant_trajectory([0.1, 0.2, 0.3])
        np.testing.assert_allclose(c.theta, np.tile([0.1, 0.2, 0.3], (201, 1)), atol=1e-15)
        assert np.all(c.omega == 0) and np.all(c.alpha == 0)
