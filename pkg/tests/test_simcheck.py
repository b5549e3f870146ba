import numpy as np
import pytest

from legopt.dynamics import DynamicsParams, torque_trace
from legopt.errors import InstabilityError, SingularInertiaError
from legopt.geometry import LegGeometry, SegmentDims
from legopt.simcheck import (
    forward_simulate,
    mass_matrix_spectrum,
    passive_drift,
    power_curves,
    round_trip,
    zero_torque,
)


class TestRoundTrip:
    def test_tracks_plan(self, params, traj):
        sim = round_trip(params, traj, dt=1e-3)
        assert sim.tracking_error < 1e-6
        assert sim.theta.shape == (2001, 3)

    def test_fourth_order(self, params, traj):
        coarse = round_trip(params, traj, dt=1e-2).tracking_error
        fine = round_trip(params, traj, dt=5e-3).tracking_error
        assert 10 < coarse / fine < 22

    def test_power_matches_plan(self, params, traj):
        sim = round_trip(params, traj, dt=1e-3)
        planned = power_curves(torque_trace(params, traj)).peak
        np.testing.assert_allclose(sim.peak_power, planned, rtol=1e-3)


class TestPassive:
    def test_energy_conserved(self, params, traj):
        assert passive_drift(params, traj.theta[0], dt=1e-3, duration=1.0) < 1e-6

    def test_free_fall_moves(self, params):
        sim = forward_simulate(params, zero_torque, [0.0, 0.3, -0.2], np.zeros(3), dt=1e-3, duration=0.2)
        assert np.max(np.abs(sim.theta[-1] - sim.theta[0])) > 1e-3


class TestFailures:
    def test_singular_inertia(self, geom):
        f = geom.femur
        bad = LegGeometry(geom.coxa, SegmentDims(0.0, f.w, f.h, f.t), geom.tibia)
        p = DynamicsParams.from_geometry(bad, inertia="none", allow_degenerate=True)
        with pytest.raises(SingularInertiaError, match="t=0"):
            forward_simulate(p, zero_torque, [0.0, 0.1, 0.2], np.zeros(3), dt=1e-3, duration=0.01)

    def test_zero_femur_alone_is_not_singular(self, geom):
        f = geom.femur
        bad = LegGeometry(geom.coxa, SegmentDims(0.0, f.w, f.h, f.t), geom.tibia)
        p = DynamicsParams.from_geometry(bad, allow_degenerate=True)
        assert np.all(mass_matrix_spectrum(p, [0.0, 0.1, 0.2]) > 0)

    def test_instability_detected(self, params):
        huge = lambda t: np.full((len(np.atleast_1d(t)), 3), 1e9)  # noqa: E731
        with pytest.raises(InstabilityError):
            forward_simulate(params, huge, np.zeros(3), np.zeros(3), dt=1e-3, duration=1.0)

    @pytest.mark.parametrize("dt,duration", [(0.0, 1.0), (-1e-3, 1.0), (1e-3, 0.0)])
    def test_bad_steps(self, params, dt, duration):
        with pytest.raises(ValueError):
            forward_simulate(params, zero_torque, np.zeros(3), np.zeros(3), dt=dt, duration=duration)


def test_power_curves(params, traj):
    tr = torque_trace(params, traj)
    pc = power_curves(tr)
    np.testing.assert_array_equal(pc.peak, np.max(np.abs(tr.torque * traj.omega), axis=0))
