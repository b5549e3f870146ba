import numpy as np
import pytest

from legopt.dynamics import TorqueTrace, torque_trace
from legopt.errors import AlignmentError, EmptyInputError
from legopt.metrics import evaluate, joint_energy, peak_torque, reduction_percent
from legopt.trajectory import plan_swing


class _Traj:
    def __init__(self, time, omega):
        self.time = np.asarray(time, dtype=float)
        self.omega = np.asarray(omega, dtype=float)


def synthetic(time, torque, omega):
    time = np.asarray(time, dtype=float)
    torque = np.asarray(torque, dtype=float)
    omega = np.asarray(omega, dtype=float)
    return TorqueTrace(time, torque, torque * omega), _Traj(time, omega)


class TestPeakTorque:
    def test_max_abs(self):
        tr, _ = synthetic([0, 1, 2], [[1, -5, 0], [-3, 2, 0.5], [2, 1, -0.7]], np.zeros((3, 3)))
        np.testing.assert_array_equal(peak_torque(tr), [3, 5, 0.7])

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            peak_torque(TorqueTrace(np.zeros(0), np.zeros((0, 3)), np.zeros((0, 3))))


class TestJointEnergy:
    def test_constant_power(self):
        t = np.linspace(0, 2, 11)
        tr, tj = synthetic(t, np.tile([2.0, -3.0, 1.0], (11, 1)), np.tile([1.5, 1.0, -4.0], (11, 1)))
        np.testing.assert_allclose(joint_energy(tr, tj), [6.0, 6.0, 8.0], rtol=1e-14)
        np.testing.assert_allclose(joint_energy(tr, tj, "signed"), [6.0, -6.0, -8.0], rtol=1e-14)

    def test_first_sample_excluded(self):
        tr, tj = synthetic([0, 1], [[100.0, 0, 0], [1.0, 0, 0]], [[100.0, 0, 0], [1.0, 0, 0]])
        assert joint_energy(tr, tj)[0] == 1.0

    def test_closed_swing_signed_near_zero(self, params, traj):
        # Rest to rest at equal height: the net work on the hip and knee is tiny.
        e = joint_energy(torque_trace(params, traj), traj, "signed")
        ab = joint_energy(torque_trace(params, traj), traj, "absolute")
        assert np.all(np.abs(e) < 0.02 * ab)

    def test_absolute_dominates_signed(self, params, traj):
        tr = torque_trace(params, traj)
        assert np.all(joint_energy(tr, traj) >= np.abs(joint_energy(tr, traj, "signed")))

    def test_bad_mode(self, params, traj):
        with pytest.raises(ValueError):
            joint_energy(torque_trace(params, traj), traj, "rms")

    def test_misaligned(self, params, traj):
        with pytest.raises(AlignmentError):
            joint_energy(torque_trace(params, traj), plan_swing(samples_per_phase=50))


class TestEvaluate:
    def test_baseline_shape(self, geom, traj):
        m = evaluate(geom, traj)
        assert m.peak_torque.shape == (3,) and m.energy.shape == (3,)
        np.testing.assert_allclose(m.masses, [6.06, 20.09, 14.22], rtol=1e-12)
        assert set(m.to_dict()) == {"peak_torque", "energy", "reach", "stiffness", "masses"}

    def test_hip_carries_most_energy(self, geom, traj):
        m = evaluate(geom, traj)
        assert np.argmax(m.energy) == 1 and np.argmax(m.peak_torque) == 1

    @pytest.mark.parametrize("inertia", ["com", "joint", "none"])
    def test_all_inertia_models_finite(self, geom, traj, inertia):
        assert np.all(np.isfinite(evaluate(geom, traj, inertia=inertia).peak_torque))


def test_reduction_percent():
    np.testing.assert_allclose(reduction_percent([10, 20, 40], [8, 20, 50]), [20, 0, -25])
