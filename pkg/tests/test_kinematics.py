import math

import numpy as np
import pytest

from legopt.geometry import LegGeometry, SegmentDims
from legopt.kinematics import forward_kinematics, max_reach

S2 = math.sqrt(2) / 2


class TestForwardKinematics:
    def test_start_pose(self, geom):
        fp = forward_kinematics(geom, [-math.pi / 4] * 3)
        r = 0.14 + 0.46 * S2 + 0.46  # knee relative angle is zero
        assert float(fp.r) == pytest.approx(r, rel=1e-14)
        assert float(fp.z) == pytest.approx(-0.46 * S2, rel=1e-14)
        assert float(fp.x) == pytest.approx(r * S2, rel=1e-14)
        assert float(fp.y) == pytest.approx(-r * S2, rel=1e-14)

    def test_mid_pose(self, geom):
        fp = forward_kinematics(geom, [0.0, math.pi / 4, -3 * math.pi / 4])
        # theta3 - theta2 = -pi: tibia folds straight back under the femur
        assert float(fp.r) == pytest.approx(0.14 + 0.46 * S2 - 0.46, abs=1e-14)
        assert float(fp.z) == pytest.approx(0.46 * S2, abs=1e-14)
        assert float(fp.y) == pytest.approx(0.0, abs=1e-15)

    def test_stretched_out(self, geom):
        fp = forward_kinematics(geom, [0.3, 0.0, 0.0], base_height=0.5)
        assert float(fp.r) == pytest.approx(1.06)
        assert float(fp.z) == pytest.approx(0.5)

    def test_batch(self, geom, traj):
        fp = forward_kinematics(geom, traj.theta)
        assert fp.r.shape == (201,)
        np.testing.assert_allclose(np.hypot(fp.x, fp.y), np.abs(fp.r), atol=1e-14)


class TestReach:
    def test_initial_reach(self, geom, traj):
        r = forward_kinematics(geom, traj.theta).r
        assert max_reach(geom, traj) == pytest.approx(r.max())
        assert 0.9 < max_reach(geom, traj) < 1.06

    @pytest.mark.parametrize("scale", [0.8, 1.2])
    def test_reach_scales_with_lengths(self, geom, traj, scale):
        segs = [SegmentDims(s.l * scale, s.w, s.h, s.t) for s in geom.segments]
        scaled = LegGeometry(*segs)
        assert max_reach(scaled, traj) == pytest.approx(scale * max_reach(geom, traj), rel=1e-12)
