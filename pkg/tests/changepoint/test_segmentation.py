import numpy as np
import pytest

from changepoint.segmentation import DEFAULT_RIGID_EXTENT, Segment, Segmentation, to_configurational
from kinematics.articulation import ModelKind, RigidModel
from kinematics.error_types import ValidationError
from kinematics.geometry import Pose, PoseSeries


def _true_segmentation(trajectory):
    segments = tuple(Segment(s.t0, s.t1, s.kind, s.model, 0.0) for s in trajectory.segments)
    return Segmentation(trajectory.tau, segments, 0.0)


def test_microwave_boundaries_follow_latch_and_opening(noiseless_microwave):
    traj = noiseless_microwave
    config = to_configurational(_true_segmentation(traj), traj.y, traj.a)
    assert config.kinds == [ModelKind.RIGID, ModelKind.REVOLUTE]
    np.testing.assert_allclose(config.boundaries, traj.config_boundaries, atol=1e-9)


def test_drawer_extent_is_travel(noiseless_drawer):
    traj = noiseless_drawer
    config = to_configurational(_true_segmentation(traj), traj.y, traj.a)
    assert len(config) == 1
    assert config.segments[0].c_start == pytest.approx(0.0, abs=1e-12)
    assert config.boundaries[-1] == pytest.approx(traj.spec.drawer_travel, abs=1e-9)


def test_rigid_extent_falls_back():
    y = PoseSeries.identity(12)
    seg = Segmentation((0, 12), (Segment(0, 12, ModelKind.RIGID, RigidModel(Pose.identity()), 0.0),), 0.0)
    assert to_configurational(seg, y).boundaries[-1] == DEFAULT_RIGID_EXTENT
    assert to_configurational(seg, y, rigid_extent=0.2).boundaries[-1] == 0.2

    a = PoseSeries(np.tile([0.01, 0.0, 0.0], (11, 1)), np.tile([1.0, 0.0, 0.0, 0.0], (11, 1)))
    assert to_configurational(seg, y, a).boundaries[-1] == pytest.approx(0.11)


def test_validate_rejects_gaps_and_short_segments():
    rigid = RigidModel(Pose.identity())
    with pytest.raises(ValidationError):
        Segmentation((0, 10, 25), (Segment(0, 10, ModelKind.RIGID, rigid, 0.0),
                                   Segment(12, 25, ModelKind.RIGID, rigid, 0.0)), 0.0).validate()
    with pytest.raises(ValidationError):
        Segmentation((0, 4, 25), (Segment(0, 4, ModelKind.RIGID, rigid, 0.0),
                                  Segment(4, 25, ModelKind.RIGID, rigid, 0.0)), 0.0).validate(25, 10)
    with pytest.raises(ValidationError):
        Segmentation((0, 20), (Segment(0, 20, ModelKind.RIGID, rigid, 0.0),), 0.0).validate(T=25)
