import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from kinematics.error_types import ValidationError
from kinematics.geometry import (
    Pose, PoseSeries, canonical_quaternion, compose, distance, from_rotation, invert, relative,
)
from .conftest import random_pose


def test_compose_with_inverse_is_identity(rng):
    for _ in range(50):
        p = random_pose(rng)
        assert compose(p, invert(p)).isclose(Pose.identity())
        assert compose(invert(p), p).isclose(Pose.identity())


def test_relative_takes_a_to_b(rng):
    for _ in range(50):
        a, b = random_pose(rng), random_pose(rng)
        assert compose(a, relative(a, b)).isclose(b)


def test_compose_matches_homogeneous_product(rng):
    a, b = random_pose(rng), random_pose(rng)
    np.testing.assert_allclose(compose(a, b).matrix(), a.matrix() @ b.matrix(), atol=1e-12)


def test_canonical_quaternion_has_non_negative_scalar():
    q = canonical_quaternion(np.array([-2.0, 0.0, 0.0, 0.0]))
    np.testing.assert_array_equal(q, [1.0, 0.0, 0.0, 0.0])
    q = canonical_quaternion(np.array([[-0.5, 0.5, 0.5, 0.5], [0.5, 0.5, 0.5, 0.5]]))
    assert np.all(q[:, 0] >= 0)


def test_canonical_quaternion_is_idempotent(rng):
    q = from_rotation(Rotation.random(20, random_state=rng))
    np.testing.assert_array_equal(canonical_quaternion(q), q)


def test_zero_quaternion_rejected():
    with pytest.raises(ValidationError):
        Pose(np.zeros(3), np.zeros(4))


def test_non_finite_translation_rejected():
    with pytest.raises(ValidationError):
        Pose([np.nan, 0.0, 0.0])


def test_distance_angle_matches_quaternion_formula(rng):
    for _ in range(50):
        a, b = random_pose(rng), random_pose(rng)
        expected = 2.0 * np.arccos(min(1.0, abs(float(np.dot(a.rotation, b.rotation)))))
        assert distance(a, b).angular == pytest.approx(expected, abs=1e-7)
        assert distance(a, b).translational == pytest.approx(np.linalg.norm(a.translation - b.translation))


def test_distance_is_accurate_for_tiny_angles():
    a = Pose.identity()
    b = Pose.from_rotation(Rotation.from_rotvec([1e-10, 0.0, 0.0]))
    assert distance(a, b).angular == pytest.approx(1e-10, rel=1e-6)


def test_pose_series_indexing_and_concatenation(rng):
    poses = [random_pose(rng) for _ in range(6)]
    series = PoseSeries.from_poses(poses)
    assert len(series) == 6
    assert series[2].isclose(poses[2])
    assert len(series[1:4]) == 3
    joined = PoseSeries.concatenate([series[:2], series[2:]])
    np.testing.assert_array_equal(joined.as_array(), series.as_array())


def test_pose_series_rejects_misaligned_arrays():
    with pytest.raises(ValidationError):
        PoseSeries(np.zeros((3, 3)), np.tile([1.0, 0.0, 0.0, 0.0], (2, 1)))


def test_pose_array_round_trip_is_exact(rng):
    p = random_pose(rng)
    again = Pose.from_array(p.as_array())
    np.testing.assert_array_equal(again.as_array(), p.as_array())


def test_compose_is_associative(rng):
    for _ in range(1000):
        a, b, c = random_pose(rng), random_pose(rng), random_pose(rng)
        assert compose(compose(a, b), c).isclose(compose(a, compose(b, c)), atol=1e-9)


def test_distance_is_a_metric(rng):
    for _ in range(1000):
        a, b, c = random_pose(rng), random_pose(rng), random_pose(rng)
        ab, ba, bc, ac = distance(a, b), distance(b, a), distance(b, c), distance(a, c)
        assert ab.translational == pytest.approx(ba.translational, abs=1e-9)
        assert ab.angular == pytest.approx(ba.angular, abs=1e-9)
        assert ac.translational <= ab.translational + bc.translational + 1e-9
        assert ac.angular <= ab.angular + bc.angular + 1e-9
