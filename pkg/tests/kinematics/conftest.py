"""Fixtures for geometry and articulation model tests"""

import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from kinematics.articulation import PrismaticModel, RevoluteModel, RigidModel
from kinematics.geometry import Pose, from_rotation


def random_pose(rng: np.random.Generator) -> Pose:
    return Pose.from_rotation(Rotation.random(random_state=rng), rng.uniform(-1.0, 1.0, size=3))


@pytest.fixture
def random_models(rng):
    """One model of each kind with random parameters"""
    return [
        RigidModel(random_pose(rng)),
        PrismaticModel(random_pose(rng), rng.normal(size=3)),
        RevoluteModel(random_pose(rng), 0.3, from_rotation(Rotation.random(random_state=rng))),
    ]


@pytest.fixture
def door():
    """Revolute door of radius 0.3 m about a tilted axis"""
    center = Pose.from_rotation(Rotation.from_euler('xyz', [0.3, -0.2, 1.1]), [0.1, 0.4, -0.2])
    return RevoluteModel(center, 0.3, from_rotation(Rotation.from_euler('z', 0.4)))


@pytest.fixture
def drawer():
    """Prismatic drawer along a skewed axis"""
    return PrismaticModel(Pose.from_rotation(Rotation.from_euler('y', 0.5), [0.2, 0.0, 0.1]), [1.0, 2.0, -0.5])
