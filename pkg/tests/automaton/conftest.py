"""Fixtures for hybrid automaton tests"""

import pytest
from scipy.spatial.transform import Rotation

from automaton.builder import build_automaton
from automaton.graph import CandidateEdge, build_graph
from changepoint.segmentation import ConfigSegment, ConfigurationalSegmentation
from kinematics.articulation import ModelKind, PrismaticModel, RevoluteModel, RigidModel
from kinematics.geometry import Pose, from_rotation

LATCH = 0.05
OPEN = 1.5


def microwave_config(latch: float = LATCH, opening: float = OPEN) -> ConfigurationalSegmentation:
    door = RevoluteModel(Pose.from_rotation(Rotation.from_euler('x', 0.2), [0.1, 0.2, 0.3]), 0.3,
                         from_rotation(Rotation.identity()))
    closed = Pose.from_translation([0.4, 0.2, 0.3])
    return ConfigurationalSegmentation((
        ConfigSegment(0.0, 0.0, ModelKind.RIGID, RigidModel(closed), latch, 0.0),
        ConfigSegment(0.0, opening, ModelKind.REVOLUTE, door, opening, opening),
    ))


def drawer_config(travel: float = 0.4) -> ConfigurationalSegmentation:
    drawer = PrismaticModel(Pose.identity(), [1.0, 0.0, 0.0])
    return ConfigurationalSegmentation((
        ConfigSegment(0.0, travel, ModelKind.PRISMATIC, drawer, travel, travel),
    ))


@pytest.fixture
def microwave_automaton():
    """Latched door: rigid up to the latch, then revolute"""
    graph = build_graph(['frame', 'door'], [CandidateEdge('frame', 'door', microwave_config(), -10.0)])
    return build_automaton(graph)


@pytest.fixture
def cabinet_automaton():
    """Three parts: a latched door and a drawer on one frame"""
    graph = build_graph(['frame', 'door', 'drawer'], [
        CandidateEdge('frame', 'door', microwave_config(), -10.0),
        CandidateEdge('frame', 'drawer', drawer_config(), -12.0),
        CandidateEdge('door', 'drawer', drawer_config(), -80.0),
    ])
    return build_automaton(graph)
