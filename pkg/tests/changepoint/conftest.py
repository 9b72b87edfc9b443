"""Fixtures for changepoint tests"""

import pytest

from changepoint.detector import DetectorSettings
from kinematics.mlesac import FitSettings
from synth.scenarios import ScenarioSpec, generate


@pytest.fixture(scope='session')
def small_microwave():
    """Short low-noise latched door, small enough for the exhaustive search"""
    return generate(ScenarioSpec(object='microwave', T=40, gamma=0.0, sigma_trans=0.002, sigma_rot=0.005, seed=11))


@pytest.fixture(scope='session')
def small_drawer():
    """Short low-noise drawer stroke"""
    return generate(ScenarioSpec(object='drawer', T=40, gamma=0.0, sigma_trans=0.002, sigma_rot=0.005, seed=12))


@pytest.fixture
def fast_settings():
    """Cheap detector settings: few hypotheses and sparse refits"""
    return DetectorSettings(particles=100, stride=5, seed=0, fit=FitSettings(iterations=15, refine_steps=0))
