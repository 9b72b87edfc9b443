"""Common test fixtures and configurations for hybrid kinematics tests"""

import logging

import numpy as np
import pytest

from changepoint.prior import SegmentLengthPrior
from kinematics.mlesac import FitSettings
from kinematics.observation import NoiseModel
from synth.scenarios import ScenarioSpec, generate


# Configure logging for tests
@pytest.fixture(autouse=True)
def configure_logging():
    """Configure logging for all tests"""
    logging.basicConfig(
        level=logging.DEBUG,
        format='%(asctime)s - %(levelname)s - %(name)s - %(message)s'
    )


@pytest.fixture
def rng():
    """Seeded generator so property tests are repeatable"""
    return np.random.default_rng(1234)


@pytest.fixture
def noise():
    """Default observation noise"""
    return NoiseModel()


@pytest.fixture
def tight_noise():
    """Near-noiseless scoring for exact-recovery tests"""
    return NoiseModel(sigma_trans=1e-4, sigma_rot=1e-4, gamma=0.0)


@pytest.fixture
def cheap_fit():
    """Fit settings for tests whose property does not depend on fit fidelity"""
    return FitSettings(iterations=15, refine_steps=0)


@pytest.fixture
def prior():
    """Segment prior with short minimum length for small series"""
    return SegmentLengthPrior(p=0.01, min_len=10, max_len=10000)


@pytest.fixture(scope='session')
def noiseless_drawer():
    """With-grasp drawer without noise or outliers"""
    return generate(ScenarioSpec(object='drawer', T=60, sigma_trans=0.0, sigma_rot=0.0, gamma=0.0, seed=3))


@pytest.fixture(scope='session')
def noiseless_microwave():
    """Latched-then-opening door without noise or outliers"""
    return generate(ScenarioSpec(object='microwave', T=60, sigma_trans=0.0, sigma_rot=0.0, gamma=0.0, seed=5))
