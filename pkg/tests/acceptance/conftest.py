"""Fixtures for the acceptance-scale suite"""

import numpy as np
import pytest

from changepoint.detector import DetectorSettings
from kinematics.mlesac import FitSettings
from kinematics.observation import NoiseModel

RUNS = 20


@pytest.fixture(scope='session')
def acceptance_settings():
    """Detector settings for full-length corpora, lighter than the CLI defaults"""
    return DetectorSettings(particles=50, stride=10, seed=0, fit=FitSettings(iterations=40, refine_steps=5))


@pytest.fixture(scope='session')
def noise_for():
    """Noise model matching a scenario's resolved noise levels"""
    def _noise_for(spec):
        return NoiseModel(sigma_trans=spec.resolved_sigma_trans, sigma_rot=spec.resolved_sigma_rot, gamma=spec.gamma)
    return _noise_for


def axis_error(estimated, truth) -> float:
    """Angle between two axes, ignoring direction"""
    cosine = abs(float(np.dot(estimated, truth))) / (np.linalg.norm(estimated) * np.linalg.norm(truth))
    return float(np.arccos(min(1.0, cosine)))
