"""Fixtures for synthetic corpus tests"""

import pytest

from synth.scenarios import ScenarioSpec, generate


@pytest.fixture(scope='session')
def gap_drawer():
    """Drawer strokes interrupted by two idle stretches"""
    return generate(ScenarioSpec(object='drawer', regime='no-action-gaps', T=150, seed=4))


@pytest.fixture(scope='session')
def ungrasped_drawer():
    """Drawer pushed without a grasp, so actions carry off-axis components"""
    return generate(ScenarioSpec(object='drawer', regime='without-grasp', T=80, gamma=0.0, seed=6))
