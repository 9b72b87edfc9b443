import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from kinematics.articulation import ModelKind, predict
from kinematics.geometry import distance
from kinematics.mlesac import FitSettings, fit_mlesac
from kinematics.observation import NoiseModel
from synth.scenarios import ScenarioSpec, generate


def test_same_spec_same_corpus():
    spec = ScenarioSpec(object='microwave', T=50, seed=21)
    first, second = generate(spec), generate(spec)
    np.testing.assert_array_equal(first.y.as_array(), second.y.as_array())
    np.testing.assert_array_equal(first.a.as_array(), second.a.as_array())


def test_different_seeds_differ():
    a = generate(ScenarioSpec(seed=1, T=50))
    b = generate(ScenarioSpec(seed=2, T=50))
    assert not np.array_equal(a.y.as_array(), b.y.as_array())


def test_noiseless_drawer_lies_on_a_line(noiseless_drawer):
    points = noiseless_drawer.y.translations
    centered = points - points.mean(axis=0)
    singular = np.linalg.svd(centered, compute_uv=False)
    assert singular[1] < 1e-9 * singular[0]
    assert noiseless_drawer.tau == (0, 60)
    assert [s.kind for s in noiseless_drawer.segments] == [ModelKind.PRISMATIC]


def test_microwave_labels(noiseless_microwave):
    traj = noiseless_microwave
    assert traj.tau == (0, 30, 60)
    assert [s.kind for s in traj.segments] == [ModelKind.RIGID, ModelKind.REVOLUTE]
    assert traj.config_boundaries[1] == traj.spec.latch_angle
    assert traj.config_boundaries[2] == pytest.approx(traj.spec.latch_angle + traj.spec.door_open)


@pytest.mark.parametrize('fixture', ['noiseless_drawer', 'noiseless_microwave'])
def test_actions_are_consistent_with_true_model(fixture, request):
    traj = request.getfixturevalue(fixture)
    for segment in traj.segments:
        for t in range(segment.t0, segment.t1 - 1):
            predicted = predict(segment.model, traj.y[t], traj.a[t])
            d = distance(predicted, traj.y[t + 1])
            assert d.translational < 1e-9 and d.angular < 1e-9


def test_refit_recovers_true_segments(noiseless_microwave):
    traj = noiseless_microwave
    tight = NoiseModel(sigma_trans=1e-4, sigma_rot=1e-4, gamma=0.0)
    door = traj.segments[1]
    y, a = traj.y[door.t0:door.t1], traj.a[door.t0:door.t1 - 1]
    result = fit_mlesac(ModelKind.REVOLUTE, y, a, tight, rng_seed=0, settings=FitSettings(iterations=20))
    assert result.model.radius == pytest.approx(door.model.radius, abs=1e-6)
    np.testing.assert_allclose(result.model.center.translation, door.model.center.translation, atol=1e-6)


def test_gaps_are_identity_actions(gap_drawer):
    traj = gap_drawer
    assert len(traj.gaps) == 2
    idle = np.zeros(len(traj.a), dtype=bool)
    for start, length in traj.gaps:
        assert length == 30
        idle[start:start + length] = True
    assert idle.sum() == 60
    actions = traj.a.as_array()
    np.testing.assert_array_equal(actions[idle], np.tile([0, 0, 0, 1, 0, 0, 0], (60, 1)))
    assert np.all(np.linalg.norm(actions[~idle, :3], axis=1) > 0)


def test_without_grasp_adds_off_axis_pushes(ungrasped_drawer):
    traj = ungrasped_drawer
    axis = traj.segments[0].model.axis
    moving = np.linalg.norm(traj.a.translations, axis=1) > 0
    along = np.abs(traj.a.translations[moving] @ axis)
    total = np.linalg.norm(traj.a.translations[moving], axis=1)
    off_axis = np.sqrt(np.maximum(total ** 2 - along ** 2, 0.0)) / total
    np.testing.assert_allclose(off_axis, 0.7, atol=1e-9)
    assert traj.spec.resolved_sigma_trans == pytest.approx(0.015)


def test_outliers_follow_gamma():
    traj = generate(ScenarioSpec(object='drawer', T=400, gamma=0.1, seed=8))
    assert 0.04 < traj.outliers.mean() < 0.18


def test_labels_schema(noiseless_microwave):
    labels = noiseless_microwave.to_labels()
    assert labels.tau == [0, 30, 60]
    assert [s.model.kind for s in labels.segments] == ['rigid', 'revolute']
    assert labels.spec['object'] == 'microwave'


@pytest.mark.parametrize('kwargs', [
    {'T': 39},
    {'regime': 'no-action-gaps', 'T': 60, 'gap_count': 2, 'gap_length': 30},
    {'off_axis_fraction': 1.5},
    {'colour': 'red'},
])
def test_invalid_specs_rejected(kwargs):
    with pytest.raises(PydanticValidationError):
        ScenarioSpec(**kwargs)


def test_fully_orthogonal_pushes_leave_the_drawer_still():
    traj = generate(ScenarioSpec(object='drawer', regime='without-grasp', off_axis_fraction=1.0,
                                 T=60, gamma=0.0, seed=9))
    axis = traj.segments[0].model.axis
    moving = np.linalg.norm(traj.a.translations, axis=1) > 0
    assert moving.sum() > 0
    np.testing.assert_allclose(traj.a.translations[moving] @ axis, 0.0, atol=1e-12)
    np.testing.assert_allclose(traj.y_true.translations, traj.y_true.translations[0], atol=1e-12)
    for t in range(len(traj.a)):
        assert predict(traj.segments[0].model, traj.y_true[t], traj.a[t]).isclose(traj.y_true[t + 1])
