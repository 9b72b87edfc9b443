import numpy as np
import pytest
from scipy.spatial.transform import Rotation

from kinematics.articulation import ModelKind, PrismaticModel, RevoluteModel, RigidModel
from kinematics.error_types import DegenerateSampleError, InsufficientSamplesError
from kinematics.geometry import Pose, PoseSeries
from kinematics.mlesac import FitSettings, bic_penalty, fit_mlesac, minimal_hypothesis, model_evidence


def _trajectory(model, c):
    translations, rotations = model.forward_arrays(np.asarray(c, dtype=float))
    return PoseSeries(translations, rotations.as_quat(scalar_first=True))


def _actions(model, c):
    increments = np.diff(c)
    linear = np.array([model.jacobian(ci).linear for ci in c[:-1]])
    return PoseSeries(linear * increments[:, None], np.tile([1.0, 0.0, 0.0, 0.0], (len(increments), 1)))


def test_prismatic_recovered_from_clean_data(drawer, tight_noise):
    c = np.linspace(0.0, 0.4, 20)
    y, a = _trajectory(drawer, c), _actions(drawer, c)
    result = fit_mlesac(ModelKind.PRISMATIC, y, a, tight_noise, rng_seed=1, settings=FitSettings(iterations=20))
    assert result.success
    assert abs(np.dot(result.model.axis, drawer.axis)) == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(result.model.origin.translation, y[0].translation, atol=1e-7)
    assert result.gamma == pytest.approx(0.0, abs=1e-4)


def test_revolute_recovered_from_clean_data(door, tight_noise):
    c = np.linspace(0.0, 1.2, 25)
    y, a = _trajectory(door, c), _actions(door, c)
    result = fit_mlesac(ModelKind.REVOLUTE, y, a, tight_noise, rng_seed=2, settings=FitSettings(iterations=20))
    assert result.success
    assert isinstance(result.model, RevoluteModel)
    assert result.model.radius == pytest.approx(door.radius, abs=1e-6)
    np.testing.assert_allclose(result.model.center.translation, door.center.translation, atol=1e-6)
    assert abs(np.dot(result.model.axis, door.axis)) == pytest.approx(1.0, abs=1e-9)


def test_rigid_fit_survives_outliers(noise):
    offset = Pose.from_rotation(Rotation.from_euler('z', 0.3), [0.5, 0.1, 0.0])
    rng = np.random.default_rng(0)
    translations = offset.translation + rng.normal(0, 0.002, size=(30, 3))
    translations[[4, 11, 19]] += [0.4, -0.3, 0.2]
    y = PoseSeries(translations, np.tile(offset.rotation, (30, 1)))
    result = fit_mlesac(ModelKind.RIGID, y, PoseSeries.identity(29), noise, rng_seed=3)
    assert isinstance(result.model, RigidModel)
    np.testing.assert_allclose(result.model.offset.translation, offset.translation, atol=0.003)
    assert result.gamma > 0.0


def test_equal_seeds_give_identical_fits(drawer, noise):
    c = np.linspace(0.0, 0.3, 15)
    y = _trajectory(drawer, c)
    y = PoseSeries(y.translations + np.random.default_rng(9).normal(0, 0.004, size=(15, 3)), y.rotations)
    a = _actions(drawer, c)
    first = fit_mlesac(ModelKind.PRISMATIC, y, a, noise, rng_seed=np.random.SeedSequence([7, 0, 15, 1]))
    second = fit_mlesac(ModelKind.PRISMATIC, y, a, noise, rng_seed=np.random.SeedSequence([7, 0, 15, 1]))
    assert first.loglik == second.loglik
    assert first.model.theta() == second.model.theta()


def test_too_few_observations_raise(noise):
    y = PoseSeries.identity(2)
    with pytest.raises(InsufficientSamplesError):
        fit_mlesac(ModelKind.REVOLUTE, y, PoseSeries.identity(1), noise)
    with pytest.raises(InsufficientSamplesError):
        fit_mlesac(ModelKind.RIGID, y[:1], PoseSeries.identity(0), noise)


def test_all_degenerate_samples_give_error_result(noise):
    y = PoseSeries.identity(10)
    result = fit_mlesac(ModelKind.PRISMATIC, y, PoseSeries.identity(9), noise, settings=FitSettings(iterations=5))
    assert not result.success
    assert result.error.type == 'DegenerateSampleError'
    with pytest.raises(DegenerateSampleError):
        result.raise_for_error()
    with pytest.raises(DegenerateSampleError):
        model_evidence(ModelKind.PRISMATIC, y, PoseSeries.identity(9), noise, settings=FitSettings(iterations=5))


def test_collinear_sample_has_no_revolute_hypothesis():
    sample = PoseSeries(np.array([[0.0, 0, 0], [1.0, 0, 0], [2.0, 0, 0]]), np.tile([1.0, 0, 0, 0], (3, 1)))
    assert minimal_hypothesis(ModelKind.REVOLUTE, sample) is None
    assert isinstance(minimal_hypothesis(ModelKind.PRISMATIC, sample[:2]), PrismaticModel)


def test_bic_penalty():
    assert bic_penalty(ModelKind.RIGID, 10) == pytest.approx(3.0 * np.log(10))
    assert bic_penalty(ModelKind.REVOLUTE, 100) == pytest.approx(4.5 * np.log(100))


def test_evidence_prefers_the_generating_model(door, noise):
    c = np.linspace(0.0, 1.4, 30)
    y = _trajectory(door, c)
    y = PoseSeries(y.translations + np.random.default_rng(4).normal(0, 0.003, size=(30, 3)), y.rotations)
    a = _actions(door, c)
    fit = FitSettings(iterations=40)
    scores = {kind: model_evidence(kind, y, a, noise, rng_seed=5, settings=fit) for kind in ModelKind}
    assert max(scores, key=scores.get) is ModelKind.REVOLUTE
