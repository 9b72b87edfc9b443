from .geometry import Pose, PoseDistance, PoseSeries, compose, distance, invert, relative
from .articulation import (
    MODEL_KINDS, ArticulationModel, ModelKind, PrismaticModel, RevoluteModel, RigidModel, Twist,
    forward_kinematics, inverse_jacobian_apply, inverse_kinematics, jacobian, model_from_theta, predict,
)
from .observation import NoiseModel, observation_loglik, sequence_loglik
from .mlesac import FitSettings, bic_penalty, fit_mlesac, model_evidence
from .response_types import FitResult

__all__ = [
    'Pose', 'PoseDistance', 'PoseSeries', 'compose', 'distance', 'invert', 'relative',
    'MODEL_KINDS', 'ArticulationModel', 'ModelKind', 'PrismaticModel', 'RevoluteModel', 'RigidModel',
    'Twist', 'forward_kinematics', 'inverse_jacobian_apply', 'inverse_kinematics', 'jacobian',
    'model_from_theta', 'predict',
    'NoiseModel', 'observation_loglik', 'sequence_loglik',
    'FitSettings', 'bic_penalty', 'fit_mlesac', 'model_evidence',
    'FitResult',
]
