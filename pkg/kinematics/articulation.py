"""Rigid, prismatic and revolute articulation models.

Each model maps a scalar configuration ``c`` to a relative pose and back,
exposes its Jacobian, and converts an applied action into a configuration
increment. The batched ``*_arrays`` methods are the kernels the likelihood
and fitting code run on; the module-level functions are the single-pose API.

Revolute convention: ``forward(c) = center ⊕ Rz(c) ⊕ Tx(radius) ⊕ orientation_offset``
with configurations reported on the branch (-π, π].
"""
from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from typing import Any, ClassVar, Dict, Tuple

import numpy as np
from scipy.spatial.transform import Rotation

from .error_types import ValidationError
from .geometry import Pose, PoseSeries, canonical_quaternion, from_rotation, to_rotation

#: Below this radius a revolute configuration is read from orientation alone
RADIUS_EPS = 1e-9

_Z_AXIS = np.array([0.0, 0.0, 1.0])


class ModelKind(str, Enum):
    """Candidate articulation model tags."""
    RIGID = "rigid"
    PRISMATIC = "prismatic"
    REVOLUTE = "revolute"

    @property
    def k_q(self) -> int:
        """Free-parameter count used by the BIC penalty."""
        return _K_Q[self]

    @property
    def min_samples(self) -> int:
        """Poses in a minimal MLESAC sample."""
        return _MIN_SAMPLES[self]

    @property
    def order(self) -> int:
        """Rank used to break ties, simplest first."""
        return _ORDER[self]


_K_Q = {ModelKind.RIGID: 6, ModelKind.PRISMATIC: 8, ModelKind.REVOLUTE: 9}
_MIN_SAMPLES = {ModelKind.RIGID: 1, ModelKind.PRISMATIC: 2, ModelKind.REVOLUTE: 3}
_ORDER = {ModelKind.RIGID: 0, ModelKind.PRISMATIC: 1, ModelKind.REVOLUTE: 2}

MODEL_KINDS: Tuple[ModelKind, ...] = (ModelKind.RIGID, ModelKind.PRISMATIC, ModelKind.REVOLUTE)


@dataclass(frozen=True, eq=False)
class Twist:
    """Pose rate per unit configuration: linear (m) and angular (rad) parts."""
    linear: np.ndarray
    angular: np.ndarray


def wrap_angle(c: np.ndarray) -> np.ndarray:
    """Map angles onto (-π, π]."""
    c = np.mod(np.asarray(c, dtype=float) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(c <= -np.pi, c + 2.0 * np.pi, c)


def _tile_rotation(q: np.ndarray, n: int) -> Rotation:
    return to_rotation(np.tile(q, (n, 1)))


def _perturb_pose(pose: Pose, delta: np.ndarray) -> Pose:
    return Pose(
        pose.translation + delta[:3],
        from_rotation(Rotation.from_rotvec(delta[3:6]) * pose.rot)
    )


def _orthonormal_complement(axis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    helper = np.eye(3)[int(np.argmin(np.abs(axis)))]
    e1 = np.cross(axis, helper)
    e1 /= np.linalg.norm(e1)
    return e1, np.cross(axis, e1)


def _as_float_list(values: np.ndarray) -> list:
    return [float(v) for v in np.asarray(values).ravel()]


class ArticulationModel(ABC):
    """Base class for the three articulation models."""
    kind: ClassVar[ModelKind]

    @property
    def k_q(self) -> int:
        return self.kind.k_q

    @property
    @abstractmethod
    def n_local_params(self) -> int:
        """Dimension of the local perturbation used by refinement."""

    @abstractmethod
    def forward_arrays(self, c: np.ndarray) -> Tuple[np.ndarray, Rotation]:
        """Configurations ``(n,)`` to translations ``(n, 3)`` and rotations."""

    @abstractmethod
    def inverse_arrays(self, translations: np.ndarray, rotations: Rotation) -> np.ndarray:
        """Project poses onto the model manifold, returning configurations ``(n,)``."""

    @abstractmethod
    def delta_config_arrays(self, c: np.ndarray, action_translations: np.ndarray,
                            action_rotations: Rotation) -> np.ndarray:
        """Least-squares configuration increment produced by each action at ``c``."""

    @abstractmethod
    def jacobian(self, c: float) -> Twist:
        """Pose rate per unit configuration at ``c``."""

    @abstractmethod
    def perturbed(self, delta: np.ndarray) -> 'ArticulationModel':
        """Model displaced by a local perturbation vector."""

    @abstractmethod
    def theta(self) -> Dict[str, Any]:
        """JSON-ready parameter record."""

    def anchored(self, y: PoseSeries) -> 'ArticulationModel':
        """Re-gauge so ``y[0]`` sits at configuration 0 and motion is positive."""
        return self

    def predict_arrays(self, y_prev: PoseSeries, a_prev: PoseSeries) -> Tuple[np.ndarray, Rotation]:
        """Action-conditional predictions ``f(f⁻¹(y) + J⁻¹a)`` for a batch."""
        c = self.inverse_arrays(y_prev.translations, y_prev.rot)
        dc = self.delta_config_arrays(c, a_prev.translations, a_prev.rot)
        return self.forward_arrays(c + dc)


@dataclass(frozen=True, eq=False)
class RigidModel(ArticulationModel):
    """Fixed relative pose; configuration is identically 0."""
    offset: Pose
    kind: ClassVar[ModelKind] = ModelKind.RIGID

    @property
    def n_local_params(self) -> int:
        return 6

    def forward_arrays(self, c):
        n = np.atleast_1d(c).shape[0]
        return np.tile(self.offset.translation, (n, 1)), _tile_rotation(self.offset.rotation, n)

    def inverse_arrays(self, translations, rotations):
        return np.zeros(len(translations))

    def delta_config_arrays(self, c, action_translations, action_rotations):
        return np.zeros(len(action_translations))

    def jacobian(self, c):
        return Twist(np.zeros(3), np.zeros(3))

    def perturbed(self, delta):
        return RigidModel(_perturb_pose(self.offset, delta))

    def theta(self):
        return {'offset': _as_float_list(self.offset.as_array())}


@dataclass(frozen=True, eq=False)
class PrismaticModel(ArticulationModel):
    """Translation along a unit axis from an origin pose; orientation fixed."""
    origin: Pose
    axis: np.ndarray
    kind: ClassVar[ModelKind] = ModelKind.PRISMATIC

    def __post_init__(self):
        axis = np.array(self.axis, dtype=float).reshape(3)
        norm = np.linalg.norm(axis)
        if not np.isfinite(norm) or norm < 1e-12:
            raise ValidationError("prismatic axis must be a finite non-zero vector")
        if abs(norm - 1.0) > 1e-15:
            axis = axis / norm
        axis.flags.writeable = False
        object.__setattr__(self, 'axis', axis)

    @property
    def n_local_params(self) -> int:
        return 8

    def forward_arrays(self, c):
        c = np.atleast_1d(np.asarray(c, dtype=float))
        translations = self.origin.translation + c[:, None] * self.axis
        return translations, _tile_rotation(self.origin.rotation, len(c))

    def inverse_arrays(self, translations, rotations):
        return (np.asarray(translations) - self.origin.translation) @ self.axis

    def delta_config_arrays(self, c, action_translations, action_rotations):
        return np.asarray(action_translations) @ self.axis

    def jacobian(self, c):
        return Twist(self.axis.copy(), np.zeros(3))

    def perturbed(self, delta):
        e1, e2 = _orthonormal_complement(self.axis)
        tilt = Rotation.from_rotvec(delta[6] * e1 + delta[7] * e2)
        return PrismaticModel(_perturb_pose(self.origin, delta), tilt.apply(self.axis))

    def anchored(self, y):
        c = self.inverse_arrays(y.translations, y.rot)
        origin = Pose(self.origin.translation + c[0] * self.axis, self.origin.rotation)
        shifted = c - c[0]
        far = int(np.argmax(np.abs(shifted)))
        axis = -self.axis if shifted[far] < 0 else self.axis
        return PrismaticModel(origin, axis)

    def theta(self):
        return {
            'origin': _as_float_list(self.origin.as_array()),
            'axis': _as_float_list(self.axis),
        }


@dataclass(frozen=True, eq=False)
class RevoluteModel(ArticulationModel):
    """Rotation about the z-axis of ``center`` at a fixed radius."""
    center: Pose
    radius: float
    orientation_offset: np.ndarray
    kind: ClassVar[ModelKind] = ModelKind.REVOLUTE

    def __post_init__(self):
        radius = float(self.radius)
        if not np.isfinite(radius) or radius < 0:
            raise ValidationError("revolute radius must be finite and non-negative", {'radius': radius})
        q = canonical_quaternion(np.asarray(self.orientation_offset, dtype=float).reshape(4))
        q.flags.writeable = False
        object.__setattr__(self, 'radius', radius)
        object.__setattr__(self, 'orientation_offset', q)

    @property
    def n_local_params(self) -> int:
        return 10

    @property
    def axis(self) -> np.ndarray:
        """Rotation axis in the reference frame."""
        return self.center.rot.apply(_Z_AXIS)

    def forward_arrays(self, c):
        c = np.atleast_1d(np.asarray(c, dtype=float))
        local = np.stack([self.radius * np.cos(c), self.radius * np.sin(c), np.zeros_like(c)], axis=1)
        center_rot = self.center.rot
        translations = self.center.translation + center_rot.apply(local)
        rotations = center_rot * Rotation.from_rotvec(np.outer(c, _Z_AXIS)) * to_rotation(self.orientation_offset)
        return translations, rotations

    def inverse_arrays(self, translations, rotations):
        center_inv = self.center.rot.inv()
        if self.radius > RADIUS_EPS:
            p = center_inv.apply(np.asarray(translations) - self.center.translation)
            p = np.atleast_2d(p)
            return wrap_angle(np.arctan2(p[:, 1], p[:, 0]))
        about_z = center_inv * rotations * to_rotation(self.orientation_offset).inv()
        q = np.atleast_2d(about_z.as_quat(scalar_first=True))
        return wrap_angle(2.0 * np.arctan2(q[:, 3], q[:, 0]))

    def delta_config_arrays(self, c, action_translations, action_rotations):
        if self.radius > RADIUS_EPS:
            local = np.atleast_2d(self.center.rot.inv().apply(action_translations))
            return (-np.sin(c) * local[:, 0] + np.cos(c) * local[:, 1]) / self.radius
        return np.atleast_2d(action_rotations.as_rotvec()) @ self.axis

    def jacobian(self, c):
        center_rot = self.center.rot
        linear = center_rot.apply([-self.radius * np.sin(c), self.radius * np.cos(c), 0.0])
        return Twist(linear, center_rot.apply(_Z_AXIS))

    def perturbed(self, delta):
        orientation = Rotation.from_rotvec(delta[7:10]) * to_rotation(self.orientation_offset)
        return RevoluteModel(
            _perturb_pose(self.center, delta),
            abs(self.radius + delta[6]),
            from_rotation(orientation)
        )

    def anchored(self, y):
        c = self.inverse_arrays(y.translations, y.rot)
        center_rot = self.center.rot * Rotation.from_rotvec(c[0] * _Z_AXIS)
        orientation = to_rotation(self.orientation_offset)
        shifted = wrap_angle(c - c[0])
        far = int(np.argmax(np.abs(shifted)))
        if shifted[far] < 0:
            flip = Rotation.from_rotvec([np.pi, 0.0, 0.0])
            center_rot = center_rot * flip
            orientation = flip * orientation
        return RevoluteModel(
            Pose.from_rotation(center_rot, self.center.translation),
            self.radius,
            from_rotation(orientation)
        )

    def theta(self):
        return {
            'center': _as_float_list(self.center.as_array()),
            'radius': float(self.radius),
            'orientation_offset': _as_float_list(self.orientation_offset),
        }


_MODEL_CLASSES = {
    ModelKind.RIGID: RigidModel,
    ModelKind.PRISMATIC: PrismaticModel,
    ModelKind.REVOLUTE: RevoluteModel,
}


def model_from_theta(kind: ModelKind, theta: Dict[str, Any]) -> ArticulationModel:
    """Rebuild a model from its JSON parameter record.

    Raises:
        ValidationError: when fields are missing or malformed
    """
    kind = ModelKind(kind)
    try:
        if kind is ModelKind.RIGID:
            return RigidModel(Pose.from_array(theta['offset']))
        if kind is ModelKind.PRISMATIC:
            return PrismaticModel(Pose.from_array(theta['origin']), np.asarray(theta['axis'], dtype=float))
        return RevoluteModel(
            Pose.from_array(theta['center']),
            float(theta['radius']),
            np.asarray(theta['orientation_offset'], dtype=float)
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ValidationError(f"invalid {kind.value} parameters: {e}", {'theta': theta})


def forward_kinematics(m: ArticulationModel, c: float) -> Pose:
    translations, rotations = m.forward_arrays(np.array([c], dtype=float))
    return Pose(translations[0], from_rotation(rotations)[0])


def inverse_kinematics(m: ArticulationModel, delta: Pose) -> float:
    return float(m.inverse_arrays(delta.translation[None, :], to_rotation(delta.rotation[None, :]))[0])


def jacobian(m: ArticulationModel, c: float) -> Twist:
    return m.jacobian(float(c))


def inverse_jacobian_apply(m: ArticulationModel, delta: Pose, a: Pose) -> float:
    """Configuration increment for action ``a`` evaluated at the configuration of ``delta``."""
    c = inverse_kinematics(m, delta)
    return float(m.delta_config_arrays(
        np.array([c]), a.translation[None, :], to_rotation(a.rotation[None, :])
    )[0])


def predict(m: ArticulationModel, y_prev: Pose, a_prev: Pose) -> Pose:
    """Predicted pose ``f(f⁻¹(y_prev) + J⁻¹ a_prev)``."""
    translations, rotations = m.predict_arrays(
        PoseSeries(y_prev.translation[None, :], y_prev.rotation[None, :]),
        PoseSeries(a_prev.translation[None, :], a_prev.rotation[None, :])
    )
    return Pose(translations[0], from_rotation(rotations)[0])
