"""Rigid-body pose algebra over translation + unit quaternion.

Quaternions are stored scalar-first ``(w, x, y, z)`` and kept canonical
(``w >= 0``) after every constructor and operation. Rotation arithmetic is
delegated to :class:`scipy.spatial.transform.Rotation`.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np
from scipy.spatial.transform import Rotation

from .error_types import ValidationError

#: Absolute tolerance used for pure-algebra identities
ALGEBRA_ATOL = 1e-9

_IDENTITY_QUATERNION = np.array([1.0, 0.0, 0.0, 0.0])


def canonical_quaternion(q: np.ndarray) -> np.ndarray:
    """Normalize quaternion(s) along the last axis and flip them to ``w >= 0``.

    Args:
        q: array of shape (..., 4), scalar first

    Returns:
        New array of the same shape with unit norm and non-negative scalar part

    Raises:
        ValidationError: on a zero-norm or non-finite quaternion
    """
    q = np.array(q, dtype=float)
    if q.shape[-1] != 4:
        raise ValidationError("quaternion must have 4 components", {'shape': list(q.shape)})
    norm = np.linalg.norm(q, axis=-1, keepdims=True)
    if not np.all(np.isfinite(q)) or np.any(norm < 1e-12):
        raise ValidationError("quaternion must be finite with non-zero norm")
    # already-unit inputs pass through untouched so re-parsing is bit-stable
    q = np.where(np.abs(norm - 1.0) <= 1e-15, q, q / norm)
    return np.where(q[..., :1] < 0.0, -q, q)


def to_rotation(q: np.ndarray) -> Rotation:
    """Scalar-first quaternion(s) to a scipy Rotation."""
    return Rotation.from_quat(q, scalar_first=True)


def from_rotation(r: Rotation) -> np.ndarray:
    """scipy Rotation to canonical scalar-first quaternion(s)."""
    return canonical_quaternion(r.as_quat(scalar_first=True))


@dataclass(frozen=True, eq=False)
class Pose:
    """Rigid transform: translation in meters plus unit quaternion (w, x, y, z)."""
    translation: np.ndarray
    rotation: np.ndarray = _IDENTITY_QUATERNION

    def __post_init__(self):
        t = np.array(self.translation, dtype=float).reshape(3)
        if not np.all(np.isfinite(t)):
            raise ValidationError("pose translation must be finite")
        q = canonical_quaternion(np.asarray(self.rotation, dtype=float).reshape(4))
        t.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, 'translation', t)
        object.__setattr__(self, 'rotation', q)

    @classmethod
    def identity(cls) -> 'Pose':
        return cls(np.zeros(3), _IDENTITY_QUATERNION)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> 'Pose':
        """Build from ``[tx, ty, tz, qw, qx, qy, qz]``."""
        values = np.asarray(values, dtype=float).reshape(7)
        return cls(values[:3], values[3:])

    @classmethod
    def from_translation(cls, translation: Sequence[float]) -> 'Pose':
        return cls(translation, _IDENTITY_QUATERNION)

    @classmethod
    def from_rotation(cls, rotation: Rotation, translation: Sequence[float] = (0.0, 0.0, 0.0)) -> 'Pose':
        return cls(translation, from_rotation(rotation))

    @property
    def rot(self) -> Rotation:
        return to_rotation(self.rotation)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.translation, self.rotation])

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous matrix."""
        m = np.eye(4)
        m[:3, :3] = self.rot.as_matrix()
        m[:3, 3] = self.translation
        return m

    def isclose(self, other: 'Pose', atol: float = ALGEBRA_ATOL) -> bool:
        d = distance(self, other)
        return d.translational <= atol and d.angular <= atol

    def __repr__(self) -> str:
        t = ", ".join(f"{v:.6g}" for v in self.translation)
        q = ", ".join(f"{v:.6g}" for v in self.rotation)
        return f"Pose(t=({t}), q=({q}))"


@dataclass(frozen=True)
class PoseDistance:
    """Translational (meters) and geodesic angular (radians) separation."""
    translational: float
    angular: float


def compose(a: Pose, b: Pose) -> Pose:
    """a ⊕ b, the homogeneous product a·b."""
    return Pose(a.translation + a.rot.apply(b.translation), from_rotation(a.rot * b.rot))


def invert(p: Pose) -> Pose:
    inv = p.rot.inv()
    return Pose(-inv.apply(p.translation), from_rotation(inv))


def relative(a: Pose, b: Pose) -> Pose:
    """a ⊖ b, the transform taking a to b: invert(a) ⊕ b."""
    return compose(invert(a), b)


def distance(a: Pose, b: Pose) -> PoseDistance:
    """Euclidean translation gap and the angle of the relative rotation.

    The angle equals ``2·acos(|<q_a, q_b>|)`` but is taken from the relative
    rotation's magnitude, which stays accurate for tiny angles.
    """
    translational = float(np.linalg.norm(a.translation - b.translation))
    angular = float((a.rot.inv() * b.rot).magnitude())
    return PoseDistance(translational, min(angular, np.pi))


@dataclass(frozen=True, eq=False)
class PoseSeries:
    """Aligned sequence of poses backed by ``(n, 3)`` and ``(n, 4)`` arrays."""
    translations: np.ndarray
    rotations: np.ndarray

    def __post_init__(self):
        t = np.array(self.translations, dtype=float).reshape(-1, 3)
        q = np.array(self.rotations, dtype=float).reshape(-1, 4)
        if len(t) != len(q):
            raise ValidationError(
                "translation and rotation series differ in length",
                {'translations': len(t), 'rotations': len(q)}
            )
        if not np.all(np.isfinite(t)):
            raise ValidationError("pose series translations must be finite")
        if len(q):
            q = canonical_quaternion(q)
        t.flags.writeable = False
        q.flags.writeable = False
        object.__setattr__(self, 'translations', t)
        object.__setattr__(self, 'rotations', q)

    @classmethod
    def _trusted(cls, t: np.ndarray, q: np.ndarray) -> 'PoseSeries':
        """Wrap arrays already checked and canonicalized, e.g. slices of a series."""
        series = object.__new__(cls)
        if t.flags.writeable:
            t.flags.writeable = False
        if q.flags.writeable:
            q.flags.writeable = False
        object.__setattr__(series, 'translations', t)
        object.__setattr__(series, 'rotations', q)
        return series

    @classmethod
    def from_poses(cls, poses: Iterable[Pose]) -> 'PoseSeries':
        poses = list(poses)
        if not poses:
            return cls(np.zeros((0, 3)), np.zeros((0, 4)))
        return cls(np.stack([p.translation for p in poses]), np.stack([p.rotation for p in poses]))

    @classmethod
    def from_array(cls, values: np.ndarray) -> 'PoseSeries':
        """Build from an ``(n, 7)`` array of ``[tx, ty, tz, qw, qx, qy, qz]`` rows."""
        values = np.asarray(values, dtype=float).reshape(-1, 7)
        return cls(values[:, :3], values[:, 3:])

    @classmethod
    def identity(cls, n: int) -> 'PoseSeries':
        return cls(np.zeros((n, 3)), np.tile(_IDENTITY_QUATERNION, (n, 1)))

    @classmethod
    def concatenate(cls, series: Sequence['PoseSeries']) -> 'PoseSeries':
        return cls(
            np.concatenate([s.translations for s in series]),
            np.concatenate([s.rotations for s in series])
        )

    def __len__(self) -> int:
        return len(self.translations)

    def __getitem__(self, index: Union[int, slice, np.ndarray]) -> Union[Pose, 'PoseSeries']:
        if isinstance(index, (int, np.integer)):
            return Pose(self.translations[index], self.rotations[index])
        return PoseSeries._trusted(self.translations[index], self.rotations[index])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    @cached_property
    def rot(self) -> Rotation:
        return to_rotation(self.rotations)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.translations, self.rotations], axis=1)
