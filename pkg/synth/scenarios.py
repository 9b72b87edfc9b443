"""Labeled synthetic demonstrations of a microwave door and a drawer.

The object follows each action exactly as action-conditional prediction
says (next configuration = configuration + J⁻¹a); observations are the
true relative poses corrupted by Gaussian noise and uniform outliers.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.spatial.transform import Rotation

from logger import log_info, log_performance
from kinematics.articulation import ArticulationModel, ModelKind, PrismaticModel, RevoluteModel, RigidModel
from kinematics.geometry import Pose, PoseSeries, from_rotation
from models.conversions import model_to_schema
from models.pydantic_schemas import LabelsSchema, TrueSegmentSchema

DEFAULT_SIGMA_TRANS = 0.005
DEFAULT_SIGMA_ROT = 0.01
#: Noise multiplier when actions are pushes without a grasp
UNGRASPED_NOISE_FACTOR = 3.0
DEFAULT_OFF_AXIS_FRACTION = 0.7
GAPS_STROKE = 0.05
UNGRASPED_STROKE = 0.1


class ScenarioSpec(BaseModel):
    """One synthetic demonstration: object, regime, noise and geometry."""
    model_config = ConfigDict(extra='forbid')

    object: Literal['microwave', 'drawer'] = 'drawer'
    T: int = Field(150, ge=40, description="Observations")
    regime: Literal['with-grasp', 'no-action-gaps', 'without-grasp'] = 'with-grasp'
    sigma_trans: Optional[float] = Field(None, ge=0, description="Defaults by regime")
    sigma_rot: Optional[float] = Field(None, ge=0, description="Defaults by regime")
    gamma: float = Field(0.02, ge=0, le=1, description="Outlier probability")
    action_step: Optional[float] = Field(None, gt=0, description="Drawer stroke per step (meters)")
    gap_count: int = Field(2, ge=0)
    gap_length: int = Field(30, ge=1)
    off_axis_fraction: Optional[float] = Field(None, ge=0, le=1)
    drawer_travel: float = Field(0.4, gt=0)
    door_radius: float = Field(0.3, gt=0)
    latch_angle: float = Field(0.05, gt=0)
    door_open: float = Field(1.5, gt=0, lt=np.pi)
    seed: int = Field(0, ge=0)

    @model_validator(mode='after')
    def check_gaps(self):
        if self.regime == 'no-action-gaps':
            total = self.gap_count * self.gap_length
            if total >= self.T:
                raise ValueError(f"gap lengths sum to {total}, not below T = {self.T}")
            if self.moving_window - total < self.gap_count + 1:
                raise ValueError("gaps leave too few moving steps between them")
        return self

    @property
    def split(self) -> int:
        """First observation of the opening segment (microwave)."""
        return self.T // 2

    @property
    def moving_window(self) -> int:
        """Actions in which the object may move."""
        return self.T - 1 - (self.split if self.object == 'microwave' else 0)

    @property
    def noise_factor(self) -> float:
        return UNGRASPED_NOISE_FACTOR if self.regime == 'without-grasp' else 1.0

    @property
    def resolved_sigma_trans(self) -> float:
        return self.sigma_trans if self.sigma_trans is not None else DEFAULT_SIGMA_TRANS * self.noise_factor

    @property
    def resolved_sigma_rot(self) -> float:
        return self.sigma_rot if self.sigma_rot is not None else DEFAULT_SIGMA_ROT * self.noise_factor

    @property
    def resolved_off_axis(self) -> float:
        if self.regime != 'without-grasp':
            return 0.0
        return DEFAULT_OFF_AXIS_FRACTION if self.off_axis_fraction is None else self.off_axis_fraction

    @property
    def resolved_step(self) -> Optional[float]:
        if self.action_step is not None:
            return self.action_step
        return {'no-action-gaps': GAPS_STROKE, 'without-grasp': UNGRASPED_STROKE}.get(self.regime)


@dataclass(frozen=True)
class TrueSegment:
    t0: int
    t1: int
    kind: ModelKind
    model: ArticulationModel


@dataclass(frozen=True)
class LabeledTrajectory:
    spec: ScenarioSpec
    y: PoseSeries
    a: PoseSeries
    y_true: PoseSeries
    configurations: np.ndarray
    tau: Tuple[int, ...]
    segments: Tuple[TrueSegment, ...]
    config_boundaries: Tuple[float, ...]
    gaps: Tuple[Tuple[int, int], ...]
    outliers: np.ndarray

    @property
    def changepoints(self) -> Tuple[int, ...]:
        return self.tau[1:-1]

    def to_labels(self) -> LabelsSchema:
        return LabelsSchema(
            spec=self.spec.model_dump(),
            tau=list(self.tau),
            segments=[TrueSegmentSchema(t0=s.t0, t1=s.t1, model=model_to_schema(s.model)) for s in self.segments],
            config_boundaries=list(self.config_boundaries),
            gaps=[[start, length] for start, length in self.gaps],
        )


def _gap_mask(rng: np.random.Generator, lo: int, hi: int, count: int, length: int) -> Tuple[np.ndarray, List]:
    """Boolean mask over actions [lo, hi) marking ``count`` gaps of ``length``."""
    mask = np.zeros(hi, dtype=bool)
    if count == 0:
        return mask, []
    free = (hi - lo) - count * length
    cuts = np.sort(rng.choice(np.arange(1, free), size=count, replace=False))
    gaps = []
    for i, cut in enumerate(cuts):
        start = lo + int(cut) + i * length
        mask[start:start + length] = True
        gaps.append((start, length))
    return mask, gaps


def _triangle_increments(n_steps: int, step: float, travel: float) -> np.ndarray:
    """Per-step increments of a triangle wave between 0 and ``travel``."""
    half = max(1, int(round(travel / step)))
    k = np.arange(n_steps + 1) % (2 * half)
    position = step * np.where(k <= half, k, 2 * half - k)
    return np.diff(position)


def _perpendicular(rng: np.random.Generator, direction: np.ndarray) -> np.ndarray:
    unit = direction / np.linalg.norm(direction)
    v = rng.normal(size=3)
    v -= np.dot(v, unit) * unit
    return v / np.linalg.norm(v)


def _actions(rng: np.random.Generator, model: ArticulationModel, c: np.ndarray,
             increments: np.ndarray, off_axis: float) -> np.ndarray:
    """Translational actions whose least-squares configuration increments are ``increments``.

    A fraction ``off_axis`` of each push's magnitude is orthogonal to the motion.
    At 1 the push is purely orthogonal, sized like the on-axis push it replaces,
    and moves nothing.
    """
    out = np.zeros((len(increments), 3))
    for t, dc in enumerate(increments):
        if dc == 0.0:
            continue
        linear = model.jacobian(c[t]).linear
        magnitude = abs(dc) * float(np.linalg.norm(linear))
        if off_axis >= 1.0:
            out[t] = magnitude * _perpendicular(rng, linear)
            continue
        out[t] = linear * dc
        if off_axis > 0:
            ratio = off_axis / np.sqrt(1.0 - off_axis ** 2)
            out[t] += magnitude * ratio * _perpendicular(rng, linear)
    return out


def _observe(rng: np.random.Generator, y_true: PoseSeries, spec: ScenarioSpec) -> Tuple[PoseSeries, np.ndarray]:
    n = len(y_true)
    translations = y_true.translations + rng.normal(0.0, spec.resolved_sigma_trans, size=(n, 3))
    rotations = y_true.rot * Rotation.from_rotvec(rng.normal(0.0, spec.resolved_sigma_rot, size=(n, 3)))
    outliers = rng.uniform(size=n) < spec.gamma
    if np.any(outliers):
        k = int(outliers.sum())
        translations[outliers] = y_true.translations[outliers] + rng.uniform(-0.5, 0.5, size=(k, 3))
        quats = rotations.as_quat(scalar_first=True)
        quats[outliers] = Rotation.random(k, random_state=rng).as_quat(scalar_first=True)
        rotations = Rotation.from_quat(quats, scalar_first=True)
    return PoseSeries(translations, from_rotation(rotations)), outliers


def generate(spec: ScenarioSpec) -> LabeledTrajectory:
    """Forward-simulate the scenario's true model under its actions and observe it.

    Deterministic per ``spec.seed``.
    """
    start = time.time()
    rng = np.random.default_rng(spec.seed)
    T = spec.T
    base = Pose.from_rotation(Rotation.random(random_state=rng), rng.uniform(-0.5, 0.5, size=3))
    lo = spec.split if spec.object == 'microwave' else 0
    if spec.regime == 'no-action-gaps':
        gap_mask, gaps = _gap_mask(rng, lo, T - 1, spec.gap_count, spec.gap_length)
    else:
        gap_mask, gaps = np.zeros(T - 1, dtype=bool), []
    moving = np.flatnonzero(~gap_mask[lo:]) + lo
    # orthogonal-only pushes leave the object where it started
    responds = 0.0 if spec.resolved_off_axis >= 1.0 else 1.0

    increments = np.zeros(T - 1)
    if spec.object == 'drawer':
        model = PrismaticModel(base, base.rot.apply([1.0, 0.0, 0.0]))
        step = spec.resolved_step
        if step is None:
            increments[moving] = spec.drawer_travel / len(moving)
        else:
            increments[moving] = _triangle_increments(len(moving), step, spec.drawer_travel)
        c = np.concatenate([[0.0], np.cumsum(responds * increments)])
        actions = _actions(rng, model, c, increments, spec.resolved_off_axis)
        y_true = PoseSeries(*_forward(model, c))
        segments = (TrueSegment(0, T, ModelKind.PRISMATIC, model),)
        tau = (0, T)
        boundaries = (0.0, float(np.max(c)))
    else:
        door = RevoluteModel(base, spec.door_radius, from_rotation(Rotation.random(random_state=rng)))
        increments[moving] = spec.door_open / len(moving)
        c = np.concatenate([[0.0], np.cumsum(responds * increments)])
        # latched: the door holds still while the pushes add up to the latch angle
        push = np.zeros(T - 1)
        push[:spec.split - 1] = spec.latch_angle / (spec.split - 1)
        actions = _actions(rng, door, c, increments + push, spec.resolved_off_axis)
        y_true = PoseSeries(*_forward(door, c))
        closed = Pose(y_true.translations[0], y_true.rotations[0])
        segments = (
            TrueSegment(0, spec.split, ModelKind.RIGID, RigidModel(closed)),
            TrueSegment(spec.split, T, ModelKind.REVOLUTE, door),
        )
        tau = (0, spec.split, T)
        boundaries = (0.0, spec.latch_angle, spec.latch_angle + float(np.max(c)))

    a = PoseSeries(actions, np.tile([1.0, 0.0, 0.0, 0.0], (T - 1, 1)))
    y, outliers = _observe(rng, y_true, spec)
    trajectory = LabeledTrajectory(spec, y, a, y_true, c, tau, segments, boundaries, tuple(gaps), outliers)
    log_performance("generate", (time.time() - start) * 1000, {'T': T, 'object': spec.object})
    log_info("Generated scenario", extra={
        'object': spec.object, 'regime': spec.regime, 'tau': list(tau), 'seed': spec.seed,
        'outliers': int(outliers.sum())
    })
    return trajectory


def _forward(model: ArticulationModel, c: np.ndarray):
    translations, rotations = model.forward_arrays(c)
    return translations, from_rotation(rotations)
