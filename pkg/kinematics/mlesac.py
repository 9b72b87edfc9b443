"""MLESAC fitting of articulation models and BIC-penalized segment evidence.

Hypotheses come from minimal samples and are scored by the full
action-conditional likelihood. The best one is re-fit on its weighted
consensus set in closed form, then polished with a Levenberg–Marquardt pass
over local perturbation coordinates. Every stage is kept only if it raises
the likelihood.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np
from scipy.optimize import least_squares
from scipy.spatial.transform import Rotation

from logger import log_error
from .articulation import (
    ArticulationModel, ModelKind, PrismaticModel, RevoluteModel, RigidModel,
)
from .error_types import InsufficientSamplesError, ValidationError
from .geometry import Pose, PoseSeries, from_rotation
from .observation import (
    NoiseModel, fit_gamma, gaussian_terms, mixture_terms, penalized_total, responsibilities,
    segment_gaussian_terms,
)
from .response_types import FitResult

#: Circles larger than this are treated as degenerate (near-collinear samples)
MAX_REVOLUTE_RADIUS = 1e3

SeedLike = Union[int, np.random.SeedSequence, None]


@dataclass
class FitSettings:
    """MLESAC and refinement settings"""
    #: Minimal-sample hypotheses drawn per fit
    iterations: int = 100
    #: Levenberg–Marquardt iterations on the best hypothesis (0 disables)
    refine_steps: int = 10
    #: Step tolerance of the refinement
    refine_tol: float = 1e-10
    #: Closed-form re-fit on the responsibility-weighted consensus set
    consensus_refit: bool = True
    #: Fit γ per segment instead of using the noise model's value
    fit_gamma: bool = True

    def validate(self):
        """Validate the fit settings"""
        if self.iterations < 1:
            log_error("Invalid MLESAC iteration count", extra={'iterations': self.iterations})
            raise ValidationError("iterations must be at least 1", {'iterations': self.iterations})
        if self.refine_steps < 0:
            log_error("Invalid refinement step count", extra={'refine_steps': self.refine_steps})
            raise ValidationError("refine_steps must be non-negative", {'refine_steps': self.refine_steps})
        if not self.refine_tol > 0:
            log_error("Invalid refinement tolerance", extra={'refine_tol': self.refine_tol})
            raise ValidationError("refine_tol must be positive", {'refine_tol': self.refine_tol})
        return self


def minimal_hypothesis(kind: ModelKind, sample: PoseSeries) -> Optional[ArticulationModel]:
    """Model through a minimal sample, or None when the sample is degenerate."""
    if kind is ModelKind.RIGID:
        return RigidModel(sample[0])

    if kind is ModelKind.PRISMATIC:
        direction = sample.translations[1] - sample.translations[0]
        if np.linalg.norm(direction) < 1e-9:
            return None
        return PrismaticModel(sample[0], direction)

    p1, p2, p3 = sample.translations
    u, v = p1 - p3, p2 - p3
    normal = np.cross(u, v)
    scale = np.linalg.norm(u) * np.linalg.norm(v)
    if scale < 1e-18 or np.linalg.norm(normal) < 1e-9 * scale:
        return None
    center = p3 + np.cross(np.dot(u, u) * v - np.dot(v, v) * u, normal) / (2.0 * np.dot(normal, normal))
    return _revolute_through(center, normal, sample[0], sample.rot[0])


def _revolute_through(center: np.ndarray, normal: np.ndarray, first: Pose,
                      first_rotation: Rotation) -> Optional[RevoluteModel]:
    """Revolute model with the given center and axis whose configuration 0 is ``first``."""
    z = normal / np.linalg.norm(normal)
    radial = first.translation - center
    radial = radial - np.dot(radial, z) * z
    radius = np.linalg.norm(radial)
    if not np.isfinite(radius) or radius < 1e-9 or radius > MAX_REVOLUTE_RADIUS:
        return None
    x = radial / radius
    frame = Rotation.from_matrix(np.column_stack([x, np.cross(z, x), z]))
    center = center + np.dot(first.translation - center, z) * z
    orientation = frame.inv() * first_rotation
    return RevoluteModel(Pose.from_rotation(frame, center), radius, from_rotation(orientation))


def consensus_fit(kind: ModelKind, y: PoseSeries, weights: np.ndarray) -> Optional[ArticulationModel]:
    """Closed-form weighted fit of ``kind`` to the poses in ``y``.

    Rigid: weighted mean pose. Prismatic: weighted principal axis.
    Revolute: weighted plane, algebraic circle fit in the plane and mean
    orientation offset. Returns None when the weighted data is degenerate.
    """
    w = np.asarray(weights, dtype=float)
    if w.sum() <= 0 or np.count_nonzero(w > 1e-12) < kind.min_samples:
        return None
    w = w / w.sum()
    points = y.translations
    mean = w @ points
    mean_rotation = y.rot.mean(weights=w)

    if kind is ModelKind.RIGID:
        return RigidModel(Pose.from_rotation(mean_rotation, mean))

    centered = points - mean
    eigvals, eigvecs = np.linalg.eigh((centered * w[:, None]).T @ centered)
    if eigvals[-1] < 1e-18:
        return None

    if kind is ModelKind.PRISMATIC:
        return PrismaticModel(Pose.from_rotation(mean_rotation, mean), eigvecs[:, -1])

    normal, u = eigvecs[:, 0], eigvecs[:, -1]
    v = np.cross(normal, u)
    xy = np.column_stack([centered @ u, centered @ v])
    sw = np.sqrt(w)
    design = np.column_stack([xy, np.ones(len(xy))]) * sw[:, None]
    rhs = -np.sum(xy ** 2, axis=1) * sw
    (d, e, f), *_ = np.linalg.lstsq(design, rhs, rcond=None)
    cx, cy = -d / 2.0, -e / 2.0
    if cx * cx + cy * cy - f <= 0:
        return None
    center = mean + cx * u + cy * v
    model = _revolute_through(center, normal, y[0], y.rot[0])
    if model is None:
        return None
    c = model.inverse_arrays(points, y.rot)
    along = model.center.rot * Rotation.from_rotvec(np.outer(c, [0.0, 0.0, 1.0]))
    offset = (along.inv() * y.rot).mean(weights=w)
    return RevoluteModel(model.center, model.radius, from_rotation(offset))


def refine_model(model: ArticulationModel, y: PoseSeries, a: PoseSeries, noise: NoiseModel,
                 weights: np.ndarray, settings: FitSettings) -> ArticulationModel:
    """Weighted Levenberg–Marquardt refinement in local perturbation coordinates."""
    sw = np.sqrt(np.asarray(weights, dtype=float))[:, None]
    targets_t = y.translations[1:]
    targets_r = y[1:].rot
    prev, n_params = y[:-1], model.n_local_params

    def residuals(delta):
        pred_t, pred_r = model.perturbed(delta).predict_arrays(prev, a)
        rt = (targets_t - pred_t) / noise.sigma_trans
        rr = np.atleast_2d((pred_r.inv() * targets_r).as_rotvec()) / noise.sigma_rot
        return (sw * np.hstack([rt, rr])).ravel()

    n_residuals = 6 * len(prev)
    try:
        result = least_squares(
            residuals,
            np.zeros(n_params),
            method='lm' if n_residuals >= n_params else 'trf',
            xtol=settings.refine_tol,
            max_nfev=settings.refine_steps * (n_params + 1),
        )
    except (ValueError, np.linalg.LinAlgError):
        return model
    if not np.all(np.isfinite(result.x)):
        return model
    try:
        return model.perturbed(result.x)
    except ValidationError:
        return model


def _score(model: ArticulationModel, y: PoseSeries, a: PoseSeries, noise: NoiseModel) -> float:
    return penalized_total(segment_gaussian_terms(model, y, a, noise), noise.gamma, noise)


def fit_mlesac(kind: ModelKind, y: PoseSeries, a: PoseSeries, n: NoiseModel,
               rng_seed: SeedLike = 0, iters: Optional[int] = None,
               settings: Optional[FitSettings] = None) -> FitResult:
    """Fit ``kind`` to a segment by MLESAC.

    Args:
        kind: model to fit
        y: segment observations
        a: actions, one fewer than observations
        n: noise model scoring the hypotheses
        rng_seed: seed or SeedSequence; equal seeds give bit-identical fits
        iters: overrides ``settings.iterations``
        settings: fit settings

    Returns:
        FitResult carrying the anchored model, γ̂ and the penalized log-likelihood,
        or an error result when every minimal sample was degenerate

    Raises:
        InsufficientSamplesError: fewer observations than the minimal sample or than 2
    """
    settings = settings or FitSettings()
    if iters is not None:
        settings = replace(settings, iterations=iters)
    settings.validate()
    n.validate()

    count = len(y)
    if count < max(2, kind.min_samples):
        raise InsufficientSamplesError(
            f"{kind.value} fit needs at least {max(2, kind.min_samples)} observations, got {count}",
            {'kind': kind.value, 'observations': count}
        )
    if len(a) != count - 1:
        raise ValidationError("actions must number one fewer than observations",
                              {'observations': count, 'actions': len(a)})

    rng = np.random.default_rng(rng_seed)
    prev, targets_t, targets_r = y[:-1], y.translations[1:], y[1:].rot
    best, best_score, degenerate = None, -np.inf, 0
    for _ in range(settings.iterations):
        sample = np.sort(rng.choice(count, size=kind.min_samples, replace=False))
        hypothesis = minimal_hypothesis(kind, y[sample])
        if hypothesis is None:
            degenerate += 1
            continue
        pred_t, pred_r = hypothesis.predict_arrays(prev, a)
        score = penalized_total(gaussian_terms(targets_t, targets_r, pred_t, pred_r, n), n.gamma, n)
        if best is None or score > best_score:
            best, best_score = hypothesis, score

    if best is None:
        return FitResult.error_result(
            kind,
            'DegenerateSampleError',
            f"all {settings.iterations} minimal samples for {kind.value} were degenerate",
            {'iterations': settings.iterations},
            n_observations=count
        )

    if settings.consensus_refit or settings.refine_steps > 0:
        weights = responsibilities(segment_gaussian_terms(best, y, a, n), n.gamma, n)
        if settings.consensus_refit:
            candidate = consensus_fit(kind, y, np.concatenate([[weights[0]], weights]))
            if candidate is not None:
                score = _score(candidate, y, a, n)
                if score > best_score:
                    best, best_score = candidate, score
                    weights = responsibilities(segment_gaussian_terms(best, y, a, n), n.gamma, n)
        if settings.refine_steps > 0:
            candidate = refine_model(best, y, a, n, weights, settings)
            score = _score(candidate, y, a, n)
            if score > best_score:
                best, best_score = candidate, score

    model = best.anchored(y)
    gaussian = segment_gaussian_terms(model, y, a, n)
    gamma = fit_gamma(gaussian, n) if settings.fit_gamma else n.gamma
    loglik = float(np.sum(mixture_terms(gaussian, gamma, n)) - n.outlier_weight * gamma)
    return FitResult.success_result(
        kind, model, loglik, gamma, count,
        metadata={'degenerate_samples': degenerate}
    )


def bic_penalty(kind: ModelKind, length: int) -> float:
    """½·k_q·ln(length) for a segment of ``length`` observations."""
    return 0.5 * kind.k_q * np.log(length)


def model_evidence(kind: ModelKind, y: PoseSeries, a: PoseSeries, n: NoiseModel,
                   rng_seed: SeedLike = 0, settings: Optional[FitSettings] = None) -> float:
    """BIC-penalized log evidence ln L of a segment under ``kind``; fit errors propagate."""
    result = fit_mlesac(kind, y, a, n, rng_seed=rng_seed, settings=settings).raise_for_error()
    return result.loglik - bic_penalty(kind, len(y))
