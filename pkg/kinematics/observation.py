"""Outlier-robust observation model and action-conditional sequence likelihood."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.spatial.transform import Rotation

from logger import log_error, log_debug
from .articulation import ArticulationModel
from .error_types import ValidationError
from .geometry import Pose, PoseSeries, distance

#: 1 m³ translational box times the volume of the rotation group (8π²)
DEFAULT_OUTLIER_VOLUME = 8.0 * np.pi ** 2


@dataclass
class NoiseModel:
    """Observation noise and outlier settings"""
    #: Translational standard deviation (meters)
    sigma_trans: float = 0.005
    #: Angular standard deviation (radians)
    sigma_rot: float = 0.01
    #: Outlier probability
    gamma: float = 0.02
    #: Weight w of the outlier prior exp(-w·γ)
    outlier_weight: float = 1.0
    #: Support volume of the uniform outlier density
    outlier_volume: float = DEFAULT_OUTLIER_VOLUME

    def validate(self):
        """Validate the noise settings"""
        if not (self.sigma_trans > 0 and self.sigma_rot > 0):
            log_error("Non-positive observation variance", extra={
                'sigma_trans': self.sigma_trans, 'sigma_rot': self.sigma_rot
            })
            raise ValidationError("observation variances must be positive",
                                  {'sigma_trans': self.sigma_trans, 'sigma_rot': self.sigma_rot})
        if not 0.0 <= self.gamma <= 1.0:
            log_error("Outlier probability out of range", extra={'gamma': self.gamma})
            raise ValidationError("gamma must lie in [0, 1]", {'gamma': self.gamma})
        if not self.outlier_weight > 0:
            log_error("Invalid outlier prior weight", extra={'outlier_weight': self.outlier_weight})
            raise ValidationError("outlier_weight must be positive", {'outlier_weight': self.outlier_weight})
        if not self.outlier_volume > 0:
            log_error("Invalid outlier volume", extra={'outlier_volume': self.outlier_volume})
            raise ValidationError("outlier_volume must be positive", {'outlier_volume': self.outlier_volume})
        return self

    @property
    def trans_var(self) -> float:
        return self.sigma_trans ** 2

    @property
    def rot_var(self) -> float:
        return self.sigma_rot ** 2

    @property
    def log_outlier_density(self) -> float:
        return -float(np.log(self.outlier_volume))

    @property
    def gaussian_log_mode(self) -> float:
        """Log density of the Gaussian component at zero residual."""
        return -1.5 * np.log(2.0 * np.pi * self.trans_var) - 1.5 * np.log(2.0 * np.pi * self.rot_var)


def gaussian_terms(y_translations: np.ndarray, y_rotations: Rotation,
                   pred_translations: np.ndarray, pred_rotations: Rotation,
                   noise: NoiseModel) -> np.ndarray:
    """Per-observation Gaussian log densities of observations around predictions."""
    d2 = np.sum((np.asarray(y_translations) - pred_translations) ** 2, axis=-1)
    angle = np.atleast_1d((pred_rotations.inv() * y_rotations).magnitude())
    return noise.gaussian_log_mode - 0.5 * (d2 / noise.trans_var + angle ** 2 / noise.rot_var)


def mixture_terms(gaussian: np.ndarray, gamma: float, noise: NoiseModel) -> np.ndarray:
    """Log of (1-γ)·N + γ/U for each Gaussian log density."""
    with np.errstate(divide='ignore'):
        return np.logaddexp(np.log1p(-gamma) + gaussian, np.log(gamma) + noise.log_outlier_density)


def responsibilities(gaussian: np.ndarray, gamma: float, noise: NoiseModel) -> np.ndarray:
    """Posterior inlier probability of each observation."""
    with np.errstate(divide='ignore'):
        return np.exp(np.log1p(-gamma) + gaussian - mixture_terms(gaussian, gamma, noise))


def segment_gaussian_terms(m: ArticulationModel, y: PoseSeries, a: PoseSeries,
                           noise: NoiseModel) -> np.ndarray:
    """Gaussian terms for y[1:] predicted from y[:-1] under actions a."""
    pred_t, pred_r = m.predict_arrays(y[:-1], a)
    return gaussian_terms(y.translations[1:], y[1:].rot, pred_t, pred_r, noise)


def penalized_total(gaussian: np.ndarray, gamma: float, noise: NoiseModel) -> float:
    """Sum of mixture terms plus the once-per-segment prior -w·γ."""
    return float(np.sum(mixture_terms(gaussian, gamma, noise)) - noise.outlier_weight * gamma)


def fit_gamma(gaussian: np.ndarray, noise: NoiseModel) -> float:
    """Maximize the penalized segment likelihood over γ ∈ [0, 1].

    Uses a bounded golden-section/Brent search; the endpoints are compared
    explicitly since the bounded search never evaluates them.
    """
    result = minimize_scalar(
        lambda g: -penalized_total(gaussian, g, noise),
        bounds=(0.0, 1.0),
        method='bounded',
        options={'xatol': 1e-6}
    )
    candidates = [0.0, float(result.x), 1.0]
    scores = [penalized_total(gaussian, g, noise) for g in candidates]
    return candidates[int(np.argmax(scores))]


def observation_loglik(y: Pose, predicted: Pose, n: NoiseModel, gamma: Optional[float] = None) -> float:
    """Log of the Gaussian/uniform mixture density of ``y`` plus the prior -w·γ."""
    n.validate()
    gamma = n.gamma if gamma is None else gamma
    d = distance(y, predicted)
    g = n.gaussian_log_mode - 0.5 * (d.translational ** 2 / n.trans_var + d.angular ** 2 / n.rot_var)
    return float(mixture_terms(np.array([g]), gamma, n)[0] - n.outlier_weight * gamma)


def sequence_loglik(m: ArticulationModel, y: PoseSeries, a: PoseSeries, n: NoiseModel,
                    gamma: Optional[float] = None) -> float:
    """Action-conditional log-likelihood of a segment.

    Observation ``y[k]`` is predicted from ``y[k-1]`` and ``a[k-1]``. The
    outlier prior is counted once for the segment, so the result equals the
    sum of ``observation_loglik`` terms with all but one prior term removed.

    Raises:
        ValidationError: on fewer than 2 observations or misaligned actions
    """
    n.validate()
    if len(y) < 2:
        raise ValidationError("segment shorter than 2 observations", {'length': len(y)})
    if len(a) != len(y) - 1:
        raise ValidationError("actions must number one fewer than observations",
                              {'observations': len(y), 'actions': len(a)})
    gamma = n.gamma if gamma is None else gamma
    total = penalized_total(segment_gaussian_terms(m, y, a, n), gamma, n)
    log_debug("Scored segment", extra={'kind': m.kind.value, 'length': len(y), 'loglik': total})
    return total
