"""Segment evidence ln L(s, t, M) shared by the particle filter and the exhaustive search."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from kinematics.articulation import ArticulationModel, ModelKind
from kinematics.error_types import FitError, ValidationError
from kinematics.geometry import PoseSeries
from kinematics.mlesac import FitSettings, bic_penalty, fit_mlesac
from kinematics.observation import NoiseModel, gaussian_terms, mixture_terms
from .prior import SegmentLengthPrior


class DetectionMode(str, Enum):
    """How actions enter the segment likelihood."""
    ACTION_CONDITIONAL = "action-conditional"
    OBSERVATION_ONLY = "observation-only"


def segment_seed(seed: int, s: int, t: int, kind: ModelKind) -> np.random.SeedSequence:
    """Fit seed for segment y[s:t] under ``kind``; independent of the search order."""
    return np.random.SeedSequence([int(seed), int(s), int(t), kind.order])


@dataclass
class SegmentEvidence:
    """Running fit of one model to a growing segment y[s:t]."""
    kind: ModelKind
    s: int
    t: int = 0
    model: Optional[ArticulationModel] = None
    gamma: Optional[float] = None
    #: Penalized log-likelihood of y[s:t] under (model, gamma)
    loglik: float = -np.inf

    @property
    def length(self) -> int:
        return self.t - self.s

    @property
    def log_evidence(self) -> float:
        if self.model is None:
            return -np.inf
        return self.loglik - bic_penalty(self.kind, self.length)


@dataclass
class SegmentScorer:
    """Scores segments of one series under a fixed noise model and fit schedule.

    A track is re-fit from scratch when ``(t - s - min_len)`` is a multiple
    of ``stride`` (or while it has no model yet); otherwise the newest
    observation is scored under the frozen parameters and added on.
    """
    y: PoseSeries
    a: PoseSeries
    noise: NoiseModel
    prior: SegmentLengthPrior
    fit: FitSettings = field(default_factory=FitSettings)
    seed: int = 0
    stride: int = 1
    mode: DetectionMode = DetectionMode.ACTION_CONDITIONAL

    def __post_init__(self):
        if len(self.a) != len(self.y) - 1:
            raise ValidationError("actions must number one fewer than observations",
                                  {'observations': len(self.y), 'actions': len(self.a)})
        if self.stride < 1:
            raise ValidationError("stride must be at least 1", {'stride': self.stride})
        self.mode = DetectionMode(self.mode)
        if self.mode is DetectionMode.OBSERVATION_ONLY:
            self.a = PoseSeries.identity(len(self.a))
        self.fits = 0

    def start(self, s: int, kind: ModelKind) -> SegmentEvidence:
        return SegmentEvidence(kind=kind, s=s, t=s)

    def _refit_due(self, track: SegmentEvidence, t: int) -> bool:
        return track.model is None or (t - track.s - self.prior.min_len) % self.stride == 0

    def advance(self, track: SegmentEvidence, t: int) -> SegmentEvidence:
        """Extend ``track`` to cover y[s:t]."""
        if t <= track.t:
            raise ValidationError("segment tracks only grow", {'from': track.t, 'to': t})
        previous, track.t = track.t, t
        if self._refit_due(track, t):
            self._refit(track)
        else:
            pred_t, pred_r = track.model.predict_arrays(self.y[previous - 1:t - 1], self.a[previous - 1:t - 1])
            gaussian = gaussian_terms(self.y.translations[previous:t], self.y[previous:t].rot,
                                      pred_t, pred_r, self.noise)
            track.loglik += float(np.sum(mixture_terms(gaussian, track.gamma, self.noise)))
        return track

    def _refit(self, track: SegmentEvidence):
        s, t = track.s, track.t
        self.fits += 1
        try:
            result = fit_mlesac(
                track.kind, self.y[s:t], self.a[s:t - 1], self.noise,
                rng_seed=segment_seed(self.seed, s, t, track.kind), settings=self.fit
            )
        except FitError:
            result = None
        if result is None or not result.success:
            track.model, track.gamma, track.loglik = None, None, -np.inf
            return
        track.model, track.gamma, track.loglik = result.model, result.gamma, result.loglik

    def evaluate(self, s: int, t: int, kind: ModelKind) -> SegmentEvidence:
        """Evidence of y[s:t] under ``kind`` as a growing track would reach it."""
        track = self.start(s, kind)
        for end in range(s + self.prior.min_len, t + 1):
            self.advance(track, end)
        return track

    def refit_segment(self, s: int, t: int, kind: ModelKind,
                      fit: Optional[FitSettings] = None) -> SegmentEvidence:
        """Fresh fit of y[s:t] with ``fit`` settings, no stride schedule."""
        scorer = self if fit is None else replace(self, fit=fit, stride=1)
        track = SegmentEvidence(kind=kind, s=s, t=t)
        scorer._refit(track)
        return track


def model_log_prior() -> float:
    """Uniform p(M) over the three kinds."""
    return -float(np.log(3.0))


def candidate_score(prior: SegmentLengthPrior, length: int, log_evidence: float, prefix: float) -> float:
    """ln β(length) + ln p(M) + ln L + ln P^MAP_s, the MAP candidate for a segment."""
    if not (np.isfinite(log_evidence) and np.isfinite(prefix)):
        return -np.inf
    return prior.log_beta(length) + model_log_prior() + log_evidence + prefix


def candidate_key(score: float, s: int, kind: ModelKind) -> Tuple[float, int, int]:
    """Ordering of MAP candidates: score, then larger s, then simpler model."""
    return score, s, -kind.order
