"""Online MAP changepoint detection over articulation models.

The filter keeps one particle per candidate previous changepoint ``s``. At
each new observation every particle's per-model evidence tracks are grown,
the best MAP candidate for a changepoint at ``t`` is recorded with a
backpointer, a new particle is spawned at ``t`` and, when the cap is
exceeded, particles are pruned by stratified optimal resampling. The MAP
segmentation is read back along the backpointers.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional

import numpy as np
from scipy.special import logsumexp

from logger import log_debug, log_error, log_info, log_performance
from kinematics.articulation import MODEL_KINDS, ModelKind
from kinematics.error_types import ParticleDepletionError, SeriesTooShortError, ValidationError
from kinematics.geometry import PoseSeries
from kinematics.mlesac import FitSettings
from kinematics.observation import NoiseModel
from .evidence import (
    DetectionMode, SegmentEvidence, SegmentScorer, candidate_key, candidate_score, model_log_prior,
)
from .prior import SegmentLengthPrior
from .resampling import stratified_optimal_resample
from .segmentation import Segment, Segmentation

#: Largest series exhaustive_map accepts
EXHAUSTIVE_MAX_T = 500


@dataclass
class DetectorSettings:
    """Particle filter settings"""
    #: Cap M on support points
    particles: int = 100
    #: Re-fit period of a growing segment (1 re-fits at every step)
    stride: int = 10
    mode: DetectionMode = DetectionMode.ACTION_CONDITIONAL
    seed: int = 0
    fit: FitSettings = field(default_factory=FitSettings)

    def validate(self):
        """Validate the detector settings"""
        if self.particles < 1:
            log_error("Invalid particle cap", extra={'particles': self.particles})
            raise ValidationError("particles must be at least 1", {'particles': self.particles})
        if self.stride < 1:
            log_error("Invalid refit stride", extra={'stride': self.stride})
            raise ValidationError("stride must be at least 1", {'stride': self.stride})
        if self.seed < 0:
            log_error("Negative seed", extra={'seed': self.seed})
            raise ValidationError("seed must be non-negative", {'seed': self.seed})
        self.mode = DetectionMode(self.mode)
        self.fit.validate()
        return self


@dataclass
class Particle:
    """Support point: a candidate previous changepoint ``s`` and its evidence tracks."""
    s: int
    #: ln P^MAP_s, the best score of y[0:s] ending in a changepoint at s
    prefix: float
    tracks: Dict[ModelKind, SegmentEvidence] = field(default_factory=dict)
    #: Log importance correction picked up when resampled with weight α
    log_correction: float = 0.0

    def log_weight(self, t: int, prior: SegmentLengthPrior) -> float:
        """ln Σ_M P_t(s, M) = ln(1 - B(t-s-1)) + ln L(s,t,M) + ln p(M) + ln P^MAP_s, summed over M."""
        evidences = [track.log_evidence for track in self.tracks.values()]
        if not evidences:
            return -np.inf
        return float(
            prior.log_survival(t - self.s - 1) + model_log_prior() + logsumexp(evidences)
            + self.prefix + self.log_correction
        )


def _check_series(y: PoseSeries, a: PoseSeries, prior: SegmentLengthPrior):
    prior.validate()
    if len(a) != len(y) - 1:
        raise ValidationError("actions must number one fewer than observations",
                              {'observations': len(y), 'actions': len(a)})
    if len(y) < 2 * prior.min_len:
        raise SeriesTooShortError(
            f"series of {len(y)} observations is shorter than 2·min_len = {2 * prior.min_len}",
            {'T': len(y), 'min_len': prior.min_len}
        )


def _backtrace(back: List[Optional[Segment]], prefix: np.ndarray, T: int, **metadata) -> Segmentation:
    segments = []
    t = T
    while t > 0:
        segment = back[t]
        segments.append(segment)
        t = segment.t0
    segments.reverse()
    tau = tuple([0] + [segment.t1 for segment in segments])
    return Segmentation(tau, tuple(segments), float(prefix[T]), metadata)


class ChangepointDetector:
    """Particle-filtered MAP segmentation of one pose/action series."""

    def __init__(self, prior: SegmentLengthPrior, noise: NoiseModel,
                 settings: Optional[DetectorSettings] = None):
        self.prior = prior.validate()
        self.noise = noise.validate()
        self.settings = (settings or DetectorSettings()).validate()

    def run(self, y: PoseSeries, a: PoseSeries) -> Segmentation:
        _check_series(y, a, self.prior)
        settings, prior = self.settings, self.prior
        T = len(y)
        scorer = SegmentScorer(y, a, self.noise, prior, settings.fit, settings.seed,
                               settings.stride, settings.mode)
        rng = np.random.default_rng(np.random.SeedSequence([settings.seed, T]))

        prefix = np.full(T + 1, -np.inf)
        prefix[0] = 0.0
        back: List[Optional[Segment]] = [None] * (T + 1)
        particles = [Particle(0, 0.0)]
        pruned, peak = 0, 1

        for t in range(1, T + 1):
            best_key, best = None, None
            for particle in particles:
                length = t - particle.s
                if length < prior.min_len:
                    continue
                for kind in MODEL_KINDS:
                    track = particle.tracks.setdefault(kind, scorer.start(particle.s, kind))
                    scorer.advance(track, t)
                    key = candidate_key(
                        candidate_score(prior, length, track.log_evidence, particle.prefix),
                        particle.s, kind
                    )
                    if best_key is None or key > best_key:
                        best_key, best = key, track

            if best is not None and np.isfinite(best_key[0]):
                prefix[t] = best_key[0]
                back[t] = Segment(best.s, t, best.kind, best.model, best.log_evidence, best.gamma)

            particles = [p for p in particles if t - p.s < prior.max_len]
            mature = [p for p in particles if t - p.s >= prior.min_len]
            young = [p for p in particles if t - p.s < prior.min_len]
            weights = np.array([p.log_weight(t, prior) for p in mature])

            if mature and not young and not np.any(np.isfinite(weights)) and t < T:
                log_error("Particle depletion", extra={'timestep': t, 'particles': len(mature)})
                raise ParticleDepletionError("every particle weight underflowed", timestep=t)

            if len(mature) > settings.particles:
                result = stratified_optimal_resample(weights, settings.particles, rng, timestep=t)
                survivors = []
                for index, log_weight in zip(result.indices, result.log_weights):
                    particle = mature[index]
                    if log_weight != weights[index]:
                        particle.log_correction += log_weight - weights[index]
                    survivors.append(particle)
                pruned += len(mature) - len(survivors)
                log_debug("Pruned particles", extra={
                    'timestep': t, 'before': len(mature), 'after': len(survivors), 'alpha': result.alpha
                })
                mature = survivors
            peak = max(peak, len(mature))
            particles = mature + young

            if np.isfinite(prefix[t]) and T - t >= prior.min_len:
                particles.append(Particle(t, float(prefix[t])))

        if not np.isfinite(prefix[T]):
            log_error("No admissible segmentation", extra={'T': T})
            raise ParticleDepletionError("no admissible segmentation reached the end of the series", timestep=T)

        return _backtrace(back, prefix, T, mode=settings.mode.value, particles=settings.particles,
                          stride=settings.stride, pruned=pruned, peak_particles=peak,
                          fits=scorer.fits)


def detect(y: PoseSeries, a: PoseSeries, prior: SegmentLengthPrior, n: NoiseModel,
           max_particles: Optional[int] = None, seed: Optional[int] = None,
           mode: Optional[DetectionMode] = None,
           settings: Optional[DetectorSettings] = None) -> Segmentation:
    """MAP segmentation of (y, a) under the particle-filtered recursion.

    ``max_particles``, ``seed`` and ``mode`` override the matching fields of
    ``settings``.

    Raises:
        SeriesTooShortError: when T < 2·min_len
        ParticleDepletionError: when every particle dies, with the timestep
    """
    settings = settings or DetectorSettings()
    overrides = {'particles': max_particles, 'seed': seed, 'mode': mode}
    settings = replace(settings, **{k: v for k, v in overrides.items() if v is not None})
    start = time.time()
    log_info("Starting changepoint detection", extra={
        'T': len(y), 'particles': settings.particles, 'mode': DetectionMode(settings.mode).value
    })
    segmentation = ChangepointDetector(prior, n, settings).run(y, a)
    duration_ms = (time.time() - start) * 1000
    log_performance("detect", duration_ms, {'T': len(y), 'fits': segmentation.metadata.get('fits')})
    log_info("Changepoint detection finished", extra={
        'tau': list(segmentation.tau), 'kinds': [k.value for k in segmentation.kinds],
        'log_map_score': segmentation.log_map_score
    })
    return segmentation


def exhaustive_map(y: PoseSeries, a: PoseSeries, prior: SegmentLengthPrior, n: NoiseModel,
                   mode: DetectionMode = DetectionMode.ACTION_CONDITIONAL,
                   fit: Optional[FitSettings] = None, seed: int = 0, stride: int = 1) -> Segmentation:
    """Globally optimal MAP segmentation by dynamic programming over every s < t.

    Evidence comes from the same scorer and tie-breaking as ``detect``, so
    ``detect`` with an inactive particle cap returns the same result.

    Raises:
        SeriesTooShortError: when T < 2·min_len or T exceeds the cost guard
    """
    _check_series(y, a, prior)
    T = len(y)
    if T > EXHAUSTIVE_MAX_T:
        raise SeriesTooShortError(f"exhaustive search is limited to {EXHAUSTIVE_MAX_T} observations",
                                  {'T': T, 'limit': EXHAUSTIVE_MAX_T})
    n.validate()
    start = time.time()
    log_info("Starting exhaustive MAP search", extra={'T': T, 'mode': DetectionMode(mode).value})
    scorer = SegmentScorer(y, a, n, prior, fit or FitSettings(), seed, stride, mode)

    prefix = np.full(T + 1, -np.inf)
    prefix[0] = 0.0
    back: List[Optional[Segment]] = [None] * (T + 1)
    tracks: Dict[tuple, SegmentEvidence] = {}

    for t in range(prior.min_len, T + 1):
        best_key, best = None, None
        for s in range(max(0, t - prior.max_len), t - prior.min_len + 1):
            if not np.isfinite(prefix[s]) or (s > 0 and T - s < prior.min_len):
                continue
            for kind in MODEL_KINDS:
                track = tracks.setdefault((s, kind), scorer.start(s, kind))
                scorer.advance(track, t)
                key = candidate_key(candidate_score(prior, t - s, track.log_evidence, prefix[s]), s, kind)
                if best_key is None or key > best_key:
                    best_key, best = key, track
        if best is not None and np.isfinite(best_key[0]):
            prefix[t] = best_key[0]
            back[t] = Segment(best.s, t, best.kind, best.model, best.log_evidence, best.gamma)

    if not np.isfinite(prefix[T]):
        raise ParticleDepletionError("no admissible segmentation reached the end of the series", timestep=T)

    log_performance("exhaustive_map", (time.time() - start) * 1000, {'T': T, 'fits': scorer.fits})
    return _backtrace(back, prefix, T, mode=DetectionMode(mode).value, exhaustive=True, fits=scorer.fits)


def polish_segmentation(seg: Segmentation, y: PoseSeries, a: PoseSeries, prior: SegmentLengthPrior,
                        n: NoiseModel, fit: FitSettings, seed: int = 0,
                        mode: DetectionMode = DetectionMode.ACTION_CONDITIONAL) -> Segmentation:
    """Re-fit every segment of ``seg`` with ``fit`` and rescore; changepoints stay put."""
    scorer = SegmentScorer(y, a, n, prior, fit, seed, 1, mode)
    segments = []
    for segment in seg.segments:
        track = scorer.refit_segment(segment.t0, segment.t1, segment.kind)
        if track.model is None:
            segments.append(segment)
            continue
        segments.append(Segment(segment.t0, segment.t1, segment.kind, track.model,
                                track.log_evidence, track.gamma))
    polished = Segmentation(seg.tau, tuple(segments), 0.0, {**seg.metadata, 'polished': True})
    return Segmentation(seg.tau, polished.segments, polished.decomposed_score(prior), polished.metadata)
