"""MAP segmentations in time and in configuration space."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from kinematics.articulation import ArticulationModel, ModelKind, RigidModel
from kinematics.error_types import ValidationError
from kinematics.geometry import PoseSeries
from .evidence import model_log_prior
from .prior import SegmentLengthPrior

#: Fallback configurational extent of a rigid segment with no usable actions
DEFAULT_RIGID_EXTENT = 0.05


@dataclass(frozen=True)
class Segment:
    """Observations y[t0:t1] explained by one fitted model."""
    t0: int
    t1: int
    kind: ModelKind
    model: ArticulationModel
    log_evidence: float
    gamma: Optional[float] = None

    @property
    def length(self) -> int:
        return self.t1 - self.t0


@dataclass(frozen=True)
class Segmentation:
    tau: Tuple[int, ...]
    segments: Tuple[Segment, ...]
    log_map_score: float
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def changepoints(self) -> Tuple[int, ...]:
        """Interior changepoint times."""
        return self.tau[1:-1]

    @property
    def kinds(self) -> List[ModelKind]:
        return [segment.kind for segment in self.segments]

    def decomposed_score(self, prior: SegmentLengthPrior) -> float:
        """Σ_k ln β(len_k) + ln p(M_k) + ln L_k."""
        return float(sum(
            prior.log_beta(segment.length) + model_log_prior() + segment.log_evidence
            for segment in self.segments
        ))

    def validate(self, T: Optional[int] = None, min_len: Optional[int] = None):
        """Check ordering, contiguity, coverage and minimum lengths"""
        tau = list(self.tau)
        if len(tau) < 2 or tau[0] != 0 or any(b <= a for a, b in zip(tau, tau[1:])):
            raise ValidationError("changepoint times must start at 0 and strictly increase", {'tau': tau})
        if T is not None and tau[-1] != T:
            raise ValidationError("segmentation does not cover the series", {'tau': tau, 'T': T})
        if len(self.segments) != len(tau) - 1:
            raise ValidationError("one segment per changepoint interval required",
                                  {'tau': tau, 'segments': len(self.segments)})
        for segment, t0, t1 in zip(self.segments, tau, tau[1:]):
            if (segment.t0, segment.t1) != (t0, t1):
                raise ValidationError("segments are not contiguous with tau",
                                      {'segment': [segment.t0, segment.t1], 'expected': [t0, t1]})
            if min_len is not None and segment.length < min_len:
                raise ValidationError("segment shorter than min_len",
                                      {'segment': [t0, t1], 'min_len': min_len})
        return self


@dataclass(frozen=True)
class ConfigSegment:
    """One local model on an edge: configurational changepoints c̃^{k-1}, c̃^k and extent."""
    c_start: float
    c_end: float
    kind: ModelKind
    model: ArticulationModel
    extent: float
    c_max: float


@dataclass(frozen=True)
class ConfigurationalSegmentation:
    segments: Tuple[ConfigSegment, ...]

    @property
    def kinds(self) -> List[ModelKind]:
        return [segment.kind for segment in self.segments]

    @property
    def models(self) -> List[ArticulationModel]:
        return [segment.model for segment in self.segments]

    @property
    def boundaries(self) -> np.ndarray:
        """Cumulative extents starting at 0, one more entry than segments."""
        return np.concatenate([[0.0], np.cumsum([segment.extent for segment in self.segments])])

    def __len__(self) -> int:
        return len(self.segments)


def _nearest_moving(segments: Sequence[Segment], k: int) -> Optional[ArticulationModel]:
    for j in list(range(k + 1, len(segments))) + list(range(k - 1, -1, -1)):
        if segments[j].kind is not ModelKind.RIGID:
            return segments[j].model
    return None


def _rigid_extent(segments: Sequence[Segment], k: int, y: PoseSeries,
                  a: Optional[PoseSeries], fallback: float) -> float:
    segment = segments[k]
    if a is not None and segment.length > 1:
        actions = a[segment.t0:segment.t1 - 1]
        neighbor = _nearest_moving(segments, k)
        if neighbor is not None:
            prev = y[segment.t0:segment.t1 - 1]
            c = neighbor.inverse_arrays(prev.translations, prev.rot)
            extent = abs(float(np.sum(neighbor.delta_config_arrays(c, actions.translations, actions.rot))))
        else:
            extent = float(np.sum(np.linalg.norm(actions.translations, axis=1)))
        if extent > 1e-12:
            return extent
    return fallback


def to_configurational(seg: Segmentation, y: PoseSeries, a: Optional[PoseSeries] = None,
                       rigid_extent: float = DEFAULT_RIGID_EXTENT) -> ConfigurationalSegmentation:
    """Map time changepoints to configurational changepoints.

    c̃ of a segment's start is the configuration of its first observation and
    c̃ of its end that of its last, both under the segment's own model.
    """
    out = []
    last = len(seg.segments) - 1
    for k, segment in enumerate(seg.segments):
        model = segment.model
        if segment.kind is ModelKind.RIGID or isinstance(model, RigidModel):
            extent = _rigid_extent(seg.segments, k, y, a, rigid_extent)
            out.append(ConfigSegment(0.0, 0.0, segment.kind, model, extent, 0.0))
            continue
        part = y[segment.t0:segment.t1]
        c = model.inverse_arrays(part.translations, part.rot)
        c_start, c_end, c_max = float(c[0]), float(c[-1]), float(np.max(c))
        extent = (c_max if k == last else c_end) - c_start
        out.append(ConfigSegment(c_start, c_end, segment.kind, model, extent, c_max))
    return ConfigurationalSegmentation(tuple(out))
