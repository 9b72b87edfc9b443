from .prior import SegmentLengthPrior
from .resampling import ResampleResult, stratified_optimal_resample
from .evidence import DetectionMode, SegmentEvidence, SegmentScorer, segment_seed
from .segmentation import (
    ConfigSegment, ConfigurationalSegmentation, Segment, Segmentation, to_configurational,
)
from .detector import (
    ChangepointDetector, DetectorSettings, Particle, detect, exhaustive_map, polish_segmentation,
)

__all__ = [
    'SegmentLengthPrior', 'ResampleResult', 'stratified_optimal_resample',
    'DetectionMode', 'SegmentEvidence', 'SegmentScorer', 'segment_seed',
    'ConfigSegment', 'ConfigurationalSegmentation', 'Segment', 'Segmentation', 'to_configurational',
    'ChangepointDetector', 'DetectorSettings', 'Particle', 'detect', 'exhaustive_map',
    'polish_segmentation',
]
