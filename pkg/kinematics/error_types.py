"""Error types for hybrid kinematic inference"""
from typing import Optional, Any, Dict


class HybridKinematicsError(Exception):
    """Base exception class for all hybrid kinematics errors"""
    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(message)


class ValidationError(HybridKinematicsError):
    """Raised when an input, setting or invariant check fails"""
    pass


class ConfigurationError(HybridKinematicsError):
    """Raised when there's an error in run or scenario configuration"""
    pass


class DatasetError(ValidationError):
    """Raised when a trajectory, segmentation or automaton file is malformed"""
    def __init__(
        self,
        message: str,
        line_number: Optional[int] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message, details=details)
        self.line_number = line_number


class SeriesTooShortError(ValidationError):
    """Raised when a series cannot hold the requested segmentation"""
    pass


class FitError(HybridKinematicsError):
    """Base class for articulation model fitting errors"""
    pass


class InsufficientSamplesError(FitError):
    """Raised when a segment has fewer observations than the minimal sample"""
    pass


class DegenerateSampleError(FitError):
    """Raised when every drawn minimal sample was degenerate"""
    pass


class InferenceError(HybridKinematicsError):
    """Base class for changepoint inference errors"""
    def __init__(
        self,
        message: str,
        timestep: Optional[int] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        if timestep is not None:
            message = f"{message} (timestep {timestep})"
        super().__init__(message, details=details)
        self.timestep = timestep


class ParticleDepletionError(InferenceError):
    """Raised when every particle weight underflows at a timestep"""
    pass


class AutomatonError(HybridKinematicsError):
    """Base class for hybrid automaton construction and simulation errors"""
    pass


class NotATreeError(AutomatonError):
    """Raised when the kinematic graph is not a tree"""
    pass


class DisconnectedGraphError(AutomatonError):
    """Raised when candidate edges do not connect all parts"""
    pass


class ConfigurationOrderError(AutomatonError):
    """Raised when configurational changepoints are not strictly increasing"""
    pass


class InvariantViolationError(AutomatonError):
    """Raised when a continuous state lies outside its mode invariant"""
    pass
