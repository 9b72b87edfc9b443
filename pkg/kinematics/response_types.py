from dataclasses import dataclass, field
from typing import Dict, Any, Optional, TYPE_CHECKING

from . import error_types

if TYPE_CHECKING:
    from .articulation import ArticulationModel, ModelKind


@dataclass
class ErrorDetails:
    """Detailed error information"""
    type: str
    message: str
    details: Optional[Dict[str, Any]] = None


@dataclass
class FitResult:
    """Outcome of fitting one articulation model to one segment"""
    success: bool
    kind: 'ModelKind'
    model: Optional['ArticulationModel'] = None
    loglik: float = float('-inf')
    gamma: Optional[float] = None
    n_observations: int = 0
    error: Optional[ErrorDetails] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def success_result(
        cls,
        kind: 'ModelKind',
        model: 'ArticulationModel',
        loglik: float,
        gamma: float,
        n_observations: int,
        metadata: Optional[Dict[str, Any]] = None
    ) -> 'FitResult':
        """Create a successful result"""
        return cls(
            success=True,
            kind=kind,
            model=model,
            loglik=loglik,
            gamma=gamma,
            n_observations=n_observations,
            metadata=metadata or {}
        )

    @classmethod
    def error_result(
        cls,
        kind: 'ModelKind',
        error_type: str,
        error_message: str,
        error_details: Optional[Dict[str, Any]] = None,
        n_observations: int = 0
    ) -> 'FitResult':
        """Create an error result"""
        return cls(
            success=False,
            kind=kind,
            n_observations=n_observations,
            error=ErrorDetails(
                type=error_type,
                message=error_message,
                details=error_details
            )
        )

    def raise_for_error(self) -> 'FitResult':
        """Raise the matching FitError subclass when this result is a failure"""
        if self.success:
            return self
        error_cls = getattr(error_types, self.error.type, error_types.FitError)
        if not (isinstance(error_cls, type) and issubclass(error_cls, error_types.FitError)):
            error_cls = error_types.FitError
        raise error_cls(self.error.message, details=self.error.details)
