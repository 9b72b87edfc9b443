"""Run configuration: flat key=value files, overridden by command-line flags."""
from __future__ import annotations

from pathlib import Path
from typing import Any, Dict, Literal, Optional, Type, TypeVar

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError as PydanticValidationError, model_validator

from logger import log_error
from changepoint.detector import DetectorSettings
from changepoint.evidence import DetectionMode
from changepoint.prior import SegmentLengthPrior
from changepoint.segmentation import DEFAULT_RIGID_EXTENT
from kinematics.error_types import ConfigurationError
from kinematics.mlesac import FitSettings
from kinematics.observation import DEFAULT_OUTLIER_VOLUME, NoiseModel

ConfigT = TypeVar('ConfigT', bound=BaseModel)


class RunConfig(BaseModel):
    """Every tunable of detect/build/simulate. Unknown keys are rejected."""
    model_config = ConfigDict(extra='forbid')

    prior_p: float = Field(0.01, gt=0, lt=1, description="Geometric segment-length parameter")
    min_len: int = Field(10, ge=2)
    max_len: int = Field(10000, ge=2)
    sigma_trans: float = Field(0.005, gt=0)
    sigma_rot: float = Field(0.01, gt=0)
    gamma: float = Field(0.02, ge=0, le=1)
    outlier_weight: float = Field(1.0, gt=0)
    outlier_volume: float = Field(DEFAULT_OUTLIER_VOLUME, gt=0)
    fit_gamma: bool = True
    particles: int = Field(100, ge=1, description="Particle cap M")
    mlesac_iters: int = Field(100, ge=1)
    refine_steps: int = Field(10, ge=0)
    refine_tol: float = Field(1e-10, gt=0)
    stride: int = Field(10, ge=1)
    polish_iters: int = Field(0, ge=0, description="MLESAC iterations of the final re-fit; 0 disables it")
    mode: Literal['action-conditional', 'observation-only'] = 'action-conditional'
    seed: int = Field(0, ge=0)
    rigid_extent: float = Field(DEFAULT_RIGID_EXTENT, gt=0)
    input: Optional[str] = None
    output: Optional[str] = None

    @model_validator(mode='after')
    def check_lengths(self):
        if self.max_len < self.min_len:
            raise ValueError(f"max_len ({self.max_len}) must be at least min_len ({self.min_len})")
        return self

    def noise_model(self) -> NoiseModel:
        return NoiseModel(self.sigma_trans, self.sigma_rot, self.gamma, self.outlier_weight,
                          self.outlier_volume).validate()

    def prior(self) -> SegmentLengthPrior:
        return SegmentLengthPrior(self.prior_p, self.min_len, self.max_len).validate()

    def fit_settings(self, iterations: Optional[int] = None) -> FitSettings:
        return FitSettings(
            iterations=iterations or self.mlesac_iters,
            refine_steps=self.refine_steps,
            refine_tol=self.refine_tol,
            fit_gamma=self.fit_gamma,
        ).validate()

    def detector_settings(self) -> DetectorSettings:
        return DetectorSettings(
            particles=self.particles,
            stride=self.stride,
            mode=DetectionMode(self.mode),
            seed=self.seed,
            fit=self.fit_settings(),
        ).validate()


def _read_pairs(path: Path) -> Dict[str, Any]:
    if not path.is_file():
        log_error("Config file not found", extra={'path': str(path)})
        raise ConfigurationError(f"config file not found: {path}", {'path': str(path)})
    values = dotenv_values(path)
    empty = [key for key, value in values.items() if value is None or value == '']
    if empty:
        raise ConfigurationError(f"config keys without a value: {', '.join(empty)}", {'keys': empty})
    return dict(values)


def load_config(model: Type[ConfigT], path: Optional[Path] = None,
                overrides: Optional[Dict[str, Any]] = None) -> ConfigT:
    """Build ``model`` from an optional key=value file plus non-None overrides.

    Raises:
        ConfigurationError: on unknown keys, unparsable or out-of-range values
    """
    values: Dict[str, Any] = _read_pairs(Path(path)) if path is not None else {}
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return model.model_validate(values)
    except PydanticValidationError as e:
        errors = e.errors(include_url=False, include_context=False)
        first = errors[0]
        where = ".".join(str(p) for p in first['loc']) or model.__name__
        log_error("Invalid configuration", extra={'config': model.__name__, 'errors': errors})
        raise ConfigurationError(f"invalid {where}: {first['msg']}", {'errors': errors})


def config_summary(config: BaseModel) -> Dict[str, Any]:
    """JSON-ready view used for logging."""
    return config.model_dump(mode='json')
