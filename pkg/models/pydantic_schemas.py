from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Any, Dict, List, Literal, Optional

SCHEMA_VERSION = 1

_K_Q = {'rigid': 6, 'prismatic': 8, 'revolute': 9}


class StrictModel(BaseModel):
    model_config = ConfigDict(extra='forbid')


class ArticulationModelSchema(StrictModel):
    kind: Literal['rigid', 'prismatic', 'revolute']
    theta: Dict[str, Any] = Field(..., description="Model parameter record")
    k_q: int = Field(..., description="BIC parameter count")

    @model_validator(mode='after')
    def check_k_q(self):
        if self.k_q != _K_Q[self.kind]:
            raise ValueError(f"k_q for {self.kind} must be {_K_Q[self.kind]}, got {self.k_q}")
        return self


class SegmentSchema(StrictModel):
    t0: int = Field(..., ge=0)
    t1: int
    model: ArticulationModelSchema
    log_evidence: float
    gamma: Optional[float] = None


class ConfigSegmentSchema(StrictModel):
    c_start: float
    c_end: float
    extent: float = Field(..., description="Configurational length used by the automaton")
    c_max: float
    kind: Literal['rigid', 'prismatic', 'revolute']


class SegmentationSchema(StrictModel):
    tau: List[int]
    segments: List[SegmentSchema]
    log_map_score: float
    configurational: List[ConfigSegmentSchema] = Field(default_factory=list)
    schema_version: Literal[1] = SCHEMA_VERSION


class AutomatonEdgeSchema(StrictModel):
    i: str
    j: str
    models: List[ArticulationModelSchema]
    config_changepoints: List[float] = Field(..., description="Boundaries c̃ from 0, one more than models")


class IntervalSchema(StrictModel):
    lower: float
    upper: float
    upper_closed: bool


class ModeSchema(StrictModel):
    id: int
    models: List[int]
    offset: List[float]
    invariant: List[IntervalSchema]


class GuardSchema(StrictModel):
    id: str
    source: int
    target: int
    kind: Literal['cross', 'clamp_lower', 'clamp_upper']
    coordinate: int
    op: Literal['>=', '>', '<']
    threshold: float
    local_threshold: float


class InitSchema(StrictModel):
    mode: int
    x: List[float]


class AutomatonSchema(StrictModel):
    parts: List[str]
    edges: List[AutomatonEdgeSchema]
    modes: List[ModeSchema]
    guards: List[GuardSchema]
    init: InitSchema
    schema_version: Literal[1] = SCHEMA_VERSION


class TrueSegmentSchema(StrictModel):
    t0: int
    t1: int
    model: ArticulationModelSchema


class LabelsSchema(StrictModel):
    spec: Dict[str, Any]
    tau: List[int]
    segments: List[TrueSegmentSchema]
    config_boundaries: List[float]
    gaps: List[List[int]] = Field(default_factory=list, description="[start, length] of zero-action gaps")
    schema_version: Literal[1] = SCHEMA_VERSION
