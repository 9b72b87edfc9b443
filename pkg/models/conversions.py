"""Conversions between domain objects and their wire schemas."""
import json

from kinematics.articulation import ArticulationModel, model_from_theta
from .pydantic_schemas import ArticulationModelSchema


def model_to_schema(model: ArticulationModel) -> ArticulationModelSchema:
    return ArticulationModelSchema(kind=model.kind.value, theta=model.theta(), k_q=model.k_q)


def model_from_schema(schema: ArticulationModelSchema) -> ArticulationModel:
    return model_from_theta(schema.kind, schema.theta)


def dumps(schema) -> str:
    """Fixed key order, indent 2, shortest round-trip float repr."""
    return json.dumps(schema.model_dump(mode='json'), indent=2) + "\n"
