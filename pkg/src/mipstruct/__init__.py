"""Loop-structure recovery and benchmark-instance tooling for MILP models."""

from .model import (
    Integrality,
    Model,
    ModelBuilder,
    ModelStats,
    ObjSense,
    Row,
    Sense,
    Variable,
    ViolationRecord,
    evaluate_solution,
    model_stats,
)
from .mps_io import parse_mps, serialize_model

__all__ = [
    "Integrality",
    "Model",
    "ModelBuilder",
    "ModelStats",
    "ObjSense",
    "Row",
    "Sense",
    "Variable",
    "ViolationRecord",
    "evaluate_solution",
    "model_stats",
    "parse_mps",
    "serialize_model",
]

__version__ = "0.1.0"
