"""Unsupervised extraction and clustering of urban traffic scenarios.

The package turns drone-style trajectory recordings into a catalog of
concrete ego/challenger scenarios: a spatiotemporal proximity filter
finds interacting road-user pairs, principal feature analysis picks the
informative motion features, each scenario is rendered into an
ego-relative multi-channel grid, and hierarchical clustering groups the
grids into scenario types that can be validated against external labels.
"""
from __future__ import annotations

__version__ = "0.1.0"

from scenex.errors import CoverageError, GenerationError, IntegrityError, SchemaError
from scenex.trajectory import Recording, Trajectory, parse_recording, write_recording
from scenex.petfilter import (
    ConcreteScenario,
    FilterParams,
    InteractionRecord,
    detect_interaction,
    extract_scenarios,
)
from scenex.pfa import PfaResult, principal_feature_analysis
from scenex.grids import (
    GridParams,
    KeyFrame,
    ScenarioTensor,
    build_cluster_input,
    build_tensor,
    flatten,
    key_frame,
    rasterize,
    unflatten,
    yaw_rate,
)
# The clustering entry point is scenex.hac.hac; re-exporting the function
# here would shadow the submodule attribute of the same name.
from scenex.hac import Dendrogram, cut
from scenex.validation import LabelSet, ValidationReport, accuracy_curve, overall_accuracy
from scenex.synth import TEMPLATES, GroundTruth, generate

__all__ = [
    "__version__",
    "CoverageError",
    "GenerationError",
    "IntegrityError",
    "SchemaError",
    "Recording",
    "Trajectory",
    "parse_recording",
    "write_recording",
    "ConcreteScenario",
    "FilterParams",
    "InteractionRecord",
    "detect_interaction",
    "extract_scenarios",
    "PfaResult",
    "principal_feature_analysis",
    "GridParams",
    "KeyFrame",
    "ScenarioTensor",
    "build_cluster_input",
    "build_tensor",
    "flatten",
    "key_frame",
    "rasterize",
    "unflatten",
    "yaw_rate",
    "Dendrogram",
    "cut",
    "LabelSet",
    "ValidationReport",
    "accuracy_curve",
    "overall_accuracy",
    "TEMPLATES",
    "GroundTruth",
    "generate",
]
