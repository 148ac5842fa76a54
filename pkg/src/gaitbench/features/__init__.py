"""Gait feature extraction: method registry, templates and distances."""

from .base import (
    MethodDescriptor,
    REGISTRY,
    Template,
    extract_geometric_features,
    extract_template,
    get_method,
    method_centroid,
    method_ids,
    raw_template,
    template_distance,
    templates_from_csv,
    templates_to_csv,
)
from .body import BodyMap, CMU_SEMANTIC_JOINTS
from . import geometric as _geometric  # noqa: F401  (registers methods)
from . import raw as _raw  # noqa: F401  (registers methods)
from .raw import RAW_TARGET_FRAMES

__all__ = [
    "BodyMap",
    "CMU_SEMANTIC_JOINTS",
    "MethodDescriptor",
    "RAW_TARGET_FRAMES",
    "REGISTRY",
    "Template",
    "extract_geometric_features",
    "extract_template",
    "get_method",
    "method_centroid",
    "method_ids",
    "raw_template",
    "template_distance",
    "templates_from_csv",
    "templates_to_csv",
]
