"""Robust ordinal preference learning over feature subsets with interactions."""

from .core import (
    Alternative,
    ConflictingRatings,
    GroundSet,
    Model,
    PreferenceSet,
    RatedDataset,
    ValueFunction,
    derive_preferences,
    evaluate,
    indicator,
)

__all__ = [
    "Alternative",
    "ConflictingRatings",
    "GroundSet",
    "Model",
    "PreferenceSet",
    "RatedDataset",
    "ValueFunction",
    "derive_preferences",
    "evaluate",
    "indicator",
]

__version__ = "0.1.0"
