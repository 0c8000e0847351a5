"""KMS states, trace states and ground states of generalized gauge actions
on the C*-algebra of a finite directed graph."""

from kmsgraph.config import DEFAULT_LIMITS, DEFAULT_TOLERANCES, Limits, Tolerances
from kmsgraph.errors import (
    CycleLimitError,
    GraphInputError,
    KmsGraphError,
    NoCriticalBetaError,
    NotSummableError,
    NumericalError,
    PreconditionError,
    RepresentationError,
)
from kmsgraph.graph import Component, Edge, Graph, Path, SignProfile

__all__ = [
    "Component",
    "CycleLimitError",
    "DEFAULT_LIMITS",
    "DEFAULT_TOLERANCES",
    "Edge",
    "Graph",
    "GraphInputError",
    "KmsGraphError",
    "Limits",
    "NoCriticalBetaError",
    "NotSummableError",
    "NumericalError",
    "Path",
    "PreconditionError",
    "RepresentationError",
    "SignProfile",
    "Tolerances",
]

__version__ = "0.1.0"
