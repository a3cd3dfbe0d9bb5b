"""Executable search machinery for Turán problems on subdivisions of K_{s,t}."""

from .errors import DomainError, InputError, PreconditionError, TuranLabError
from .graph import Graph, build_graph
from .io import read_graph
from .subdivision import Embedding, PatternSpec, contains_subdivision, verify_embedding

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "Embedding",
    "Graph",
    "InputError",
    "PatternSpec",
    "PreconditionError",
    "TuranLabError",
    "build_graph",
    "contains_subdivision",
    "read_graph",
    "verify_embedding",
]
