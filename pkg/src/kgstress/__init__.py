"""Structural hallucination diagnostics for LLM-generated knowledge graphs."""
from __future__ import annotations

__version__ = "0.1.0"

from .graph import EdgeKind, KGError, KnowledgeGraph, NodeKind, normalize_label
from .graph_io import read_graph, write_graph
from .stress import StressConfig, StressReport, run_stress_test

__all__ = [
    "EdgeKind",
    "KGError",
    "KnowledgeGraph",
    "NodeKind",
    "StressConfig",
    "StressReport",
    "normalize_label",
    "read_graph",
    "run_stress_test",
    "write_graph",
    "__version__",
]
