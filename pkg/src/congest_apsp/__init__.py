"""Exact weighted shortest paths in a simulated CONGEST network."""
from .config import Config
from .driver import ScalingRun, apsp, kssp, verify_distributed
from .engine import RoundEngine, RoundStats
from .errors import (BadSpec, CongestError, GraphError, TooLarge, VerificationFailed)
from .generators import generate
from .graph import WeightedDigraph, parse_graph, read_graph, serialize_graph, write_graph

__all__ = [
    "BadSpec", "Config", "CongestError", "GraphError", "RoundEngine", "RoundStats",
    "ScalingRun", "TooLarge", "VerificationFailed", "WeightedDigraph", "apsp", "generate",
    "kssp", "parse_graph", "read_graph", "serialize_graph", "verify_distributed", "write_graph",
]
