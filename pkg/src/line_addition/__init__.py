"""Synthesise one new line for an existing transit network."""

from .algorithm import RunResult, line_addition
from .config import CostTable, EfficiencyConfig, LineConstructionConfig, Regression
from .core import DemandMatrix, Edge, Line, Network, Station
from .pathfinder import Path, PathStrategy, Router, best_path

__all__ = [
    "CostTable",
    "DemandMatrix",
    "Edge",
    "EfficiencyConfig",
    "Line",
    "LineConstructionConfig",
    "Network",
    "Path",
    "PathStrategy",
    "Regression",
    "Router",
    "RunResult",
    "Station",
    "best_path",
    "line_addition",
]
