"""Capacity-bounded room allocation that minimizes links inside rooms."""

from .graph_core import (
    Assignment,
    Graph,
    GraphStats,
    InfeasibleError,
    MoveDelta,
    ObjectiveReport,
    ValidationError,
    Violation,
    build_graph,
    capacity_for,
    delta_move,
    neighbors_in_room,
    objective,
    stats,
    validate,
)
from .solvers import (
    AdjustPlan,
    CurvePoint,
    MoveRecord,
    OracleBoundError,
    SolveResult,
    SolverConfig,
    curve,
    exact,
    hfa,
    lga,
    random_baseline,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustPlan",
    "Assignment",
    "CurvePoint",
    "Graph",
    "GraphStats",
    "InfeasibleError",
    "MoveDelta",
    "MoveRecord",
    "ObjectiveReport",
    "OracleBoundError",
    "SolveResult",
    "SolverConfig",
    "ValidationError",
    "Violation",
    "build_graph",
    "capacity_for",
    "curve",
    "delta_move",
    "exact",
    "hfa",
    "lga",
    "neighbors_in_room",
    "objective",
    "random_baseline",
    "stats",
    "validate",
]
