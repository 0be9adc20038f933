"""Merit-based envy-free egalitarian matching of TAs to courses."""

from .core import (
    TA,
    BipartiteGraph,
    CapacityMismatch,
    Course,
    InfeasibleMatching,
    Instance,
    InvalidInstance,
    MalformedMatching,
    Matching,
    MEFEError,
    PreconditionViolated,
    ResourceBound,
    TiesPresent,
    VerificationReport,
    Violation,
    avg_util,
    build_graph,
    envy_pairs,
    is_weakly_stable,
    make_instance,
    verify,
)
from .oracle import SolverOutcome, enumerate_all_mefe, solve_bruteforce
from .polycases import dispatch

__version__ = "0.1.0"

__all__ = [
    "TA", "BipartiteGraph", "CapacityMismatch", "Course", "InfeasibleMatching", "Instance",
    "InvalidInstance", "MalformedMatching", "Matching", "MEFEError", "PreconditionViolated",
    "ResourceBound", "TiesPresent", "VerificationReport", "Violation", "avg_util", "build_graph",
    "envy_pairs", "is_weakly_stable", "make_instance", "verify", "SolverOutcome",
    "enumerate_all_mefe", "solve_bruteforce", "dispatch",
]
