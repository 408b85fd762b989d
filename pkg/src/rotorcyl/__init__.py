"""Rotor-router aggregation on semi-infinite cylinders.

Exact verification of flat growth boundaries, multi-Eulerian tour machinery on
the finite slab graph, multicycle tour decompositions, a random-walk
aggregation baseline, and a 45-degree-turned lattice variant.
"""
from .engine import (
    AggregateResult,
    BoundaryProfile,
    Cluster,
    RotorState,
    Simulation,
    WalkStats,
    aggregate,
    boundary_profile,
    init_rotors,
    snapshot_dumps,
    snapshot_loads,
)
from .errors import (
    InvariantViolation,
    NoSuchEdgeError,
    RotorCylError,
    RunawayWalkError,
    StratifiedClusterError,
)
from .lattice import SOURCE, neighbor, out_degree, rotor_order, source_permutation

__version__ = "0.1.0"

__all__ = [
    "AggregateResult",
    "BoundaryProfile",
    "Cluster",
    "InvariantViolation",
    "NoSuchEdgeError",
    "RotorCylError",
    "RotorState",
    "RunawayWalkError",
    "Simulation",
    "SOURCE",
    "StratifiedClusterError",
    "WalkStats",
    "aggregate",
    "boundary_profile",
    "init_rotors",
    "neighbor",
    "out_degree",
    "rotor_order",
    "snapshot_dumps",
    "snapshot_loads",
    "source_permutation",
    "__version__",
]
