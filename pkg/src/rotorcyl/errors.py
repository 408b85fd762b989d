"""Exception types shared across the package."""
from __future__ import annotations


class RotorCylError(Exception):
    """Base class for all package errors."""


class NoSuchEdgeError(RotorCylError):
    """A direction was requested that the vertex has no outgoing edge for."""


class StratifiedClusterError(RotorCylError):
    """A cluster column is not contiguously occupied from the bottom row."""


class RunawayWalkError(RotorCylError):
    """A single walk exceeded its step cap; indicates a bug or corrupted dynamics."""


class InvariantViolation(RotorCylError):
    """An exact invariant that should hold universally was observed to fail."""
