"""Geometry of the semi-infinite cylinder and its rotor direction orders.

The lattice has `L` columns (indices 0..L-1, wrapping modulo L) and rows
y >= 0.  A single source vertex sits below row 0 and owns one directed edge
to every row-0 cell; no edge points back from the lattice to the source.

Out-edge orders, fixed once and cycled by the rotors:

* bulk cells (y >= 1): N, E, S, W  (clockwise)
* bottom cells (y = 0): W, N, E   (three edges; there is no S edge)
* source: its L edges in the order given by a column permutation

Vertices are plain ``(x, y)`` tuples; the source is the module-level
:data:`SOURCE` sentinel.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import NoSuchEdgeError
from .hashing import Stream

# direction codes; the bulk rotor order is exactly this numbering
N, E, S, W = 0, 1, 2, 3
DIRECTION_LETTERS = "NESW"

BULK_ORDER = (N, E, S, W)
BOUNDARY_ORDER = (W, N, E)


class _Source:
    """Singleton identity of the source vertex."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "S"


SOURCE = _Source()

Vertex = Union[_Source, tuple]


@dataclass(frozen=True)
class RotorOrder:
    """Ordered outgoing directions of one vertex class.

    ``directions`` holds direction codes for cells, or target column indices
    for the source.
    """

    kind: str  # "bulk" | "boundary" | "source"
    directions: tuple

    def __len__(self) -> int:
        return len(self.directions)

    def after(self, index: int) -> int:
        """Index following `index` in the cyclic order."""
        return (index + 1) % len(self.directions)


def is_cell(v: Vertex) -> bool:
    return isinstance(v, tuple)


def neighbor(v: Vertex, d: int, L: int) -> tuple:
    """Target of the out-edge of cell `v` in direction `d`.

    E/W wrap modulo L; S from a bottom cell does not exist (raises
    :class:`NoSuchEdgeError`), and the source has no cell-directed calls here.
    """
    if not is_cell(v):
        raise NoSuchEdgeError("no such edge: source edges are addressed by column, not direction")
    x, y = v
    if d == N:
        return (x, y + 1)
    if d == E:
        return ((x + 1) % L, y)
    if d == W:
        return ((x - 1) % L, y)
    if d == S:
        if y == 0:
            raise NoSuchEdgeError(f"no such edge: bottom cell {v} has no S edge")
        return (x, y - 1)
    raise NoSuchEdgeError(f"no such edge: unknown direction {d!r}")


def rotor_order(v: Vertex, L: int, sigma: Sequence[int] | None = None) -> RotorOrder:
    """Rotor order of vertex `v`: source permutation, boundary triple, or bulk quad."""
    if not is_cell(v):
        perm = source_permutation(L) if sigma is None else np.asarray(sigma, dtype=np.int64)
        return RotorOrder("source", tuple(int(c) for c in perm))
    _, y = v
    if y == 0:
        return RotorOrder("boundary", BOUNDARY_ORDER)
    return RotorOrder("bulk", BULK_ORDER)


def out_degree(v: Vertex, L: int) -> int:
    if not is_cell(v):
        return L
    return 3 if v[1] == 0 else 4


def source_permutation(L: int, kind: str | Sequence[int] = "identity", seed: int = 0) -> np.ndarray:
    """Column permutation used as the source's rotor order.

    `kind` is "identity", "random" (seed-derived), or an explicit sequence,
    which is validated to be a bijection on 0..L-1.
    """
    if isinstance(kind, str):
        if kind == "identity":
            return np.arange(L, dtype=np.int64)
        if kind == "random":
            cols = Stream(seed, tag=0x5193A).shuffle(list(range(L)))
            return np.asarray(cols, dtype=np.int64)
        raise ValueError(f"unknown source permutation kind {kind!r}")
    perm = np.asarray(list(kind), dtype=np.int64)
    if perm.shape != (L,) or sorted(perm.tolist()) != list(range(L)):
        raise ValueError(f"not a permutation of 0..{L - 1}: {perm.tolist()}")
    return perm


def slab_vertices(L: int, K: int) -> Iterable[Vertex]:
    """Source plus all cells of rows 0..K-1."""
    yield SOURCE
    for y in range(K):
        for x in range(L):
            yield (x, y)


def slab_out_degree_sum(L: int, K: int) -> int:
    """Total out-degree over the source and rows 0..K-1.

    Row K-1 north edges count toward the total (in the finite slab graph they
    are redirected into the source-merged sink), giving 4*K*L.
    """
    return sum(out_degree(v, L) for v in slab_vertices(L, K))
