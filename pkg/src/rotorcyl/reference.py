"""Slow, dict-based rotor aggregation used as an independent oracle.

This is a direct transcription of the walk rules with no performance tricks:
rotors live in a dict, occupancy in a set.  The production engine
(:mod:`rotorcyl.engine`) is property-tested against this implementation on
randomized small instances; keep the two free of shared walk code.
"""
from __future__ import annotations

from .errors import RunawayWalkError
from .hashing import Stream, cell_hash, source_hash
from .lattice import BOUNDARY_ORDER, BULK_ORDER, N, neighbor


class ReferenceSimulation:
    def __init__(self, L, seed=0, mode="random", sigma=None, boundary_order=BOUNDARY_ORDER):
        self.L = L
        self.seed = seed
        self.mode = mode
        self.sigma = list(range(L)) if sigma is None else [int(c) for c in sigma]
        self.boundary_order = tuple(boundary_order)
        self.occupied = set()
        self.rotors = {}  # (x, y) -> index into the cell's order
        self.n_particles = 0
        if mode == "random":
            self.source_index = source_hash(seed) % L
        else:
            self.source_index = 0

    def order_of(self, v):
        return self.boundary_order if v[1] == 0 else BULK_ORDER

    def rotor_index(self, v):
        if v not in self.rotors:
            self.rotors[v] = self._initial_index(v)
        return self.rotors[v]

    def _initial_index(self, v):
        x, y = v
        deg = len(self.order_of(v))
        if self.mode == "random":
            return cell_hash(self.seed, x, y) % deg
        if self.mode.startswith("all-"):
            d = "NESW".index(self.mode[-1])
            order = self.order_of(v)
            return order.index(d) if d in order else 0
        raise ValueError(f"unsupported mode {self.mode!r}")

    def run_walk(self, step_cap=None):
        """One walk from the source; returns (settle_cell, steps, rotation_counts)."""
        if step_cap is None:
            full_rows = min((self._height(x) for x in range(self.L)), default=0) + 2
            step_cap = 4 * self.L * (2 * full_rows * full_rows + full_rows + 1)
        self.source_index = (self.source_index + 1) % self.L
        pos = (self.sigma[self.source_index], 0)
        steps = 1
        rotations = {"source": 1}
        while pos in self.occupied:
            order = self.order_of(pos)
            idx = (self.rotor_index(pos) + 1) % len(order)
            self.rotors[pos] = idx
            rotations[pos] = rotations.get(pos, 0) + 1
            pos = neighbor(pos, order[idx], self.L)
            steps += 1
            if steps > step_cap:
                raise RunawayWalkError(f"walk exceeded {step_cap} steps")
        self.occupied.add(pos)
        self.n_particles += 1
        return pos, steps, rotations

    def run(self, n_walks):
        for _ in range(n_walks):
            self.run_walk()
        return self

    def _height(self, x):
        h = 0
        while (x, h) in self.occupied:
            h += 1
        return h

    def heights(self):
        return [self._height(x) for x in range(self.L)]

    def state_fingerprint(self, rows):
        """Rotor indices over rows 0..rows-1 plus source index, for equality checks."""
        cells = tuple(
            self.rotor_index((x, y)) for y in range(rows) for x in range(self.L)
        )
        return (self.source_index, cells)


class ReferenceRandomWalkSimulation:
    """Random-walk counterpart: direction drawn uniformly instead of rotor-driven."""

    def __init__(self, L, seed=0, sigma=None):
        self.L = L
        self.sigma = list(range(L)) if sigma is None else [int(c) for c in sigma]
        self.occupied = set()
        self.n_particles = 0
        self.source_index = 0
        self.stream = Stream(seed, tag=0x1D1A)

    def run_walk(self, step_cap=None):
        if step_cap is None:
            step_cap = 1_000_000 * self.L
        self.source_index = (self.source_index + 1) % self.L
        pos = (self.sigma[self.source_index], 0)
        steps = 1
        while pos in self.occupied:
            order = BOUNDARY_ORDER if pos[1] == 0 else BULK_ORDER
            pos = neighbor(pos, order[self.stream.below(len(order))], self.L)
            steps += 1
            if steps > step_cap:
                raise RunawayWalkError(f"walk exceeded {step_cap} steps")
        self.occupied.add(pos)
        self.n_particles += 1
        return pos, steps
