"""Rotor-router aggregation engine on the semi-infinite cylinder.

The dynamics: particles ("chips") enter one at a time from the source, which
cycles through its column permutation; a chip standing on an occupied cell
advances that cell's rotor one position and moves along the new direction; the
first unoccupied cell reached absorbs the chip (its own rotor is not touched).

State is held in numpy arrays and advanced by the jitted kernels in
:mod:`rotorcyl._kernels`; a dict-based oracle lives in
:mod:`rotorcyl.reference`.  Initial rotor orientations are a pure function of
``(seed, x, y)``, so results do not depend on how many rows happen to be
instantiated.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import InvariantViolation, RunawayWalkError, StratifiedClusterError
from .hashing import cell_hash_grid, source_hash
from .lattice import (
    BOUNDARY_ORDER,
    BULK_ORDER,
    DIRECTION_LETTERS,
    SOURCE,
    Vertex,
    is_cell,
    source_permutation,
)

MODES = ("random", "all-N", "all-E", "all-S", "all-W")

_STATUS_ERRORS = {
    _kernels.STRATIFIED: (StratifiedClusterError, "stratified cluster"),
    _kernels.RUNAWAY: (RunawayWalkError, "runaway walk"),
    _kernels.PATTERN: (InvariantViolation, "boundary pattern violation"),
    _kernels.CROSSING: (InvariantViolation, "top-edge crossing violation"),
    _kernels.CAPACITY: (RunawayWalkError, "row capacity exceeded"),
}


class RotorState:
    """Rotor indices for every instantiated cell plus the source rotor.

    A cell's index points into its order (bulk N,E,S,W; bottom row W,N,E); the
    source index points into the column permutation.  Initial values come from
    `mode`: "random" hashes (seed, x, y), "all-D" parks every rotor on
    direction D (cells lacking D fall back to the first entry of their order),
    and `explicit` overrides individual vertices on top of that base.
    """

    def __init__(self, L, seed=0, mode="random", explicit=None,
                 boundary_order=BOUNDARY_ORDER):
        if L < 2:
            raise ValueError("circumference must be at least 2")
        if mode not in MODES:
            raise ValueError(f"unknown rotor mode {mode!r}; expected one of {MODES}")
        self.L = int(L)
        self.seed = int(seed)
        self.mode = mode
        self.boundary_order = tuple(int(d) for d in boundary_order)
        self.explicit = {} if explicit is None else dict(explicit)
        self._validate_explicit()
        self.cells = np.zeros((0, L), dtype=np.int8)
        if SOURCE in self.explicit:
            self.source_index = int(self.explicit[SOURCE])
        elif mode == "random":
            self.source_index = source_hash(self.seed) % L
        else:
            self.source_index = 0

    def _validate_explicit(self):
        for v, idx in self.explicit.items():
            deg = self.L if v is SOURCE else (3 if v[1] == 0 else 4)
            if not 0 <= int(idx) < deg:
                raise ValueError(f"explicit rotor index {idx} out of range for {v!r}")

    def order_of(self, v: Vertex):
        if not is_cell(v):
            raise ValueError("the source order is the column permutation; see Simulation.sigma")
        return self.boundary_order if v[1] == 0 else BULK_ORDER

    def ensure_rows(self, rows: int) -> None:
        have = self.cells.shape[0]
        if rows <= have:
            return
        grid = cell_hash_grid(self.seed, rows, self.L)[have:]
        if self.mode == "random":
            fresh = (grid % np.uint64(4)).astype(np.int8)
            if have == 0:
                fresh[0] = (grid[0] % np.uint64(3)).astype(np.int8)
        else:
            d = DIRECTION_LETTERS.index(self.mode[-1])
            fresh = np.full((rows - have, self.L), d, dtype=np.int8)
            if have == 0:
                bottom = self.boundary_order.index(d) if d in self.boundary_order else 0
                fresh[0] = bottom
        self.cells = np.concatenate([self.cells, fresh])
        for v, idx in self.explicit.items():
            if v is SOURCE:
                continue
            x, y = v
            if have <= y < rows:
                self.cells[y, x] = idx

    def index_of(self, v: Vertex) -> int:
        if not is_cell(v):
            return self.source_index
        x, y = v
        self.ensure_rows(y + 1)
        return int(self.cells[y, x])

    def direction_of(self, v: Vertex) -> int:
        return self.order_of(v)[self.index_of(v)]

    def set_index(self, v: Vertex, idx: int) -> None:
        if not is_cell(v):
            self.source_index = int(idx)
            return
        x, y = v
        self.ensure_rows(y + 1)
        self.cells[y, x] = idx

    def as_dict(self, rows: int) -> dict:
        self.ensure_rows(rows)
        out = {SOURCE: self.source_index}
        for y in range(rows):
            for x in range(self.L):
                out[(x, y)] = int(self.cells[y, x])
        return out


def init_rotors(L, seed=0, mode="random", explicit=None) -> RotorState:
    """Build a rotor state; see :class:`RotorState` for the mode semantics."""
    return RotorState(L, seed=seed, mode=mode, explicit=explicit)


class Cluster:
    """Occupied region of the cylinder: occupancy grid plus derived counters."""

    def __init__(self, L):
        self.L = int(L)
        self.occ = np.zeros((0, L), dtype=np.uint8)
        self.heights = np.zeros(L, dtype=np.int64)
        self.row_count = np.zeros(0, dtype=np.int64)
        self.n = 0
        self.top = -1        # highest occupied row, -1 when empty
        self.full_rows = 0   # contiguous fully-occupied rows from the bottom

    def ensure_rows(self, rows: int) -> None:
        have = self.occ.shape[0]
        if rows <= have:
            return
        self.occ = np.concatenate([self.occ, np.zeros((rows - have, self.L), np.uint8)])
        self.row_count = np.concatenate(
            [self.row_count, np.zeros(rows - have, np.int64)]
        )

    def occupied(self, v) -> bool:
        x, y = v
        return y <= self.top and bool(self.occ[y, x])

    @property
    def width(self) -> int:
        """(1 + top occupied row) minus the count of full bottom rows.

        Equals max height minus min height whenever columns are contiguous.
        """
        return (self.top + 1) - self.full_rows

    def column_heights(self) -> list:
        return [int(h) for h in self.heights]


@dataclass
class WalkStats:
    """Per-walk (or per-period) bookkeeping.

    ``rotations`` maps vertices (including SOURCE) to rotor advances;
    ``upward_crossings`` maps (x, y) to traversals of the edge to (x, y+1).
    """

    steps: int = 0
    rotations: dict = field(default_factory=dict)
    upward_crossings: dict = field(default_factory=dict)


@dataclass
class BoundaryProfile:
    heights: list
    min_height: int
    max_height: int
    width: int


def boundary_profile(cluster: Cluster) -> BoundaryProfile:
    """Column heights of a cluster, verified contiguous from the occupancy grid."""
    rows = cluster.top + 1
    occ = cluster.occ[:rows]
    counts = occ.sum(axis=0, dtype=np.int64)
    expected = np.arange(rows)[:, None] < counts[None, :]
    if not np.array_equal(occ != 0, expected):
        raise StratifiedClusterError("stratified cluster: a column has a gap")
    heights = [int(c) for c in counts]
    lo = min(heights) if heights else 0
    hi = max(heights) if heights else 0
    return BoundaryProfile(heights, lo, hi, hi - lo)


class Simulation:
    """A cluster, its rotor state, and the source permutation, advanced together."""

    def __init__(self, L, seed=0, mode="random", sigma=None, explicit=None,
                 boundary_order=BOUNDARY_ORDER):
        self.L = int(L)
        self.seed = int(seed)
        self.mode = mode
        self.sigma = (
            source_permutation(L) if sigma is None else source_permutation(L, sigma)
        )
        self.rotors = RotorState(L, seed=seed, mode=mode, explicit=explicit,
                                 boundary_order=boundary_order)
        self.cluster = Cluster(L)
        self._border = np.asarray(self.rotors.boundary_order, dtype=np.int8)
        self._up_cross = np.zeros((0, L), dtype=np.int64)
        self._none = np.zeros(0, dtype=np.int64)
        self._none2 = np.zeros((0, L), dtype=np.int64)

    @property
    def n_particles(self) -> int:
        return self.cluster.n

    def _sstate(self) -> np.ndarray:
        return np.array(
            [self.rotors.source_index, self.cluster.n, self.cluster.full_rows,
             self.cluster.top],
            dtype=np.int64,
        )

    def _writeback(self, sstate) -> None:
        self.rotors.source_index = int(sstate[_kernels.SRC])
        self.cluster.n = int(sstate[_kernels.NPART])
        self.cluster.full_rows = int(sstate[_kernels.FULL])
        self.cluster.top = int(sstate[_kernels.TOP])

    def _grow(self, n_walks: int) -> None:
        rows = self.cluster.top + n_walks + 2
        self.rotors.ensure_rows(rows)
        self.cluster.ensure_rows(rows)
        if self._up_cross.shape[0] < rows:
            grown = np.zeros((rows, self.L), dtype=np.int64)
            grown[: self._up_cross.shape[0]] = self._up_cross
            self._up_cross = grown

    def _run(self, n_walks, *, track_rot=False, rot_count=None, width_trace=None,
             period_steps=None, check_pattern=False, check_crossing=False):
        self._grow(n_walks)
        sstate = self._sstate()
        res = _kernels.rotor_walks(
            n_walks,
            self.rotors.cells,
            self.cluster.occ,
            self.cluster.heights,
            self.cluster.row_count,
            self.sigma,
            sstate,
            self._border,
            self._up_cross,
            rot_count if rot_count is not None else self._none2,
            width_trace if width_trace is not None else self._none,
            period_steps if period_steps is not None else self._none,
            track_rot,
            check_pattern,
            check_crossing,
        )
        self._writeback(sstate)
        status, walks_done = res[0], res[1]
        if status != _kernels.OK:
            err, label = _STATUS_ERRORS[status]
            raise err(f"{label} at walk {self.cluster.n} "
                      f"(L={self.L}, seed={self.seed})")
        return res

    def run_walk(self) -> tuple:
        """One walk; returns (settled_cell, stats)."""
        self._grow(1)
        rot_count = np.zeros((self.rotors.cells.shape[0], self.L), dtype=np.int64)
        period_aligned = self.cluster.n % self.L == 0
        before = None if period_aligned else self._up_cross.copy()
        res = self._run(1, track_rot=True, rot_count=rot_count)
        _, _, x, y, steps, _ = res
        delta = self._up_cross if before is None else self._up_cross - before
        stats = WalkStats(
            steps=int(steps),
            rotations=self._rotation_dict(rot_count, source_rotations=1),
            upward_crossings=self._crossing_dict(delta),
        )
        return (int(x), int(y)), stats

    def run_period(self) -> WalkStats:
        """Exactly L walks; the particle count must be a multiple of L."""
        if self.cluster.n % self.L != 0:
            raise ValueError(
                f"period must start at a multiple of L, have N={self.cluster.n}"
            )
        self._grow(self.L)
        rot_count = np.zeros((self.rotors.cells.shape[0], self.L), dtype=np.int64)
        res = self._run(self.L, track_rot=True, rot_count=rot_count)
        return WalkStats(
            steps=int(res[5]),
            rotations=self._rotation_dict(rot_count, source_rotations=self.L),
            upward_crossings=self._crossing_dict(self._up_cross),
        )

    def run(self, n_walks: int, **kw) -> None:
        if n_walks > 0:
            self._run(n_walks, **kw)

    def _rotation_dict(self, rot_count, source_rotations):
        out = {SOURCE: source_rotations}
        ys, xs = np.nonzero(rot_count)
        for y, x in zip(ys.tolist(), xs.tolist()):
            out[(x, y)] = int(rot_count[y, x])
        return out

    def _crossing_dict(self, up_cross):
        out = {}
        ys, xs = np.nonzero(up_cross)
        for y, x in zip(ys.tolist(), xs.tolist()):
            out[(x, y)] = int(up_cross[y, x])
        return out

    def boundary_profile(self) -> BoundaryProfile:
        return boundary_profile(self.cluster)

    def state_equals(self, other: "Simulation") -> bool:
        """Equality of the dynamic state: occupancy, occupied-cell rotors, source."""
        if (self.L != other.L or self.cluster.n != other.cluster.n
                or self.rotors.source_index != other.rotors.source_index
                or self.cluster.top != other.cluster.top):
            return False
        rows = self.cluster.top + 1
        a, b = self.cluster.occ[:rows], other.cluster.occ[:rows]
        if not np.array_equal(a, b):
            return False
        mask = a != 0
        return bool(
            np.array_equal(self.rotors.cells[:rows][mask],
                           other.rotors.cells[:rows][mask])
        )


@dataclass
class AggregateResult:
    sim: Simulation
    period_steps: np.ndarray
    width_trace: np.ndarray | None
    total_steps: int


def aggregate(L, n_walks, seed=0, mode="random", sigma=None, *, check=False,
              keep_width_trace=False, boundary_order=BOUNDARY_ORDER) -> AggregateResult:
    """Run `n_walks` walks from an empty cluster.

    With ``check=True`` the kernel asserts the exact boundary pattern after
    every walk and the single-crossing property of every completed period,
    raising :class:`InvariantViolation` on the first failure.
    """
    if n_walks < 0:
        raise ValueError("n_walks must be nonnegative")
    sim = Simulation(L, seed=seed, mode=mode, sigma=sigma,
                     boundary_order=boundary_order)
    period_steps = np.zeros(n_walks // L + 1, dtype=np.int64)
    width_trace = np.zeros(n_walks, dtype=np.int64) if keep_width_trace else None
    total = 0
    if n_walks:
        res = sim._run(
            n_walks,
            width_trace=width_trace,
            period_steps=period_steps,
            check_pattern=check,
            check_crossing=check,
        )
        total = int(res[5])
    return AggregateResult(sim, period_steps[: n_walks // L], width_trace, total)


# ---------------------------------------------------------------------------
# snapshot text format


def snapshot_dumps(sim: Simulation) -> str:
    """Serialize: header "L K N seed", rows top to bottom as direction letters
    ('.' = unoccupied), then "S: <index>"."""
    L, n = sim.L, sim.cluster.n
    lines = [f"{L} {n // L} {n} {sim.seed}"]
    rows = sim.cluster.top + 1
    for y in range(rows - 1, -1, -1):
        chars = []
        for x in range(L):
            if sim.cluster.occ[y, x]:
                order = sim.rotors.order_of((x, y))
                chars.append(DIRECTION_LETTERS[order[sim.rotors.cells[y, x]]])
            else:
                chars.append(".")
        lines.append("".join(chars))
    lines.append(f"S: {sim.rotors.source_index}")
    return "\n".join(lines) + "\n"


def snapshot_loads(text: str, sigma=None, mode="random",
                   boundary_order=BOUNDARY_ORDER) -> Simulation:
    """Rebuild a simulation from snapshot text.

    The permutation and rotor-init mode are run parameters, not part of the
    snapshot; pass the ones the run was created with to reproduce unoccupied
    rotors bit for bit.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        L, K, n, seed = (int(tok) for tok in lines[0].split())
    except (ValueError, IndexError) as exc:
        raise ValueError(f"bad snapshot header {lines[0]!r}") from exc
    if K != n // L:
        raise ValueError(f"snapshot header K={K} inconsistent with N={n}, L={L}")
    if not lines[-1].startswith("S: "):
        raise ValueError("snapshot missing source line")
    source_index = int(lines[-1][3:])
    body = lines[1:-1]
    sim = Simulation(L, seed=seed, mode=mode, sigma=sigma,
                     boundary_order=boundary_order)
    rows = len(body)
    sim._grow(rows + 1)
    count = 0
    for i, line in enumerate(body):
        y = rows - 1 - i
        if len(line) != L:
            raise ValueError(f"snapshot row {line!r} is not {L} characters")
        for x, ch in enumerate(line):
            if ch == ".":
                continue
            if ch not in DIRECTION_LETTERS:
                raise ValueError(f"bad cell character {ch!r}")
            order = sim.rotors.order_of((x, y))
            d = DIRECTION_LETTERS.index(ch)
            if d not in order:
                raise ValueError(f"direction {ch} invalid for row {y}")
            sim.cluster.occ[y, x] = 1
            sim.rotors.cells[y, x] = order.index(d)
            count += 1
    if count != n:
        raise ValueError(f"snapshot has {count} occupied cells, header says {n}")
    cl = sim.cluster
    cl.n = n
    cl.row_count[:rows] = cl.occ[:rows].sum(axis=1, dtype=np.int64)
    cl.heights[:] = cl.occ.sum(axis=0, dtype=np.int64)
    occupied_rows = np.nonzero(cl.row_count)[0]
    cl.top = int(occupied_rows.max()) if occupied_rows.size else -1
    full = 0
    while full < rows and cl.row_count[full] == L:
        full += 1
    cl.full_rows = full
    if not 0 <= source_index < L:
        raise ValueError(f"source index {source_index} out of range")
    sim.rotors.source_index = source_index
    return sim
