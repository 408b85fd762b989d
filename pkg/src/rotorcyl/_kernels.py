"""Jitted inner loops for the walk engines.

All mutable walk state lives in caller-owned numpy arrays so a kernel call is
resumable: the same arrays can be advanced one walk at a time (slow path with
full statistics) or millions of steps in one call (verification sweeps), with
bit-identical dynamics.

Shared array conventions (cylinder kernels):

* ``rotor``      int8 (rows, L)   current rotor index per cell
* ``occ``        uint8 (rows, L)  occupancy
* ``heights``    int64 (L,)       occupied-cell count per column
* ``row_count``  int64 (rows,)    occupied-cell count per row
* ``sstate``     int64 (4,)       [source index, particles, full bottom rows, top row]
* ``border``     int8 (3,)        bottom-row rotor order as direction codes

Status codes: 0 ok, 1 stratified settle, 2 runaway walk, 3 boundary-pattern
violation, 4 top-edge crossing violation, 5 row capacity exceeded.
"""
from __future__ import annotations

import numpy as np
from numba import njit

SRC, NPART, FULL, TOP = 0, 1, 2, 3

OK, STRATIFIED, RUNAWAY, PATTERN, CROSSING, CAPACITY = 0, 1, 2, 3, 4, 5

_U33 = np.uint64(33)
_F1 = np.uint64(0xFF51AFD7ED558CCD)
_F2 = np.uint64(0xC4CEB9FE1A85EC53)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@njit(inline="always")
def _fmix64(z):
    z ^= z >> _U33
    z *= _F1
    z ^= z >> _U33
    z *= _F2
    z ^= z >> _U33
    return z


@njit(cache=True)
def stream_fill(state0, out):
    """Fill `out` with the counter-based stream starting from raw state `state0`."""
    s = state0
    for i in range(out.shape[0]):
        s = s + _GOLDEN
        out[i] = _fmix64(s)
    return s


@njit(cache=True)
def rotor_walks(
    n_walks,
    rotor,
    occ,
    heights,
    row_count,
    sigma,
    sstate,
    border,
    up_cross,
    rot_count,
    width_trace,
    period_steps,
    track_rot,
    check_pattern,
    check_crossing,
):
    """Run `n_walks` rotor-router walks from the source.

    Returns (status, walks_done, last_x, last_y, last_steps, total_steps).
    On a nonzero status the failing walk is ``walks_done`` (0-based) and the
    arrays hold the state at the moment of failure.
    """
    L = sigma.shape[0]
    rows_cap = occ.shape[0]
    total_steps = 0
    last_x = -1
    last_y = -1
    last_steps = 0
    period_idx = 0
    period_accum = 0

    for w in range(n_walks):
        n_before = sstate[NPART]
        if n_before % L == 0:
            # period start: upward-crossing counters are per period
            hi = sstate[TOP] + 2
            if hi > rows_cap:
                hi = rows_cap
            for yy in range(hi):
                for xx in range(L):
                    up_cross[yy, xx] = 0

        m = sstate[FULL] + 2
        step_cap = 4 * L * (2 * m * m + m + 1)

        si = sstate[SRC] + 1
        if si == L:
            si = 0
        sstate[SRC] = si
        x = sigma[si]
        y = 0
        steps = 1

        while occ[y, x] != 0:
            idx = rotor[y, x] + 1
            if y == 0:
                if idx == 3:
                    idx = 0
                rotor[y, x] = idx
                d = border[idx]
            else:
                if idx == 4:
                    idx = 0
                rotor[y, x] = idx
                d = idx
            if track_rot:
                rot_count[y, x] += 1
            if d == 0:
                up_cross[y, x] += 1
                y += 1
                if y >= rows_cap:
                    return (CAPACITY, w, x, y, steps, total_steps)
            elif d == 1:
                x += 1
                if x == L:
                    x = 0
            elif d == 2:
                y -= 1
            else:
                x -= 1
                if x < 0:
                    x = L - 1
            steps += 1
            if steps > step_cap:
                return (RUNAWAY, w, x, y, steps, total_steps)

        # settle, without touching the rotor of the settling cell
        occ[y, x] = 1
        sstate[NPART] = n_before + 1
        total_steps += steps
        period_accum += steps
        last_x, last_y, last_steps = x, y, steps

        stratified = y != heights[x]
        heights[x] += 1
        row_count[y] += 1
        if y > sstate[TOP]:
            sstate[TOP] = y
        full = sstate[FULL]
        while full < rows_cap and row_count[full] == L:
            full += 1
        sstate[FULL] = full

        if stratified:
            return (STRATIFIED, w, x, y, steps, total_steps)

        n_after = n_before + 1
        if check_pattern:
            # the settling row alone pins the exact boundary pattern
            if y != n_before // L:
                return (PATTERN, w, x, y, steps, total_steps)

        if n_after % L == 0:
            j = n_after // L - 1  # row completed by this period
            if check_pattern:
                for yy in range(j + 1):
                    filled = 0
                    for xx in range(L):
                        filled += occ[yy, xx]
                    if filled != L:
                        return (PATTERN, w, x, y, steps, total_steps)
                if sstate[TOP] != j or sstate[FULL] != j + 1:
                    return (PATTERN, w, x, y, steps, total_steps)
            if check_crossing and j >= 1:
                for xx in range(L):
                    if up_cross[j - 1, xx] != 1:
                        return (CROSSING, w, x, y, steps, total_steps)
            if period_steps.shape[0] > 0:
                if period_idx < period_steps.shape[0]:
                    period_steps[period_idx] = period_accum
                period_idx += 1
                period_accum = 0

        if width_trace.shape[0] > 0:
            width_trace[w] = (sstate[TOP] + 1) - sstate[FULL]

    return (OK, n_walks, last_x, last_y, last_steps, total_steps)


@njit(cache=True)
def random_walks(
    n_walks,
    occ,
    heights,
    row_count,
    sigma,
    sstate,
    border,
    rng,
    width_trace,
    step_cap,
):
    """Random-walk aggregation: uniform direction draws instead of rotors.

    Stratified settles are legal here; heights are per-column counts.
    Returns (status, walks_done, total_steps).
    """
    L = sigma.shape[0]
    rows_cap = occ.shape[0]
    total_steps = 0
    s = rng[0]
    three = np.uint64(3)
    four = np.uint64(4)

    for w in range(n_walks):
        si = sstate[SRC] + 1
        if si == L:
            si = 0
        sstate[SRC] = si
        x = sigma[si]
        y = 0
        steps = 1

        while occ[y, x] != 0:
            s = s + _GOLDEN
            z = _fmix64(s)
            if y == 0:
                d = border[z % three]
            else:
                d = np.int64(z % four)
            if d == 0:
                y += 1
                if y >= rows_cap:
                    rng[0] = s
                    return (CAPACITY, w, total_steps)
            elif d == 1:
                x += 1
                if x == L:
                    x = 0
            elif d == 2:
                y -= 1
            else:
                x -= 1
                if x < 0:
                    x = L - 1
            steps += 1
            if steps > step_cap:
                rng[0] = s
                return (RUNAWAY, w, total_steps)

        occ[y, x] = 1
        sstate[NPART] += 1
        total_steps += steps
        heights[x] += 1
        row_count[y] += 1
        if y > sstate[TOP]:
            sstate[TOP] = y
        full = sstate[FULL]
        while full < rows_cap and row_count[full] == L:
            full += 1
        sstate[FULL] = full
        if width_trace.shape[0] > 0:
            width_trace[w] = (sstate[TOP] + 1) - sstate[FULL]

    rng[0] = s
    return (OK, n_walks, total_steps)


@njit(cache=True)
def turned_walks(
    n_walks,
    rotor,
    occ,
    row_count,
    source_cols,
    sstate,
    width_trace,
):
    """Rotor aggregation on the 45-degree-turned cylinder.

    Cells are (x, y) with x + y even, x modulo the circumference C.  Interior
    rotor order is NE, SE, SW, NW (codes 0..3); bottom cells cycle NW, NE.
    Rows hold C/2 cells each.  Returns (status, walks_done, total_steps).
    """
    C = occ.shape[1]
    half = source_cols.shape[0]
    rows_cap = occ.shape[0]
    total_steps = 0

    for w in range(n_walks):
        m = sstate[FULL] + 2
        step_cap = 16 * C * (2 * m * m + m + 1)

        si = sstate[SRC] + 1
        if si == half:
            si = 0
        sstate[SRC] = si
        x = source_cols[si]
        y = 0
        steps = 1

        while occ[y, x] != 0:
            idx = rotor[y, x] + 1
            if y == 0:
                if idx >= 2:
                    idx = 0
                rotor[y, x] = idx
                d = 3 if idx == 0 else 0  # bottom order: NW then NE
            else:
                if idx == 4:
                    idx = 0
                rotor[y, x] = idx
                d = idx
            if d == 0:  # NE
                x += 1
                y += 1
            elif d == 1:  # SE
                x += 1
                y -= 1
            elif d == 2:  # SW
                x -= 1
                y -= 1
            else:  # NW
                x -= 1
                y += 1
            if x == C:
                x = 0
            elif x < 0:
                x = C - 1
            if y >= rows_cap:
                return (CAPACITY, w, total_steps)
            steps += 1
            if steps > step_cap:
                return (RUNAWAY, w, total_steps)

        occ[y, x] = 1
        sstate[NPART] += 1
        total_steps += steps
        row_count[y] += 1
        if y > sstate[TOP]:
            sstate[TOP] = y
        full = sstate[FULL]
        while full < rows_cap and row_count[full] == half:
            full += 1
        sstate[FULL] = full
        if width_trace.shape[0] > 0:
            width_trace[w] = (sstate[TOP] + 1) - sstate[FULL]

    return (OK, n_walks, total_steps)
