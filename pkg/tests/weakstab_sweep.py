"""Vectorised exhaustive sweep: MEFE matchings are weakly stable when v = g.

Every instance with n <= 2 courses, m <= 4 TAs and values in 0..3 is covered.
A cell (course, TA) takes one of ten states: 0 (unvalued both ways) or a
pair (v, u) with v, u in 1..3, and the grade equals v.  Instead of looping
over instances and then over their matchings, the sweep fixes one matching
per capacity vector and runs over every table.  Any other MEFE matching
becomes one of these after renaming TAs and courses, and renaming maps
tables onto tables.  TAs with an all-zero row never envy and never block,
so m = 4 also covers smaller m, and k = 0 covers every k because raising k
only removes MEFE matchings.
"""

from __future__ import annotations

import numpy as np

STATES = 10


def cell_tables(n_cells: int, start: int, stop: int):
    return tables_at(n_cells, np.arange(start, stop, dtype=np.int64))


def tables_at(n_cells: int, indices):
    idx = np.array(indices, dtype=np.int64)
    digits = []
    for _ in range(n_cells):
        digits.append((idx % STATES).astype(np.int8))
        idx //= STATES
    d = np.stack(digits)  # (cells, batch)
    v = np.where(d == 0, 0, 1 + (d - 1) // 3).astype(np.int8)
    u = np.where(d == 0, 0, 1 + (d - 1) % 3).astype(np.int8)
    return v, u


def decode(n: int, m: int, index: int):
    """Tables (v[x][t], u[t][x]) for one table index, for cross-checking."""
    v, u = cell_tables(n * m, index, index + 1)
    vv = [[int(v[x * m + t, 0]) for t in range(m)] for x in range(n)]
    uu = [[int(u[x * m + t, 0]) for x in range(n)] for t in range(m)]
    return vv, uu


def pattern_flags(n: int, m: int, assign, v, u):
    """Per-table flags (matching is MEFE at k = 0, matching has a blocking pair)."""
    V = v.reshape(n, m, -1)          # V[x, t]
    U = u.reshape(n, m, -1)          # U[x, t] = u_t(x)
    batch = V.shape[2]
    feasible = np.ones(batch, dtype=bool)
    own = np.zeros((m, batch), dtype=np.int8)
    for t, x in enumerate(assign):
        if x >= 0:
            feasible &= V[x, t] > 0
            own[t] = U[x, t]
    envy = np.zeros(batch, dtype=bool)
    block = np.zeros(batch, dtype=bool)
    for x in range(n):
        roster = [s for s, y in enumerate(assign) if y == x]
        for t in range(m):
            if assign[t] == x:
                continue
            wants = U[x, t] > own[t]
            for s in roster:
                envy |= wants & (V[x, t] >= V[x, s])
                block |= wants & (V[x, t] > V[x, s])
    return feasible & ~envy, block


def sweep_pattern(n: int, m: int, assign, chunk: int = 2_000_000, limit=None):
    """Check one matching pattern over all tables.

    ``assign[t]`` is the course index of TA t or -1.  Returns
    (tables checked, MEFE count, counterexample indices).
    """
    total = STATES ** (n * m) if limit is None else limit
    mefe_count = 0
    bad = []
    for start in range(0, total, chunk):
        stop = min(total, start + chunk)
        mefe, block = pattern_flags(n, m, assign, *cell_tables(n * m, start, stop))
        mefe_count += int(mefe.sum())
        hits = np.nonzero(mefe & block)[0]
        bad.extend(int(start + h) for h in hits[:10])
    return total, mefe_count, bad


def canonical_patterns():
    """(n, m, assignment) for each capacity vector up to renaming."""
    out = []
    for cap in (1, 2, 3, 4):
        out.append((1, 4, [0] * cap + [-1] * (4 - cap)))
    for c1, c2 in ((1, 1), (1, 2), (1, 3), (2, 2)):
        out.append((2, 4, [0] * c1 + [1] * c2 + [-1] * (4 - c1 - c2)))
    return out
