"""Minimum-cost rectangular assignment (Hungarian method, shortest
augmenting paths with row/column potentials)."""
import numpy as np

from .._accel import USE_NUMBA, njit


@njit(cache=True)
def _solve_rect_numba(cost):
    n, m = cost.shape
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)  # p[j]: row (1-based) owning column j
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=np.bool_)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = np.inf
            j1 = 0
            for j in range(1, m + 1):
                if not used[j]:
                    cur = cost[i0 - 1, j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col = np.full(n, -1, dtype=np.int64)
    for j in range(1, m + 1):
        if p[j] != 0:
            col[p[j] - 1] = j - 1
    return col


def solve_rect_numba(cost):
    cost = np.ascontiguousarray(cost, dtype=np.float64)
    return _solve_rect_numba(cost)


def solve_rect_numpy(cost):
    cost = np.asarray(cost, dtype=np.float64)
    n, m = cost.shape
    u = np.zeros(n + 1)
    v = np.zeros(m + 1)
    p = np.zeros(m + 1, dtype=np.int64)
    way = np.zeros(m + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(m + 1, np.inf)
        used = np.zeros(m + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    col = np.full(n, -1, dtype=np.int64)
    owned = np.nonzero(p[1:])[0]
    col[p[1:][owned] - 1] = owned
    return col


def solve_rect(cost):
    """Column index per row for a ``(n, m)`` cost matrix with ``n <= m``."""
    if USE_NUMBA:
        return solve_rect_numba(cost)
    return solve_rect_numpy(cost)


def linear_sum_assignment(cost, solver=None):
    """Minimum-cost one-to-one assignment of a rectangular cost matrix.

    Returns ``(rows, cols)`` index arrays sorted by row, with
    ``min(n, m)`` pairs.  An empty matrix yields empty arrays.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError("cost matrix must be 2-D")
    n, m = cost.shape
    if n == 0 or m == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy()
    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix must be finite")
    solve = solver or solve_rect
    if n <= m:
        cols = solve(cost)
        return np.arange(n, dtype=np.int64), cols
    rows_of_cols = solve(cost.T)
    order = np.argsort(rows_of_cols, kind="stable")
    return rows_of_cols[order], order.astype(np.int64)
