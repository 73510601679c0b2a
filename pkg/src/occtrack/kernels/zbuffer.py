"""Box z-buffer: which object is frontmost in each grid cell."""
import numpy as np

from .._accel import USE_NUMBA, njit


@njit(cache=True)
def _rasterize_owner_numba(cells, depths, grid_w, grid_h):
    owner = np.full((grid_h, grid_w), -1, dtype=np.int64)
    zbuf = np.full((grid_h, grid_w), np.inf)
    for k in range(cells.shape[0]):
        d = depths[k]
        for y in range(cells[k, 2], cells[k, 3]):
            for x in range(cells[k, 0], cells[k, 1]):
                # strict: on equal depth the lower index keeps the cell
                if d < zbuf[y, x]:
                    zbuf[y, x] = d
                    owner[y, x] = k
    return owner


def rasterize_owner_numba(cells, depths, grid_w, grid_h):
    cells = np.ascontiguousarray(cells, dtype=np.int64).reshape(-1, 4)
    depths = np.ascontiguousarray(depths, dtype=np.float64)
    return _rasterize_owner_numba(cells, depths, int(grid_w), int(grid_h))


def rasterize_owner_numpy(cells, depths, grid_w, grid_h):
    cells = np.asarray(cells, dtype=np.int64).reshape(-1, 4)
    depths = np.asarray(depths, dtype=np.float64)
    owner = np.full((int(grid_h), int(grid_w)), -1, dtype=np.int64)
    idx = np.arange(len(depths))
    # painter's order: far to near, and among equal depths high index first,
    # so the last write is the nearest / lowest-index object
    for k in np.lexsort((-idx, -depths)):
        x0, x1, y0, y1 = cells[k]
        if x1 > x0 and y1 > y0:
            owner[y0:y1, x0:x1] = k
    return owner


def rasterize_owner(cells, depths, grid_w, grid_h):
    """Owner index per cell (``-1`` when empty).

    ``cells`` rows are half-open ``[x0, x1) x [y0, y1)`` ranges already
    clipped to the ``grid_h x grid_w`` canvas.
    """
    if USE_NUMBA:
        return rasterize_owner_numba(cells, depths, grid_w, grid_h)
    return rasterize_owner_numpy(cells, depths, grid_w, grid_h)


def frontmost_counts(owner, n):
    """Number of cells won by each of ``n`` objects."""
    flat = owner.ravel()
    return np.bincount(flat[flat >= 0], minlength=n)[:n]
