"""Hot numeric kernels with numba and numpy implementations.

Each kernel module exposes ``<name>_numba`` and ``<name>_numpy`` plus a
dispatching ``<name>`` chosen by :data:`occtrack._accel.USE_NUMBA`.
"""
from .assignment import linear_sum_assignment, solve_rect
from .boxes import box_iou_matrix, track_iou_matrix
from .zbuffer import frontmost_counts, rasterize_owner

__all__ = [
    "box_iou_matrix",
    "frontmost_counts",
    "linear_sum_assignment",
    "rasterize_owner",
    "solve_rect",
    "track_iou_matrix",
]
