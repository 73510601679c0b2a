"""Visibility fractions from a coarse z-buffer over axis-aligned boxes."""
from __future__ import annotations

import math

import numpy as np

from ..kernels import frontmost_counts, rasterize_owner


def grid_shape(image_size, stride: int) -> tuple[int, int]:
    """``(grid_w, grid_h)``: cells whose centers lie inside the image."""
    w, h = image_size
    return max(0, math.ceil(w / stride - 0.5)), max(0, math.ceil(h / stride - 0.5))


def box_cells(boxes, stride: int) -> np.ndarray:
    """Half-open cell ranges ``[x0, x1, y0, y1]`` whose centers fall in each box.

    Cell ``i`` has its center at ``(i + 0.5) * stride``; the ranges are
    unclipped so they also count cells beyond the image border.  A box
    too small to contain any cell center claims the cell under its center.
    """
    b = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    x0 = np.ceil(b[:, 0] / stride - 0.5)
    x1 = np.ceil(b[:, 2] / stride - 0.5)
    y0 = np.ceil(b[:, 1] / stride - 0.5)
    y1 = np.ceil(b[:, 3] / stride - 0.5)
    empty = (x1 <= x0) | (y1 <= y0)
    if np.any(empty):
        cx = np.floor((b[empty, 0] + b[empty, 2]) / 2 / stride)
        cy = np.floor((b[empty, 1] + b[empty, 3]) / 2 / stride)
        x0[empty], x1[empty] = cx, cx + 1
        y0[empty], y1[empty] = cy, cy + 1
    return np.stack([x0, x1, y0, y1], axis=1).astype(np.int64)


def boxes_in_frame(boxes, image_size) -> np.ndarray:
    """Whether each box overlaps the image rectangle with positive area."""
    w, h = image_size
    b = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    return (b[:, 2] > 0) & (b[:, 0] < w) & (b[:, 3] > 0) & (b[:, 1] < h)


def compute_visibility(boxes, depths, image_size, stride: int = 8, occluder_boxes=None, occluder_depths=None):
    """Fraction of each box's footprint that is frontmost and inside the image.

    Targets and occluders are rasterised together onto the image grid at
    ``stride`` pixels per cell; nearest depth wins each cell, ties go to
    the earlier box.  The denominator is the full (unclipped) cell
    footprint, so truncation at the border lowers visibility as well.
    Occluders only take cells away; they get no visibility of their own.
    """
    boxes = np.asarray(boxes, dtype=np.float64).reshape(-1, 4)
    depths = np.asarray(depths, dtype=np.float64).reshape(-1)
    n = len(boxes)
    if n == 0:
        return np.zeros(0)
    if occluder_boxes is not None and len(occluder_boxes):
        all_boxes = np.vstack([boxes, np.asarray(occluder_boxes, dtype=np.float64).reshape(-1, 4)])
        all_depths = np.concatenate([depths, np.asarray(occluder_depths, dtype=np.float64).reshape(-1)])
    else:
        all_boxes, all_depths = boxes, depths
    gw, gh = grid_shape(image_size, stride)
    cells = box_cells(all_boxes, stride)
    total = (cells[:n, 1] - cells[:n, 0]) * (cells[:n, 3] - cells[:n, 2])
    clipped = cells.copy()
    clipped[:, 0:2] = np.clip(clipped[:, 0:2], 0, gw)
    clipped[:, 2:4] = np.clip(clipped[:, 2:4], 0, gh)
    owner = rasterize_owner(clipped, all_depths, gw, gh)
    won = frontmost_counts(owner, len(all_boxes))[:n]
    return won / total
