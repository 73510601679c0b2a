"""Dense training targets at output stride R (CenterNet-style splats)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..simworld.scenario import CATEGORIES
from .labels import LabelEntry, Status


@dataclass
class TargetMaps:
    heatmap: np.ndarray  # (C, H, W) center heatmap
    visibility: np.ndarray  # (C, H, W) visible-center heatmap
    heatmap_ignore: np.ndarray  # (C, H, W) bool, cells excluded from the heatmap loss
    visibility_ignore: np.ndarray  # (C, H, W) bool
    size: np.ndarray  # (2, H, W) box (w, h) in input pixels
    offset: np.ndarray  # (2, H, W) sub-cell remainder of center / R
    displacement: np.ndarray  # (2, H, W) pixels
    center_mask: np.ndarray  # (H, W) per-cell loss weight, 0 where unsupervised
    displacement_mask: np.ndarray  # (H, W)
    stride: int


def gaussian_radius(height: float, width: float, min_overlap: float = 0.7) -> float:
    """Size-dependent splat radius from the CornerNet/CenterNet lineage.

    Smallest of the three corner-shift radii keeping IoU >= ``min_overlap``,
    in the widely used (unhalved) form.
    """
    b1 = height + width
    c1 = width * height * (1 - min_overlap) / (1 + min_overlap)
    r1 = (b1 + math.sqrt(b1**2 - 4 * c1)) / 2
    b2 = 2 * (height + width)
    c2 = (1 - min_overlap) * width * height
    r2 = (b2 + math.sqrt(b2**2 - 16 * c2)) / 2
    a3 = 4 * min_overlap
    b3 = -2 * min_overlap * (height + width)
    c3 = (min_overlap - 1) * width * height
    r3 = (b3 + math.sqrt(b3**2 - 4 * a3 * c3)) / 2
    return min(r1, r2, r3)


def gaussian_kernel(radius: int) -> np.ndarray:
    """Unnormalised ``(2r+1)^2`` Gaussian with sigma ``(2r+1)/6`` and peak 1."""
    sigma = (2 * radius + 1) / 6
    y, x = np.ogrid[-radius : radius + 1, -radius : radius + 1]
    g = np.exp(-(x * x + y * y) / (2 * sigma * sigma))
    g[g < np.finfo(g.dtype).eps * g.max()] = 0
    return g


def splat(canvas: np.ndarray, cx: int, cy: int, radius: int) -> tuple[slice, slice]:
    """Max-combine a Gaussian centred on cell ``(cx, cy)`` into ``canvas``.

    Returns the canvas window that was touched.
    """
    g = gaussian_kernel(radius)
    h, w = canvas.shape
    left, right = min(cx, radius), min(w - cx, radius + 1)
    top, bottom = min(cy, radius), min(h - cy, radius + 1)
    window = (slice(cy - top, cy + bottom), slice(cx - left, cx + right))
    patch = g[radius - top : radius + bottom, radius - left : radius + right]
    np.maximum(canvas[window], patch, out=canvas[window])
    return window


def render_target_maps(
    entries,
    image_size,
    stride: int = 4,
    categories=CATEGORIES,
    min_overlap: float = 0.7,
) -> TargetMaps:
    """Rasterise one frame's label entries.

    Positives splat onto the heatmap; only VISIBLE ones splat onto the
    visibility map, so occluded centers act as negatives there.  SOFT
    entries leave their visibility window unsupervised and IGNORE entries
    do the same for the heatmap.  Centers outside the image are clamped
    to the border cells.
    """
    W, H = image_size
    ow, oh = math.ceil(W / stride), math.ceil(H / stride)
    C = len(categories)
    cls_index = {c: i for i, c in enumerate(categories)}
    maps = TargetMaps(
        heatmap=np.zeros((C, oh, ow)),
        visibility=np.zeros((C, oh, ow)),
        heatmap_ignore=np.zeros((C, oh, ow), dtype=bool),
        visibility_ignore=np.zeros((C, oh, ow), dtype=bool),
        size=np.zeros((2, oh, ow)),
        offset=np.zeros((2, oh, ow)),
        displacement=np.zeros((2, oh, ow)),
        center_mask=np.zeros((oh, ow)),
        displacement_mask=np.zeros((oh, ow)),
        stride=stride,
    )
    for e in entries:
        e: LabelEntry
        if e.status == Status.NEGATIVE or e.category not in cls_index:
            continue
        c = cls_index[e.category]
        fx, fy = e.center[0] / stride, e.center[1] / stride
        ix = min(max(int(math.floor(fx)), 0), ow - 1)
        iy = min(max(int(math.floor(fy)), 0), oh - 1)
        w, h = e.size
        radius = max(0, int(gaussian_radius(h / stride, w / stride, min_overlap)))
        if e.status == Status.IGNORE:
            scratch = np.zeros((oh, ow))
            win = splat(scratch, ix, iy, radius)
            maps.heatmap_ignore[c][win] |= scratch[win] > 0
            continue
        splat(maps.heatmap[c], ix, iy, radius)
        if e.status == Status.VISIBLE:
            splat(maps.visibility[c], ix, iy, radius)
        elif e.status == Status.SOFT:
            scratch = np.zeros((oh, ow))
            win = splat(scratch, ix, iy, radius)
            maps.visibility_ignore[c][win] |= scratch[win] > 0
        maps.size[:, iy, ix] = (w, h)
        maps.offset[:, iy, ix] = (fx - ix, fy - iy)
        maps.center_mask[iy, ix] = max(maps.center_mask[iy, ix], e.loss_weight)
        if e.displacement is not None:
            maps.displacement[:, iy, ix] = e.displacement
            maps.displacement_mask[iy, ix] = max(maps.displacement_mask[iy, ix], e.loss_weight)
    # never ignore a cell that is itself a supervised peak
    maps.heatmap_ignore &= maps.heatmap < 1.0
    maps.visibility_ignore &= maps.visibility < 1.0
    return maps
