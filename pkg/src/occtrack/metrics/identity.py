"""Identity metrics (IDF1, IDP, IDR) from a global id-to-id assignment."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..kernels import box_iou_matrix, linear_sum_assignment
from .common import MetricConfig, frame_table


@dataclass
class IdentityCounts:
    idtp: int = 0
    idfp: int = 0
    idfn: int = 0

    def __iadd__(self, other: "IdentityCounts"):
        self.idtp += other.idtp
        self.idfp += other.idfp
        self.idfn += other.idfn
        return self

    @property
    def idp(self) -> float:
        return self.idtp / max(1, self.idtp + self.idfp)

    @property
    def idr(self) -> float:
        return self.idtp / max(1, self.idtp + self.idfn)

    @property
    def idf1(self) -> float:
        return 2 * self.idtp / max(1, 2 * self.idtp + self.idfp + self.idfn)

    def summary(self) -> dict:
        return {"IDF1": self.idf1, "IDP": self.idp, "IDR": self.idr, "IDTP": self.idtp, "IDFP": self.idfp, "IDFN": self.idfn}


def overlap_matrix(preds, gts, config: MetricConfig = MetricConfig()) -> np.ndarray:
    """Frames where GT ``i`` and prediction ``j`` overlap at >= ``box_match_iou``."""
    gts, preds = list(gts), list(preds)
    g_index = {t.id: i for i, t in enumerate(gts)}
    p_index = {t.id: j for j, t in enumerate(preds)}
    out = np.zeros((len(gts), len(preds)), dtype=np.int64)
    g_frames, p_frames = frame_table(gts), frame_table(preds)
    for f, g_items in g_frames.items():
        p_items = p_frames.get(f)
        if not p_items:
            continue
        iou = box_iou_matrix(np.array([b for _, b in g_items]), np.array([b for _, b in p_items]))
        hit = iou >= config.box_match_iou
        for a, b in zip(*np.nonzero(hit)):
            out[g_index[g_items[a][0]], p_index[p_items[b][0]]] += 1
    return out


def idf1(preds, gts, config: MetricConfig = MetricConfig()) -> IdentityCounts:
    """IDTP from the id assignment maximising matched frames; the remaining
    GT and predicted boxes are IDFN and IDFP."""
    gts, preds = list(gts), list(preds)
    n_gt = sum(len(t.boxes) for t in gts)
    n_pred = sum(len(t.boxes) for t in preds)
    overlap = overlap_matrix(preds, gts, config)
    idtp = 0
    if overlap.size:
        rows, cols = linear_sum_assignment(-overlap.astype(np.float64))
        idtp = int(overlap[rows, cols].sum())
    return IdentityCounts(idtp, n_pred - idtp, n_gt - idtp)
