"""CLEAR MOT with IoU matching and match persistence, plus MT/PT/ML."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..kernels import box_iou_matrix, linear_sum_assignment
from .common import MetricConfig, frame_table


@dataclass
class ClearCounts:
    num_gt: int = 0
    num_pred: int = 0
    tp: int = 0
    fp: int = 0
    fn: int = 0
    idsw: int = 0
    frag: int = 0
    iou_sum: float = 0.0
    mt: int = 0
    pt: int = 0
    ml: int = 0
    gt_tracks: int = 0

    def __iadd__(self, other: "ClearCounts"):
        for k in self.__dataclass_fields__:
            setattr(self, k, getattr(self, k) + getattr(other, k))
        return self

    @property
    def mota(self) -> float:
        return 1.0 - (self.fn + self.fp + self.idsw) / max(1, self.num_gt)

    @property
    def moda(self) -> float:
        return 1.0 - (self.fn + self.fp) / max(1, self.num_gt)

    @property
    def motp(self) -> float:
        return self.iou_sum / max(1, self.tp)

    @property
    def smota(self) -> float:
        return (self.iou_sum - self.fp - self.idsw) / max(1, self.num_gt)

    def percentages(self) -> tuple[float, float, float]:
        n = max(1, self.gt_tracks)
        return 100.0 * self.mt / n, 100.0 * self.pt / n, 100.0 * self.ml / n

    def summary(self) -> dict:
        mt, pt, ml = self.percentages()
        return {
            "MOTA": self.mota,
            "MOTP": self.motp,
            "MODA": self.moda,
            "sMOTA": self.smota,
            "TP": self.tp,
            "FP": self.fp,
            "FN": self.fn,
            "IDSW": self.idsw,
            "FRAG": self.frag,
            "MT": mt,
            "PT": pt,
            "ML": ml,
            "GT_boxes": self.num_gt,
            "GT_tracks": self.gt_tracks,
        }


@dataclass
class FrameMatch:
    frame: int
    pairs: list[tuple[int, int, float]] = field(default_factory=list)  # (gt_id, pred_id, iou)


def match_frames(preds, gts, config: MetricConfig = MetricConfig()) -> list[FrameMatch]:
    """Per-frame GT/prediction matching.

    Pairs matched in the previous frame are kept when still at or above
    ``box_match_iou``; the rest are assigned by maximum total IoU among
    pairs above the threshold.
    """
    thr = config.box_match_iou
    gt_frames, pr_frames = frame_table(gts), frame_table(preds)
    frames = sorted(set(gt_frames) | set(pr_frames))
    if not frames:
        return []
    prev: dict[int, int] = {}
    out = []
    for f in range(frames[0], frames[-1] + 1):
        g_items = gt_frames.get(f, [])
        p_items = pr_frames.get(f, [])
        fm = FrameMatch(f)
        if g_items and p_items:
            g_ids = [i for i, _ in g_items]
            p_ids = [i for i, _ in p_items]
            iou = box_iou_matrix(np.array([b for _, b in g_items]), np.array([b for _, b in p_items]))
            p_index = {pid: j for j, pid in enumerate(p_ids)}
            used_g, used_p = set(), set()
            for gi, gid in enumerate(g_ids):
                pj = p_index.get(prev.get(gid))
                if pj is not None and iou[gi, pj] >= thr:
                    fm.pairs.append((gid, p_ids[pj], float(iou[gi, pj])))
                    used_g.add(gi)
                    used_p.add(pj)
            rest_g = [i for i in range(len(g_ids)) if i not in used_g]
            rest_p = [j for j in range(len(p_ids)) if j not in used_p]
            if rest_g and rest_p:
                sub = iou[np.ix_(rest_g, rest_p)]
                benefit = np.where(sub >= thr, sub, 0.0)
                for r, c in zip(*linear_sum_assignment(-benefit)):
                    if sub[r, c] >= thr:
                        gi, pj = rest_g[r], rest_p[c]
                        fm.pairs.append((g_ids[gi], p_ids[pj], float(iou[gi, pj])))
        fm.pairs.sort()
        prev = {g: p for g, p, _ in fm.pairs}
        out.append(fm)
    return out


def clear_mot(preds, gts, config: MetricConfig = MetricConfig()) -> ClearCounts:
    """CLEAR MOT counts (and MT/PT/ML) for one sequence and one class.

    IDSW: a GT matched to a different prediction than at its previous match.
    FRAG: per GT, the number of matched runs minus one, where a run breaks
    at any frame in which the GT is not matched.
    """
    counts = ClearCounts()
    counts.num_gt = sum(len(t.boxes) for t in gts)
    counts.num_pred = sum(len(t.boxes) for t in preds)
    counts.gt_tracks = len(gts)
    last_pred: dict[int, int] = {}
    runs: dict[int, int] = {}
    matched_frames: dict[int, int] = {}
    prev_matched: set[int] = set()
    for fm in match_frames(preds, gts, config):
        now = set()
        for gid, pid, iou in fm.pairs:
            counts.tp += 1
            counts.iou_sum += iou
            if gid in last_pred and last_pred[gid] != pid:
                counts.idsw += 1
            last_pred[gid] = pid
            if gid not in prev_matched:
                runs[gid] = runs.get(gid, 0) + 1
            matched_frames[gid] = matched_frames.get(gid, 0) + 1
            now.add(gid)
        prev_matched = now
    counts.fn = counts.num_gt - counts.tp
    counts.fp = counts.num_pred - counts.tp
    counts.frag = sum(r - 1 for r in runs.values())
    for t in gts:
        n = len(t.boxes)
        ratio = matched_frames.get(t.id, 0) / n if n else 0.0
        if ratio >= config.mt_threshold:
            counts.mt += 1
        elif ratio <= config.ml_threshold:
            counts.ml += 1
        else:
            counts.pt += 1
    return counts


def mt_pt_ml(preds, gts, config: MetricConfig = MetricConfig()) -> tuple[float, float, float]:
    """Mostly tracked / partially tracked / mostly lost, in percent of GT tracks."""
    return clear_mot(preds, gts, config).percentages()
