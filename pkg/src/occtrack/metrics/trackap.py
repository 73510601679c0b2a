"""Track IoU and Track AP."""
from __future__ import annotations

import numpy as np

from ..kernels import track_iou_matrix as _track_iou_kernel
from .common import EvalTrack, MetricConfig


def track_iou(pred: EvalTrack, gt: EvalTrack) -> float:
    """Summed per-frame intersection over summed per-frame union.

    A frame where only one track has a box contributes that box's area to
    the union; frames where neither has a box contribute nothing.
    """
    inter_sum = union_sum = 0.0
    for f in sorted(set(pred.boxes) | set(gt.boxes)):
        a, b = pred.boxes.get(f), gt.boxes.get(f)
        area_a = 0.0 if a is None else (a[2] - a[0]) * (a[3] - a[1])
        area_b = 0.0 if b is None else (b[2] - b[0]) * (b[3] - b[1])
        inter = 0.0
        if a is not None and b is not None:
            iw = min(a[2], b[2]) - max(a[0], b[0])
            ih = min(a[3], b[3]) - max(a[1], b[1])
            if iw > 0 and ih > 0:
                inter = iw * ih
        inter_sum += inter
        union_sum += area_a + area_b - inter
    return inter_sum / union_sum if union_sum > 0 else 0.0


def _dense(tracks, frames) -> np.ndarray:
    index = {f: i for i, f in enumerate(frames)}
    out = np.full((len(tracks), len(frames), 4), np.nan)
    for k, t in enumerate(tracks):
        for f, b in t.boxes.items():
            out[k, index[f]] = b
    return out


def track_iou_matrix(gts, preds) -> np.ndarray:
    """``(len(gts), len(preds))`` Track IoU matrix."""
    frames = sorted({f for t in list(gts) + list(preds) for f in t.boxes})
    return _track_iou_kernel(_dense(gts, frames), _dense(preds, frames))


def confidence_order(preds) -> list[int]:
    conf = np.array([p.confidence for p in preds], dtype=np.float64)
    return [int(i) for i in np.argsort(-conf, kind="stable")]


def _augment(j, adj, match_gt, seen) -> bool:
    for g in adj[j]:
        if g in seen:
            continue
        seen.add(g)
        if match_gt[g] is None or _augment(match_gt[g], adj, match_gt, seen):
            match_gt[g] = j
            return True
    return False


def tp_flags(preds, gts, config: MetricConfig = MetricConfig(), iou=None) -> list[bool]:
    """True-positive flag per prediction, in descending-confidence order.

    All tracks are assumed to share one class and one sequence.  With the
    ``optimal`` rule a prediction is a TP when it raises the maximum
    one-to-one matching (Track IoU >= threshold) among predictions ranked
    at or above it; with ``greedy`` it claims the free GT of highest Track IoU.
    """
    preds, gts = list(preds), list(gts)
    if iou is None:
        iou = track_iou_matrix(gts, preds)
    thr = config.track_iou_threshold
    order = confidence_order(preds)
    flags = []
    if config.track_ap_assignment == "greedy":
        claimed = np.zeros(len(gts), dtype=bool)
        for j in order:
            col = np.where(claimed, -1.0, iou[:, j]) if len(gts) else np.zeros(0)
            if len(col) and col.max() >= thr:
                claimed[int(np.argmax(col))] = True
                flags.append(True)
            else:
                flags.append(False)
        return flags
    # incremental maximum bipartite matching (augmenting paths)
    adj = {j: [int(g) for g in np.flatnonzero(iou[:, j] >= thr)] for j in order}
    match_gt = [None] * len(gts)
    for j in order:
        flags.append(_augment(j, adj, match_gt, set()))
    return flags


def average_precision(confidences, flags, num_gt: int) -> float:
    """All-point interpolated AP (area under the monotone PR envelope)."""
    if num_gt == 0:
        return float("nan")
    conf = np.asarray(confidences, dtype=np.float64)
    tp = np.asarray(flags, dtype=bool)
    order = np.argsort(-conf, kind="stable")
    tp = tp[order]
    if len(tp) == 0:
        return 0.0
    ctp = np.cumsum(tp)
    cfp = np.cumsum(~tp)
    recall = ctp / num_gt
    precision = ctp / (ctp + cfp)
    mrec = np.concatenate([[0.0], recall, [1.0]])
    mpre = np.concatenate([[0.0], precision, [0.0]])
    mpre = np.maximum.accumulate(mpre[::-1])[::-1]
    steps = np.flatnonzero(mrec[1:] != mrec[:-1])
    return float(np.sum((mrec[steps + 1] - mrec[steps]) * mpre[steps + 1]))


def sequence_ap_terms(preds, gts, categories, config: MetricConfig = MetricConfig()) -> dict:
    """``{category: (confidences, tp_flags, num_gt)}`` for one sequence.

    Terms from several sequences concatenate into a pooled AP because TP
    status never depends on tracks of another sequence.
    """
    out = {}
    for cat in categories:
        p = [t for t in preds if t.category == cat]
        g = [t for t in gts if t.category == cat]
        order = confidence_order(p)
        flags = tp_flags(p, g, config)
        out[cat] = ([p[i].confidence for i in order], flags, len(g))
    return out


def pooled_ap(terms_list, categories) -> dict[str, float]:
    """AP per category from a list of :func:`sequence_ap_terms` results."""
    out = {}
    for cat in categories:
        conf, flags, n = [], [], 0
        for terms in terms_list:
            c, f, k = terms[cat]
            conf.extend(c)
            flags.extend(f)
            n += k
        out[cat] = average_precision(conf, flags, n)
    return out


def mean_ap(ap_per_class: dict[str, float]) -> float:
    """Mean over classes that have at least one GT track (NaN entries skipped)."""
    vals = [v for v in ap_per_class.values() if not np.isnan(v)]
    return float(np.mean(vals)) if vals else float("nan")


def track_ap(preds, gts, config: MetricConfig = MetricConfig(), categories=None) -> tuple[dict[str, float], float]:
    """Track AP per class and their mean for a single sequence."""
    preds, gts = list(preds), list(gts)
    if categories is None:
        categories = sorted({t.category for t in gts} | {t.category for t in preds})
    ap = pooled_ap([sequence_ap_terms(preds, gts, categories, config)], categories)
    return ap, mean_ap(ap)
