"""Box and track IoU kernels. Boxes are ``(left, top, right, bottom)``."""
import numpy as np

from .._accel import USE_NUMBA, njit


@njit(cache=True)
def _box_iou_matrix_numba(a, b):
    out = np.zeros((a.shape[0], b.shape[0]))
    for i in range(a.shape[0]):
        area_a = (a[i, 2] - a[i, 0]) * (a[i, 3] - a[i, 1])
        for j in range(b.shape[0]):
            iw = min(a[i, 2], b[j, 2]) - max(a[i, 0], b[j, 0])
            ih = min(a[i, 3], b[j, 3]) - max(a[i, 1], b[j, 1])
            if iw <= 0.0 or ih <= 0.0:
                continue
            inter = iw * ih
            union = area_a + (b[j, 2] - b[j, 0]) * (b[j, 3] - b[j, 1]) - inter
            if union > 0.0:
                out[i, j] = inter / union
    return out


def box_iou_matrix_numba(a, b):
    a = np.ascontiguousarray(a, dtype=np.float64).reshape(-1, 4)
    b = np.ascontiguousarray(b, dtype=np.float64).reshape(-1, 4)
    return _box_iou_matrix_numba(a, b)


def box_iou_matrix_numpy(a, b):
    a = np.asarray(a, dtype=np.float64).reshape(-1, 4)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 4)
    iw = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0])
    ih = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1])
    inter = np.where((iw > 0) & (ih > 0), iw * ih, 0.0)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where((inter > 0) & (union > 0), inter / union, 0.0)
    return out


def box_iou_matrix(a, b):
    """Pairwise IoU between ``(n, 4)`` and ``(m, 4)`` box arrays."""
    if USE_NUMBA:
        return box_iou_matrix_numba(a, b)
    return box_iou_matrix_numpy(a, b)


@njit(cache=True)
def _track_iou_matrix_numba(gt, pred):
    n, T = gt.shape[0], gt.shape[1]
    m = pred.shape[0]
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            inter_sum = 0.0
            union_sum = 0.0
            for t in range(T):
                g_ok = not np.isnan(gt[i, t, 0])
                p_ok = not np.isnan(pred[j, t, 0])
                area_g = 0.0
                area_p = 0.0
                if g_ok:
                    area_g = (gt[i, t, 2] - gt[i, t, 0]) * (gt[i, t, 3] - gt[i, t, 1])
                if p_ok:
                    area_p = (pred[j, t, 2] - pred[j, t, 0]) * (pred[j, t, 3] - pred[j, t, 1])
                inter = 0.0
                if g_ok and p_ok:
                    iw = min(gt[i, t, 2], pred[j, t, 2]) - max(gt[i, t, 0], pred[j, t, 0])
                    ih = min(gt[i, t, 3], pred[j, t, 3]) - max(gt[i, t, 1], pred[j, t, 1])
                    if iw > 0.0 and ih > 0.0:
                        inter = iw * ih
                inter_sum += inter
                union_sum += area_g + area_p - inter
            if union_sum > 0.0:
                out[i, j] = inter_sum / union_sum
    return out


def track_iou_matrix_numba(gt, pred):
    gt = np.ascontiguousarray(gt, dtype=np.float64)
    pred = np.ascontiguousarray(pred, dtype=np.float64)
    if gt.shape[0] == 0 or pred.shape[0] == 0:
        return np.zeros((gt.shape[0], pred.shape[0]))
    return _track_iou_matrix_numba(gt, pred)


def track_iou_matrix_numpy(gt, pred):
    gt = np.asarray(gt, dtype=np.float64)
    pred = np.asarray(pred, dtype=np.float64)
    n, m = gt.shape[0], pred.shape[0]
    if n == 0 or m == 0:
        return np.zeros((n, m))
    g_ok = ~np.isnan(gt[:, :, 0])
    p_ok = ~np.isnan(pred[:, :, 0])
    area_g = np.where(g_ok, (gt[..., 2] - gt[..., 0]) * (gt[..., 3] - gt[..., 1]), 0.0)
    area_p = np.where(p_ok, (pred[..., 2] - pred[..., 0]) * (pred[..., 3] - pred[..., 1]), 0.0)
    g = gt[:, None]
    p = pred[None, :]
    with np.errstate(invalid="ignore"):
        iw = np.minimum(g[..., 2], p[..., 2]) - np.maximum(g[..., 0], p[..., 0])
        ih = np.minimum(g[..., 3], p[..., 3]) - np.maximum(g[..., 1], p[..., 1])
        both = g_ok[:, None] & p_ok[None, :]
        inter = np.where(both & (iw > 0) & (ih > 0), iw * ih, 0.0)
    # accumulate frame by frame to mirror the loop kernel's summation order
    inter_sum = np.zeros((n, m))
    union_sum = np.zeros((n, m))
    for t in range(gt.shape[1]):
        inter_sum += inter[:, :, t]
        union_sum += area_g[:, None, t] + area_p[None, :, t] - inter[:, :, t]
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(union_sum > 0, inter_sum / union_sum, 0.0)


def track_iou_matrix(gt, pred):
    """Track IoU between dense ``(n, T, 4)`` and ``(m, T, 4)`` stacks.

    Absent frames are NaN rows; they count as empty boxes.
    """
    if USE_NUMBA:
        return track_iou_matrix_numba(gt, pred)
    return track_iou_matrix_numpy(gt, pred)
