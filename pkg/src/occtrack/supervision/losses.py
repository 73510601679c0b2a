"""Per-frame losses and the sequence-level objectives."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import SupervisionConfig
from .targets import TargetMaps

PRED_CLAMP = 1e-12


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class LossBreakdown:
    l_p: float = 0.0
    l_v: float = 0.0
    l_off: float = 0.0
    l_s: float = 0.0
    l_d: float = 0.0

    def __post_init__(self):
        if min(self.l_p, self.l_v, self.l_off, self.l_s, self.l_d) < 0:
            raise ValueError("loss components must be >= 0")

    def weighted(self, config: SupervisionConfig) -> float:
        return (
            self.l_p
            + self.l_v
            + config.lambda_off * self.l_off
            + config.lambda_s * self.l_s
            + config.lambda_d * self.l_d
        )


def focal_loss(pred, target, ignore=None, pos_weight=None, alpha: float = 2.0, beta: float = 4.0) -> float:
    """Penalty-reduced pixel focal loss, normalised by the positive count.

    Positives are cells where ``target == 1``.  ``pos_weight`` optionally
    scales each positive's term (e.g. for occluded centers); ``ignore``
    drops cells from both terms.
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise DomainError(f"shape mismatch: pred {pred.shape} vs target {target.shape}")
    p = np.clip(pred, PRED_CLAMP, 1 - PRED_CLAMP)
    keep = np.ones(p.shape, dtype=bool) if ignore is None else ~np.asarray(ignore, dtype=bool)
    pos = (target == 1.0) & keep
    neg = (target < 1.0) & keep
    pos_term = np.log(p) * (1 - p) ** alpha
    if pos_weight is not None:
        pos_term = pos_term * np.broadcast_to(pos_weight, p.shape)
    neg_term = np.log(1 - p) * p**alpha * (1 - target) ** beta
    num_pos = int(pos.sum())
    total = -(pos_term[pos].sum() + neg_term[neg].sum())
    return float(total / max(num_pos, 1))


def masked_l1(pred, target, mask) -> float:
    """Weighted per-cell mean-over-channels L1, averaged over masked cells."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    mask = np.asarray(mask, dtype=np.float64)
    if pred.shape != target.shape or pred.shape[1:] != mask.shape:
        raise DomainError(f"shape mismatch: {pred.shape}, {target.shape}, mask {mask.shape}")
    cells = mask > 0
    n = int(cells.sum())
    if n == 0:
        return 0.0
    per_cell = np.abs(pred - target).mean(axis=0)
    return float((per_cell * mask)[cells].sum() / n)


def regression_l1_losses(pred: dict, target: TargetMaps, center_mask=None) -> tuple[float, float, float]:
    """``(l_off, l_s, l_d)`` from predicted ``offset``/``size``/``displacement`` maps."""
    mask = target.center_mask if center_mask is None else center_mask
    return (
        masked_l1(pred["offset"], target.offset, mask),
        masked_l1(pred["size"], target.size, mask),
        masked_l1(pred["displacement"], target.displacement, target.displacement_mask),
    )


def frame_losses(pred: dict, target: TargetMaps) -> LossBreakdown:
    """All five loss terms for one frame.

    ``pred`` holds ``heatmap`` and ``visibility`` probabilities plus the three
    regression maps.  Occluded centers get their loss weight on the heatmap
    positive term.
    """
    weights = np.where(target.center_mask > 0, target.center_mask, 1.0)
    l_p = focal_loss(pred["heatmap"], target.heatmap, target.heatmap_ignore, pos_weight=weights)
    l_v = focal_loss(pred["visibility"], target.visibility, target.visibility_ignore)
    l_off, l_s, l_d = regression_l1_losses(pred, target)
    return LossBreakdown(l_p, l_v, l_off, l_s, l_d)


def total_loss(frames, config: SupervisionConfig = SupervisionConfig()) -> float:
    """Mean over frames of ``L_p + L_v + lam_off L_off + lam_s L_s + lam_d L_d``."""
    frames = list(frames)
    if not frames:
        raise ValueError("need at least one frame")
    return sum(f.weighted(config) for f in frames) / len(frames)


def joint_loss(synthetic, real, config: SupervisionConfig = SupervisionConfig()) -> float:
    """Synthetic clip mean plus real clip mean (real clips are frame pairs)."""
    return total_loss(synthetic, config) + total_loss(real, config)
