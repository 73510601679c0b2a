from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields

import numpy as np

from ..kernels import linear_sum_assignment


@dataclass
class EvalTrack:
    """A track for evaluation: per-frame ``(left, top, right, bottom)`` boxes."""

    id: int
    category: str
    boxes: dict[int, tuple[float, float, float, float]] = field(default_factory=dict)
    confidence: float = 1.0

    def __post_init__(self):
        for f, b in self.boxes.items():
            if f < 0:
                raise ValueError(f"track {self.id}: negative frame index {f}")
            if b[2] < b[0] or b[3] < b[1]:
                raise ValueError(f"track {self.id}: box with negative extent at frame {f}")


@dataclass(frozen=True)
class MetricConfig:
    track_iou_threshold: float = 0.5
    box_match_iou: float = 0.5
    mt_threshold: float = 0.8
    ml_threshold: float = 0.2
    track_ap_assignment: str = "optimal"  # or "greedy"

    def __post_init__(self):
        for name in ("track_iou_threshold", "box_match_iou", "mt_threshold", "ml_threshold"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must be in (0, 1), got {v}")
        if self.track_ap_assignment not in ("optimal", "greedy"):
            raise ValueError("track_ap_assignment must be 'optimal' or 'greedy'")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, d: dict) -> "MetricConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown metric settings: {sorted(unknown)}")
        return cls(**d)


def hungarian(cost) -> list[tuple[int, int]]:
    """Minimum-total-cost one-to-one assignment as ``(row, col)`` pairs."""
    rows, cols = linear_sum_assignment(np.asarray(cost, dtype=np.float64))
    return [(int(r), int(c)) for r, c in zip(rows, cols)]


def box_iou(a, b) -> float:
    iw = min(a[2], b[2]) - max(a[0], b[0])
    ih = min(a[3], b[3]) - max(a[1], b[1])
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union if union > 0 else 0.0


def by_category(tracks, category):
    return [t for t in tracks if t.category == category]


def frame_table(tracks) -> dict[int, list[tuple[int, tuple]]]:
    """``{frame: [(track_id, box), ...]}``."""
    out: dict[int, list] = {}
    for t in tracks:
        for f, b in t.boxes.items():
            out.setdefault(f, []).append((t.id, b))
    return out
