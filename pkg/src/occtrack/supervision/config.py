from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from enum import Enum


class Mode(str, Enum):
    """How occluded objects are supervised."""

    ALL_GT = "AllGT"
    FILTERED_GT = "FilteredGT"
    CONST_V2D = "ConstV2D"
    CONST_V3D = "ConstV3D"


@dataclass(frozen=True)
class SupervisionConfig:
    t_vis: float = 0.05
    t_occl: float = 0.15
    mode: Mode = Mode.CONST_V3D
    invisible_loss_weight: float = 20.0
    lambda_off: float = 1.0
    lambda_s: float = 0.1
    lambda_d: float = 1.0
    output_stride: int = 4
    min_overlap: float = 0.7

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0 <= self.t_vis < self.t_occl <= 1:
            raise ValueError(f"need 0 <= t_vis < t_occl <= 1, got {self.t_vis}, {self.t_occl}")
        if min(self.invisible_loss_weight, self.lambda_off, self.lambda_s, self.lambda_d) <= 0:
            raise ValueError("loss weights must be > 0")
        if self.output_stride < 1:
            raise ValueError("output_stride must be >= 1")

    def to_json(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return d

    @classmethod
    def from_json(cls, d: dict) -> "SupervisionConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown supervision settings: {sorted(unknown)}")
        return cls(**d)
