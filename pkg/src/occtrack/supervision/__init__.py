from .config import Mode, SupervisionConfig
from .labels import (
    LabelEntry,
    LabelSet,
    Status,
    classify_visibility,
    displacement_targets,
    generate_pseudo_ground_truth,
    label_sequence,
    label_track,
    occlusion_sampling_weights,
)
from .losses import (
    DomainError,
    LossBreakdown,
    focal_loss,
    frame_losses,
    joint_loss,
    masked_l1,
    regression_l1_losses,
    total_loss,
)
from .targets import TargetMaps, gaussian_radius, render_target_maps

__all__ = [
    "DomainError",
    "LabelEntry",
    "LabelSet",
    "LossBreakdown",
    "Mode",
    "Status",
    "SupervisionConfig",
    "TargetMaps",
    "classify_visibility",
    "displacement_targets",
    "focal_loss",
    "frame_losses",
    "gaussian_radius",
    "generate_pseudo_ground_truth",
    "joint_loss",
    "label_sequence",
    "label_track",
    "masked_l1",
    "occlusion_sampling_weights",
    "regression_l1_losses",
    "render_target_maps",
    "total_loss",
]
