from .detector import BENCHMARK_NOISE, EXACT, Detection, DetectorNoiseConfig, oracle_detector
from .generate import (
    PROFILES,
    benchmark,
    clear_scenario,
    constant_velocity_occlusion_scenario,
    occlusion_scenario,
    stop_behind_occluder_scenario,
)
from .scenario import (
    CATEGORIES,
    STREAM_DETECTOR,
    STREAM_LAYOUT,
    AgentSpec,
    InvalidScenario,
    Occluder,
    ScenarioConfig,
    make_rng,
    poses_from_keyframes,
)
from .simulate import AnnotatedObject, Frame, Sequence, simulate
from .stats import CategoryStats, EmptyDataset, StatsReport, dataset_stats, occlusion_bin
from .visibility import box_cells, boxes_in_frame, compute_visibility, grid_shape

__all__ = [
    "BENCHMARK_NOISE",
    "CATEGORIES",
    "EXACT",
    "PROFILES",
    "STREAM_DETECTOR",
    "STREAM_LAYOUT",
    "AgentSpec",
    "AnnotatedObject",
    "CategoryStats",
    "Detection",
    "DetectorNoiseConfig",
    "EmptyDataset",
    "Frame",
    "InvalidScenario",
    "Occluder",
    "ScenarioConfig",
    "Sequence",
    "StatsReport",
    "benchmark",
    "box_cells",
    "boxes_in_frame",
    "clear_scenario",
    "compute_visibility",
    "constant_velocity_occlusion_scenario",
    "dataset_stats",
    "grid_shape",
    "make_rng",
    "occlusion_bin",
    "occlusion_scenario",
    "oracle_detector",
    "poses_from_keyframes",
    "simulate",
    "stop_behind_occluder_scenario",
]
