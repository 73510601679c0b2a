from .engine import (
    NEW,
    EmittedBox,
    FrameResult,
    OcclusionMode,
    OutOfOrderFrame,
    Track,
    Tracker,
    TrackerConfig,
    TrackStatus,
    associate,
    matching_radius,
    run_tracker,
)
from .rebirth import choose_merges, rebirth_candidates, track_rebirth

__all__ = [
    "NEW",
    "EmittedBox",
    "FrameResult",
    "OcclusionMode",
    "OutOfOrderFrame",
    "Track",
    "TrackStatus",
    "Tracker",
    "TrackerConfig",
    "associate",
    "choose_merges",
    "matching_radius",
    "rebirth_candidates",
    "run_tracker",
    "track_rebirth",
]
