from .clearmot import ClearCounts, FrameMatch, clear_mot, match_frames, mt_pt_ml
from .common import EvalTrack, MetricConfig, box_iou, hungarian
from .identity import IdentityCounts, idf1, overlap_matrix
from .report import SCHEMA_VERSION, MetricsReport, evaluate
from .trackap import (
    average_precision,
    mean_ap,
    pooled_ap,
    sequence_ap_terms,
    tp_flags,
    track_ap,
    track_iou,
    track_iou_matrix,
)

__all__ = [
    "SCHEMA_VERSION",
    "ClearCounts",
    "EvalTrack",
    "FrameMatch",
    "IdentityCounts",
    "MetricConfig",
    "MetricsReport",
    "average_precision",
    "box_iou",
    "clear_mot",
    "evaluate",
    "hungarian",
    "idf1",
    "match_frames",
    "mean_ap",
    "mt_pt_ml",
    "overlap_matrix",
    "pooled_ap",
    "sequence_ap_terms",
    "tp_flags",
    "track_ap",
    "track_iou",
    "track_iou_matrix",
]
