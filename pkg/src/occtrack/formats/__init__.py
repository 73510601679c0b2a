from .common import MalformedLine, format_float
from .convert import (
    GT_MIN_VISIBILITY,
    kitti_to_tracks,
    mot_to_tracks,
    results_to_kitti,
    results_to_tracks,
    sequence_gt_tracks,
    tracks_to_kitti,
    tracks_to_mot,
)
from .kitti import KittiTrackRecord, parse_kitti, write_kitti
from .mot import MotRecord, parse_mot, write_mot
from .sequence import (
    SCHEMA_VERSION,
    CorruptDocument,
    SchemaVersionMismatch,
    SequenceDocument,
    dumps_sequence,
    loads_sequence,
    read_sequence,
    write_sequence,
)

__all__ = [
    "GT_MIN_VISIBILITY",
    "SCHEMA_VERSION",
    "CorruptDocument",
    "KittiTrackRecord",
    "MalformedLine",
    "MotRecord",
    "SchemaVersionMismatch",
    "SequenceDocument",
    "dumps_sequence",
    "format_float",
    "kitti_to_tracks",
    "loads_sequence",
    "mot_to_tracks",
    "parse_kitti",
    "parse_mot",
    "read_sequence",
    "results_to_kitti",
    "results_to_tracks",
    "sequence_gt_tracks",
    "tracks_to_kitti",
    "tracks_to_mot",
    "write_kitti",
    "write_mot",
    "write_sequence",
]
