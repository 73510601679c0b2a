"""Conversions between simulator/tracker objects, file records and
evaluation tracks."""
from __future__ import annotations

import numpy as np

from ..metrics.common import EvalTrack
from ..simworld.simulate import Sequence
from .kitti import DONT_CARE, KittiTrackRecord
from .mot import MotRecord

GT_MIN_VISIBILITY = 0.15


def sequence_gt_tracks(sequence: Sequence, min_visibility: float = GT_MIN_VISIBILITY) -> list[EvalTrack]:
    """Ground truth for evaluation: amodal boxes where ``vis >= min_visibility``."""
    tracks: dict[int, EvalTrack] = {}
    for f in sequence.frames:
        for o in f.objects:
            if not o.in_frame or o.vis < min_visibility:
                continue
            t = tracks.setdefault(o.id, EvalTrack(o.id, o.category))
            t.boxes[f.index] = o.box
    return [tracks[k] for k in sorted(tracks)]


def results_to_tracks(results) -> list[EvalTrack]:
    """Tracker :class:`FrameResult` list to tracks; confidence is the mean emitted score."""
    tracks: dict[int, EvalTrack] = {}
    scores: dict[int, list[float]] = {}
    for r in results:
        for b in r.boxes:
            t = tracks.setdefault(b.id, EvalTrack(b.id, b.category))
            t.boxes[r.frame] = b.box
            scores.setdefault(b.id, []).append(b.score)
    for k, t in tracks.items():
        t.confidence = float(np.mean(scores[k]))
    return [tracks[k] for k in sorted(tracks)]


def results_to_kitti(results) -> list[KittiTrackRecord]:
    out = []
    for r in results:
        for b in sorted(r.boxes, key=lambda b: b.id):
            out.append(
                KittiTrackRecord(
                    r.frame, b.id, b.category, 0.0, 0, -10.0, b.box,
                    (-1.0, -1.0, -1.0), (-1000.0, -1000.0, -1000.0), -10.0, float(b.score),
                )
            )
    return out


def tracks_to_kitti(tracks, with_score: bool = False) -> list[KittiTrackRecord]:
    rows = []
    for t in tracks:
        for f, box in t.boxes.items():
            rows.append(
                KittiTrackRecord(
                    f, t.id, t.category, 0.0, 0, -10.0, tuple(float(v) for v in box),
                    (-1.0, -1.0, -1.0), (-1000.0, -1000.0, -1000.0), -10.0,
                    float(t.confidence) if with_score else None,
                )
            )
    rows.sort(key=lambda r: (r.frame, r.track_id))
    return rows


def kitti_to_tracks(records, categories=None) -> list[EvalTrack]:
    """Group records into tracks, dropping ``DontCare`` rows and other
    categories. Confidence is the mean score (1 when scores are absent)."""
    tracks: dict[int, EvalTrack] = {}
    scores: dict[int, list[float]] = {}
    for r in records:
        if r.type == DONT_CARE or r.track_id < 0 or (categories is not None and r.type not in categories):
            continue
        t = tracks.setdefault(r.track_id, EvalTrack(r.track_id, r.type))
        if t.category != r.type:
            raise ValueError(f"track {r.track_id} changes category")
        if r.frame in t.boxes:
            raise ValueError(f"track {r.track_id} has two boxes in frame {r.frame}")
        t.boxes[r.frame] = r.bbox
        scores.setdefault(r.track_id, []).append(1.0 if r.score is None else r.score)
    for k, t in tracks.items():
        t.confidence = float(np.mean(scores[k]))
    return [tracks[k] for k in sorted(tracks)]


def tracks_to_mot(tracks) -> list[MotRecord]:
    rows = []
    for t in tracks:
        for f, (l, top, r, b) in t.boxes.items():
            rows.append(MotRecord(f + 1, t.id, l, top, r - l, b - top, float(t.confidence)))
    rows.sort(key=lambda r: (r.frame, r.id))
    return rows


def mot_to_tracks(records, category: str = "Pedestrian") -> list[EvalTrack]:
    """MOT files carry a single class; frames become 0-based."""
    tracks: dict[int, EvalTrack] = {}
    scores: dict[int, list[float]] = {}
    for r in records:
        if r.id < 0:
            continue
        t = tracks.setdefault(r.id, EvalTrack(r.id, category))
        if r.frame - 1 in t.boxes:
            raise ValueError(f"track {r.id} has two boxes in frame {r.frame}")
        t.boxes[r.frame - 1] = r.box
        scores.setdefault(r.id, []).append(r.conf)
    for k, t in tracks.items():
        t.confidence = float(np.mean(scores[k]))
    return [tracks[k] for k in sorted(tracks)]
