"""KITTI tracking label files.

One object per line, whitespace separated::

    frame track_id type truncated occluded alpha left top right bottom
    h w l x y z rotation_y [score]
"""
from __future__ import annotations

from dataclasses import dataclass

from .common import MalformedLine, format_float, parse_float, parse_int, split_lines

DONT_CARE = "DontCare"


@dataclass(frozen=True)
class KittiTrackRecord:
    frame: int
    track_id: int
    type: str
    truncated: float
    occluded: int
    alpha: float
    bbox: tuple[float, float, float, float]
    dimensions: tuple[float, float, float]  # h, w, l
    location: tuple[float, float, float]
    rotation_y: float
    score: float | None = None

    def __post_init__(self):
        l, t, r, b = self.bbox
        if r < l or b < t:
            raise ValueError(f"bbox with negative extent: {self.bbox}")
        if self.frame < 0:
            raise ValueError(f"negative frame {self.frame}")


def _parse_line(line_no: int, line: str) -> KittiTrackRecord:
    tok = line.split()
    if len(tok) not in (17, 18):
        raise MalformedLine(line_no, f"expected 17 or 18 fields, got {len(tok)}")
    floats = [parse_float(tok[i], line_no, f"field {i + 1}") for i in range(5, len(tok))]
    frame = parse_int(tok[0], line_no, "frame")
    if frame < 0:
        raise MalformedLine(line_no, f"negative frame {frame}")
    truncated = parse_float(tok[3], line_no, "truncated")
    occluded = parse_int(tok[4], line_no, "occluded")
    bbox = tuple(floats[1:5])
    if bbox[2] < bbox[0] or bbox[3] < bbox[1]:
        raise MalformedLine(line_no, "bbox right < left or bottom < top")
    return KittiTrackRecord(
        frame=frame,
        track_id=parse_int(tok[1], line_no, "track_id"),
        type=tok[2],
        truncated=truncated,
        occluded=occluded,
        alpha=floats[0],
        bbox=bbox,
        dimensions=tuple(floats[5:8]),
        location=tuple(floats[8:11]),
        rotation_y=floats[11],
        score=floats[12] if len(floats) == 13 else None,
    )


def parse_kitti(text: str) -> list[KittiTrackRecord]:
    return [_parse_line(i, line) for i, line in split_lines(text)]


def format_kitti_record(r: KittiTrackRecord) -> str:
    parts = [str(r.frame), str(r.track_id), r.type, format_float(r.truncated), str(r.occluded)]
    vals = [r.alpha, *r.bbox, *r.dimensions, *r.location, r.rotation_y]
    if r.score is not None:
        vals.append(r.score)
    parts.extend(format_float(v) for v in vals)
    return " ".join(parts)


def write_kitti(records) -> str:
    return "".join(format_kitti_record(r) + "\n" for r in records)
