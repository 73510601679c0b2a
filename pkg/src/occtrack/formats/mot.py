"""MOTChallenge text files.

Comma separated, one box per line::

    frame,id,bb_left,bb_top,bb_width,bb_height,conf,x,y[,z]

Frames are 1-based. The world coordinates are -1 when unknown. Nine-field
files are accepted and written back with nine fields.
"""
from __future__ import annotations

from dataclasses import dataclass

from .common import MalformedLine, format_float, parse_float, parse_int, split_lines


@dataclass(frozen=True)
class MotRecord:
    frame: int
    id: int
    bb_left: float
    bb_top: float
    bb_width: float
    bb_height: float
    conf: float = 1.0
    x: float = -1.0
    y: float = -1.0
    z: float = -1.0
    num_fields: int = 10

    def __post_init__(self):
        if self.frame < 1:
            raise ValueError(f"MOT frames are 1-based, got {self.frame}")
        if self.bb_width < 0 or self.bb_height < 0:
            raise ValueError("negative box size")
        if self.num_fields not in (9, 10):
            raise ValueError("num_fields must be 9 or 10")
        if self.num_fields == 9 and self.z != -1.0:
            raise ValueError("a nine-field record cannot carry z")

    @property
    def box(self) -> tuple[float, float, float, float]:
        return (self.bb_left, self.bb_top, self.bb_left + self.bb_width, self.bb_top + self.bb_height)


def _parse_line(line_no: int, line: str) -> MotRecord:
    tok = [t.strip() for t in line.split(",")]
    if len(tok) not in (9, 10):
        raise MalformedLine(line_no, f"expected 9 or 10 fields, got {len(tok)}")
    frame = parse_int(tok[0], line_no, "frame")
    if frame < 1:
        raise MalformedLine(line_no, f"frame must be >= 1, got {frame}")
    vals = [parse_float(tok[i], line_no, f"field {i + 1}") for i in range(2, len(tok))]
    if vals[2] < 0 or vals[3] < 0:
        raise MalformedLine(line_no, "negative box width or height")
    z = vals[7] if len(tok) == 10 else -1.0
    return MotRecord(frame, parse_int(tok[1], line_no, "id"), *vals[:7], z, num_fields=len(tok))


def parse_mot(text: str) -> list[MotRecord]:
    return [_parse_line(i, line) for i, line in split_lines(text)]


def format_mot_record(r: MotRecord) -> str:
    vals = [r.bb_left, r.bb_top, r.bb_width, r.bb_height, r.conf, r.x, r.y]
    if r.num_fields == 10:
        vals.append(r.z)
    return ",".join([str(r.frame), str(r.id)] + [format_float(v) for v in vals])


def write_mot(records) -> str:
    return "".join(format_mot_record(r) + "\n" for r in records)
