"""Line-delimited JSON carrier for annotated sequences and their labels.

Line 1 is a header object; each following line is one frame. Floats go
through ``json`` which writes the shortest round-trip representation, so
reading back gives bit-identical values.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from ..geometry import CameraIntrinsics, CameraPose
from ..simworld.simulate import AnnotatedObject, Frame, Sequence
from ..supervision.config import Mode
from ..supervision.labels import LabelEntry, LabelSet

FORMAT_NAME = "occtrack-sequence"
SCHEMA_VERSION = 1
SUPPORTED_VERSIONS = (1,)


class SchemaVersionMismatch(ValueError):
    pass


class CorruptDocument(ValueError):
    pass


@dataclass(frozen=True)
class SequenceDocument:
    sequence: Sequence
    labels: LabelSet | None = None


def _dumps(obj) -> str:
    return json.dumps(obj, allow_nan=False, separators=(",", ":"))


def _object_json(o: AnnotatedObject) -> dict:
    return {
        "id": o.id,
        "category": o.category,
        "p": list(o.p),
        "s": list(o.s),
        "vis": o.vis,
        "P": list(o.P),
        "depth": o.depth,
        "in_frame": o.in_frame,
    }


def _object_from_json(d: dict) -> AnnotatedObject:
    return AnnotatedObject(
        id=int(d["id"]),
        category=d["category"],
        p=(float(d["p"][0]), float(d["p"][1])),
        s=(float(d["s"][0]), float(d["s"][1])),
        vis=float(d["vis"]),
        P=tuple(float(x) for x in d["P"]),
        depth=float(d["depth"]),
        in_frame=bool(d["in_frame"]),
    )


def dumps_sequence(sequence: Sequence, labels: LabelSet | None = None) -> str:
    if labels is not None and len(labels.frames) != len(sequence.frames):
        raise ValueError("label set and sequence differ in frame count")
    header = {
        "format": FORMAT_NAME,
        "version": SCHEMA_VERSION,
        "name": sequence.name,
        "seed": sequence.seed,
        "fps": sequence.fps,
        "image_size": list(sequence.image_size),
        "num_frames": len(sequence.frames),
        "label_mode": None if labels is None else labels.mode.value,
    }
    out = [_dumps(header)]
    for i, f in enumerate(sequence.frames):
        row = {
            "frame": f.index,
            "intrinsics": f.intrinsics.as_list(),
            "rotation": f.pose.rotation.tolist(),
            "translation": f.pose.translation.tolist(),
            "objects": [_object_json(o) for o in f.objects],
        }
        if labels is not None:
            row["labels"] = [e.to_json() for e in labels.frames[i]]
        out.append(_dumps(row))
    return "\n".join(out) + "\n"


def loads_sequence(text: str) -> SequenceDocument:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise CorruptDocument("empty document")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as e:
        raise CorruptDocument(f"line 1: {e}") from None
    if not isinstance(header, dict) or header.get("format") != FORMAT_NAME:
        raise CorruptDocument("line 1: not a sequence document header")
    if header.get("version") not in SUPPORTED_VERSIONS:
        raise SchemaVersionMismatch(
            f"unsupported sequence document version {header.get('version')!r}; supported: {SUPPORTED_VERSIONS}"
        )
    try:
        n = int(header["num_frames"])
        name, seed, fps = str(header["name"]), int(header["seed"]), float(header["fps"])
        image_size = tuple(int(v) for v in header["image_size"])
        mode = header.get("label_mode")
        if mode is not None:
            mode = Mode(mode)
    except (KeyError, TypeError, ValueError) as e:
        raise CorruptDocument(f"line 1: bad header field: {e}") from None
    if len(lines) - 1 != n:
        raise CorruptDocument(f"header announces {n} frames, found {len(lines) - 1}")
    frames, label_frames = [], []
    for line_no, line in enumerate(lines[1:], start=2):
        try:
            row = json.loads(line)
            pose = CameraPose(row["rotation"], row["translation"])
            K = CameraIntrinsics(*row["intrinsics"])
            objects = tuple(_object_from_json(o) for o in row["objects"])
            frames.append(Frame(int(row["frame"]), K, pose, objects))
            if mode is not None:
                label_frames.append(tuple(LabelEntry.from_json(e) for e in row["labels"]))
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as e:
            raise CorruptDocument(f"line {line_no}: {e}") from None
    seq = Sequence(name, seed, fps, image_size, tuple(frames))
    labels = None if mode is None else LabelSet(mode, tuple(label_frames))
    return SequenceDocument(seq, labels)


def write_sequence(path, sequence: Sequence, labels: LabelSet | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_sequence(sequence, labels))


def read_sequence(path) -> SequenceDocument:
    with open(path, encoding="utf-8") as fh:
        return loads_sequence(fh.read())
