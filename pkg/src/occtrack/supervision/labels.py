"""Label generation: visibility classes, pseudo-ground-truth for occluded
objects and displacement targets."""
from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from ..geometry import BehindCamera, project, propagate_constant_velocity, world_velocity
from ..simworld.simulate import AnnotatedObject, Sequence
from .config import Mode, SupervisionConfig


class Status(str, Enum):
    """Supervision status of one object in one frame.

    ``VISIBLE`` and ``SOFT`` are positives with a ground-truth center; SOFT
    marks a warmed-up object between the two thresholds, whose visibility
    target is left unsupervised.  ``OCCLUDED`` is a positive whose center
    may be synthesised.
    """

    NEGATIVE = "negative"
    IGNORE = "ignore"
    VISIBLE = "visible"
    SOFT = "soft"
    OCCLUDED = "occluded"

    @property
    def is_positive(self) -> bool:
        return self in (Status.VISIBLE, Status.SOFT, Status.OCCLUDED)


@dataclass(frozen=True)
class LabelEntry:
    frame: int
    id: int
    category: str
    status: Status
    center: tuple[float, float]
    size: tuple[float, float]
    displacement: tuple[float, float] | None = None
    visibility_class: int | None = None  # 1 visible, 0 occluded, None unsupervised
    loss_weight: float = 0.0
    world_center: tuple[float, float, float] | None = None
    pseudo: bool = False  # center synthesised rather than annotated

    def to_json(self) -> dict:
        return {
            "frame": self.frame,
            "id": self.id,
            "category": self.category,
            "status": self.status.value,
            "center": list(self.center),
            "size": list(self.size),
            "displacement": None if self.displacement is None else list(self.displacement),
            "visibility_class": self.visibility_class,
            "loss_weight": self.loss_weight,
            "world_center": None if self.world_center is None else list(self.world_center),
            "pseudo": self.pseudo,
        }

    @classmethod
    def from_json(cls, d: dict) -> "LabelEntry":
        return cls(
            frame=int(d["frame"]),
            id=int(d["id"]),
            category=d["category"],
            status=Status(d["status"]),
            center=tuple(d["center"]),
            size=tuple(d["size"]),
            displacement=None if d.get("displacement") is None else tuple(d["displacement"]),
            visibility_class=d.get("visibility_class"),
            loss_weight=float(d.get("loss_weight", 0.0)),
            world_center=None if d.get("world_center") is None else tuple(d["world_center"]),
            pseudo=bool(d.get("pseudo", False)),
        )


@dataclass(frozen=True)
class LabelSet:
    mode: Mode
    frames: tuple[tuple[LabelEntry, ...], ...]

    def by_track(self) -> dict[int, dict[int, LabelEntry]]:
        out: dict[int, dict[int, LabelEntry]] = {}
        for entries in self.frames:
            for e in entries:
                out.setdefault(e.id, {})[e.frame] = e
        return out

    def count(self, status: Status) -> int:
        return sum(1 for entries in self.frames for e in entries if e.status == status)


def classify_visibility(vis_sequence, config: SupervisionConfig = SupervisionConfig()) -> list[Status]:
    """Per-frame statuses for one object's visibility history.

    Before warm-up: ``vis > t_occl`` is VISIBLE, ``vis < t_vis`` NEGATIVE,
    anything in between IGNORE.  Once the object has been VISIBLE in two
    strictly consecutive frames it stays positive: OCCLUDED below
    ``t_vis``, SOFT between the thresholds.  Ignore frames break the
    consecutive run.
    """
    statuses = []
    run = 0
    warmed = False
    for vis in vis_sequence:
        vis = float(vis)
        if not 0.0 <= vis <= 1.0:
            raise ValueError(f"visibility must be in [0, 1], got {vis}")
        if vis > config.t_occl:
            statuses.append(Status.VISIBLE)
        elif vis < config.t_vis:
            statuses.append(Status.OCCLUDED if warmed else Status.NEGATIVE)
        else:
            statuses.append(Status.SOFT if warmed else Status.IGNORE)
        run = run + 1 if vis > config.t_occl else 0
        warmed = warmed or run >= 2
    return statuses


def _box_in_image(center, size, image_size) -> bool:
    (u, v), (w, h) = center, size
    W, H = image_size
    return u + w / 2 > 0 and u - w / 2 < W and v + h / 2 > 0 and v - h / 2 < H


def generate_pseudo_ground_truth(track, statuses, cameras, mode, image_size):
    """Centers for the OCCLUDED frames of one track.

    ``track`` maps frame -> :class:`AnnotatedObject`, ``statuses`` maps
    frame -> :class:`Status` and ``cameras`` is indexed by frame with
    ``(intrinsics, pose)`` pairs.  Returns ``{frame: (status, center, size,
    world_center)}`` for every OCCLUDED frame.

    Constant-velocity modes freeze the size at the last annotated value
    before onset and extrapolate the last two annotated centers (3D, then
    projected, or 2D).  A run stops, and its remaining frames become
    NEGATIVE, once the object has left the field of view, the extrapolated
    box leaves the image, or the extrapolated point falls behind the camera.
    """
    mode = Mode(mode)
    out = {}
    frames = sorted(f for f, s in statuses.items() if s == Status.OCCLUDED)
    k = 0
    onset = None
    terminated = False
    for f in frames:
        obj = track[f]
        if onset is None or f != prev_f + 1:
            onset, k, terminated = f, 0, False
            last = track.get(f - 1)
            before = track.get(f - 2)
        else:
            k += 1
        prev_f = f
        if mode in (Mode.ALL_GT, Mode.FILTERED_GT):
            if obj.in_frame:
                out[f] = (Status.OCCLUDED, obj.p, obj.s, obj.P)
            else:
                out[f] = (Status.NEGATIVE, obj.p, obj.s, obj.P)
            continue
        if terminated or last is None or not obj.in_frame:
            terminated = True
            out[f] = (Status.NEGATIVE, obj.p, obj.s, obj.P)
            continue
        size = last.s
        world = None
        if mode == Mode.CONST_V3D:
            V = world_velocity(last.P, before.P) if before is not None else np.zeros(3)
            world = propagate_constant_velocity(last.P, V, k + 1)
            K, pose = cameras[f]
            try:
                uv, _ = project(K, pose, world)
            except BehindCamera:
                terminated = True
                out[f] = (Status.NEGATIVE, obj.p, obj.s, obj.P)
                continue
            center = (float(uv[0]), float(uv[1]))
            world = tuple(float(x) for x in world)
        else:
            v2 = np.subtract(last.p, before.p) if before is not None else np.zeros(2)
            c = np.asarray(last.p) + (k + 1) * v2
            center = (float(c[0]), float(c[1]))
        if not _box_in_image(center, size, image_size):
            terminated = True
            out[f] = (Status.NEGATIVE, obj.p, obj.s, obj.P)
            continue
        out[f] = (Status.OCCLUDED, center, size, world)
    return out


def _all_gt_status(obj: AnnotatedObject, config: SupervisionConfig) -> Status:
    if not obj.in_frame:
        return Status.NEGATIVE
    if obj.vis > config.t_occl:
        return Status.VISIBLE
    if obj.vis < config.t_vis:
        return Status.OCCLUDED
    return Status.SOFT


def _visibility_class(status: Status) -> int | None:
    if status == Status.VISIBLE:
        return 1
    if status == Status.OCCLUDED:
        return 0
    return None


def label_track(track, cameras, image_size, config: SupervisionConfig) -> dict[int, LabelEntry]:
    """Labels (without displacements) for one object's annotated frames."""
    frames = sorted(track)
    if config.mode == Mode.ALL_GT:
        statuses = {f: _all_gt_status(track[f], config) for f in frames}
    else:
        span = range(frames[0], frames[-1] + 1)
        # gaps in the annotation count as invisible frames
        vis = [track[f].vis if f in track else 0.0 for f in span]
        statuses = {f: s for f, s in zip(span, classify_visibility(vis, config)) if f in track}
    pseudo = generate_pseudo_ground_truth(track, statuses, cameras, config.mode, image_size)
    out = {}
    for f in frames:
        obj = track[f]
        status = statuses[f]
        center, size, world, is_pseudo = obj.p, obj.s, obj.P, False
        if f in pseudo:
            status, center, size, world = pseudo[f]
            is_pseudo = status == Status.OCCLUDED and config.mode in (Mode.CONST_V2D, Mode.CONST_V3D)
        if status.is_positive:
            weight = config.invisible_loss_weight if status == Status.OCCLUDED else 1.0
        else:
            weight = 0.0
        out[f] = LabelEntry(
            frame=f,
            id=obj.id,
            category=obj.category,
            status=status,
            center=(float(center[0]), float(center[1])),
            size=(float(size[0]), float(size[1])),
            visibility_class=_visibility_class(status),
            loss_weight=weight,
            world_center=None if world is None else tuple(float(x) for x in world),
            pseudo=is_pseudo,
        )
    return out


def displacement_targets(label_set: LabelSet) -> LabelSet:
    """Fill ``d = c_t - c_{t-1}`` for positives whose previous frame is also
    a positive of the same id.  At dis-occlusion the previous center is the
    synthesised one, which links the reappearance to the hallucinated
    trajectory."""
    tracks = label_set.by_track()
    frames = []
    for entries in label_set.frames:
        row = []
        for e in entries:
            prev = tracks[e.id].get(e.frame - 1)
            d = None
            if e.status.is_positive and prev is not None and prev.status.is_positive:
                d = (e.center[0] - prev.center[0], e.center[1] - prev.center[1])
            row.append(replace(e, displacement=d))
        frames.append(tuple(row))
    return LabelSet(label_set.mode, tuple(frames))


def label_sequence(sequence: Sequence, config: SupervisionConfig = SupervisionConfig()) -> LabelSet:
    """Full label set for a simulated sequence."""
    cameras = [(f.intrinsics, f.pose) for f in sequence.frames]
    per_frame: list[list[LabelEntry]] = [[] for _ in sequence.frames]
    for track in sequence.tracks().values():
        for f, entry in label_track(track, cameras, sequence.image_size, config).items():
            per_frame[f].append(entry)
    raw = LabelSet(config.mode, tuple(tuple(sorted(row, key=lambda e: e.id)) for row in per_frame))
    return displacement_targets(raw)


def occlusion_sampling_weights(label_sets) -> np.ndarray:
    """Sampling probability per sequence, proportional to one plus its
    number of occluded-positive frames."""
    label_sets = list(label_sets)
    if not label_sets:
        raise ValueError("need at least one label set")
    w = np.array([1.0 + ls.count(Status.OCCLUDED) for ls in label_sets])
    return w / w.sum()
