"""Online tracker: greedy displacement-based association with optional
constant-velocity hallucination of occluded tracks."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from enum import Enum

import numpy as np

from ..geometry import BehindCamera, CameraIntrinsics, CameraPose, project
from ..simworld.detector import Detection


class OcclusionMode(str, Enum):
    NONE = "None"
    CONST_V2D = "ConstV2D"
    CONST_V3D = "ConstV3D"


class OutOfOrderFrame(ValueError):
    pass


@dataclass(frozen=True)
class TrackerConfig:
    score_threshold: float = 0.3
    visibility_threshold: float = 0.0
    max_occlusion_age: int = 30
    rebirth_window: int = 0
    occlusion_mode: OcclusionMode = OcclusionMode.CONST_V3D
    radius_scale: float = 1.0  # matching radius = radius_scale * sqrt(w * h)

    def __post_init__(self):
        object.__setattr__(self, "occlusion_mode", OcclusionMode(self.occlusion_mode))
        for name in ("score_threshold", "visibility_threshold"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.max_occlusion_age < 0 or self.rebirth_window < 0:
            raise ValueError("ages and windows must be >= 0")
        if self.radius_scale <= 0:
            raise ValueError("radius_scale must be > 0")

    def to_json(self) -> dict:
        d = asdict(self)
        d["occlusion_mode"] = self.occlusion_mode.value
        return d

    @classmethod
    def from_json(cls, d: dict) -> "TrackerConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown tracker settings: {sorted(unknown)}")
        return cls(**d)


def matching_radius(size, scale: float = 1.0) -> float:
    """Gate for center matching: geometric mean of the box sides."""
    return scale * math.sqrt(max(size[0], 0.0) * max(size[1], 0.0))


class TrackStatus(str, Enum):
    ACTIVE = "active"
    OCCLUDED = "occluded"
    DEAD = "dead"


@dataclass(frozen=True)
class HistoryEntry:
    frame: int
    center: tuple[float, float]
    size: tuple[float, float]
    score: float
    hallucinated: bool


@dataclass
class Track:
    id: int
    category: str
    center: np.ndarray  # position at the latest processed frame (observed or hypothesised)
    size: tuple[float, float]
    score: float
    velocity2d: np.ndarray = field(default_factory=lambda: np.zeros(2))
    world: np.ndarray | None = None
    velocity3d: np.ndarray | None = None
    status: TrackStatus = TrackStatus.ACTIVE
    age: int = 0
    history: list[HistoryEntry] = field(default_factory=list)

    @property
    def alive(self) -> bool:
        return self.status != TrackStatus.DEAD


@dataclass(frozen=True)
class EmittedBox:
    id: int
    category: str
    center: tuple[float, float]
    size: tuple[float, float]
    score: float

    @property
    def box(self):
        (u, v), (w, h) = self.center, self.size
        return (u - w / 2, v - h / 2, u + w / 2, v + h / 2)


@dataclass(frozen=True)
class FrameResult:
    frame: int
    boxes: tuple[EmittedBox, ...]
    occluded: tuple[int, ...]  # ids being hallucinated after this frame


NEW = -1


def associate(detections, prev_centers, prev_sizes, radius_scale: float = 1.0, prev_categories=None):
    """Greedy matching of detections to previous-frame centers.

    Detections are visited by descending score (ties by input order).  Each
    projects back to ``q = p - d`` and takes the nearest still-free center
    within that center's radius.  With ``prev_categories`` a detection only
    considers centers of its own category.  Returns, per detection, the
    index into ``prev_centers`` or :data:`NEW`.
    """
    n = len(detections)
    prev = np.asarray(prev_centers, dtype=np.float64).reshape(-1, 2)
    radii = np.array([matching_radius(s, radius_scale) for s in prev_sizes])
    taken = np.zeros(len(prev), dtype=bool)
    result = [NEW] * n
    order = sorted(range(n), key=lambda i: -detections[i].score)
    for i in order:
        if not len(prev):
            break
        det = detections[i]
        q = np.array([det.p[0] - det.d[0], det.p[1] - det.d[1]])
        dist = np.hypot(prev[:, 0] - q[0], prev[:, 1] - q[1])
        ok = ~taken & (dist <= radii)
        if prev_categories is not None:
            ok &= np.array([c == det.category for c in prev_categories], dtype=bool)
        if not ok.any():
            continue
        cand = np.flatnonzero(ok)
        j = int(cand[np.argmin(dist[cand])])
        taken[j] = True
        result[i] = j
    return result


class Tracker:
    """Single-sequence online tracker.  Feed frames in order via :meth:`step`."""

    def __init__(self, config: TrackerConfig = TrackerConfig(), image_size=None):
        self.config = config
        self.image_size = image_size
        self.tracks: list[Track] = []
        self.last_frame: int | None = None
        self.fell_back_to_2d = False
        self._next_id = 1

    @property
    def live_tracks(self) -> list[Track]:
        return [t for t in self.tracks if t.alive]

    def step(
        self,
        frame_index: int,
        detections,
        camera: tuple[CameraIntrinsics, CameraPose] | None = None,
    ) -> FrameResult:
        if self.last_frame is not None and frame_index <= self.last_frame:
            raise OutOfOrderFrame(f"frame {frame_index} after {self.last_frame}")
        gap = 1 if self.last_frame is None else frame_index - self.last_frame
        self.last_frame = frame_index
        cfg = self.config
        live = self.live_tracks
        detections = list(detections)
        # a skipped frame is an unobserved frame for every live track
        for _ in range(gap - 1):
            for trk in live:
                self._miss(trk, frame_index, camera)
            live = self.live_tracks

        match = associate(
            detections, [t.center for t in live], [t.size for t in live], cfg.radius_scale, [t.category for t in live]
        )
        matched_tracks = set()
        emitted = []
        for i, j in enumerate(match):
            det = detections[i]
            if j == NEW:
                if det.score < cfg.score_threshold:
                    continue
                trk = Track(
                    id=self._next_id,
                    category=det.category,
                    center=np.array(det.p, dtype=np.float64),
                    size=tuple(det.s),
                    score=det.score,
                    world=None if det.P is None else np.array(det.P, dtype=np.float64),
                )
                self._next_id += 1
                self.tracks.append(trk)
            else:
                trk = live[j]
                matched_tracks.add(trk.id)
                new_center = np.array(det.p, dtype=np.float64)
                trk.velocity2d = new_center - trk.center
                trk.center = new_center
                trk.size = tuple(det.s)
                trk.score = det.score
                if det.P is not None:
                    new_world = np.array(det.P, dtype=np.float64)
                    trk.velocity3d = None if trk.world is None else new_world - trk.world
                    trk.world = new_world
                else:
                    trk.world = trk.velocity3d = None
                trk.status = TrackStatus.ACTIVE
                trk.age = 0
            trk.history.append(HistoryEntry(frame_index, tuple(map(float, det.p)), tuple(det.s), det.score, False))
            if det.vis_flag >= cfg.visibility_threshold:
                emitted.append(EmittedBox(trk.id, trk.category, tuple(map(float, det.p)), tuple(det.s), det.score))
        for trk in live:
            if trk.id not in matched_tracks:
                self._miss(trk, frame_index, camera)
        occluded = tuple(t.id for t in self.tracks if t.status == TrackStatus.OCCLUDED)
        return FrameResult(frame_index, tuple(emitted), occluded)

    def _miss(self, trk: Track, frame_index: int, camera) -> None:
        cfg = self.config
        mode = cfg.occlusion_mode
        if mode == OcclusionMode.NONE or trk.age + 1 > cfg.max_occlusion_age:
            trk.status = TrackStatus.DEAD
            return
        trk.status = TrackStatus.OCCLUDED
        trk.age += 1
        use_3d = mode == OcclusionMode.CONST_V3D
        if use_3d and (camera is None or trk.world is None):
            self.fell_back_to_2d = True
            use_3d = False
        if use_3d:
            v = trk.velocity3d if trk.velocity3d is not None else np.zeros(3)
            world = trk.world + v
            try:
                uv, _ = project(camera[0], camera[1], world)
            except BehindCamera:
                trk.status = TrackStatus.DEAD
                return
            trk.velocity2d = uv - trk.center
            trk.center = uv
            trk.world = world
        else:
            trk.center = trk.center + trk.velocity2d
        if self.image_size is not None and not _in_image(trk.center, trk.size, self.image_size):
            trk.status = TrackStatus.DEAD
            return
        trk.history.append(
            HistoryEntry(frame_index, (float(trk.center[0]), float(trk.center[1])), trk.size, trk.score, True)
        )


def _in_image(center, size, image_size) -> bool:
    (u, v), (w, h) = center, size
    W, H = image_size
    return u + w / 2 > 0 and u - w / 2 < W and v + h / 2 > 0 and v - h / 2 < H


def run_tracker(detections_per_frame, config: TrackerConfig, cameras=None, image_size=None) -> list[FrameResult]:
    """Run a fresh tracker over a whole sequence."""
    tracker = Tracker(config, image_size)
    out = []
    for f, dets in enumerate(detections_per_frame):
        cam = cameras[f] if cameras is not None else None
        out.append(tracker.step(f, dets, cam))
    return out
