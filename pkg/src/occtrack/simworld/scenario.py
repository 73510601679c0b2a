"""Scenario description: agents, occluders and the camera path."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import CameraIntrinsics, CameraPose

CATEGORIES = ("Car", "Pedestrian")

STREAM_LAYOUT = 0
STREAM_DETECTOR = 1


class InvalidScenario(ValueError):
    pass


def make_rng(seed: int, stream: int, *extra: int) -> np.random.Generator:
    """Independent PCG64 stream for ``(seed, stream, *extra)``."""
    ss = np.random.SeedSequence(int(seed) & ((1 << 64) - 1), spawn_key=(stream, *extra))
    return np.random.Generator(np.random.PCG64(ss))


def _vec3(v, what) -> tuple[float, float, float]:
    arr = np.asarray(v, dtype=np.float64).reshape(-1)
    if arr.shape != (3,) or not np.all(np.isfinite(arr)):
        raise InvalidScenario(f"{what} must be 3 finite numbers, got {v!r}")
    return (float(arr[0]), float(arr[1]), float(arr[2]))


@dataclass(frozen=True)
class AgentSpec:
    """A cuboid agent moving piecewise-linearly through world waypoints.

    ``stops`` holds ``(a, b)`` frame pairs: the agent freezes at its
    frame-``a`` position through frame ``b`` and then resumes its schedule
    ``b - a`` frames late.
    """

    id: int
    category: str
    size3d: tuple[float, float, float]
    waypoints: tuple[tuple[int, tuple[float, float, float]], ...]
    stops: tuple[tuple[int, int], ...] = ()
    yaw: float = 0.0

    def __post_init__(self):
        if self.category not in CATEGORIES:
            raise InvalidScenario(f"agent {self.id}: unknown category {self.category!r}")
        if len(self.size3d) != 3 or min(self.size3d) <= 0:
            raise InvalidScenario(f"agent {self.id}: size3d components must be > 0")
        if not self.waypoints:
            raise InvalidScenario(f"agent {self.id}: needs at least one waypoint")
        frames = [f for f, _ in self.waypoints]
        if any(b <= a for a, b in zip(frames, frames[1:])):
            raise InvalidScenario(f"agent {self.id}: waypoint frames must be strictly increasing")
        for a, b in self.stops:
            if b < a:
                raise InvalidScenario(f"agent {self.id}: stop interval ({a}, {b}) is reversed")

    def motion_clock(self, frame: int) -> int:
        tau = frame
        for a, b in self.stops:
            tau -= min(max(frame - a, 0), b - a)
        return tau

    def position(self, frame: int) -> np.ndarray | None:
        """World center at ``frame``, or ``None`` outside the agent's lifetime."""
        tau = self.motion_clock(frame)
        first, last = self.waypoints[0][0], self.waypoints[-1][0]
        if tau < first or tau > last:
            return None
        for (f0, p0), (f1, p1) in zip(self.waypoints, self.waypoints[1:]):
            if f0 <= tau <= f1:
                p0 = np.asarray(p0)
                p1 = np.asarray(p1)
                return p0 + (tau - f0) / (f1 - f0) * (p1 - p0)
        return np.asarray(self.waypoints[0][1], dtype=np.float64)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "category": self.category,
            "size": list(self.size3d),
            "yaw": self.yaw,
            "waypoints": [[f, list(p)] for f, p in self.waypoints],
            "stops": [list(s) for s in self.stops],
        }

    @classmethod
    def from_json(cls, d: dict) -> "AgentSpec":
        try:
            return cls(
                id=int(d["id"]),
                category=str(d["category"]),
                size3d=_vec3(d["size"], "agent size"),
                waypoints=tuple((int(f), _vec3(p, "waypoint")) for f, p in d["waypoints"]),
                stops=tuple((int(a), int(b)) for a, b in d.get("stops", ())),
                yaw=float(d.get("yaw", 0.0)),
            )
        except (KeyError, TypeError) as exc:
            raise InvalidScenario(f"bad agent entry {d!r}: {exc}") from exc


@dataclass(frozen=True)
class Occluder:
    """Static cuboid that hides agents but is never annotated."""

    center: tuple[float, float, float]
    size: tuple[float, float, float]
    yaw: float = 0.0

    def to_json(self) -> dict:
        return {"center": list(self.center), "size": list(self.size), "yaw": self.yaw}

    @classmethod
    def from_json(cls, d: dict) -> "Occluder":
        size = _vec3(d["size"], "occluder size")
        if min(size) <= 0:
            raise InvalidScenario("occluder size components must be > 0")
        return cls(_vec3(d["center"], "occluder center"), size, float(d.get("yaw", 0.0)))


def poses_from_keyframes(keyframes, num_frames: int) -> list[CameraPose]:
    """Per-frame poses from ``[frame, [x, y, z], yaw_degrees]`` keyframes.

    Position and yaw are interpolated linearly and held constant outside
    the keyframe range.
    """
    if not keyframes:
        raise InvalidScenario("camera keyframes must be non-empty")
    frames = np.array([int(k[0]) for k in keyframes], dtype=np.float64)
    if np.any(np.diff(frames) <= 0):
        raise InvalidScenario("camera keyframe frames must be strictly increasing")
    pos = np.array([_vec3(k[1], "camera position") for k in keyframes])
    yaw = np.radians([float(k[2]) for k in keyframes])
    poses = []
    for f in range(num_frames):
        c = [np.interp(f, frames, pos[:, i]) for i in range(3)]
        poses.append(CameraPose.from_center_yaw(c, float(np.interp(f, frames, yaw))))
    return poses


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    seed: int
    num_frames: int
    fps: float
    image_size: tuple[int, int]
    intrinsics: tuple[CameraIntrinsics, ...]
    poses: tuple[CameraPose, ...]
    agents: tuple[AgentSpec, ...] = ()
    occluders: tuple[Occluder, ...] = ()
    visibility_stride: int = 8
    near_plane: float = 0.1
    source: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.num_frames < 2:
            raise InvalidScenario("num_frames must be >= 2")
        if self.fps <= 0:
            raise InvalidScenario("fps must be positive")
        if len(self.image_size) != 2 or min(self.image_size) <= 0:
            raise InvalidScenario("image dimensions must be > 0")
        if len(self.intrinsics) != self.num_frames or len(self.poses) != self.num_frames:
            raise InvalidScenario("camera path must cover every frame")
        if self.visibility_stride < 1:
            raise InvalidScenario("visibility_stride must be >= 1")
        ids = [a.id for a in self.agents]
        if len(set(ids)) != len(ids):
            raise InvalidScenario("agent ids must be unique")

    @classmethod
    def from_json(cls, d: dict, seed_override: int | None = None) -> "ScenarioConfig":
        """Build a config from its JSON document (see ``docs/formats.md``)."""
        try:
            num_frames = int(d["num_frames"])
            K = d["intrinsics"]
            if isinstance(K, dict):
                Ks = [CameraIntrinsics(float(K["fx"]), float(K["fy"]), float(K["cx"]), float(K["cy"]))] * num_frames
            else:
                Ks = [CameraIntrinsics(*map(float, k)) for k in K]
            cam = d.get("camera", {"keyframes": [[0, [0, 0, 0], 0]]})
            if "poses" in cam:
                poses = [CameraPose(p["rotation"], p["translation"]) for p in cam["poses"]]
            else:
                poses = poses_from_keyframes(cam["keyframes"], num_frames)
            return cls(
                name=str(d.get("name", "scenario")),
                seed=int(d.get("seed", 0) if seed_override is None else seed_override),
                num_frames=num_frames,
                fps=float(d.get("fps", 10.0)),
                image_size=(int(d["image_size"][0]), int(d["image_size"][1])),
                intrinsics=tuple(Ks),
                poses=tuple(poses),
                agents=tuple(AgentSpec.from_json(a) for a in d.get("agents", ())),
                occluders=tuple(Occluder.from_json(o) for o in d.get("occluders", ())),
                visibility_stride=int(d.get("visibility_stride", 8)),
                near_plane=float(d.get("near_plane", 0.1)),
                source=d,
            )
        except InvalidScenario:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidScenario(f"invalid scenario document: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "num_frames": self.num_frames,
            "fps": self.fps,
            "image_size": list(self.image_size),
            "intrinsics": [k.as_list() for k in self.intrinsics],
            "camera": {
                "poses": [
                    {"rotation": p.rotation.tolist(), "translation": p.translation.tolist()} for p in self.poses
                ]
            },
            "agents": [a.to_json() for a in self.agents],
            "occluders": [o.to_json() for o in self.occluders],
            "visibility_stride": self.visibility_stride,
            "near_plane": self.near_plane,
        }
