"""Render a scenario into per-frame amodal annotations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..geometry import CameraIntrinsics, CameraPose, cuboid_corners, project, project_many
from .scenario import ScenarioConfig
from .visibility import boxes_in_frame, compute_visibility


@dataclass(frozen=True)
class AnnotatedObject:
    """One agent in one frame.

    ``p`` is the image projection of the 3D center ``P`` and ``s`` the
    extent of the projected cuboid; the amodal box is ``p +/- s/2``.
    ``in_frame`` is False once the box has left the image entirely.
    """

    id: int
    category: str
    p: tuple[float, float]
    s: tuple[float, float]
    vis: float
    P: tuple[float, float, float]
    depth: float
    in_frame: bool = True

    @property
    def box(self) -> tuple[float, float, float, float]:
        (u, v), (w, h) = self.p, self.s
        return (u - w / 2, v - h / 2, u + w / 2, v + h / 2)


@dataclass(frozen=True)
class Frame:
    index: int
    intrinsics: CameraIntrinsics
    pose: CameraPose
    objects: tuple[AnnotatedObject, ...]

    def get(self, obj_id: int) -> AnnotatedObject | None:
        for o in self.objects:
            if o.id == obj_id:
                return o
        return None


@dataclass(frozen=True)
class Sequence:
    name: str
    seed: int
    fps: float
    image_size: tuple[int, int]
    frames: tuple[Frame, ...]

    def __len__(self):
        return len(self.frames)

    def ids(self) -> list[int]:
        return sorted({o.id for f in self.frames for o in f.objects})

    def tracks(self) -> dict[int, dict[int, AnnotatedObject]]:
        """``{id: {frame: object}}`` over all annotated frames."""
        out: dict[int, dict[int, AnnotatedObject]] = {}
        for f in self.frames:
            for o in f.objects:
                out.setdefault(o.id, {})[f.index] = o
        return out


def _aabb(uv: np.ndarray) -> tuple[float, float, float, float]:
    return float(uv[:, 0].min()), float(uv[:, 1].min()), float(uv[:, 0].max()), float(uv[:, 1].max())


def simulate(config: ScenarioConfig) -> Sequence:
    """Deterministically render ``config``.

    Agents with any corner closer than ``near_plane`` are left out of that
    frame's annotations; occluders in that state are not rasterised.
    """
    frames = []
    for f in range(config.num_frames):
        K, pose = config.intrinsics[f], config.poses[f]
        rows = []
        for agent in config.agents:
            P = agent.position(f)
            if P is None:
                continue
            corners = cuboid_corners(P, agent.size3d, agent.yaw)
            uv, depth = project_many(K, pose, corners)
            if depth.min() <= config.near_plane:
                continue
            l, t, r, b = _aabb(uv)
            p, d = project(K, pose, P)
            rows.append((agent, P, (float(p[0]), float(p[1])), (r - l, b - t), d))
        occ_boxes, occ_depths = [], []
        for occ in config.occluders:
            uv, depth = project_many(K, pose, cuboid_corners(occ.center, occ.size, occ.yaw))
            if depth.min() <= config.near_plane:
                continue
            occ_boxes.append(_aabb(uv))
            occ_depths.append(float(pose.to_camera(np.asarray(occ.center))[2]))
        if rows:
            boxes = np.array(
                [(p[0] - s[0] / 2, p[1] - s[1] / 2, p[0] + s[0] / 2, p[1] + s[1] / 2) for _, _, p, s, _ in rows]
            )
            depths = np.array([d for *_, d in rows])
            vis = compute_visibility(
                boxes, depths, config.image_size, config.visibility_stride, occ_boxes or None, occ_depths or None
            )
            inside = boxes_in_frame(boxes, config.image_size)
        objects = []
        for i, (agent, P, p, s, d) in enumerate(rows):
            objects.append(
                AnnotatedObject(
                    id=agent.id,
                    category=agent.category,
                    p=p,
                    s=(float(s[0]), float(s[1])),
                    vis=float(vis[i]) if inside[i] else 0.0,
                    P=(float(P[0]), float(P[1]), float(P[2])),
                    depth=float(d),
                    in_frame=bool(inside[i]),
                )
            )
        frames.append(Frame(f, K, pose, tuple(objects)))
    return Sequence(config.name, config.seed, config.fps, tuple(config.image_size), tuple(frames))
