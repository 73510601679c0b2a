"""Pinhole camera math and constant-velocity motion in world coordinates.

Conventions: right-handed, z forward, x right, y down (the KITTI camera
frame).  ``CameraPose.rotation`` maps world to camera, so a world point
``P`` lands at ``R @ P + t`` in the camera frame.  Velocities are in
meters per frame.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

DEPTH_EPS = 1e-9


class BehindCamera(ValueError):
    """The point has non-positive depth and cannot be imaged."""

    def __init__(self, depth: float):
        super().__init__(f"point behind camera (depth={depth!r})")
        self.depth = depth


def _frozen(a, shape) -> np.ndarray:
    arr = np.array(a, dtype=np.float64).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float

    def __post_init__(self):
        if not (self.fx > 0 and self.fy > 0):
            raise ValueError(f"focal lengths must be positive, got fx={self.fx}, fy={self.fy}")

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def as_list(self) -> list[float]:
        return [float(self.fx), float(self.fy), float(self.cx), float(self.cy)]


@dataclass(frozen=True, eq=False)
class CameraPose:
    """World-to-camera extrinsics ``[R|t]``."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        R = _frozen(self.rotation, (3, 3))
        t = _frozen(self.translation, (3,))
        if not np.all(np.isfinite(R)) or not np.all(np.isfinite(t)):
            raise ValueError("pose must be finite")
        if not np.allclose(R @ R.T, np.eye(3), atol=1e-6) or abs(np.linalg.det(R) - 1.0) > 1e-6:
            raise ValueError("rotation must be orthonormal with determinant +1")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    def __eq__(self, other):
        if not isinstance(other, CameraPose):
            return NotImplemented
        return np.array_equal(self.rotation, other.rotation) and np.array_equal(
            self.translation, other.translation
        )

    __hash__ = None

    @classmethod
    def identity(cls) -> "CameraPose":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_center_yaw(cls, center, yaw: float) -> "CameraPose":
        """Camera at world position ``center`` turned by ``yaw`` radians about +y."""
        R_wc = rotation_y(yaw)
        R = R_wc.T
        return cls(R, -R @ np.asarray(center, dtype=np.float64))

    @property
    def center(self) -> np.ndarray:
        """Camera position in world coordinates."""
        return -self.rotation.T @ self.translation

    def to_camera(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        return pts @ self.rotation.T + self.translation


def rotation_y(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def _as_point(point, n) -> np.ndarray:
    arr = np.asarray(point, dtype=np.float64).reshape(n)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"point must be finite, got {arr}")
    return arr


def project(intrinsics: CameraIntrinsics, pose: CameraPose, point) -> tuple[np.ndarray, float]:
    """Image position and depth of a world point.

    Raises :class:`BehindCamera` when the camera-frame depth is at most
    ``DEPTH_EPS``; no near-plane clamping is done.
    """
    P = _as_point(point, 3)
    c = pose.rotation @ P + pose.translation
    depth = float(c[2])
    if depth <= DEPTH_EPS:
        raise BehindCamera(depth)
    uv = np.array([intrinsics.fx * c[0] / depth + intrinsics.cx, intrinsics.fy * c[1] / depth + intrinsics.cy])
    return uv, depth


def project_many(intrinsics: CameraIntrinsics, pose: CameraPose, points) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`project` for an ``(n, 3)`` array.

    Returns ``(uv, depth)``; rows with depth <= ``DEPTH_EPS`` come back as NaN
    in ``uv`` instead of raising.
    """
    c = pose.to_camera(np.asarray(points, dtype=np.float64).reshape(-1, 3))
    depth = c[:, 2]
    ok = depth > DEPTH_EPS
    uv = np.full((len(c), 2), np.nan)
    uv[ok, 0] = intrinsics.fx * c[ok, 0] / depth[ok] + intrinsics.cx
    uv[ok, 1] = intrinsics.fy * c[ok, 1] / depth[ok] + intrinsics.cy
    return uv, depth


def backproject(intrinsics: CameraIntrinsics, pose: CameraPose, uv, depth: float) -> np.ndarray:
    """World point seen at pixel ``uv`` with camera-frame depth ``depth``."""
    u, v = _as_point(uv, 2)
    c = np.array([(u - intrinsics.cx) / intrinsics.fx * depth, (v - intrinsics.cy) / intrinsics.fy * depth, depth])
    return pose.rotation.T @ (c - pose.translation)


def world_velocity(p_prev, p_prevprev) -> np.ndarray:
    """Per-frame displacement ``p_prev - p_prevprev``."""
    return _as_point(p_prev, 3) - _as_point(p_prevprev, 3)


def propagate_constant_velocity(p_last, v, steps: int) -> np.ndarray:
    """Position after ``steps`` frames of constant velocity ``v``."""
    if int(steps) != steps or steps < 1:
        raise ValueError(f"steps must be a positive integer, got {steps!r}")
    p = np.asarray(p_last, dtype=np.float64)
    return p + steps * np.asarray(v, dtype=np.float64)


def cuboid_corners(center, size, yaw: float = 0.0) -> np.ndarray:
    """The 8 corners of a box with extents ``size = (w, h, l)`` along
    (x, y, z) before rotation by ``yaw`` about the y axis."""
    w, h, l = (float(s) for s in size)
    sx = np.array([1, 1, 1, 1, -1, -1, -1, -1]) * (w / 2)
    sy = np.array([1, 1, -1, -1, 1, 1, -1, -1]) * (h / 2)
    sz = np.array([1, -1, 1, -1, 1, -1, 1, -1]) * (l / 2)
    local = np.stack([sx, sy, sz], axis=1)
    return local @ rotation_y(yaw).T + np.asarray(center, dtype=np.float64)
