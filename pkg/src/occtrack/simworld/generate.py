"""Seeded scenario generators for the synthetic benchmarks."""
from __future__ import annotations

import math

import numpy as np

from ..geometry import CameraIntrinsics, CameraPose
from .scenario import STREAM_LAYOUT, AgentSpec, Occluder, ScenarioConfig, make_rng

IMAGE_SIZE = (960, 540)
INTRINSICS = CameraIntrinsics(720.0, 720.0, 480.0, 270.0)
CAMERA_HEIGHT = 1.6
NUM_FRAMES = 60
FPS = 10.0

# (w, h, l) in meters
CAR_SIZE = (1.8, 1.5, 4.2)
PED_SIZE = (0.6, 1.75, 0.6)

PROFILES = ("occlusion", "clear")

YAW_RATE_DEG = (1.0, 2.0)  # magnitude range of the ego yaw rate, degrees per frame


def _forward(yaw: float) -> np.ndarray:
    return np.array([math.sin(yaw), 0.0, math.cos(yaw)])


def _right(yaw: float) -> np.ndarray:
    return np.array([math.cos(yaw), 0.0, -math.sin(yaw)])


def _size(rng, base) -> tuple[float, float, float]:
    f = rng.uniform(0.9, 1.1, size=3)
    return tuple(float(b * x) for b, x in zip(base, f))


def _on_ground(p, size) -> tuple[float, float, float]:
    return (float(p[0]), -size[1] / 2, float(p[2]))


def moving_camera_path(rng, num_frames: int, max_speed: float = 0.4, max_yaw_deg: float = 15.0, yaw_rate_deg=None):
    """Ego path: constant forward speed and piecewise-constant yaw rate.

    Returns ``(centers, yaws)`` with yaw in radians.
    """
    lo, hi = YAW_RATE_DEG if yaw_rate_deg is None else yaw_rate_deg
    speed = rng.uniform(0.0, max_speed)
    rates = np.zeros(num_frames)
    f = 0
    while f < num_frames:
        seg = int(rng.integers(8, 25))
        kind = rng.integers(3)
        rate = 0.0 if kind == 0 else (1 if kind == 1 else -1) * rng.uniform(lo, hi)
        rates[f : f + seg] = rate
        f += seg
    yaw_deg = np.clip(np.concatenate([[0.0], np.cumsum(rates[1:])]), -max_yaw_deg, max_yaw_deg)
    yaws = np.radians(yaw_deg)
    centers = np.zeros((num_frames, 3))
    centers[0] = (0.0, -CAMERA_HEIGHT, 0.0)
    for i in range(1, num_frames):
        centers[i] = centers[i - 1] + speed * _forward(yaws[i - 1])
    return centers, yaws


def _config(name, seed, centers, yaws, agents, occluders) -> ScenarioConfig:
    n = len(yaws)
    poses = tuple(CameraPose.from_center_yaw(centers[i], float(yaws[i])) for i in range(n))
    return ScenarioConfig(
        name=name,
        seed=seed,
        num_frames=n,
        fps=FPS,
        image_size=IMAGE_SIZE,
        intrinsics=(INTRINSICS,) * n,
        poses=poses,
        agents=tuple(agents),
        occluders=tuple(occluders),
    )


def _crossing_agent(rng, agent_id, category, centers, yaws, occluder_center, depth, speed, tc, n):
    """Agent crossing laterally so that it is behind ``occluder_center`` at frame ``tc``."""
    size = _size(rng, CAR_SIZE if category == "Car" else PED_SIZE)
    cam = centers[tc]
    ray = np.asarray(occluder_center) - cam
    ray[1] = 0.0
    ray /= np.linalg.norm(ray)
    hit = cam + ray * depth
    direction = _right(yaws[tc]) * (1 if rng.random() < 0.5 else -1)
    start = hit - direction * speed * tc
    end = hit + direction * speed * (n - 1 - tc)
    yaw = math.atan2(direction[0], direction[2]) - math.pi / 2 if category == "Car" else 0.0
    return AgentSpec(
        id=agent_id,
        category=category,
        size3d=size,
        waypoints=((0, _on_ground(start, size)), (n - 1, _on_ground(end, size))),
        yaw=yaw,
    )


def occlusion_scenario(seed: int, index: int, num_frames: int = NUM_FRAMES) -> ScenarioConfig:
    """Moving ego camera, a few roadside occluders, and agents crossing behind them."""
    rng = make_rng(seed, STREAM_LAYOUT, index)
    centers, yaws = moving_camera_path(rng, num_frames)
    mid = num_frames // 2
    occluders = []
    for _ in range(int(rng.integers(2, 5))):
        z = rng.uniform(8.0, 16.0)
        x = rng.uniform(-6.0, 6.0)
        size = (float(rng.uniform(2.0, 4.5)), float(rng.uniform(2.0, 3.5)), float(rng.uniform(1.0, 3.0)))
        c = centers[mid] + _forward(yaws[mid]) * z + _right(yaws[mid]) * x
        occluders.append(Occluder((float(c[0]), -size[1] / 2, float(c[2])), size, float(yaws[mid])))
    agents = []
    aid = 1
    margin = min(15, num_frames // 4)
    for occ in occluders:
        for _ in range(int(rng.integers(1, 3))):
            tc = int(rng.integers(margin, num_frames - margin))
            cam_fwd_depth = float(np.dot(np.asarray(occ.center) - centers[tc], _forward(yaws[tc])))
            if cam_fwd_depth < 3.0:
                continue
            if rng.random() < 0.6:
                agents.append(
                    _crossing_agent(
                        rng, aid, "Car", centers, yaws, occ.center,
                        cam_fwd_depth + rng.uniform(8.0, 22.0), rng.uniform(0.4, 1.0), tc, num_frames,
                    )
                )
            else:
                agents.append(
                    _crossing_agent(
                        rng, aid, "Pedestrian", centers, yaws, occ.center,
                        cam_fwd_depth + rng.uniform(3.0, 10.0), rng.uniform(0.15, 0.3), tc, num_frames,
                    )
                )
            aid += 1
    # lead cars in the ego lane, unoccluded by construction of the layout
    for _ in range(int(rng.integers(0, 2))):
        size = _size(rng, CAR_SIZE)
        z0 = rng.uniform(15.0, 30.0)
        v = rng.uniform(0.2, 0.6)
        start = centers[0] + _forward(yaws[0]) * z0 + _right(yaws[0]) * rng.uniform(-1.0, 1.0)
        end = start + _forward(yaws[0]) * v * (num_frames - 1)
        agents.append(
            AgentSpec(aid, "Car", size, ((0, _on_ground(start, size)), (num_frames - 1, _on_ground(end, size))))
        )
        aid += 1
    return _config(f"occ_{index:03d}", seed, centers, yaws, agents, occluders)


def clear_scenario(seed: int, index: int, num_frames: int = NUM_FRAMES) -> ScenarioConfig:
    """Static camera; agents in separate image columns, always fully visible."""
    rng = make_rng(seed, STREAM_LAYOUT, index)
    n_agents = int(rng.integers(2, 5))
    columns = np.linspace(0, IMAGE_SIZE[0], n_agents + 2)[1:-1]
    centers = np.tile([0.0, -CAMERA_HEIGHT, 0.0], (num_frames, 1))
    yaws = np.zeros(num_frames)
    agents = []
    for i, u in enumerate(columns):
        category = "Car" if rng.random() < 0.5 else "Pedestrian"
        size = _size(rng, CAR_SIZE if category == "Car" else PED_SIZE)
        z0 = rng.uniform(18.0, 28.0) if category == "Car" else rng.uniform(10.0, 16.0)
        dz = rng.uniform(-0.05, 0.05) * (num_frames - 1)
        x = (u - INTRINSICS.cx) * z0 / INTRINSICS.fx
        start = (x, 0.0, z0)
        end = (x, 0.0, z0 + dz)
        agents.append(
            AgentSpec(i + 1, category, size, ((0, _on_ground(start, size)), (num_frames - 1, _on_ground(end, size))))
        )
    return _config(f"clear_{index:03d}", seed, centers, yaws, agents, [])


def _has_clean_occlusion(config: ScenarioConfig) -> bool:
    # two consecutive fully visible frames, later a fully hidden in-frame
    # one, and a fully visible one after that
    from .simulate import simulate

    obs = [f.get(1) for f in simulate(config).frames]
    vis = [o.vis if o is not None and o.in_frame else -1.0 for o in obs]
    stage = 0
    for t in range(1, len(vis)):
        if stage == 0 and vis[t - 1] == vis[t] == 1.0:
            stage = 1
        elif stage == 1 and vis[t] == 0.0:
            stage = 2
        elif stage == 2 and vis[t] == 1.0:
            return True
    return False


def constant_velocity_occlusion_scenario(seed: int, index: int, num_frames: int = 40) -> ScenarioConfig:
    """One agent with exactly constant 3D velocity passing behind an
    occluder, seen from a moving and turning camera.

    Draws are repeated on fresh sub-streams until the agent is visible,
    then fully hidden, then visible again.
    """
    for attempt in range(100):
        cfg = _cv_draw(seed, index, num_frames, attempt)
        if _has_clean_occlusion(cfg):
            return cfg
    return cfg


def _cv_draw(seed, index, num_frames, attempt) -> ScenarioConfig:
    rng = make_rng(seed, STREAM_LAYOUT, index, 2, attempt)
    centers, yaws = moving_camera_path(rng, num_frames, max_speed=0.3)
    tc = num_frames // 2
    depth_occ = rng.uniform(8.0, 12.0)
    size = (float(rng.uniform(1.5, 3.0)), 3.0, 1.0)
    c = centers[tc] + _forward(yaws[tc]) * depth_occ + _right(yaws[tc]) * rng.uniform(-2.0, 2.0)
    occ = Occluder((float(c[0]), -size[1] / 2, float(c[2])), size, float(yaws[tc]))
    category = "Car" if rng.random() < 0.5 else "Pedestrian"
    depth = depth_occ + (rng.uniform(8.0, 15.0) if category == "Car" else rng.uniform(3.0, 8.0))
    speed = rng.uniform(0.4, 0.8) if category == "Car" else rng.uniform(0.25, 0.4)
    agent = _crossing_agent(rng, 1, category, centers, yaws, occ.center, depth, speed, tc, num_frames)
    return _config(f"cv_{index:03d}", seed, centers, yaws, [agent], [occ])


def stop_behind_occluder_scenario(seed: int, index: int, num_frames: int = 40) -> ScenarioConfig:
    """Like :func:`constant_velocity_occlusion_scenario` but the agent halts
    while hidden and resumes later, breaking the constant-velocity model."""
    cfg = constant_velocity_occlusion_scenario(seed, index, num_frames)
    rng = make_rng(seed, STREAM_LAYOUT, index, 1)
    agent = cfg.agents[0]
    tc = num_frames // 2
    a = tc - int(rng.integers(0, 2))
    b = a + int(rng.integers(3, 6))
    stopped = AgentSpec(agent.id, agent.category, agent.size3d, agent.waypoints, ((a, b),), agent.yaw)
    return ScenarioConfig(
        name=f"stop_{index:03d}",
        seed=cfg.seed,
        num_frames=cfg.num_frames,
        fps=cfg.fps,
        image_size=cfg.image_size,
        intrinsics=cfg.intrinsics,
        poses=cfg.poses,
        agents=(stopped,),
        occluders=cfg.occluders,
    )


def benchmark(seed: int, count: int = 50, profile: str = "occlusion", num_frames: int = NUM_FRAMES) -> list[ScenarioConfig]:
    if profile == "occlusion":
        make = occlusion_scenario
    elif profile == "clear":
        make = clear_scenario
    else:
        raise ValueError(f"unknown profile {profile!r}; expected one of {PROFILES}")
    if num_frames < 2:
        raise ValueError(f"benchmarks need at least 2 frames, got {num_frames}")
    return [make(seed, i, num_frames) for i in range(count)]
