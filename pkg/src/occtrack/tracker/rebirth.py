"""Track rebirth: post-hoc merging of a terminated track with a later one
that starts where its 2D constant-velocity extrapolation predicts."""
from __future__ import annotations

import math
from dataclasses import replace

from .engine import FrameResult, matching_radius


def _fragments(results):
    frags: dict[int, list] = {}
    for res in results:
        for b in res.boxes:
            frags.setdefault(b.id, []).append((res.frame, b))
    return frags


def rebirth_candidates(results, window: int, radius_scale: float = 1.0):
    """All admissible ``(error, ended_id, born_id)`` merges.

    ``born`` must start 1..``window`` frames after ``ended`` stops, share its
    category, and begin within the ended track's matching radius of the
    extrapolated center.
    """
    frags = _fragments(results)
    ends, starts = {}, {}
    for tid, items in frags.items():
        f_last, b_last = items[-1]
        if len(items) >= 2:
            f_prev, b_prev = items[-2]
            dt = f_last - f_prev
            vel = ((b_last.center[0] - b_prev.center[0]) / dt, (b_last.center[1] - b_prev.center[1]) / dt)
        else:
            vel = (0.0, 0.0)
        ends[tid] = (f_last, b_last, vel)
        starts[tid] = items[0]
    out = []
    for a, (f_end, b_end, vel) in ends.items():
        radius = matching_radius(b_end.size, radius_scale)
        for b, (f_start, b_start) in starts.items():
            gap = f_start - f_end
            if b == a or gap < 1 or gap > window or b_start.category != b_end.category:
                continue
            px = b_end.center[0] + gap * vel[0]
            py = b_end.center[1] + gap * vel[1]
            err = math.hypot(b_start.center[0] - px, b_start.center[1] - py)
            if err <= radius:
                out.append((err, a, b))
    return out


def choose_merges(candidates) -> list[tuple[int, int]]:
    """Greedy one-to-one selection by ascending extrapolation error."""
    continued, preceded = set(), set()
    merges = []
    for _, a, b in sorted(candidates):
        if a in continued or b in preceded:
            continue
        continued.add(a)
        preceded.add(b)
        merges.append((a, b))
    return merges


def track_rebirth(results, window: int, radius_scale: float = 1.0) -> list[FrameResult]:
    """Relabel the emitted stream so merged fragments share the earliest id.

    No boxes are synthesised for the gap; ``window == 0`` returns the input.
    """
    results = list(results)
    if window <= 0:
        return results
    merges = choose_merges(rebirth_candidates(results, window, radius_scale))
    parent = {b: a for a, b in merges}

    def root(tid):
        while tid in parent:
            tid = parent[tid]
        return tid

    out = []
    for res in results:
        boxes = tuple(replace(b, id=root(b.id)) for b in res.boxes)
        out.append(FrameResult(res.frame, boxes, res.occluded))
    return out
