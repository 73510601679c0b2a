"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat N] [--seed S]

Each kernel is warmed up once (so JIT compilation is excluded), checked for
agreement between the two paths, then timed with ``timeit``.
"""
import argparse
import timeit

import numpy as np

from occtrack.kernels import assignment, boxes, zbuffer


def random_boxes(rng, n):
    xy = rng.uniform(0, 900, size=(n, 2))
    wh = rng.uniform(5, 120, size=(n, 2))
    return np.hstack([xy, xy + wh])


def random_tracks(rng, n, frames):
    out = np.full((n, frames, 4), np.nan)
    for i in range(n):
        a, b = sorted(rng.integers(0, frames, 2))
        out[i, a:b + 1] = random_boxes(rng, b - a + 1)
    return out


def random_cells(rng, n, w, h):
    x0 = rng.integers(0, w, n)
    y0 = rng.integers(0, h, n)
    x1 = np.minimum(x0 + rng.integers(1, 40, n), w)
    y1 = np.minimum(y0 + rng.integers(1, 40, n), h)
    return np.stack([x0, x1, y0, y1], axis=1), rng.uniform(1, 80, n)


def cases(rng):
    a, b = random_boxes(rng, 200), random_boxes(rng, 200)
    gt, pred = random_tracks(rng, 40, 60), random_tracks(rng, 60, 60)
    cost = rng.uniform(0, 1, size=(60, 80))
    cells, depths = random_cells(rng, 80, 240, 135)
    return [
        ("box_iou_matrix 200x200", boxes.box_iou_matrix_numba, boxes.box_iou_matrix_numpy, (a, b)),
        ("track_iou_matrix 40x60x60f", boxes.track_iou_matrix_numba, boxes.track_iou_matrix_numpy, (gt, pred)),
        ("solve_rect 60x80", assignment.solve_rect_numba, assignment.solve_rect_numpy, (cost,)),
        ("rasterize_owner 80 boxes", zbuffer.rasterize_owner_numba, zbuffer.rasterize_owner_numpy,
         (cells, depths, 240, 135)),
    ]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<28}{'numba ms':>10}{'numpy ms':>10}{'speedup':>9}")
    for name, fast, slow, call_args in cases(rng):
        r_fast, r_slow = fast(*call_args), slow(*call_args)  # warm-up and JIT
        if not np.allclose(r_fast, r_slow, atol=1e-12):
            raise SystemExit(f"{name}: numba and numpy disagree")
        t_fast = min(timeit.repeat(lambda: fast(*call_args), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: slow(*call_args), number=1, repeat=args.repeat))
        print(f"{name:<28}{1e3 * t_fast:>10.3f}{1e3 * t_slow:>10.3f}{t_slow / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
