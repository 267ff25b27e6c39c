"""Seeded random polygon generators for tests and benchmarks."""

from __future__ import annotations

import math

import numpy as np

from . import kernels
from .geometry import SimplePolygon, bbox_diagonal


def star_polygon(n: int, rng: np.random.Generator, rmin: float = 0.2, rmax: float = 1.0) -> np.ndarray:
    """Random star-shaped ring around the origin.

    Vertices are angle-sorted with random radii. For n >= 4 the angular gaps
    are kept below pi so the origin stays in the kernel and the ring is simple.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    while True:
        theta = np.sort(rng.uniform(0.0, 2 * math.pi, n))
        gaps = np.diff(np.concatenate([theta, theta[:1] + 2 * math.pi]))
        if gaps.min() > 1e-6 and (n == 3 or gaps.max() < math.pi * 0.95):
            break
    r = rng.uniform(rmin, rmax, n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def two_opt_polygon(n: int, rng: np.random.Generator, max_moves: int | None = None) -> np.ndarray:
    """Random points in random order, untangled by 2-opt moves until simple.

    Produces far less regular shapes than :func:`star_polygon`.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    xy = rng.uniform(0.0, 1.0, (n, 2))
    eps = 1e-9 * bbox_diagonal(xy)
    if max_moves is None:
        max_moves = 50 * n * n
    for _ in range(max_moves):
        i, j = kernels.active.first_crossing(np.ascontiguousarray(xy), eps)
        if i < 0:
            return xy
        # edges (i, i+1) and (j, j+1) cross: reversing i+1..j uncrosses them
        xy[i + 1 : j + 1] = xy[i + 1 : j + 1][::-1].copy()
    raise RuntimeError("2-opt did not converge")


def _side(a: np.ndarray, b: np.ndarray, pts: np.ndarray) -> np.ndarray:
    return (b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])


def _chain(a: np.ndarray, b: np.ndarray, pts: np.ndarray, rng: np.random.Generator) -> list[np.ndarray]:
    """Simple path a -> ... -> b through ``pts``, all on one side of ab. Excludes b."""
    if len(pts) == 0:
        return [a]
    k = int(rng.integers(len(pts)))
    s = pts[k]
    rest = np.delete(pts, k, axis=0)
    q = a + rng.uniform(0.05, 0.95) * (b - a)
    side = _side(s, q, rest)
    side_a = _side(s, q, a[None, :])[0]
    near_a = rest[np.sign(side) == np.sign(side_a)]
    near_b = rest[np.sign(side) != np.sign(side_a)]
    return _chain(a, s, near_a, rng) + _chain(s, b, near_b, rng)


def partition_polygon(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random simple polygon by recursive space partitioning of random points.

    Each split line passes through a randomly chosen point and a random point
    of the current base segment, so every sub-chain lives in its own convex
    region and the assembled ring cannot self-intersect.
    """
    if n < 3:
        raise ValueError("n must be at least 3")
    xy = rng.uniform(0.0, 1.0, (n, 2))
    a, b = xy[0], xy[1]
    rest = xy[2:]
    side = _side(a, b, rest)
    left, right = rest[side > 0], rest[side <= 0]
    ring = _chain(a, b, right, rng) + _chain(b, a, left, rng)
    return np.array(ring)


def random_ring(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random vertex ring with no simplicity guarantee."""
    return rng.uniform(0.0, 1.0, (n, 2))


def random_simple_polygon(n: int, rng: np.random.Generator, kind: str = "star") -> SimplePolygon:
    """Build a validated polygon; retries in the rare case collinear merging drops a vertex."""
    make = {"star": star_polygon, "two_opt": two_opt_polygon, "partition": partition_polygon}[kind]
    while True:
        poly = SimplePolygon(make(n, rng))
        if len(poly) == n:
            return poly


def corpus(count: int, seed: int, n_min: int = 3, n_max: int = 200) -> list[SimplePolygon]:
    """Seeded mix of star-shaped and space-partition polygons, n in [n_min, n_max]."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(n_min, n_max + 1))
        out.append(random_simple_polygon(n, rng, "star" if k % 2 == 0 else "partition"))
    return out
