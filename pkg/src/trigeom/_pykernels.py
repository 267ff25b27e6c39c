"""Numpy implementations of the polygon kernels.

Used when the compiled ``_ckernels`` extension is unavailable. Both
implementations must return identical results for identical input.
"""

import numpy as np

NAME = "python"


def _orient_band(ax, ay, bx, by, px, py, eps):
    """Sign of cross(b - a, p - a), zeroed inside a band of width eps around line ab."""
    cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax)
    band = eps * np.hypot(bx - ax, by - ay)
    return np.where(np.abs(cross) <= band, 0, np.sign(cross)).astype(np.int8)


def _on_segment(ax, ay, bx, by, px, py, eps):
    return (
        (np.minimum(ax, bx) - eps <= px) & (px <= np.maximum(ax, bx) + eps)
        & (np.minimum(ay, by) - eps <= py) & (py <= np.maximum(ay, by) + eps)
    )


def first_crossing(xy, eps):
    """First (i, j), i < j, whose edges (i, i+1) and (j, j+1) meet improperly.

    Non-adjacent edges may not touch at all; adjacent edges may only share
    their common vertex. Returns (-1, -1) when the ring is simple.
    """
    n = len(xy)
    x0, y0 = xy[:, 0], xy[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        ax, ay, bx, by = x0[i], y0[i], x1[i], y1[i]
        cx, cy, dx, dy = x0[j], y0[j], x1[j], y1[j]
        o1 = _orient_band(ax, ay, bx, by, cx, cy, eps)
        o2 = _orient_band(ax, ay, bx, by, dx, dy, eps)
        o3 = _orient_band(cx, cy, dx, dy, ax, ay, eps)
        o4 = _orient_band(cx, cy, dx, dy, bx, by, eps)
        hit = ((o1 * o2) < 0) & ((o3 * o4) < 0)
        hit |= (o1 == 0) & _on_segment(ax, ay, bx, by, cx, cy, eps)
        hit |= (o2 == 0) & _on_segment(ax, ay, bx, by, dx, dy, eps)
        hit |= (o3 == 0) & _on_segment(cx, cy, dx, dy, ax, ay, eps)
        hit |= (o4 == 0) & _on_segment(cx, cy, dx, dy, bx, by, eps)
        # adjacent pairs share an endpoint; only a fold-back along the shared line counts
        nxt = j == i + 1
        wrap = (j == n - 1) & (i == 0)
        adjacent = nxt | wrap
        if adjacent.any():
            shared_ok = np.zeros_like(hit)
            # for j == i+1 the shared vertex is b == c; overlap iff d on ab or a on cd beyond it
            k = np.flatnonzero(nxt)
            if k.size:
                fold = (o2[k] == 0) & ((dx[k] - bx) * (ax - bx) + (dy[k] - by) * (ay - by) > 0)
                shared_ok[k] = ~fold
            k = np.flatnonzero(wrap)
            if k.size:
                # edge n-1 ends at vertex 0 == a
                fold = (o1[k] == 0) & ((cx[k] - ax) * (bx - ax) + (cy[k] - ay) * (by - ay) > 0)
                shared_ok[k] = ~fold
            hit = np.where(adjacent, ~shared_ok, hit)
        hits = np.flatnonzero(hit)
        if hits.size:
            return i, int(j[hits[0]])
    return -1, -1


def _ear(xy, prv, nxt, alive_idx, v, eps):
    a, b = prv[v], nxt[v]
    ax, ay = xy[a]
    vx, vy = xy[v]
    bx, by = xy[b]
    cross = (vx - ax) * (by - ay) - (vy - ay) * (bx - ax)
    longest = max(np.hypot(vx - ax, vy - ay), np.hypot(bx - vx, by - vy), np.hypot(bx - ax, by - ay))
    if cross <= eps * longest:
        return False
    others = alive_idx[(alive_idx != a) & (alive_idx != v) & (alive_idx != b)]
    if others.size == 0:
        return True
    px, py = xy[others, 0], xy[others, 1]
    s1 = _orient_band(ax, ay, vx, vy, px, py, eps)
    s2 = _orient_band(vx, vy, bx, by, px, py, eps)
    s3 = _orient_band(bx, by, ax, ay, px, py, eps)
    blocked = (s1 >= 0) & (s2 >= 0) & (s3 >= 0)
    return not blocked.any()


def ear_flags(xy, eps):
    n = len(xy)
    idx = np.arange(n)
    prv, nxt = np.roll(idx, 1), np.roll(idx, -1)
    return np.array([_ear(xy, prv, nxt, idx, v, eps) for v in range(n)], dtype=np.uint8)


def earclip(xy, eps):
    """Clip the lowest-index ear until one triangle is left.

    Returns (triangles, diagonals) as int64 arrays of source indices.
    """
    n = len(xy)
    idx = np.arange(n)
    prv, nxt = np.roll(idx, 1), np.roll(idx, -1)
    alive = np.ones(n, dtype=bool)
    ear = ear_flags(xy, eps).astype(bool)
    tris = np.empty((n - 2, 3), dtype=np.int64)
    diags = np.empty((n - 3, 2), dtype=np.int64)
    for step in range(n - 3):
        cand = np.flatnonzero(ear & alive)
        if cand.size == 0:
            alive_idx = np.flatnonzero(alive)
            for u in alive_idx:
                ear[u] = _ear(xy, prv, nxt, alive_idx, u, eps)
            cand = np.flatnonzero(ear & alive)
            if cand.size == 0:
                raise ValueError(f"no ear found with {n - step} vertices left")
        v = cand[0]
        a, b = prv[v], nxt[v]
        tris[step] = (a, v, b)
        diags[step] = (min(a, b), max(a, b))
        alive[v] = False
        nxt[a], prv[b] = b, a
        alive_idx = np.flatnonzero(alive)
        ear[a] = _ear(xy, prv, nxt, alive_idx, a, eps)
        ear[b] = _ear(xy, prv, nxt, alive_idx, b, eps)
    v = int(np.flatnonzero(alive)[0])
    tris[n - 3] = (prv[v], v, nxt[v])
    return tris, diags
