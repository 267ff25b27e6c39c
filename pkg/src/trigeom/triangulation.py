"""Diagonal triangulation of simple polygons.

Two algorithms are provided: ear clipping, O(n^2), which always removes the
lowest-index ear; and y-monotone decomposition by a sweep line followed by
the stack-based triangulation of each monotone piece, O(n log n).
"""

from __future__ import annotations

import math
from bisect import bisect_left
from collections import defaultdict
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .geometry import (
    Containment,
    Orientation,
    SimplePolygon,
    Triangle2,
    orientation,
    point_in_triangle,
    signed_area,
)
from .report import VerificationReport


class TriangulationError(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class Diagonal:
    i: int
    j: int

    def __post_init__(self):
        if self.i > self.j:
            a, b = self.j, self.i
            object.__setattr__(self, "i", a)
            object.__setattr__(self, "j", b)


@dataclass(frozen=True)
class Triangulation:
    source: SimplePolygon
    triangles: tuple[tuple[int, int, int], ...]
    diagonals: tuple[Diagonal, ...]
    method: str

    def triangle_areas(self) -> np.ndarray:
        xy = self.source.coords
        t = np.asarray(self.triangles, dtype=np.int64).reshape(-1, 3)
        a, b, c = xy[t[:, 0]], xy[t[:, 1]], xy[t[:, 2]]
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "triangles": [list(t) for t in self.triangles],
            "diagonals": [[d.i, d.j] for d in self.diagonals],
        }

    @classmethod
    def from_json(cls, poly: SimplePolygon, data: dict) -> "Triangulation":
        return cls(
            poly,
            tuple(tuple(int(v) for v in t) for t in data["triangles"]),
            tuple(Diagonal(int(i), int(j)) for i, j in data.get("diagonals", [])),
            data.get("method", "unknown"),
        )


@dataclass(frozen=True)
class EarReport:
    ear_indices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.ear_indices)


@dataclass(frozen=True)
class DualGraph:
    n_nodes: int
    edges: tuple[tuple[int, int], ...]

    def degrees(self) -> list[int]:
        deg = [0] * self.n_nodes
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return max(self.degrees(), default=0)

    def is_connected(self) -> bool:
        if self.n_nodes == 0:
            return True
        adj = defaultdict(list)
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n_nodes

    def is_tree(self) -> bool:
        return len(self.edges) == self.n_nodes - 1 and self.is_connected()


def is_ear(poly: SimplePolygon, i: int, tol=None) -> bool:
    """Whether vertex ``i`` is convex and its ear triangle holds no other vertex.

    Vertices on the triangle boundary disqualify it as well.
    """
    tol = poly.tol if tol is None else tol
    n = len(poly)
    v = poly.vertices
    a, b, c = v[(i - 1) % n], v[i], v[(i + 1) % n]
    if orientation(a, b, c, tol) is not Orientation.CCW:
        return False
    tri = Triangle2(a, b, c)
    skip = {(i - 1) % n, i, (i + 1) % n}
    return all(
        point_in_triangle(v[k], tri, tol) is Containment.OUTSIDE for k in range(n) if k not in skip
    )


def find_ears(poly: SimplePolygon) -> EarReport:
    flags = kernels.active.ear_flags(poly.coords, poly.tol.eps)
    return EarReport(tuple(int(k) for k in np.flatnonzero(flags)))


def _from_triangles(poly: SimplePolygon, tris: Sequence[Sequence[int]], method: str) -> Triangulation:
    n = len(poly)
    triangles = tuple(tuple(int(v) for v in t) for t in tris)
    diags = set()
    for t in triangles:
        for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            if (a - b) % n not in (1, n - 1):
                diags.add((a, b) if a < b else (b, a))
    return Triangulation(poly, triangles, tuple(Diagonal(a, b) for a, b in sorted(diags)), method)


def triangulate_earclip(poly: SimplePolygon) -> Triangulation:
    """Ear-clipping triangulation; deterministic for bit-equal input."""
    try:
        tris, diags = kernels.active.earclip(poly.coords, poly.tol.eps)
    except ValueError as exc:
        raise TriangulationError(str(exc)) from exc
    return Triangulation(
        poly,
        tuple(tuple(int(v) for v in t) for t in tris.tolist()),
        tuple(Diagonal(int(i), int(j)) for i, j in diags.tolist()),
        "earclip",
    )


# --- monotone decomposition -------------------------------------------------

_START, _END, _SPLIT, _MERGE, _REGULAR = range(5)


def _sweep_order(xy: np.ndarray) -> np.ndarray:
    """Rank of every vertex in sweep order: higher y first, then smaller x, then index."""
    order = np.lexsort((np.arange(len(xy)), xy[:, 0], -xy[:, 1]))
    rank = np.empty(len(xy), dtype=np.int64)
    rank[order] = np.arange(len(xy))
    return rank


def _classify(xy: list, rank: list) -> list[int]:
    n = len(xy)
    kinds = []
    for i in range(n):
        p, q = (i - 1) % n, (i + 1) % n
        prev_below, next_below = rank[p] > rank[i], rank[q] > rank[i]
        (px, py), (ix, iy), (qx, qy) = xy[p], xy[i], xy[q]
        cross = (ix - px) * (qy - py) - (iy - py) * (qx - px)
        if prev_below and next_below:
            kinds.append(_START if cross > 0 else _SPLIT)
        elif not prev_below and not next_below:
            kinds.append(_END if cross > 0 else _MERGE)
        else:
            kinds.append(_REGULAR)
    return kinds


def _monotone_diagonals(xy: list, rank: list) -> list[tuple[int, int]]:
    n = len(xy)
    kinds = _classify(xy, rank)
    order = sorted(range(n), key=rank.__getitem__)
    status: list[int] = []  # edge ids sorted left to right along the sweep line
    helper: dict[int, int] = {}
    diagonals: list[tuple[int, int]] = []

    def x_at(e: int, y: float) -> float:
        (x0, y0), (x1, y1) = xy[e], xy[(e + 1) % n]
        if y0 == y1:
            return min(x0, x1)
        return x0 + (y - y0) * (x1 - x0) / (y1 - y0)

    def position(v: int) -> int:
        x, y = xy[v]
        return bisect_left(status, x, key=lambda e: x_at(e, y))

    def left_of(v: int) -> int:
        k = position(v)
        if k == 0:
            raise TriangulationError(f"no edge left of vertex {v}")
        return status[k - 1]

    def remove(e: int) -> None:
        status.remove(e)

    def insert(e: int) -> None:
        status.insert(position(e), e)

    for v in order:
        kind = kinds[v]
        prev_e = (v - 1) % n
        if kind == _START:
            insert(v)
            helper[v] = v
        elif kind == _END:
            if kinds[helper[prev_e]] == _MERGE:
                diagonals.append((v, helper[prev_e]))
            remove(prev_e)
        elif kind == _SPLIT:
            e = left_of(v)
            diagonals.append((v, helper[e]))
            helper[e] = v
            insert(v)
            helper[v] = v
        elif kind == _MERGE:
            if kinds[helper[prev_e]] == _MERGE:
                diagonals.append((v, helper[prev_e]))
            remove(prev_e)
            e = left_of(v)
            if kinds[helper[e]] == _MERGE:
                diagonals.append((v, helper[e]))
            helper[e] = v
        elif rank[prev_e] < rank[v]:
            # boundary runs downward here, interior lies to the right
            if kinds[helper[prev_e]] == _MERGE:
                diagonals.append((v, helper[prev_e]))
            remove(prev_e)
            insert(v)
            helper[v] = v
        else:
            e = left_of(v)
            if kinds[helper[e]] == _MERGE:
                diagonals.append((v, helper[e]))
            helper[e] = v
    return diagonals


def _faces(xy: list, diagonals: list[tuple[int, int]]) -> list[list[int]]:
    """Interior faces of the polygon subdivided by non-crossing diagonals, each CCW."""
    n = len(xy)
    nbrs: dict[int, list[int]] = {i: [(i - 1) % n, (i + 1) % n] for i in range(n)}
    for a, b in diagonals:
        nbrs[a].append(b)
        nbrs[b].append(a)
    ccw: dict[int, list[int]] = {}
    for v, ws in nbrs.items():
        vx, vy = xy[v]
        ccw[v] = sorted(set(ws), key=lambda w: math.atan2(xy[w][1] - vy, xy[w][0] - vx))
    pos = {v: {w: k for k, w in enumerate(ws)} for v, ws in ccw.items()}
    starts = [(i, (i + 1) % n) for i in range(n)]
    starts += [(a, b) for a, b in diagonals] + [(b, a) for a, b in diagonals]
    seen = set()
    faces = []
    for he in starts:
        if he in seen:
            continue
        face = []
        u, w = he
        while (u, w) not in seen:
            seen.add((u, w))
            face.append(u)
            ring = ccw[w]
            z = ring[(pos[w][u] - 1) % len(ring)]
            u, w = w, z
        faces.append(face)
    return faces


def _triangulate_monotone_piece(xy: list, rank: list, piece: list[int], eps: float) -> list[tuple[int, int, int]]:
    m = len(piece)
    if m == 3:
        return [tuple(piece)]
    ranks = [rank[v] for v in piece]
    top = ranks.index(min(ranks))
    bottom = ranks.index(max(ranks))
    # walking CCW from the top descends the left chain
    left = set()
    k = (top + 1) % m
    while k != bottom:
        left.add(piece[k])
        k = (k + 1) % m
    u = sorted(piece, key=lambda v: rank[v])

    def convex(a: int, b: int, c: int) -> bool:
        (ax, ay), (bx, by), (cx, cy) = xy[a], xy[b], xy[c]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        if cross <= 0:
            return False
        longest = max(math.hypot(bx - ax, by - ay), math.hypot(cx - bx, cy - by), math.hypot(cx - ax, cy - ay))
        return cross > eps * longest

    tris = []
    stack = [u[0], u[1]]
    for j in range(2, m - 1):
        uj = u[j]
        if (uj in left) != (stack[-1] in left):
            while len(stack) > 1:
                top_v = stack.pop()
                tris.append((uj, top_v, stack[-1]))
            stack = [u[j - 1], uj]
        else:
            last = stack.pop()
            while stack:
                s = stack[-1]
                ok = convex(s, last, uj) if uj in left else convex(uj, last, s)
                if not ok:
                    break
                tris.append((uj, last, s))
                last = stack.pop()
            stack.append(last)
            stack.append(uj)
    ub = u[-1]
    while len(stack) > 1:
        top_v = stack.pop()
        tris.append((ub, top_v, stack[-1]))
    return tris


def triangulate_monotone(poly: SimplePolygon) -> Triangulation:
    """Sweep-line decomposition into y-monotone pieces, each triangulated with a stack."""
    n = len(poly)
    if n == 3:
        return _from_triangles(poly, [(0, 1, 2)], "monotone")
    rank = _sweep_order(poly.coords).tolist()
    xy = poly.coords.tolist()
    diagonals = _monotone_diagonals(xy, rank)
    tris = []
    for piece in _faces(xy, diagonals):
        tris.extend(_triangulate_monotone_piece(xy, rank, piece, poly.tol.eps))
    out = []
    for a, b, c in tris:
        (ax, ay), (bx, by), (cx, cy) = xy[a], xy[b], xy[c]
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        out.append((a, b, c) if cross > 0 else (a, c, b))
    if len(out) != n - 2:
        raise TriangulationError(f"monotone triangulation produced {len(out)} triangles for n={n}")
    return _from_triangles(poly, out, "monotone")


TRIANGULATORS = {"earclip": triangulate_earclip, "monotone": triangulate_monotone}


def triangulate(poly: SimplePolygon, algo: str = "earclip") -> Triangulation:
    try:
        return TRIANGULATORS[algo](poly)
    except KeyError:
        raise ValueError(f"unknown algorithm {algo!r}") from None


# --- structure checks ---------------------------------------------------------

def dual_graph(t: Triangulation) -> DualGraph:
    """One node per triangle, one edge per shared triangle side."""
    owner: dict[tuple[int, int], list[int]] = defaultdict(list)
    for k, (a, b, c) in enumerate(t.triangles):
        for e in ((a, b), (b, c), (c, a)):
            owner[tuple(sorted(e))].append(k)
    edges = set()
    for tris in owner.values():
        for x in range(len(tris)):
            for y in range(x + 1, len(tris)):
                edges.add((min(tris[x], tris[y]), max(tris[x], tris[y])))
    return DualGraph(len(t.triangles), tuple(sorted(edges)))


def _side(p, q, r, eps):
    cross = (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])
    band = eps * np.hypot(q[..., 0] - p[..., 0], q[..., 1] - p[..., 1])
    return np.where(np.abs(cross) <= band, 0, np.sign(cross))


def _within_box(p, q, r, eps):
    lo, hi = np.minimum(p, q) - eps, np.maximum(p, q) + eps
    return np.all((r >= lo) & (r <= hi), axis=-1)


def _bad_contacts(xy: np.ndarray, seg: tuple[int, int], others: np.ndarray, eps: float) -> np.ndarray:
    """Mask of ``others`` that meet ``seg`` anywhere except at a shared endpoint."""
    i, j = seg
    p, q = xy[i], xy[j]
    c, d = xy[others[:, 0]], xy[others[:, 1]]
    o1, o2 = _side(p, q, c, eps), _side(p, q, d, eps)
    o3, o4 = _side(c, d, p, eps), _side(c, d, q, eps)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    touch = (
        ((o1 == 0) & _within_box(p, q, c, eps)) | ((o2 == 0) & _within_box(p, q, d, eps))
        | ((o3 == 0) & _within_box(c, d, p, eps)) | ((o4 == 0) & _within_box(c, d, q, eps))
    )
    share_c = (others[:, 0] == i) | (others[:, 0] == j)
    share_d = (others[:, 1] == i) | (others[:, 1] == j)
    shared = share_c ^ share_d
    # a shared endpoint is fine unless both segments run the same way along one line
    s = np.where(share_c[:, None], xy[others[:, 0]], xy[others[:, 1]])
    far_other = np.where(share_c[:, None], d, c)
    far_seg = np.where(((others[:, 0] == i) | (others[:, 1] == i))[:, None], q, p)
    collinear = np.where(share_c, o2, o1) == 0
    same_way = np.sum((far_other - s) * (far_seg - s), axis=1) > 0
    bad_shared = shared & collinear & same_way
    return np.where(shared, bad_shared, np.where(share_c & share_d, False, proper | touch))


def _segments_cross(xy: np.ndarray, segs: np.ndarray, eps: float) -> tuple[int, int] | None:
    """First pair of segments that cross, overlap or form a T-junction."""
    for k in range(len(segs) - 1):
        hit = np.flatnonzero(_bad_contacts(xy, tuple(segs[k]), segs[k + 1 :], eps))
        if hit.size:
            return k, k + 1 + int(hit[0])
    return None


def _diagonal_valid(poly: SimplePolygon, d: Diagonal) -> bool:
    n = len(poly)
    if not (0 <= d.i < n and 0 <= d.j < n) or d.i == d.j or (d.i - d.j) % n in (1, n - 1):
        return False
    xy = poly.coords
    a, v, b, w = xy[(d.i - 1) % n], xy[d.i], xy[(d.i + 1) % n], xy[d.j]

    def cr(p, q, r):
        return (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])

    # the diagonal must leave v into the interior angle
    if cr(a, v, b) > 0:
        inside = cr(v, b, w) > 0 and cr(a, v, w) > 0
    else:
        inside = not (cr(v, b, w) <= 0 and cr(a, v, w) <= 0)
    if not inside:
        return False
    edges = np.array([(k, (k + 1) % n) for k in range(n)])
    return not _bad_contacts(xy, (d.i, d.j), edges, poly.tol.eps).any()


def verify_triangulation(poly: SimplePolygon, t: Triangulation, rel_tol: float = 1e-9) -> VerificationReport:
    """Check counts, area, pairwise disjointness and diagonal validity."""
    rep = VerificationReport()
    n = len(poly)
    rep.add("triangle_count", len(t.triangles) == n - 2, f"{len(t.triangles)} triangles, expected {n - 2}")
    rep.add("diagonal_count", len(t.diagonals) == n - 3, f"{len(t.diagonals)} diagonals, expected {n - 3}")

    tris = np.asarray(t.triangles, dtype=np.int64).reshape(-1, 3)
    indices_ok = bool(len(tris) == 0 or (tris.min() >= 0 and tris.max() < n))
    if not indices_ok:
        rep.add("indices", False, "triangle vertex index out of range")
        return rep
    areas = t.triangle_areas()
    total, expected = math.fsum(np.abs(areas).tolist()), signed_area(poly)
    err = abs(total - expected) / expected
    rep.add("area", err <= rel_tol, f"sum {total!r} vs polygon {expected!r} (rel err {err:.3g})")
    eps = poly.tol.eps
    degenerate = np.flatnonzero(np.abs(areas) <= eps * poly.tol.scale)
    rep.add("non_degenerate", degenerate.size == 0, f"{degenerate.size} degenerate triangles")

    rep.add("disjoint", *_disjoint(poly.coords, tris, eps))

    bad = [d for d in t.diagonals if not _diagonal_valid(poly, d)]
    rep.add("diagonals_valid", not bad, f"invalid: {[(d.i, d.j) for d in bad][:5]}")
    return rep


def _disjoint(xy: np.ndarray, tris: np.ndarray, eps: float) -> tuple[bool, str]:
    if len(tris) == 0:
        return True, ""
    key = np.sort(tris, axis=1)
    uniq, counts = np.unique(key, axis=0, return_counts=True)
    if (counts > 1).any():
        return False, f"triangle {uniq[counts > 1][0].tolist()} listed twice"
    edges = np.unique(np.sort(np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]]), axis=1), axis=0)
    hit = _segments_cross(xy, edges, eps)
    if hit is not None:
        return False, f"edges {edges[hit[0]].tolist()} and {edges[hit[1]].tolist()} cross"
    # sampled interior test: no centroid strictly inside another triangle
    cen = xy[tris].mean(axis=1)
    a, b, c = xy[tris[:, 0]], xy[tris[:, 1]], xy[tris[:, 2]]
    sgn = np.sign((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    for k in range(len(tris)):
        p = cen[k]

        def s(u, v):
            cross = (v[:, 0] - u[:, 0]) * (p[1] - u[:, 1]) - (v[:, 1] - u[:, 1]) * (p[0] - u[:, 0])
            return cross * sgn > eps * np.hypot(v[:, 0] - u[:, 0], v[:, 1] - u[:, 1])

        inside = s(a, b) & s(b, c) & s(c, a)
        inside[k] = False
        if inside.any():
            return False, f"triangles {k} and {int(np.flatnonzero(inside)[0])} overlap"
    return True, ""
