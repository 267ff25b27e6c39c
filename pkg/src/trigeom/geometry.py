"""Geometric primitives and the simple-polygon type.

Every predicate snaps to a tolerance band whose width is a relative epsilon
scaled by the bounding-box diagonal of the input it is applied to.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from . import kernels

DEFAULT_EPS_REL = 1e-9


class GeometryError(ValueError):
    """Invalid geometric input."""


class DuplicateVertexError(GeometryError):
    def __init__(self, i: int, j: int):
        super().__init__(f"vertices {i} and {j} coincide")
        self.indices = (i, j)


class NotSimpleError(GeometryError):
    def __init__(self, edge_a: tuple[int, int], edge_b: tuple[int, int]):
        super().__init__(f"edges {edge_a} and {edge_b} intersect")
        self.edges = (edge_a, edge_b)


class DegeneratePolygonError(GeometryError):
    pass


@dataclass(frozen=True, slots=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite coordinate in Point2({self.x}, {self.y})")

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y

    def __sub__(self, other: "Point2") -> "Point2":
        return Point2(self.x - other.x, self.y - other.y)

    def __add__(self, other: "Point2") -> "Point2":
        return Point2(self.x + other.x, self.y + other.y)

    def dist(self, other: "Point2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True, slots=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise GeometryError(f"non-finite coordinate in Point3({self.x}, {self.y}, {self.z})")

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y
        yield self.z

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])


@dataclass(frozen=True, slots=True)
class Tolerance:
    """Relative epsilon plus the length scale it is measured against."""

    epsilon_rel: float = DEFAULT_EPS_REL
    scale: float = 1.0

    def __post_init__(self):
        if not self.epsilon_rel > 0:
            raise ValueError("epsilon_rel must be positive")
        if not (self.scale >= 0 and math.isfinite(self.scale)):
            raise ValueError("scale must be finite and non-negative")

    @property
    def eps(self) -> float:
        return self.epsilon_rel * self.scale

    @classmethod
    def for_points(cls, pts: Iterable, epsilon_rel: float = DEFAULT_EPS_REL) -> "Tolerance":
        arr = np.asarray([tuple(p) for p in pts], dtype=float)
        return cls(epsilon_rel, bbox_diagonal(arr))


def bbox_diagonal(xy: np.ndarray) -> float:
    if len(xy) == 0:
        return 0.0
    span = xy.max(axis=0) - xy.min(axis=0)
    return float(np.hypot(*span)) if span.shape == (2,) else float(np.linalg.norm(span))


class Orientation(enum.IntEnum):
    CW = -1
    COLLINEAR = 0
    CCW = 1


class Containment(enum.Enum):
    INSIDE = "inside"
    ON_BOUNDARY = "on_boundary"
    OUTSIDE = "outside"


def _as_point(p) -> Point2:
    return p if isinstance(p, Point2) else Point2(*p)


def _cross(p: Point2, q: Point2, r: Point2) -> float:
    return (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)


def orientation(p, q, r, tol: Tolerance | None = None) -> Orientation:
    """Turn direction of p -> q -> r.

    The cross product is snapped to ``COLLINEAR`` when its magnitude is at
    most ``tol.eps`` times the longest of the three pairwise distances.
    Without an explicit tolerance the scale is taken from the three points.
    """
    p, q, r = _as_point(p), _as_point(q), _as_point(r)
    if tol is None:
        tol = Tolerance.for_points((p, q, r))
    cross = _cross(p, q, r)
    longest = max(p.dist(q), q.dist(r), r.dist(p))
    if abs(cross) <= tol.eps * longest:
        return Orientation.COLLINEAR
    return Orientation.CCW if cross > 0 else Orientation.CW


@dataclass(frozen=True, slots=True)
class Triangle2:
    a: Point2
    b: Point2
    c: Point2

    def __post_init__(self):
        for name in ("a", "b", "c"):
            v = getattr(self, name)
            if not isinstance(v, Point2):
                object.__setattr__(self, name, Point2(*v))
        tol = Tolerance.for_points((self.a, self.b, self.c))
        if abs(self.signed_area()) <= tol.eps * tol.scale:
            raise GeometryError("degenerate triangle")

    def signed_area(self) -> float:
        return 0.5 * _cross(self.a, self.b, self.c)

    def area(self) -> float:
        return abs(self.signed_area())


def point_in_triangle(p, t: Triangle2, tol: Tolerance | None = None) -> Containment:
    """Classify ``p`` against ``t`` with three orientation tests."""
    p = _as_point(p)
    if tol is None:
        tol = Tolerance.for_points((t.a, t.b, t.c))
    a, b, c = (t.a, t.b, t.c) if t.signed_area() > 0 else (t.a, t.c, t.b)
    signs = []
    for u, v in ((a, b), (b, c), (c, a)):
        cross = _cross(u, v, p)
        if abs(cross) <= tol.eps * u.dist(v):
            signs.append(0)
        else:
            signs.append(1 if cross > 0 else -1)
    if any(s < 0 for s in signs):
        return Containment.OUTSIDE
    if all(s > 0 for s in signs):
        return Containment.INSIDE
    return Containment.ON_BOUNDARY


def triangle_inequality_gain(a, b, c) -> float:
    """Detour length |AB| + |BC| - |AC| of going through ``b``.

    Clamped at zero so rounding never reports a negative detour.
    """
    a, b, c = _as_point(a), _as_point(b), _as_point(c)
    return max(0.0, a.dist(b) + b.dist(c) - a.dist(c))


def ring_area(x: np.ndarray, y: np.ndarray) -> float:
    """Signed shoelace area of the closed ring with coordinate arrays x, y."""
    xn = np.empty_like(x)
    xn[:-1], xn[-1] = x[1:], x[0]
    yn = np.empty_like(y)
    yn[:-1], yn[-1] = y[1:], y[0]
    # trapezoid form keeps the small coordinate differences exact;
    # numpy's pairwise summation bounds the accumulated rounding
    return 0.5 * float(np.sum((x - xn) * (y + yn)))


def shoelace(xy: np.ndarray) -> float:
    """Signed area of a closed ring given as an (n, 2) array."""
    x, y = xy[:, 0], xy[:, 1]
    return ring_area(x - x.mean(), y - y.mean())


@dataclass(frozen=True)
class SimplicityReport:
    simple: bool
    edges: tuple[tuple[int, int], tuple[int, int]] | None = None
    duplicate: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return self.simple


def _coords(vertices) -> np.ndarray:
    if isinstance(vertices, np.ndarray):
        xy = np.array(vertices, dtype=float)
    else:
        xy = np.array([tuple(v) for v in vertices], dtype=float)
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise GeometryError("vertices must be a sequence of (x, y) pairs")
    if not np.all(np.isfinite(xy)):
        raise GeometryError("non-finite vertex coordinate")
    return xy


def _find_duplicate(xy: np.ndarray, eps: float) -> tuple[int, int] | None:
    order = np.lexsort((xy[:, 1], xy[:, 0]))
    s = xy[order]
    # near-duplicates may not be lexicographic neighbours, so scan a window in x
    for a in range(len(s)):
        b = a + 1
        while b < len(s) and s[b, 0] - s[a, 0] <= eps:
            if math.hypot(*(s[b] - s[a])) <= eps:
                i, j = sorted((int(order[a]), int(order[b])))
                return i, j
            b += 1
    return None


def is_simple(vertices, tol: Tolerance | None = None) -> SimplicityReport:
    """Check a vertex ring for duplicate vertices and edge intersections.

    Edges are reported as vertex-index pairs, so the bowtie
    ``(0,0),(2,2),(2,0),(0,2)`` yields ``((0, 1), (2, 3))``.
    """
    xy = _coords(vertices)
    n = len(xy)
    if n < 3:
        raise GeometryError("a polygon needs at least 3 vertices")
    if tol is None:
        tol = Tolerance(DEFAULT_EPS_REL, bbox_diagonal(xy))
    dup = _find_duplicate(xy, tol.eps)
    if dup is not None:
        return SimplicityReport(False, duplicate=dup)
    i, j = kernels.active.first_crossing(np.ascontiguousarray(xy), tol.eps)
    if i < 0:
        return SimplicityReport(True)
    return SimplicityReport(False, edges=((i, (i + 1) % n), (j, (j + 1) % n)))


def _collinear_flags(xy: np.ndarray, eps: float) -> np.ndarray:
    p, r = np.roll(xy, 1, axis=0), np.roll(xy, -1, axis=0)
    cross = (xy[:, 0] - p[:, 0]) * (r[:, 1] - p[:, 1]) - (xy[:, 1] - p[:, 1]) * (r[:, 0] - p[:, 0])
    longest = np.maximum.reduce([
        np.hypot(*(xy - p).T), np.hypot(*(r - xy).T), np.hypot(*(r - p).T)])
    return np.abs(cross) <= eps * longest


def _merge_collinear(xy: np.ndarray, tol: Tolerance) -> np.ndarray:
    if not _collinear_flags(xy, tol.eps).any():
        return xy
    pts = [tuple(p) for p in xy]
    changed = True
    while changed and len(pts) >= 3:
        changed = False
        k = 0
        while k < len(pts) and len(pts) >= 3:
            p, q, r = pts[k - 1], pts[k], pts[(k + 1) % len(pts)]
            if orientation(p, q, r, tol) is Orientation.COLLINEAR:
                # q must sit between its neighbours, otherwise the ring folds back
                if (q[0] - p[0]) * (r[0] - q[0]) + (q[1] - p[1]) * (r[1] - q[1]) <= 0:
                    raise NotSimpleError(((k - 1) % len(pts), k), (k, (k + 1) % len(pts)))
                del pts[k]
                changed = True
            else:
                k += 1
    return np.array(pts, dtype=float)


class SimplePolygon:
    """Counter-clockwise simple polygon ``V0 V1 ... V(n-1) V0``.

    Construction rejects duplicates and self-intersections, reverses
    clockwise input (keeping ``V0`` first) and drops vertices that are
    collinear with both neighbours.
    """

    __slots__ = ("_xy", "tol", "_vertices")

    def __init__(self, vertices, tol: Tolerance | None = None, *, validate: bool = True):
        xy = _coords(vertices)
        if len(xy) < 3:
            raise GeometryError("a polygon needs at least 3 vertices")
        if tol is None:
            tol = Tolerance(DEFAULT_EPS_REL, bbox_diagonal(xy))
        if validate:
            dup = _find_duplicate(xy, tol.eps)
            if dup is not None:
                raise DuplicateVertexError(*dup)
        if shoelace(xy) < 0:
            xy = np.concatenate([xy[:1], xy[:0:-1]])
        if validate:
            xy = _merge_collinear(xy, tol)
            if len(xy) < 3:
                raise DegeneratePolygonError("all vertices are collinear")
            rep = is_simple(xy, tol)
            if not rep:
                raise NotSimpleError(*rep.edges)
        xy.setflags(write=False)
        self._xy = xy
        self.tol = tol
        self._vertices = None

    @classmethod
    def trusted(cls, xy: np.ndarray, tol: Tolerance | None = None) -> "SimplePolygon":
        """Wrap coordinates already validated and normalized elsewhere."""
        return cls(xy, tol, validate=False)

    @property
    def coords(self) -> np.ndarray:
        return self._xy

    @property
    def vertices(self) -> tuple[Point2, ...]:
        if self._vertices is None:
            self._vertices = tuple(Point2(float(x), float(y)) for x, y in self._xy)
        return self._vertices

    def __len__(self) -> int:
        return len(self._xy)

    def __getitem__(self, i: int) -> Point2:
        return self.vertices[i]

    def __repr__(self) -> str:
        return f"SimplePolygon(n={len(self)})"

    def to_json(self) -> dict:
        return {"vertices": self._xy.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "SimplePolygon":
        if "vertices" not in data:
            raise GeometryError("polygon JSON needs a 'vertices' field")
        return cls(data["vertices"])


def signed_area(poly: SimplePolygon | Sequence) -> float:
    if isinstance(poly, SimplePolygon):
        return shoelace(poly.coords)
    return shoelace(_coords(poly))
