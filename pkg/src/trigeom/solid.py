"""Cross-section decomposition of boxes into triangulated surface meshes.

A box is cut by a vertical diagonal plane into two triangular prisms (or by
parallel planes into slabs). Every planar face is mapped into a 2D chart,
triangulated there with the polygon triangulator, and lifted back to 3D.
Each closed hull keeps its own vertices, so every hull is watertight on its
own, including the shared cut faces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .geometry import GeometryError, Point3, SimplePolygon, Tolerance
from .report import VerificationReport
from .triangulation import triangulate_earclip

PLANARITY_REL = 1e-9
MERGE_REL = 1e-9


class NonPlanarFaceError(GeometryError):
    pass


def _vec(p) -> np.ndarray:
    return np.asarray(tuple(p), dtype=float)


@dataclass(frozen=True)
class Box:
    min_corner: Point3
    max_corner: Point3

    def __post_init__(self):
        lo, hi = Point3(*self.min_corner), Point3(*self.max_corner)
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)
        if not (hi.x > lo.x and hi.y > lo.y and hi.z > lo.z):
            raise GeometryError("max_corner must exceed min_corner in every coordinate")

    @classmethod
    def unit(cls) -> "Box":
        return cls(Point3(0, 0, 0), Point3(1, 1, 1))

    @property
    def size(self) -> np.ndarray:
        return _vec(self.max_corner) - _vec(self.min_corner)

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.size))

    @property
    def volume(self) -> float:
        return float(np.prod(self.size))

    @property
    def surface_area(self) -> float:
        a, b, c = self.size
        return float(2 * (a * b + b * c + a * c))

    def to_json(self) -> dict:
        return {"min": list(self.min_corner), "max": list(self.max_corner)}

    @classmethod
    def from_json(cls, data: dict) -> "Box":
        return cls(Point3(*data["min"]), Point3(*data["max"]))


@dataclass(frozen=True)
class Face:
    face_id: str
    vertices: np.ndarray  # (k, 3), counter-clockwise seen from outside

    @property
    def normal(self) -> np.ndarray:
        return _newell(self.vertices)

    @property
    def area(self) -> float:
        return 0.5 * float(np.linalg.norm(_newell_raw(self.vertices)))


def _newell_raw(v: np.ndarray) -> np.ndarray:
    w = np.roll(v, -1, axis=0)
    return np.array([
        np.sum((v[:, 1] - w[:, 1]) * (v[:, 2] + w[:, 2])),
        np.sum((v[:, 2] - w[:, 2]) * (v[:, 0] + w[:, 0])),
        np.sum((v[:, 0] - w[:, 0]) * (v[:, 1] + w[:, 1])),
    ])


def _newell(v: np.ndarray) -> np.ndarray:
    n = _newell_raw(v)
    return n / np.linalg.norm(n)


@dataclass(frozen=True)
class Prism:
    """Triangle ``base`` swept along ``axis``.

    ``side_labels`` names the three side faces, one per base edge
    (a-b, b-c, c-a).
    """

    base: tuple[Point3, Point3, Point3]
    axis: np.ndarray
    side_labels: tuple[str, str, str] = ("side0", "side1", "side2")
    name: str = "prism"

    def __post_init__(self):
        base = tuple(Point3(*p) for p in self.base)
        object.__setattr__(self, "base", base)
        axis = _vec(self.axis)
        object.__setattr__(self, "axis", axis)
        a, b, c = (_vec(p) for p in base)
        nb = np.cross(b - a, c - a)
        scale = max(np.linalg.norm(b - a), np.linalg.norm(c - b), np.linalg.norm(a - c))
        if np.linalg.norm(nb) <= 1e-9 * scale**2:
            raise GeometryError("degenerate prism base")
        if abs(nb @ axis) <= 1e-9 * np.linalg.norm(nb) * np.linalg.norm(axis):
            raise GeometryError("prism axis lies in the base plane")

    def _ordered_base(self) -> np.ndarray:
        pts = np.array([tuple(p) for p in self.base], dtype=float)
        nb = np.cross(pts[1] - pts[0], pts[2] - pts[0])
        return pts if nb @ self.axis > 0 else pts[[0, 2, 1]]

    @property
    def faces(self) -> list[Face]:
        base = self._ordered_base()
        top = base + self.axis
        flipped = not np.array_equal(base, np.array([tuple(p) for p in self.base], dtype=float))
        labels = self.side_labels if not flipped else (self.side_labels[2], self.side_labels[1], self.side_labels[0])
        faces = [Face(f"{self.name}/bottom", base[::-1].copy()), Face(f"{self.name}/top", top.copy())]
        for k in range(3):
            p, q = base[k], base[(k + 1) % 3]
            faces.append(Face(f"{self.name}/{labels[k]}", np.array([p, q, q + self.axis, p + self.axis])))
        return faces

    @property
    def volume(self) -> float:
        a, b, c = (_vec(p) for p in self.base)
        return 0.5 * abs(float(np.cross(b - a, c - a) @ self.axis))

    @property
    def surface_area(self) -> float:
        return math.fsum(f.area for f in self.faces)

    def edge_lengths(self) -> list[float]:
        base = self._ordered_base()
        top = base + self.axis
        lengths = []
        for k in range(3):
            lengths.append(float(np.linalg.norm(base[(k + 1) % 3] - base[k])))
            lengths.append(float(np.linalg.norm(top[(k + 1) % 3] - top[k])))
            lengths.append(float(np.linalg.norm(self.axis)))
        return sorted(lengths)


def congruent(p: Prism, q: Prism, rel_tol: float = 1e-9) -> bool:
    """Equal sorted edge-length multisets."""
    a, b = p.edge_lengths(), q.edge_lengths()
    scale = max(a + b)
    return all(abs(x - y) <= rel_tol * scale for x, y in zip(a, b))


def slice_box(b: Box, cut_edge_pair: int = 0) -> tuple[Prism, Prism]:
    """Cut ``b`` along the vertical plane through a pair of opposite vertical edges.

    Pair 0 holds the edges at (xmin, ymin) and (xmax, ymax); pair 1 the edges
    at (xmax, ymin) and (xmin, ymax).
    """
    (x0, y0, z0), (x1, y1, z1) = b.min_corner, b.max_corner
    axis = np.array([0.0, 0.0, z1 - z0])
    c00, c10, c11, c01 = (x0, y0, z0), (x1, y0, z0), (x1, y1, z0), (x0, y1, z0)
    if cut_edge_pair == 0:
        first = Prism((c00, c10, c11), axis, ("ymin", "xmax", "cut"), "prism0")
        second = Prism((c00, c11, c01), axis, ("cut", "ymax", "xmin"), "prism1")
    elif cut_edge_pair == 1:
        first = Prism((c00, c10, c01), axis, ("ymin", "cut", "xmin"), "prism0")
        second = Prism((c10, c11, c01), axis, ("xmax", "ymax", "cut"), "prism1")
    else:
        raise ValueError("cut_edge_pair must be 0 or 1")
    return first, second


def box_faces(b: Box, name: str = "box") -> list[Face]:
    (x0, y0, z0), (x1, y1, z1) = b.min_corner, b.max_corner
    c = {
        (i, j, k): np.array([(x0, x1)[i], (y0, y1)[j], (z0, z1)[k]], dtype=float)
        for i in (0, 1) for j in (0, 1) for k in (0, 1)
    }
    quads = {
        "xmin": [(0, 0, 0), (0, 0, 1), (0, 1, 1), (0, 1, 0)],
        "xmax": [(1, 0, 0), (1, 1, 0), (1, 1, 1), (1, 0, 1)],
        "ymin": [(0, 0, 0), (1, 0, 0), (1, 0, 1), (0, 0, 1)],
        "ymax": [(0, 1, 0), (0, 1, 1), (1, 1, 1), (1, 1, 0)],
        "zmin": [(0, 0, 0), (0, 1, 0), (1, 1, 0), (1, 0, 0)],
        "zmax": [(0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)],
    }
    return [Face(f"{name}/{k}", np.array([c[v] for v in vs])) for k, vs in quads.items()]


@dataclass(frozen=True)
class FaceChart:
    face_id: str
    origin: np.ndarray
    u: np.ndarray
    v: np.ndarray
    polygon2d: SimplePolygon

    def lift(self, xy: np.ndarray) -> np.ndarray:
        xy = np.atleast_2d(xy)
        return self.origin + xy[:, :1] * self.u + xy[:, 1:2] * self.v

    def project(self, pts: np.ndarray) -> np.ndarray:
        d = np.atleast_2d(pts) - self.origin
        return np.column_stack([d @ self.u, d @ self.v])


def chart_face(face: Face) -> FaceChart:
    """Map a planar 3D face into 2D with an orthonormal in-plane frame.

    The frame (u, v, outward normal) is right-handed, so the chart polygon
    keeps the face's counter-clockwise order and its vertex indices.
    """
    pts = face.vertices
    origin = pts[0]
    normal = face.normal
    diam = max(np.linalg.norm(p - q) for p in pts for q in pts)
    off = np.abs((pts - origin) @ normal)
    if off.max() > PLANARITY_REL * diam:
        raise NonPlanarFaceError(f"face {face.face_id} deviates {off.max():.3g} from its plane")
    u = pts[1] - origin
    u = u / np.linalg.norm(u)
    v = np.cross(normal, u)
    d = pts - origin
    poly = SimplePolygon(np.column_stack([d @ u, d @ v]))
    if len(poly) != len(pts):
        raise GeometryError(f"face {face.face_id} has collinear vertices")
    return FaceChart(face.face_id, origin, u, v, poly)


def face_charts(p: Prism | Box | Sequence[Face]) -> list[FaceChart]:
    if isinstance(p, Prism):
        faces = p.faces
    elif isinstance(p, Box):
        faces = box_faces(p)
    else:
        faces = list(p)
    return [chart_face(f) for f in faces]


@dataclass(frozen=True)
class SingleSection:
    cut_edge_pair: int = 0

    def __str__(self) -> str:
        return "single"


@dataclass(frozen=True)
class MultiSection:
    """``k`` parallel cuts perpendicular to x, giving ``k + 1`` slabs."""

    k: int

    def __post_init__(self):
        if self.k < 2:
            raise ValueError("MultiSection needs k >= 2 cuts")

    def __str__(self) -> str:
        return f"multi:{self.k}"


Strategy = SingleSection | MultiSection


def parse_strategy(text: str) -> Strategy:
    if text == "single":
        return SingleSection()
    if text.startswith("multi:"):
        try:
            return MultiSection(int(text.split(":", 1)[1]))
        except ValueError as exc:
            raise ValueError(f"bad strategy {text!r}: {exc}") from None
    raise ValueError(f"bad strategy {text!r}; expected 'single' or 'multi:K'")


def slabs(b: Box, k: int) -> list[Box]:
    (x0, y0, z0), (x1, y1, z1) = b.min_corner, b.max_corner
    xs = np.linspace(x0, x1, k + 2)
    return [Box(Point3(xs[i], y0, z0), Point3(xs[i + 1], y1, z1)) for i in range(k + 1)]


def hulls(b: Box, strategy: Strategy, prefix: str = "") -> list[list[Face]]:
    """Closed face sets the strategy cuts ``b`` into."""
    if isinstance(strategy, SingleSection):
        prisms = slice_box(b, strategy.cut_edge_pair)
        out = []
        for p in prisms:
            faces = p.faces
            out.append([Face(prefix + f.face_id, f.vertices) for f in faces])
        return out
    return [box_faces(s, f"{prefix}slab{i}") for i, s in enumerate(slabs(b, strategy.k))]


@dataclass
class SurfaceMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    face_ids: list[str]
    components: np.ndarray
    source_area: float
    scale: float = 1.0

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def triangle_areas(self) -> np.ndarray:
        v = self.vertices
        t = self.triangles
        return 0.5 * np.linalg.norm(np.cross(v[t[:, 1]] - v[t[:, 0]], v[t[:, 2]] - v[t[:, 0]]), axis=1)

    @property
    def area(self) -> float:
        return math.fsum(self.triangle_areas().tolist())

    def to_obj(self) -> str:
        lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in self.vertices.tolist()]
        current = None
        for (a, b, c), fid in zip(self.triangles.tolist(), self.face_ids):
            if fid != current:
                lines.append(f"g {fid}")
                current = fid
            lines.append(f"f {a + 1} {b + 1} {c + 1}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "triangles": self.triangles.tolist(),
            "face_ids": list(self.face_ids),
            "components": self.components.tolist(),
            "source_area": self.source_area,
        }

    @classmethod
    def from_json(cls, data: dict) -> "SurfaceMesh":
        v = np.asarray(data["vertices"], dtype=float).reshape(-1, 3)
        t = np.asarray(data["triangles"], dtype=np.int64).reshape(-1, 3)
        return cls(
            v, t,
            list(data.get("face_ids", [""] * len(t))),
            np.asarray(data.get("components", [0] * len(t)), dtype=np.int64),
            float(data["source_area"]),
            float(np.linalg.norm(np.ptp(v, axis=0))) if len(v) else 1.0,
        )


def _merge_index(store: list[np.ndarray], p: np.ndarray, tol: float, start: int) -> int:
    for k in range(start, len(store)):
        if np.linalg.norm(store[k] - p) <= tol:
            return k
    store.append(p)
    return len(store) - 1


def mesh_hulls(hull_faces: Iterable[list[Face]], scale: float) -> SurfaceMesh:
    """Triangulate every face in its chart and assemble the hulls into one mesh.

    Vertices merge only within a hull, never across hulls.
    """
    tol = MERGE_REL * scale
    verts: list[np.ndarray] = []
    tris, fids, comps = [], [], []
    source_area = []
    for comp, faces in enumerate(hull_faces):
        start = len(verts)
        for face in faces:
            chart = chart_face(face)
            t = triangulate_earclip(chart.polygon2d)
            lifted = chart.lift(chart.polygon2d.coords)
            ids = [_merge_index(verts, p, tol, start) for p in lifted]
            for a, b, c in t.triangles:
                tris.append((ids[a], ids[b], ids[c]))
                fids.append(face.face_id)
                comps.append(comp)
            source_area.append(face.area)
    return SurfaceMesh(
        np.array(verts, dtype=float).reshape(-1, 3),
        np.array(tris, dtype=np.int64).reshape(-1, 3),
        fids,
        np.array(comps, dtype=np.int64),
        math.fsum(source_area),
        scale,
    )


def triangulate_solid_surface(b: Box, strategy: Strategy = SingleSection()) -> SurfaceMesh:
    return mesh_hulls(hulls(b, strategy), b.diagonal)


def triangulate_solids(boxes: Sequence[Box], strategy: Strategy = SingleSection()) -> SurfaceMesh:
    """Mesh a composite solid given as separate boxes, each decomposed independently."""
    all_hulls = []
    for i, b in enumerate(boxes):
        all_hulls.extend(hulls(b, strategy, prefix=f"box{i}/" if len(boxes) > 1 else ""))
    scale = max(b.diagonal for b in boxes)
    return mesh_hulls(all_hulls, scale)


@dataclass(frozen=True)
class DecompositionCost:
    triangles: int
    faces: int

    def __lt__(self, other: "DecompositionCost") -> bool:
        return (self.triangles, self.faces) < (other.triangles, other.faces)


def decomposition_cost(b: Box | Sequence[Box], strategy: Strategy = SingleSection()) -> DecompositionCost:
    """Triangle and face counts from face vertex counts alone (n - 2 per face)."""
    boxes = [b] if isinstance(b, Box) else list(b)
    faces = [f for box in boxes for hull in hulls(box, strategy) for f in hull]
    return DecompositionCost(sum(len(f.vertices) - 2 for f in faces), len(faces))


def verify_mesh(m: SurfaceMesh, expected_area: float | None = None, rel_tol: float = 1e-9) -> VerificationReport:
    """Mesh checks; failures are report entries, never exceptions."""
    rep = VerificationReport()
    t = m.triangles
    edges = np.sort(np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(edges, axis=0, return_counts=True)
    bad = counts != 2
    rep.add(
        "edge_manifold",
        not bad.any(),
        f"{int(bad.sum())} edges not shared by exactly 2 triangles"
        + (f", e.g. {uniq[bad][0].tolist()} x{int(counts[bad][0])}" if bad.any() else ""),
    )
    areas = m.triangle_areas()
    repeated = (t[:, 0] == t[:, 1]) | (t[:, 1] == t[:, 2]) | (t[:, 0] == t[:, 2])
    tiny = areas <= (MERGE_REL * m.scale) * m.scale
    degenerate = repeated | tiny
    rep.add("non_degenerate", not degenerate.any(), f"{int(degenerate.sum())} degenerate triangles")
    expected = m.source_area if expected_area is None else expected_area
    total = math.fsum(areas.tolist())
    err = abs(total - expected) / expected if expected else abs(total)
    rep.add("area", err <= rel_tol, f"mesh {total!r} vs source {expected!r} (rel err {err:.3g})")
    return rep
