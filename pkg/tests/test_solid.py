import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trigeom.geometry import GeometryError, Point3, signed_area
from trigeom.solid import (
    Box,
    Face,
    MultiSection,
    NonPlanarFaceError,
    SingleSection,
    SurfaceMesh,
    chart_face,
    congruent,
    decomposition_cost,
    face_charts,
    parse_strategy,
    slice_box,
    triangulate_solid_surface,
    triangulate_solids,
    verify_mesh,
)

SQRT2 = math.sqrt(2)
UNIT = Box.unit()


def test_box_validation():
    with pytest.raises(GeometryError):
        Box(Point3(0, 0, 0), Point3(1, 0, 1))
    assert UNIT.volume == 1.0
    assert Box.from_json(UNIT.to_json()) == UNIT


@pytest.mark.parametrize("pair", [0, 1])
def test_slice_unit_cube(pair):
    p, q = slice_box(UNIT, pair)
    assert p.volume == pytest.approx(0.5, rel=1e-12)
    assert q.volume == pytest.approx(0.5, rel=1e-12)
    assert p.surface_area == pytest.approx(3 + SQRT2, rel=1e-12)
    assert q.surface_area == pytest.approx(3 + SQRT2, rel=1e-12)
    assert p.surface_area + q.surface_area == pytest.approx(6 + 2 * SQRT2, rel=1e-12)
    assert congruent(p, q)


def test_bad_cut_pair():
    with pytest.raises(ValueError):
        slice_box(UNIT, 2)


def test_prism_edges_unit_cube():
    p, _ = slice_box(UNIT)
    assert p.edge_lengths() == pytest.approx(sorted([1, 1, SQRT2] * 2 + [1] * 3))


def test_face_charts_unit_prism():
    p, _ = slice_box(UNIT)
    charts = face_charts(p)
    assert len(charts) == 5
    sizes = sorted(len(c.polygon2d) for c in charts)
    assert sizes == [3, 3, 4, 4, 4]
    areas = sorted(signed_area(c.polygon2d) for c in charts)
    assert areas == pytest.approx([0.5, 0.5, 1.0, 1.0, SQRT2], rel=1e-12)


def test_chart_round_trip():
    for box in (UNIT, Box((1, -2, 0.5), (4, 3, 9))):
        for prism in slice_box(box):
            for face, chart in zip(prism.faces, face_charts(prism)):
                back = chart.lift(chart.project(face.vertices))
                assert np.allclose(back, face.vertices, rtol=0, atol=1e-9 * box.diagonal)
                lifted = chart.lift(chart.polygon2d.coords)
                assert np.allclose(lifted, face.vertices, rtol=0, atol=1e-9 * box.diagonal)


def test_non_planar_face_rejected():
    warped = Face("warped", np.array([(0, 0, 0), (1, 0, 0), (1, 1, 0.1), (0, 1, 0)], dtype=float))
    with pytest.raises(NonPlanarFaceError):
        chart_face(warped)


def test_single_section_mesh():
    m = triangulate_solid_surface(UNIT, SingleSection())
    assert m.n_triangles == 16
    assert m.area == pytest.approx(6 + 2 * SQRT2, rel=1e-9)
    rep = verify_mesh(m)
    assert rep.passed, rep.failed()
    assert verify_mesh(m, expected_area=2 * (3 + SQRT2)).passed
    assert set(m.components.tolist()) == {0, 1}


def test_multi_section_mesh():
    m = triangulate_solid_surface(UNIT, MultiSection(3))
    assert m.n_triangles == 48
    assert verify_mesh(m).passed


def test_costs():
    assert decomposition_cost(UNIT, SingleSection()) == decomposition_cost(UNIT)
    c1 = decomposition_cost(UNIT)
    assert (c1.triangles, c1.faces) == (16, 10)
    c3 = decomposition_cost(UNIT, MultiSection(3))
    assert (c3.triangles, c3.faces) == (48, 24)


@pytest.mark.parametrize("k", range(2, 9))
def test_single_cheaper_than_multi(k):
    single, multi = decomposition_cost(UNIT), decomposition_cost(UNIT, MultiSection(k))
    assert single < multi
    assert multi.triangles == triangulate_solid_surface(UNIT, MultiSection(k)).n_triangles


def test_parse_strategy():
    assert parse_strategy("single") == SingleSection()
    assert parse_strategy("multi:4") == MultiSection(4)
    for bad in ("multi:1", "multi:x", "double"):
        with pytest.raises(ValueError):
            parse_strategy(bad)


def test_composite_solid():
    boxes = [UNIT, Box((3, 0, 0), (5, 2, 1))]
    m = triangulate_solids(boxes)
    assert m.n_triangles == 32
    assert verify_mesh(m).passed
    assert decomposition_cost(boxes).triangles == 32
    # hulls never share vertices, even when boxes touch
    touching = triangulate_solids([UNIT, Box((1, 0, 0), (2, 1, 1))])
    assert verify_mesh(touching).passed


def test_obj_and_json():
    m = triangulate_solid_surface(UNIT)
    lines = m.to_obj().splitlines()
    assert sum(l.startswith("v ") for l in lines) == len(m.vertices)
    faces = [l for l in lines if l.startswith("f ")]
    assert len(faces) == 16
    idx = [int(v) for l in faces for v in l.split()[1:]]
    assert min(idx) == 1 and max(idx) == len(m.vertices)
    again = SurfaceMesh.from_json(m.to_json())
    assert np.array_equal(again.triangles, m.triangles)
    assert verify_mesh(again).passed


# --- corrupted meshes --------------------------------------------------------------------

def _mesh():
    return triangulate_solid_surface(UNIT)


def _with(m, vertices=None, triangles=None):
    v = m.vertices if vertices is None else vertices
    t = m.triangles if triangles is None else triangles
    return SurfaceMesh(v, t, list(m.face_ids)[: len(t)] + ["x"] * max(0, len(t) - len(m.face_ids)),
                       np.zeros(len(t), dtype=np.int64), m.source_area, m.scale)


def test_deleted_triangle_opens_three_edges():
    m = _mesh()
    rep = verify_mesh(_with(m, triangles=m.triangles[1:]))
    assert not rep["edge_manifold"].passed
    assert rep["edge_manifold"].detail.startswith("3 edges")


def test_duplicated_triangle_fails_manifold():
    m = _mesh()
    rep = verify_mesh(_with(m, triangles=np.vstack([m.triangles, m.triangles[:1]])))
    assert not rep["edge_manifold"].passed
    assert "x3" in rep["edge_manifold"].detail


def test_vertex_split_fails_only_manifold():
    m = _mesh()
    t = m.triangles.copy()
    k = int(t[0, 0])
    v = np.vstack([m.vertices, m.vertices[k]])
    t[0, 0] = len(m.vertices)  # one triangle now uses a coincident copy
    rep = verify_mesh(_with(m, v, t))
    assert rep.failed() == ["edge_manifold"]


def test_degenerate_pair_fails_only_degeneracy():
    m = _mesh()
    n = len(m.vertices)
    v = np.vstack([m.vertices, [(2, 0, 0), (3, 0, 0), (4, 0, 0)]])
    t = np.vstack([m.triangles, [(n, n + 1, n + 2), (n + 2, n + 1, n)]])
    rep = verify_mesh(_with(m, v, t))
    assert rep.failed() == ["non_degenerate"]


def test_scaled_component_fails_only_area():
    m = _mesh()
    v = m.vertices.copy()
    used = np.unique(m.triangles[m.components == 1])
    v[used] *= 1.5
    rep = verify_mesh(_with(m, v, m.triangles))
    assert rep.failed() == ["area"]


# --- properties -----------------------------------------------------------------------------

side = st.floats(0.01, 100)
corner = st.floats(-100, 100)


@settings(max_examples=40, deadline=None)
@given(corner, corner, corner, side, side, side, st.sampled_from(["single", "multi:2", "multi:5"]), st.integers(0, 1))
def test_property_boxes(x, y, z, dx, dy, dz, strat, pair):
    b = Box((x, y, z), (x + dx, y + dy, z + dz))
    strategy = parse_strategy(strat)
    if isinstance(strategy, SingleSection):
        strategy = SingleSection(pair)
        p, q = slice_box(b, pair)
        assert congruent(p, q)
        assert p.volume + q.volume == pytest.approx(b.volume, rel=1e-9)
    m = triangulate_solid_surface(b, strategy)
    rep = verify_mesh(m)
    assert rep.passed, rep.failed()
    assert decomposition_cost(b, strategy).triangles == m.n_triangles
