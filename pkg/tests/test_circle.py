import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trigeom.circle import (
    Circle,
    closed_form_ratio,
    coverage_ratio,
    inscribed_polygon,
    marginal_gain_curve,
    min_vertices_for_ratio,
)
from trigeom.geometry import GeometryError, Point2, SimplePolygon, is_simple, signed_area
from trigeom.triangulation import triangulate, verify_triangulation

UNIT = Circle()

# closed form (n / 2pi) sin(2pi / n) evaluated at 30 digits, frozen
RATIO_3 = 0.413496671566344037
RATIO_4 = 0.636619772367581343
RATIO_25 = 0.989505620981308403
RATIO_26 = 0.990295044197820019
GAIN_34 = 0.223123100801237306
GAIN_45 = 0.120206956273075636


def test_circle_validation():
    with pytest.raises(GeometryError):
        Circle(Point2(0, 0), 0.0)
    assert Circle((1, 2), 2).center == Point2(1, 2)


def test_inscribed_square():
    poly = inscribed_polygon(UNIT, 4)
    assert np.allclose(poly.coords, [(1, 0), (0, 1), (-1, 0), (0, -1)], atol=1e-15)


def test_inscribed_triangle_phase():
    poly = inscribed_polygon(UNIT, 3, math.pi / 2)
    assert np.allclose(poly.coords[0], (0, 1), atol=1e-15)


@pytest.mark.parametrize("n", [3, 5, 17, 256])
def test_vertices_on_circumference(n):
    c = Circle(Point2(3.5, -2.0), 7.25)
    poly = inscribed_polygon(c, n, 0.3)
    d = np.hypot(poly.coords[:, 0] - 3.5, poly.coords[:, 1] + 2.0)
    assert np.all(np.abs(d - 7.25) <= 1e-12 * 7.25)


def test_inscribed_rejects_small_n():
    with pytest.raises(GeometryError):
        inscribed_polygon(UNIT, 2)


def test_inscribed_polygon_is_valid():
    poly = inscribed_polygon(UNIT, 40)
    assert is_simple(poly.coords)
    assert signed_area(poly) > 0
    # revalidating through the full constructor changes nothing
    assert np.array_equal(SimplePolygon(poly.coords).coords, poly.coords)


def test_ratio_examples():
    assert coverage_ratio(UNIT, 3) == pytest.approx(RATIO_3, rel=1e-12)
    assert coverage_ratio(UNIT, 4) == pytest.approx(2 / math.pi, rel=1e-12)
    assert coverage_ratio(UNIT, 96) >= 0.9992


def test_closed_form_reference_values():
    assert closed_form_ratio(3) == pytest.approx(RATIO_3, rel=1e-15)
    assert closed_form_ratio(4) == pytest.approx(RATIO_4, rel=1e-15)


def test_gain_examples():
    curve = marginal_gain_curve(UNIT, 5)
    assert curve.entries[0].marginal_gain is None
    assert curve.entries[1].marginal_gain == pytest.approx(GAIN_34, rel=1e-12)
    assert curve.entries[2].marginal_gain == pytest.approx(GAIN_45, rel=1e-12)
    assert curve.best_step() == (3, 4)


def test_curve_to_64():
    r = marginal_gain_curve(UNIT, 64).ratios()
    assert len(r) == 62
    assert all(a < b for a, b in zip(r, r[1:]))
    assert all(0 < x < 1 for x in r)


def test_curve_rejects_small_n_max():
    with pytest.raises(ValueError):
        marginal_gain_curve(UNIT, 3)


@pytest.mark.parametrize("target,n", [(0.5, 4), (0.99, 26), (0.4, 3)])
def test_min_vertices(target, n):
    assert min_vertices_for_ratio(UNIT, target) == n


def test_min_vertices_bracket():
    assert coverage_ratio(UNIT, 25) == pytest.approx(RATIO_25, rel=1e-12) and RATIO_25 < 0.99
    assert coverage_ratio(UNIT, 26) == pytest.approx(RATIO_26, rel=1e-12) and RATIO_26 >= 0.99


def test_min_vertices_rejects_bad_target():
    for t in (0.0, 1.0, -0.5):
        with pytest.raises(ValueError):
            min_vertices_for_ratio(UNIT, t)


def test_general_polygon_overload():
    c = Circle(Point2(1, 1), 2)
    irregular = SimplePolygon([(3, 1), (1, 3), (-1, 1), (1, -1 + 1e-3)])
    ratio = coverage_ratio(irregular, c)
    assert 0 < ratio < coverage_ratio(c, 4) + 1e-3
    with pytest.raises(TypeError):
        coverage_ratio(irregular, 4)


def test_csv():
    text = marginal_gain_curve(UNIT, 6).to_csv().splitlines()
    assert text[0] == "n,ratio,gain"
    assert text[1].startswith("3,") and text[1].endswith(",")
    assert len(text) == 5


@settings(max_examples=50, deadline=None)
@given(st.integers(3, 2000), st.floats(-10, 10), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_property_ratio_invariance(n, phase, cx, cy, r):
    c = Circle(Point2(cx, cy), r)
    assert coverage_ratio(c, n, phase) == pytest.approx(closed_form_ratio(n), rel=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(3, 150))
def test_property_composition_with_triangulation(n):
    poly = inscribed_polygon(UNIT, n, 0.25)
    for algo in ("earclip", "monotone"):
        t = triangulate(poly, algo)
        assert len(t.triangles) == n - 2
        assert verify_triangulation(poly, t).passed
