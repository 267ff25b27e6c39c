import xml.etree.ElementTree as ET

from trigeom import svg
from trigeom.circle import Circle, inscribed_polygon
from trigeom.geometry import SimplePolygon
from trigeom.localization import TowerScene, accuracy_map, simulate_ranges, two_round_locate
from trigeom.solid import Box, face_charts, slice_box
from trigeom.triangulation import triangulate

NS = "{http://www.w3.org/2000/svg}"


def _count(text, tag):
    return len(ET.fromstring(text).findall(f"{NS}{tag}"))


def test_triangulation_svg():
    poly = SimplePolygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])
    text = svg.triangulation_svg(triangulate(poly))
    assert _count(text, "polygon") == 5  # 4 triangles + outline
    assert _count(text, "line") == 3
    assert text == svg.triangulation_svg(triangulate(poly))


def test_circle_svg():
    c = Circle()
    poly = inscribed_polygon(c, 3)
    text = svg.circle_svg(c, poly)
    assert _count(text, "circle") == 4


def test_net_svg():
    text = svg.net_svg(face_charts(slice_box(Box.unit())[0]))
    assert _count(text, "text") == 5


def test_towers_and_heatmap_svg():
    scene = TowerScene.from_points([(0, 0), (10, 0), (10, 10), (0, 10)])
    r = simulate_ranges(scene, (3, 4), 0.1, 1)
    est = two_round_locate(scene, r)
    ET.fromstring(svg.towers_svg(scene, r, est, (3, 4)))
    amap = accuracy_map(scene, (-5, -5, 15, 15), 5, 0.5)
    text = svg.heatmap_svg(amap, scene)
    assert _count(text, "rect") == 1 + 25
