import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from trigeom import __version__
from trigeom.cli import main

from conftest import FIXTURES


def run(tmp_path, *argv):
    out = tmp_path / "report.json"
    code = main([*argv, "--output", str(out)])
    report = json.loads(out.read_text()) if out.exists() else None
    return code, report


def fx(name):
    return str(FIXTURES / name)


def test_triangulate_unit_square(tmp_path):
    code, rep = run(tmp_path, "triangulate", "--input", fx("unit_square.json"), "--algo", "earclip")
    assert code == 0
    r = rep["results"]
    assert (r["triangle_count"], r["diagonal_count"], r["area"]) == (2, 1, 1.0)
    assert rep["passed"] and rep["version"] == __version__ and rep["tool"] == "trigeom"
    assert rep["inputs"]["data"]["input"] == json.loads((FIXTURES / "unit_square.json").read_text())
    assert "timestamp" in rep


def test_circle_approx(tmp_path):
    csv = tmp_path / "curve.csv"
    code, rep = run(tmp_path, "circle-approx", "--n-max", "16", "--csv", str(csv))
    assert code == 0
    rows = [l.split(",") for l in csv.read_text().splitlines()[1:]]
    ratios = [float(r[1]) for r in rows]
    assert [int(r[0]) for r in rows] == list(range(3, 17))
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    gains = [float(r[2]) for r in rows[1:]]
    assert gains.index(max(gains)) == 0
    assert rep["results"]["best_step"] == [3, 4]


def test_circle_target(tmp_path):
    code, rep = run(tmp_path, "circle-approx", "--n-max", "8", "--target", "0.99")
    assert code == 0 and rep["results"]["min_vertices"] == 26


def test_locate_two_round_excludes_corrupted(tmp_path):
    code, rep = run(tmp_path, "locate", "--input", fx("towers_5.json"), "--ranges", fx("ranges_5_corrupted.json"),
                    "--two-round", "--truth", "4,6")
    assert code == 0
    used = rep["results"]["estimate"]["towers_used"]
    assert len(used) == 3 and "T3" not in used
    assert rep["results"]["error"] < 1e-9
    assert "first_round" in rep["results"]["estimate"]


def test_locate_simulated_3d(tmp_path):
    code, rep = run(tmp_path, "locate", "--input", fx("towers_3d.json"), "--truth", "40,50,0",
                    "--sigma", "0.2", "--seed", "3", "--mode", "heightcorrected:0")
    assert code == 0 and rep["results"]["error"] < 2.0


def test_slice(tmp_path):
    obj = tmp_path / "m.obj"
    mesh = tmp_path / "m.json"
    code, rep = run(tmp_path, "slice", "--input", fx("unit_cube.json"), "--obj", str(obj), "--mesh", str(mesh))
    assert code == 0
    assert rep["results"]["triangle_count"] == 16 and rep["results"]["face_count"] == 10
    assert obj.read_text().count("\nf ") == 16
    assert main(["verify", "--input", str(mesh), "--output", str(tmp_path / "v.json")]) == 0


def test_slice_multi_and_composite(tmp_path):
    code, rep = run(tmp_path, "slice", "--strategy", "multi:3")
    assert code == 0 and rep["results"]["triangle_count"] == 48
    code, rep = run(tmp_path, "slice", "--input", fx("two_boxes.json"))
    assert code == 0 and rep["results"]["components"] == 4


def test_accuracy_map(tmp_path):
    csv = tmp_path / "map.csv"
    code, rep = run(tmp_path, "accuracy-map", "--input", fx("towers_4_square.json"), "--region=0,0,30,30",
                    "--step", "10", "--trials", "20", "--csv", str(csv))
    assert code == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "x,y,analytic,rmse" and len(lines) == 17
    assert rep["results"]["degenerate_points"] == 4


@pytest.mark.parametrize("argv", [
    ["triangulate", "--input", "unit_square.json", "--algo", "monotone"],
    ["circle-approx", "--n-max", "12", "--phase", "0.3"],
    ["slice", "--input", "unit_cube.json", "--strategy", "multi:2"],
    ["locate", "--input", "towers_4_square.json", "--truth", "3,4", "--sigma", "0.3", "--seed", "5"],
    ["accuracy-map", "--input", "towers_4_square.json", "--region=-5,-5,15,15", "--step", "10", "--trials", "5"],
])
def test_report_replays_identically(tmp_path, argv):
    argv = [fx(a) if a.endswith(".json") else a for a in argv]
    code, rep = run(tmp_path, *argv)
    assert code == 0
    v = tmp_path / "verify.json"
    assert main(["verify", "--input", str(tmp_path / "report.json"), "--output", str(v)]) == 0
    assert json.loads(v.read_text())["checks"][0]["name"] == "replay_identical"


def test_tampered_report_fails_verify(tmp_path):
    run(tmp_path, "triangulate", "--input", fx("l_shape.json"))
    path = tmp_path / "report.json"
    rep = json.loads(path.read_text())
    rep["results"]["area"] = 99.0
    path.write_text(json.dumps(rep))
    assert main(["verify", "--input", str(path), "--output", str(tmp_path / "v.json")]) == 1


def test_bad_triangulation_fails_verify(tmp_path, capsys):
    doc = {"vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "triangles": [[0, 1, 2]], "diagonals": [[0, 2]]}
    p = tmp_path / "t.json"
    p.write_text(json.dumps(doc))
    assert main(["verify", "--input", str(p), "--output", str(tmp_path / "v.json")]) == 1
    assert "area" in capsys.readouterr().err


def test_good_triangulation_verifies(tmp_path):
    run(tmp_path, "triangulate", "--input", fx("comb.json"))
    tri = json.loads((tmp_path / "report.json").read_text())["results"]["triangulation"]
    p = tmp_path / "t.json"
    p.write_text(json.dumps(tri))
    assert main(["verify", "--input", str(p), "--output", str(tmp_path / "v.json")]) == 0


@pytest.mark.parametrize("doc,needle", [
    ({"vert": []}, "vertices"),
    ({"vertices": [[0, 0], [2, 2], [2, 0], [0, 2]]}, "intersect"),
    ({"vertices": [[0, 0], [1, 0], [1, 0], [0, 1]]}, "coincide"),
    ({"vertices": [1, 2, 3]}, "vertices"),
])
def test_malformed_polygon_exit_2(tmp_path, capsys, doc, needle):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    assert main(["triangulate", "--input", str(p)]) == 2
    assert needle in capsys.readouterr().err


def test_malformed_inputs_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["triangulate", "--input", str(bad)]) == 2
    assert main(["triangulate", "--input", str(tmp_path / "missing.json")]) == 2
    assert main(["slice", "--strategy", "multi:1"]) == 2
    assert main(["locate", "--input", fx("towers_5.json")]) == 2
    assert main(["locate", "--input", fx("towers_5.json"), "--truth", "1,x"]) == 2
    assert main(["accuracy-map", "--input", fx("towers_4_square.json"), "--region=1,2,3"]) == 2
    assert main(["circle-approx", "--n-max", "3"]) == 2
    scene = tmp_path / "s.json"
    scene.write_text(json.dumps({"towers": [{"id": "a", "pos": [0, 0]}]}))
    assert main(["locate", "--input", str(scene), "--truth", "1,1"]) == 2
    err = capsys.readouterr().err
    assert "--region" in err and "--truth" in err


def test_svg_outputs_are_xml(tmp_path):
    cases = [
        ["triangulate", "--input", fx("parallelogram.json")],
        ["circle-approx", "--n-max", "8", "--n", "3"],
        ["slice", "--input", fx("unit_cube.json")],
        ["locate", "--input", fx("towers_3.json"), "--truth", "4,3"],
        ["accuracy-map", "--input", fx("towers_4_square.json"), "--region=-5,-5,35,35", "--step", "5"],
    ]
    for k, argv in enumerate(cases):
        svg = tmp_path / f"f{k}.svg"
        assert main([*argv, "--svg", str(svg), "--output", str(tmp_path / "r.json")]) == 0
        root = ET.fromstring(svg.read_text())
        assert root.tag.endswith("svg") and len(root) > 2


def test_module_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "trigeom", "triangulate", "--input", fx("trapezoid.json")],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["results"]["triangle_count"] == 2
