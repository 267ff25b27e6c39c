"""Command-line front end.

Every command writes a JSON report holding the tool version, an echo of the
inputs (arguments and input file contents), the results and all checks.
Exit status: 0 when every check passes, 1 on a failed check, 2 on
malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import __version__
from .circle import Circle, closed_form_ratio, inscribed_polygon, marginal_gain_curve, min_vertices_for_ratio
from .geometry import DEFAULT_EPS_REL, GeometryError, Point2, SimplePolygon, Tolerance, bbox_diagonal, signed_area
from .localization import (
    LocalizationError,
    NonConvergence,
    RangeSet,
    TowerScene,
    accuracy_map,
    parse_mode,
    project_to_2d,
    simulate_ranges,
    solve_position,
    two_round_locate,
)
from .report import VerificationReport
from .solid import (
    Box,
    SurfaceMesh,
    decomposition_cost,
    chart_face,
    hulls,
    parse_strategy,
    triangulate_solids,
    verify_mesh,
)
from .triangulation import Triangulation, TriangulationError, dual_graph, find_ears, triangulate, verify_triangulation
from . import svg

EXIT_OK, EXIT_CHECK_FAILED, EXIT_BAD_INPUT = 0, 1, 2


class InputError(ValueError):
    """Malformed input; the message names the offending field."""


def _need(data: dict, key: str, where: str):
    if not isinstance(data, dict) or key not in data:
        raise InputError(f"{where}: missing field '{key}'")
    return data[key]


def _floats(text: str, count: int, name: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"--{name}: expected {count} comma-separated numbers, got {text!r}") from None
    if len(vals) != count:
        raise InputError(f"--{name}: expected {count} comma-separated numbers, got {text!r}")
    return vals


def _truth(text: str | None) -> list[float] | None:
    if not text:
        return None
    n = len(text.split(","))
    return list(_floats(text, 3 if n == 3 else 2, "truth"))


def _polygon(data: dict, eps_rel: float | None) -> SimplePolygon:
    verts = _need(data, "vertices", "polygon")
    try:
        xy = np.array(verts, dtype=float)
    except (TypeError, ValueError):
        raise InputError("polygon: field 'vertices' must be a list of [x, y] pairs") from None
    if xy.ndim != 2 or xy.shape[1] != 2:
        raise InputError("polygon: field 'vertices' must be a list of [x, y] pairs")
    tol = Tolerance(eps_rel or DEFAULT_EPS_REL, bbox_diagonal(xy))
    return SimplePolygon(xy, tol)


# --- commands -----------------------------------------------------------------
# Each takes (args, data) and returns (results, checks, artifacts).

def cmd_triangulate(args: dict, data: dict):
    poly = _polygon(data["input"], args.get("tolerance"))
    t = triangulate(poly, args["algo"])
    rep = verify_triangulation(poly, t)
    dual = dual_graph(t)
    rep.add("dual_tree", dual.is_tree(), f"{dual.n_nodes} nodes, {len(dual.edges)} edges")
    rep.add("dual_max_degree", dual.max_degree <= 3, f"max degree {dual.max_degree}")
    ears = find_ears(poly)
    if len(poly) >= 4:
        rep.add("two_ears", len(ears) >= 2, f"{len(ears)} ears")
    results = {
        "n": len(poly),
        "triangle_count": len(t.triangles),
        "diagonal_count": len(t.diagonals),
        "area": float(np.abs(t.triangle_areas()).sum()),
        "polygon_area": float(signed_area(poly)),
        "ears": list(ears.ear_indices),
        "dual_max_degree": dual.max_degree,
        "triangulation": {**poly.to_json(), **t.to_json()},
    }
    return results, rep, {"svg": lambda: svg.triangulation_svg(t)}


def cmd_circle(args: dict, data: dict):
    circle = Circle(Point2(*args["center"]), args["radius"])
    curve = marginal_gain_curve(circle, args["n_max"], args["phase"])
    rep = VerificationReport()
    r = curve.ratios()
    g = curve.gains()
    rep.add("ratios_increasing", all(a < b for a, b in zip(r, r[1:])))
    rep.add("ratios_below_one", all(0 < x < 1 for x in r))
    rep.add("gains_decreasing", all(a > b for a, b in zip(g, g[1:])))
    rep.add("max_gain_at_3_to_4", curve.best_step() == (3, 4), f"best step {curve.best_step()}")
    worst = max(abs(e.ratio - closed_form_ratio(e.n)) / closed_form_ratio(e.n) for e in curve.entries)
    rep.add("closed_form_agreement", worst <= 1e-12, f"max rel err {worst:.3g}")
    results: dict[str, Any] = {
        "entries": [{"n": e.n, "ratio": e.ratio, "gain": e.marginal_gain} for e in curve.entries],
        "best_step": list(curve.best_step()),
    }
    if args.get("target") is not None:
        results["min_vertices"] = min_vertices_for_ratio(circle, args["target"])
    poly = inscribed_polygon(circle, args["n"], args["phase"])

    def figure():
        return svg.circle_svg(circle, poly, triangulate(poly, "earclip"))

    return results, rep, {"csv": curve.to_csv, "svg": figure}


def _boxes(data: dict | None) -> list[Box]:
    if not data:
        return [Box.unit()]
    raw = data["boxes"] if "boxes" in data else [data]
    out = []
    for k, b in enumerate(raw):
        lo, hi = _need(b, "min", f"boxes[{k}]"), _need(b, "max", f"boxes[{k}]")
        if len(lo) != 3 or len(hi) != 3:
            raise InputError(f"boxes[{k}]: 'min' and 'max' need 3 coordinates")
        out.append(Box(tuple(lo), tuple(hi)))
    return out


def cmd_slice(args: dict, data: dict):
    boxes = _boxes(data.get("input"))
    strategy = parse_strategy(args["strategy"])
    mesh = triangulate_solids(boxes, strategy)
    rep = verify_mesh(mesh)
    cost = decomposition_cost(boxes, strategy)
    rep.add("cost_matches_mesh", cost.triangles == mesh.n_triangles, f"cost {cost.triangles} vs mesh {mesh.n_triangles}")
    results = {
        "boxes": [b.to_json() for b in boxes],
        "strategy": str(strategy),
        "triangle_count": mesh.n_triangles,
        "face_count": cost.faces,
        "vertex_count": len(mesh.vertices),
        "components": int(mesh.components.max()) + 1 if len(mesh.components) else 0,
        "mesh_area": mesh.area,
        "source_area": mesh.source_area,
    }

    def net():
        return svg.net_svg([chart_face(f) for f in hulls(boxes[0], strategy)[0]])

    return results, rep, {
        "svg": net,
        "obj": mesh.to_obj,
        "mesh": lambda: json.dumps(mesh.to_json(), indent=2) + "\n",
    }


def _scene(data: dict) -> TowerScene:
    _need(data, "towers", "scene")
    return TowerScene.from_json(data)


def cmd_locate(args: dict, data: dict):
    scene = _scene(data["input"])
    truth = args.get("truth")
    if data.get("ranges") is not None:
        ranges = RangeSet.from_json(data["ranges"])
    elif truth is not None:
        sim_truth = list(truth) + [0.0] * (scene.dim - len(truth))
        ranges = simulate_ranges(scene, sim_truth, args["sigma"], args["seed"])
    else:
        raise InputError("locate: give --ranges or --truth to simulate ranges")
    if scene.dim == 3:
        scene, ranges = project_to_2d(scene, ranges, parse_mode(args["mode"]))
    rep = VerificationReport()
    try:
        est = two_round_locate(scene, ranges) if args["two_round"] else solve_position(scene, ranges)
    except NonConvergence as exc:
        est = exc.estimate
    rep.add("converged", est.converged, f"{est.iterations} iterations")
    if args["two_round"]:
        rep.add("three_towers_used", len(est.towers_used) == 3, ",".join(est.towers_used))
    results = {"ranges": ranges.to_json(), "estimate": est.to_json()}
    if truth is not None:
        results["error"] = est.error(truth)
    return results, rep, {"svg": lambda: svg.towers_svg(scene, ranges, est, truth)}


def cmd_accuracy_map(args: dict, data: dict):
    scene = _scene(data["input"])
    if scene.dim != 2:
        raise InputError("accuracy-map: scene must be 2D")
    region = args.get("region")
    if region is None:
        pts = scene.positions
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        pad = 0.5 * float(np.max(hi - lo))
        region = (float(lo[0] - pad), float(lo[1] - pad), float(hi[0] + pad), float(hi[1] + pad))
    amap = accuracy_map(scene, region, args["step"], args["sigma"], args["trials"], args["seed"])
    rep = VerificationReport()
    ok = ~amap.degenerate
    good = np.isfinite(amap.analytic[ok]).all() and (amap.analytic[ok] > 0).all() if args["sigma"] > 0 else True
    rep.add("analytic_finite_positive", bool(good), f"{int(amap.degenerate.sum())} degenerate points")
    results = {
        "region": list(region),
        "shape": [len(amap.ys), len(amap.xs)],
        "degenerate_points": int(amap.degenerate.sum()),
        "analytic_min": float(np.nanmin(amap.analytic)) if ok.any() else None,
        "analytic_max": float(np.nanmax(amap.analytic)) if ok.any() else None,
    }
    if amap.rmse is not None:
        results["rmse_min"] = float(np.nanmin(amap.rmse))
        results["rmse_max"] = float(np.nanmax(amap.rmse))
    return results, rep, {"csv": amap.to_csv, "svg": lambda: svg.heatmap_svg(amap, scene)}


def cmd_verify(args: dict, data: dict):
    doc = data["input"]
    rep = VerificationReport()
    if isinstance(doc, dict) and "command" in doc and "inputs" in doc:
        again = build_report(doc["command"], doc["inputs"]["args"], doc["inputs"]["data"])
        same = _canonical(again) == _canonical(doc)
        rep.add("replay_identical", same, f"replayed {doc['command']}")
        return {"replayed": doc["command"]}, rep, {}
    if "triangles" in doc and "source_area" in doc:
        rep = verify_mesh(SurfaceMesh.from_json(doc))
        return {"kind": "mesh"}, rep, {}
    if "triangles" in doc and "vertices" in doc:
        poly = _polygon(doc, args.get("tolerance"))
        t = Triangulation.from_json(poly, doc)
        return {"kind": "triangulation"}, verify_triangulation(poly, t), {}
    raise InputError("verify: input is neither a report, a mesh nor a polygon triangulation")


COMMANDS: dict[str, Callable] = {
    "triangulate": cmd_triangulate,
    "circle-approx": cmd_circle,
    "slice": cmd_slice,
    "locate": cmd_locate,
    "accuracy-map": cmd_accuracy_map,
    "verify": cmd_verify,
}


def _canonical(report: dict) -> str:
    body = {k: v for k, v in report.items() if k != "timestamp"}
    return json.dumps(body, sort_keys=True, indent=2)


def _jsonable(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def build_report(command: str, args: dict, data: dict, artifacts_out: dict | None = None) -> dict:
    """Run ``command`` on echoed inputs and return the report dict."""
    results, rep, artifacts = COMMANDS[command](args, data)
    if artifacts_out is not None:
        artifacts_out.update(artifacts)
    report = {
        "tool": "trigeom",
        "version": __version__,
        "command": command,
        "inputs": {"args": args, "data": data},
        "results": results,
        "checks": rep.to_json()["checks"],
        "passed": rep.passed,
    }
    # normalise through JSON so replays compare like with like
    return json.loads(json.dumps(_jsonable(report)))


# --- argument parsing -----------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="trigeom", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"trigeom {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, input_required=True):
        sp.add_argument("--input", required=input_required, help="input JSON file")
        sp.add_argument("--output", help="report JSON path (default: stdout)")
        sp.add_argument("--svg", help="write the figure here")
        sp.add_argument("--tolerance", type=float, help="relative epsilon (default 1e-9)")
        return sp

    sp = common(sub.add_parser("triangulate", help="triangulate a polygon"))
    sp.add_argument("--algo", choices=["earclip", "monotone"], default="earclip")

    sp = common(sub.add_parser("circle-approx", help="inscribed polygon coverage curve"), input_required=False)
    sp.add_argument("--n-max", type=int, default=16)
    sp.add_argument("--n", type=int, default=3, help="vertex count drawn in the SVG")
    sp.add_argument("--phase", type=float, default=0.0)
    sp.add_argument("--radius", type=float, default=1.0)
    sp.add_argument("--center", default="0,0")
    sp.add_argument("--target", type=float, help="also report the fewest vertices reaching this ratio")
    sp.add_argument("--csv", help="write n,ratio,gain here")

    sp = common(sub.add_parser("slice", help="cross-section a box and mesh its surface"), input_required=False)
    sp.add_argument("--strategy", default="single", help="single | multi:K")
    sp.add_argument("--obj", help="write the mesh as OBJ")
    sp.add_argument("--mesh", help="write the mesh as JSON")

    sp = common(sub.add_parser("locate", help="estimate a position from tower ranges"))
    sp.add_argument("--ranges", help="ranges JSON; otherwise simulated from --truth")
    sp.add_argument("--truth", help="x,y (or x,y,z for 3D scenes) true position; missing z is 0")
    sp.add_argument("--sigma", type=float, default=0.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--two-round", action="store_true")
    sp.add_argument("--mode", default="dropz", help="dropz | heightcorrected:Z (3D scenes)")

    sp = common(sub.add_parser("accuracy-map", help="position error scale over a grid"))
    sp.add_argument("--region", help="xmin,ymin,xmax,ymax")
    sp.add_argument("--step", type=float, default=1.0)
    sp.add_argument("--sigma", type=float, default=0.5)
    sp.add_argument("--trials", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv", help="write x,y,analytic,rmse here")

    common(sub.add_parser("verify", help="check a report replay, mesh or triangulation"))
    return p


def _load_json(path: str, what: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"{what}: cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: {path} is not valid JSON ({exc.msg} at line {exc.lineno})") from None


def _semantic_args(ns: argparse.Namespace) -> tuple[dict, dict]:
    """Split parsed flags into the echoed inputs and the input documents."""
    c = ns.command
    data: dict[str, Any] = {"input": _load_json(ns.input, "--input") if ns.input else None}
    args: dict[str, Any] = {}
    if ns.tolerance is not None:
        args["tolerance"] = ns.tolerance
    if c == "triangulate":
        args["algo"] = ns.algo
    elif c == "circle-approx":
        if ns.n_max < 4:
            raise InputError("--n-max must be at least 4")
        if ns.n < 3:
            raise InputError("--n must be at least 3")
        args.update(n_max=ns.n_max, n=ns.n, phase=ns.phase, radius=ns.radius,
                    center=list(_floats(ns.center, 2, "center")), target=ns.target)
    elif c == "slice":
        args["strategy"] = ns.strategy
    elif c == "locate":
        data["ranges"] = _load_json(ns.ranges, "--ranges") if ns.ranges else None
        args.update(truth=_truth(ns.truth), sigma=ns.sigma,
                    seed=ns.seed, two_round=ns.two_round, mode=ns.mode)
    elif c == "accuracy-map":
        args.update(region=list(_floats(ns.region, 4, "region")) if ns.region else None, step=ns.step,
                    sigma=ns.sigma, trials=ns.trials, seed=ns.seed)
    return args, data


def main(argv: list[str] | None = None) -> int:
    ns = _parser().parse_args(argv)
    try:
        args, data = _semantic_args(ns)
        artifacts: dict = {}
        report = build_report(ns.command, args, data, artifacts)
    except (InputError, GeometryError, LocalizationError, TriangulationError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"trigeom {ns.command}: invalid input: {msg}", file=sys.stderr)
        return EXIT_BAD_INPUT
    report["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if ns.output:
        Path(ns.output).write_text(text)
    else:
        sys.stdout.write(text)
    for flag in ("svg", "csv", "obj", "mesh"):
        path = getattr(ns, flag, None)
        if path and flag in artifacts:
            Path(path).write_text(artifacts[flag]())
    if not report["passed"]:
        failed = [c["name"] for c in report["checks"] if not c["passed"]]
        print(f"trigeom {ns.command}: checks failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
