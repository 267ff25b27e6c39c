"""Plain-text SVG figures for each module's results.

Output is deterministic for equal input."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

PALETTE = ["#8ecae6", "#ffb703", "#90be6d", "#f28482", "#cdb4db", "#f4a261", "#a8dadc", "#e9c46a"]


def _f(v: float) -> str:
    return f"{v:.4f}".rstrip("0").rstrip(".")


class Canvas:
    """Maps world coordinates (y up) into an SVG viewport (y down)."""

    def __init__(self, bounds: tuple[float, float, float, float], width: int = 480, margin: int = 20):
        xmin, ymin, xmax, ymax = bounds
        span = max(xmax - xmin, ymax - ymin, 1e-12)
        self.scale = (width - 2 * margin) / span
        self.xmin, self.ymax, self.margin = xmin, ymax, margin
        self.width = width
        self.height = int(math.ceil((ymax - ymin) * self.scale + 2 * margin))
        self.items: list[str] = []

    def pt(self, x: float, y: float) -> tuple[str, str]:
        return _f(self.margin + (x - self.xmin) * self.scale), _f(self.margin + (self.ymax - y) * self.scale)

    def polygon(self, pts: Iterable[Sequence[float]], fill="none", stroke="#222", width=1.5, dash=None, opacity=None):
        coords = " ".join(",".join(self.pt(x, y)) for x, y in pts)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        extra += f' fill-opacity="{opacity}"' if opacity is not None else ""
        self.items.append(f'<polygon points="{coords}" fill="{fill}" stroke="{stroke}" stroke-width="{width}"{extra}/>')

    def line(self, a, b, stroke="#222", width=1.0, dash=None):
        (x1, y1), (x2, y2) = self.pt(*a), self.pt(*b)
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="{stroke}" stroke-width="{width}"{extra}/>')

    def circle(self, c, r, fill="none", stroke="#222", width=1.0, world_radius=True, dash=None):
        cx, cy = self.pt(*c)
        rr = r * self.scale if world_radius else r
        extra = f' stroke-dasharray="{dash}"' if dash else ""
        self.items.append(f'<circle cx="{cx}" cy="{cy}" r="{_f(rr)}" fill="{fill}" stroke="{stroke}" stroke-width="{width}"{extra}/>')

    def rect(self, x0, y0, x1, y1, fill):
        (ax, ay), (bx, by) = self.pt(x0, y1), self.pt(x1, y0)
        w, h = float(bx) - float(ax), float(by) - float(ay)
        self.items.append(f'<rect x="{ax}" y="{ay}" width="{_f(w)}" height="{_f(h)}" fill="{fill}" stroke="none"/>')

    def text(self, x, y, s, size=11):
        tx, ty = self.pt(x, y)
        self.items.append(f'<text x="{tx}" y="{ty}" font-family="sans-serif" font-size="{size}">{s}</text>')

    def render(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
                f'viewBox="0 0 {self.width} {self.height}">')
        return "\n".join([head, '<rect width="100%" height="100%" fill="white"/>', *self.items, "</svg>"]) + "\n"


def _bounds(xy: np.ndarray, pad: float = 0.05) -> tuple[float, float, float, float]:
    lo, hi = xy.min(axis=0), xy.max(axis=0)
    p = pad * max(float(np.max(hi - lo)), 1e-12)
    return float(lo[0] - p), float(lo[1] - p), float(hi[0] + p), float(hi[1] + p)


def triangulation_svg(t) -> str:
    """Polygon outline, filled triangles and dashed diagonals."""
    xy = t.source.coords
    cv = Canvas(_bounds(xy))
    for k, tri in enumerate(t.triangles):
        cv.polygon(xy[list(tri)].tolist(), fill=PALETTE[k % len(PALETTE)], stroke="none", width=0, opacity=0.6)
    for d in t.diagonals:
        cv.line(xy[d.i], xy[d.j], stroke="#555", dash="4 3")
    cv.polygon(xy.tolist(), width=2)
    return cv.render()


def circle_svg(circle, poly, t=None) -> str:
    """Circle with its inscribed polygon; optional triangulation of the polygon."""
    c, r = (circle.center.x, circle.center.y), circle.radius
    cv = Canvas((c[0] - 1.1 * r, c[1] - 1.1 * r, c[0] + 1.1 * r, c[1] + 1.1 * r))
    cv.circle(c, r, fill="#f1faee", stroke="#1d3557")
    xy = poly.coords
    if t is not None:
        for k, tri in enumerate(t.triangles):
            cv.polygon(xy[list(tri)].tolist(), fill=PALETTE[k % len(PALETTE)], stroke="none", width=0, opacity=0.6)
        for d in t.diagonals:
            cv.line(xy[d.i], xy[d.j], stroke="#555", dash="4 3")
    cv.polygon(xy.tolist(), width=2)
    for x, y in xy.tolist():
        cv.circle((x, y), 3, fill="#e63946", stroke="none", world_radius=False)
    return cv.render()


def net_svg(charts) -> str:
    """Flattened face charts laid out left to right, each with its triangulation."""
    from .triangulation import triangulate_earclip

    placed, x_off, gap = [], 0.0, 0.25
    for ch in charts:
        xy = ch.polygon2d.coords
        lo, hi = xy.min(axis=0), xy.max(axis=0)
        shifted = xy - lo + (x_off, 0.0)
        placed.append((ch, shifted))
        x_off += float(hi[0] - lo[0]) + gap
    allpts = np.vstack([p for _, p in placed])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    cv = Canvas((float(lo[0]) - gap, float(lo[1]) - gap, float(hi[0]) + gap, float(hi[1]) + gap), width=720)
    for k, (ch, xy) in enumerate(placed):
        t = triangulate_earclip(ch.polygon2d)
        for tri in t.triangles:
            cv.polygon(xy[list(tri)].tolist(), fill=PALETTE[k % len(PALETTE)], stroke="#777", width=0.8, opacity=0.7)
        cv.polygon(xy.tolist(), width=1.8)
        cx, cy = xy.mean(axis=0)
        cv.text(float(cx), float(cy), ch.face_id.rsplit("/", 1)[-1], size=10)
    return cv.render()


def towers_svg(scene, ranges=None, estimate=None, truth=None) -> str:
    """Towers, the polygon they span, range circles and the estimate."""
    pts = scene.positions[:, :2]
    extra = [pts]
    if truth is not None:
        extra.append(np.array([tuple(truth)[:2]]))
    if estimate is not None:
        extra.append(np.array([[estimate.position.x, estimate.position.y]]))
    cv = Canvas(_bounds(np.vstack(extra), pad=0.25))
    order = np.argsort(np.arctan2(*(pts - pts.mean(axis=0)).T[::-1]))
    cv.polygon(pts[order].tolist(), fill="#edf6f9", stroke="#457b9d", width=1.2)
    used = set(estimate.towers_used) if estimate is not None else set(scene.ids)
    for tw, (x, y) in zip(scene.towers, pts.tolist()):
        if ranges is not None and tw.id in ranges.ranges:
            cv.circle((x, y), ranges.ranges[tw.id], stroke="#8d99ae" if tw.id not in used else "#2a9d8f",
                      dash=None if tw.id in used else "5 4")
        cv.circle((x, y), 5, fill="#1d3557", stroke="none", world_radius=False)
        cv.text(x, y, tw.id)
    if truth is not None:
        cv.circle(tuple(truth)[:2], 4, fill="#2a9d8f", stroke="none", world_radius=False)
    if estimate is not None:
        cv.circle((estimate.position.x, estimate.position.y), 4, fill="#e63946", stroke="none", world_radius=False)
        if estimate.first_round is not None:
            fr = estimate.first_round.position
            cv.circle((fr.x, fr.y), 4, fill="none", stroke="#e63946", world_radius=False)
    return cv.render()


def _heat(v: float, lo: float, hi: float) -> str:
    s = 0.0 if hi <= lo else min(1.0, max(0.0, (math.log(v) - math.log(lo)) / (math.log(hi) - math.log(lo))))
    r, g, b = int(255 * s), int(80 + 120 * (1 - s)), int(255 * (1 - s))
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap_svg(amap, scene, metric: str = "analytic") -> str:
    """Grid cells coloured by log error scale; towers and centroid overlaid."""
    vals = amap.analytic if metric == "analytic" or amap.rmse is None else amap.rmse
    xs, ys = amap.xs, amap.ys
    hx = (xs[1] - xs[0]) / 2 if len(xs) > 1 else 0.5
    hy = (ys[1] - ys[0]) / 2 if len(ys) > 1 else 0.5
    pts = np.vstack([scene.positions[:, :2], [[xs[0] - hx, ys[0] - hy], [xs[-1] + hx, ys[-1] + hy]]])
    cv = Canvas(_bounds(pts, pad=0.02))
    finite = vals[np.isfinite(vals)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (1.0, 1.0)
    for iy, y in enumerate(ys):
        for ix, x in enumerate(xs):
            v = vals[iy, ix]
            fill = "#000000" if not np.isfinite(v) or v <= 0 else _heat(float(v), lo, hi)
            cv.rect(x - hx, y - hy, x + hx, y + hy, fill)
    for tw, (x, y) in zip(scene.towers, scene.positions[:, :2].tolist()):
        cv.circle((x, y), 5, fill="white", stroke="#000", world_radius=False)
        cv.text(x, y, tw.id)
    cv.circle(amap.centroid, 4, fill="none", stroke="white", world_radius=False)
    return cv.render()
