"""Inscribed regular polygons as circle approximations.

Accuracy is the coverage ratio, polygon area over disc area. It is measured
on the constructed vertices with the shoelace formula; the closed form
``(n / 2pi) * sin(2pi / n)`` is kept only as an independent reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import GeometryError, Point2, SimplePolygon, Tolerance, ring_area


@dataclass(frozen=True)
class Circle:
    center: Point2 = Point2(0.0, 0.0)
    radius: float = 1.0

    def __post_init__(self):
        if not isinstance(self.center, Point2):
            object.__setattr__(self, "center", Point2(*self.center))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise GeometryError("radius must be positive and finite")

    @property
    def area(self) -> float:
        return math.pi * self.radius**2


@dataclass(frozen=True)
class CurveEntry:
    n: int
    ratio: float
    marginal_gain: float | None  # None for n = 3, which has no predecessor


@dataclass(frozen=True)
class CoverageCurve:
    entries: tuple[CurveEntry, ...]

    def ratios(self) -> list[float]:
        return [e.ratio for e in self.entries]

    def gains(self) -> list[float]:
        return [e.marginal_gain for e in self.entries if e.marginal_gain is not None]

    def best_step(self) -> tuple[int, int]:
        """The (n-1, n) step with the largest gain."""
        e = max((e for e in self.entries if e.marginal_gain is not None), key=lambda e: e.marginal_gain)
        return e.n - 1, e.n

    def to_csv(self) -> str:
        lines = ["n,ratio,gain"]
        for e in self.entries:
            gain = "" if e.marginal_gain is None else repr(e.marginal_gain)
            lines.append(f"{e.n},{e.ratio!r},{gain}")
        return "\n".join(lines) + "\n"


def _ring_offsets(c: Circle, n: int, phase: float) -> tuple[np.ndarray, np.ndarray]:
    theta = phase + (2.0 * math.pi / n) * np.arange(n)
    return c.radius * np.cos(theta), c.radius * np.sin(theta)


def _ring(c: Circle, n: int, phase: float) -> np.ndarray:
    dx, dy = _ring_offsets(c, n, phase)
    return np.column_stack([c.center.x + dx, c.center.y + dy])


def inscribed_polygon(c: Circle, n: int, phase: float = 0.0) -> SimplePolygon:
    """Regular n-gon with vertex k at angle ``phase + 2 pi k / n``."""
    if n < 3:
        raise GeometryError("an inscribed polygon needs at least 3 vertices")
    xy = _ring(c, n, phase)
    # regular and CCW by construction; O(n^2) validation is skipped
    return SimplePolygon.trusted(xy, Tolerance(scale=2.0 * c.radius))


def coverage_ratio(c: Circle | SimplePolygon, n: int | Circle | None = None, phase: float = 0.0) -> float:
    """Inscribed-polygon area over disc area.

    ``coverage_ratio(circle, n)`` builds the regular n-gon;
    ``coverage_ratio(polygon, circle)`` measures any given polygon instead.
    """
    if isinstance(c, SimplePolygon):
        if not isinstance(n, Circle):
            raise TypeError("coverage_ratio(polygon, circle) needs a Circle")
        poly, circle = c, n
        x = poly.coords[:, 0] - circle.center.x
        y = poly.coords[:, 1] - circle.center.y
    else:
        if n is None or n < 3:
            raise GeometryError("n must be at least 3")
        circle = c
        x, y = _ring_offsets(c, n, phase)
    return ring_area(x, y) / circle.area


def closed_form_ratio(n: int) -> float:
    return n / (2.0 * math.pi) * math.sin(2.0 * math.pi / n)


def marginal_gain_curve(c: Circle, n_max: int, phase: float = 0.0) -> CoverageCurve:
    if n_max < 4:
        raise ValueError("n_max must be at least 4")
    entries = []
    prev = None
    for n in range(3, n_max + 1):
        r = coverage_ratio(c, n, phase)
        entries.append(CurveEntry(n, r, None if prev is None else r - prev))
        prev = r
    return CoverageCurve(tuple(entries))


def min_vertices_for_ratio(c: Circle, target: float) -> int:
    """Smallest n >= 3 whose inscribed polygon reaches ``target`` coverage."""
    if not 0 < target < 1:
        raise ValueError("target must lie in (0, 1)")
    n = 3
    while coverage_ratio(c, n) < target:
        n += 1
    return n
