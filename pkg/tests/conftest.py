import json
from pathlib import Path

import numpy as np
import pytest

from trigeom.geometry import SimplePolygon
from trigeom.randpoly import corpus

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str):
    return json.loads((FIXTURES / name).read_text())


def fixture_polygon(name: str) -> SimplePolygon:
    return SimplePolygon.from_json(load_fixture(name))


@pytest.fixture(scope="session")
def polygon_corpus():
    """1000 seeded simple polygons, n in [3, 200]."""
    return corpus(1000, seed=20240601)


@pytest.fixture(scope="session")
def small_corpus():
    return corpus(100, seed=7, n_max=60)


def regular(n: int, r: float = 1.0, phase: float = 0.0) -> np.ndarray:
    t = phase + 2 * np.pi * np.arange(n) / n
    return np.column_stack([r * np.cos(t), r * np.sin(t)])


def corruption_trials(scene, trials: int = 200, seed: int = 7, offset: float = 5.0):
    """Two-round vs one-round on exact ranges with one tower pushed out by ``offset``.

    Truth is uniform over the tower bounding box inset by 15% per side; the
    corrupted tower is uniform. Returns (excluded count, beaten count).
    """
    from trigeom.localization import RangeSet, solve_position, two_round_locate

    rng = np.random.default_rng(seed)
    pts = scene.positions
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    excluded = beaten = 0
    for _ in range(trials):
        truth = rng.uniform(lo + 0.15 * (hi - lo), hi - 0.15 * (hi - lo))
        bad = scene.ids[int(rng.integers(len(pts)))]
        r = dict(zip(scene.ids, np.linalg.norm(pts - truth, axis=1).tolist()))
        r[bad] += offset
        ranges = RangeSet(r)
        one = solve_position(scene, ranges)
        two = two_round_locate(scene, ranges)
        excluded += bad not in two.towers_used
        beaten += two.error(truth) < one.error(truth)
    return excluded, beaten


ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, text = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:2d}: {status}  {text}")
