"""Both kernel backends must agree exactly."""

import subprocess
import sys

import numpy as np
import pytest

from trigeom import kernels
from trigeom.geometry import SimplePolygon
from trigeom.randpoly import random_ring, star_polygon, partition_polygon

BACKENDS = sorted(kernels.BACKENDS)


def test_python_backend_always_available():
    assert "python" in kernels.BACKENDS
    assert kernels.get("python").NAME == "python"
    with pytest.raises(ValueError):
        kernels.get("fortran")


def test_active_prefers_compiled():
    if "cython" in kernels.BACKENDS:
        assert kernels.active.NAME == "cython"
    else:
        assert kernels.active.NAME == "python"


def _polys(seed, count=60):
    rng = np.random.default_rng(seed)
    for k in range(count):
        n = int(rng.integers(3, 120))
        make = star_polygon if k % 2 else partition_polygon
        yield SimplePolygon(make(n, rng))


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
def test_backends_agree_on_earclip_and_ears():
    py, cy = kernels.get("python"), kernels.get("cython")
    for poly in _polys(3):
        xy, eps = poly.coords, poly.tol.eps
        t1, d1 = py.earclip(xy, eps)
        t2, d2 = cy.earclip(xy, eps)
        assert np.array_equal(t1, t2) and np.array_equal(d1, d2)
        assert np.array_equal(py.ear_flags(xy, eps), cy.ear_flags(xy, eps))


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
def test_backends_agree_on_crossings():
    py, cy = kernels.get("python"), kernels.get("cython")
    rng = np.random.default_rng(4)
    for _ in range(300):
        xy = random_ring(int(rng.integers(3, 15)), rng)
        assert tuple(py.first_crossing(xy, 1e-9)) == tuple(cy.first_crossing(xy, 1e-9))


@pytest.mark.parametrize("name", BACKENDS)
def test_earclip_counts(name):
    k = kernels.get(name)
    for poly in _polys(5, 20):
        n = len(poly)
        tris, diags = k.earclip(poly.coords, poly.tol.eps)
        assert tris.shape == (n - 2, 3)
        assert diags.shape == (n - 3, 2)


def test_fallback_selected_without_extension():
    code = (
        "import sys; sys.modules['trigeom._ckernels'] = None\n"
        "from trigeom import kernels\n"
        "from trigeom.geometry import SimplePolygon\n"
        "from trigeom.triangulation import triangulate_earclip, verify_triangulation\n"
        "p = SimplePolygon([(0, 0), (2, 0), (2, 1), (1, 1), (1, 2), (0, 2)])\n"
        "assert verify_triangulation(p, triangulate_earclip(p)).passed\n"
        "print(kernels.active.NAME)\n"
    )
    res = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert res.stdout.strip() == "python"
