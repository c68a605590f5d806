import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conformal_curves import kernels
from conformal_curves.curve import make_circle, make_figure_eight

compiled = pytest.importorskip("conformal_curves._kernels")


def angle_sum_winding(poly, p):
    rel = poly - p
    nxt = np.roll(rel, -1, axis=0)
    cross = rel[:, 0] * nxt[:, 1] - rel[:, 1] * nxt[:, 0]
    return int(round(np.arctan2(cross, (rel * nxt).sum(axis=1)).sum() / (2 * np.pi)))


def test_backend_name():
    assert kernels.BACKEND in {"cython", "python"}


def test_square_example():
    square = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    pts = np.array([[0.5, 0.5], [2.0, 0.5], [0.5, -0.25]])
    for fn in (compiled.winding_and_distance, kernels.python_winding_and_distance):
        w, d = fn(pts, square)
        assert list(w) == [1, 0, 0]
        assert np.allclose(d, [0.5, 1.0, 0.25], atol=1e-15)
        w, _ = fn(pts, square[::-1].copy())
        assert list(w) == [-1, 0, 0]


def test_read_only_inputs():
    c = make_circle((0, 0), 1.0, 32)
    pts = np.zeros((1, 2))
    pts.setflags(write=False)
    w, _ = compiled.winding_and_distance(pts, c.points)
    assert w[0] == 1


def test_figure_eight_agrees_with_angle_sum():
    poly = make_figure_eight(128).points
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1.5, 1.5, size=(400, 2))
    w, d = compiled.winding_and_distance(pts, poly)
    keep = d > 1e-9
    assert np.array_equal(w[keep], [angle_sum_winding(poly, p) for p in pts[keep]])


polygons = st.integers(0, 2**32 - 1)


@settings(max_examples=30, deadline=None)
@given(polygons)
def test_backends_agree(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 40))
    poly = rng.normal(size=(n, 2))
    pts = rng.normal(scale=1.5, size=(200, 2))
    wc, dc = compiled.winding_and_distance(pts, poly)
    wp, dp = kernels.python_winding_and_distance(pts, poly)
    assert np.array_equal(wc, wp)
    assert np.allclose(dc, dp, rtol=1e-12, atol=1e-14)
    keep = dc > 1e-9
    assert np.array_equal(wc[keep], [angle_sum_winding(poly, p) for p in pts[keep]])


def test_env_var_selects_fallback():
    env = dict(os.environ, CONFORMAL_CURVES_PURE_PYTHON="1")
    r = subprocess.run([sys.executable, "-c", "from conformal_curves import BACKEND; print(BACKEND)"],
                       capture_output=True, text=True, env=env)
    assert r.stdout.strip() == "python"
