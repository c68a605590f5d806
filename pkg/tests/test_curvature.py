import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conformal_curves.curvature import (
    NormalizationError,
    TangentPlane,
    blowup_region,
    boundedness,
    christoffel,
    constant_mode_curvature,
    curvature_blowup_probe,
    curvature_terms,
    orthonormalize,
    sectional_curvature,
)
from conformal_curves.curve import make_circle, make_ellipse, make_rounded_square
from conformal_curves.metric import ConformalFactor, inner

LENGTH = ConformalFactor.length()
ONE = ConformalFactor.one()
TWO_PI = 2 * np.pi


def unit_circle(n=512):
    return make_circle((0, 0), 1.0, n)


def test_orthonormalize_circle_example():
    c = unit_circle(256)
    plane = orthonormalize(LENGTH, c, 1.0, np.cos(c.theta))
    assert np.allclose(plane.m, 1 / TWO_PI, atol=1e-14)
    assert np.allclose(plane.h, np.cos(c.theta) / np.sqrt(2 * np.pi**2), atol=1e-14)


def test_orthonormalize_idempotent():
    c = make_ellipse((0, 0), 1.5, 1.0, 128)
    cf = ConformalFactor.exp(0.2)
    p1 = orthonormalize(cf, c, 1.0 + np.sin(c.theta), np.cos(2 * c.theta))
    p2 = orthonormalize(cf, c, p1.m, p1.h)
    assert np.max(np.abs(p2.m - p1.m)) < 1e-12
    assert np.max(np.abs(p2.h - p1.h)) < 1e-12
    assert abs(inner(cf, c, p1.m, p1.m) - 1) < 1e-12
    assert abs(inner(cf, c, p1.m, p1.h)) < 1e-12


def test_orthonormalize_dependent():
    c = unit_circle(64)
    u = np.cos(c.theta) + 0.5
    with pytest.raises(ValueError):
        orthonormalize(LENGTH, c, u, 3.0 * u)
    with pytest.raises(ValueError):
        orthonormalize(LENGTH, c, 0.0, u)


def test_christoffel_examples():
    c = unit_circle(256)
    g = christoffel(LENGTH, c, 1 / TWO_PI, 1 / TWO_PI)
    assert np.allclose(g, 1 / (4 * np.pi**2), atol=1e-14)
    g = christoffel(ONE, make_circle((0, 0), 2.0, 128), 1.0, 1.0)
    assert np.allclose(g, 0.25, atol=1e-14)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_christoffel_symmetric(seed):
    rng = np.random.default_rng(seed)
    c = make_ellipse((0, 0), 1.5, 1.0, 64)
    h, k = rng.normal(size=(2, 64))
    cf = ConformalFactor.exp(0.3)
    assert np.array_equal(christoffel(cf, c, h, k), christoffel(cf, c, k, h))


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_circle_curvature_each_frequency(k):
    c = unit_circle()
    plane = TangentPlane(c, np.full(c.n, 1 / TWO_PI), np.cos(k * c.theta) / np.sqrt(2 * np.pi**2))
    assert abs(sectional_curvature(LENGTH, plane) - 1 / (4 * np.pi**2)) < 1e-8


def test_circle_curvature_term_oracle():
    # on the unit circle with m = 1/l, h = cos(k theta)/sqrt(2 pi^2):
    # wedge = k^2/(8 pi^2) = -gradient, weighted = 1/(2 l^2),
    # projection = 3/(4 l^2), total = -1/(4 l^2)
    c = unit_circle()
    ell = TWO_PI
    for k in (1, 3, 5):
        plane = TangentPlane(c, np.full(c.n, 1 / ell), np.cos(k * c.theta) / np.sqrt(2 * np.pi**2))
        t = curvature_terms(LENGTH, plane)
        assert abs(t["wedge"] - k**2 / (8 * np.pi**2)) < 1e-10
        assert abs(t["gradient"] + k**2 / (8 * np.pi**2)) < 1e-10
        assert abs(t["weighted"] - 1 / (2 * ell**2)) < 1e-12
        assert abs(t["projection"] - 3 / (4 * ell**2)) < 1e-12
        assert abs(t["total"] + 1 / (4 * ell**2)) < 1e-12


def test_plane_must_be_normalized():
    c = unit_circle(64)
    with pytest.raises(NormalizationError):
        sectional_curvature(LENGTH, TangentPlane(c, 1.0, np.cos(c.theta)))


def _flat_side_bump(c, ell, lo, width):
    s = ell * np.arange(c.n) / c.n
    u = (s - lo) / width
    return np.where((u > 0) & (u < 1), np.sin(np.pi * np.clip(u, 0, 1)) ** 4, 0.0)


def test_rounded_square_negative_curvature():
    flat, corner, n = 1.0, 0.25, 2048
    c = make_rounded_square(n, flat, corner)
    ell = 4 * (flat + corner)
    w = 0.8
    # normalisation l * C^2 * w * 35/128 = 1 for a sin^4 window of width w
    C = np.sqrt(128 / (35 * ell * w))
    m = C * _flat_side_bump(c, ell, 0.1, w)
    h = C * _flat_side_bump(c, ell, flat + corner + 0.1, w)
    plane = TangentPlane(c, m, h)
    dm2 = 5 * C**2 * np.pi**2 / (8 * w)
    kappa2 = 4 * 35 * np.pi**2 / (72 * corner)
    expected = -(1 / (2 * ell)) * 2 * dm2 - kappa2 / (4 * ell**3)
    got = sectional_curvature(LENGTH, plane)
    assert got < 0
    assert abs(got / expected - 1) < 1e-6


def test_rounded_square_positive_curvature():
    flat, corner, n = 1.0, 0.25, 2048
    c = make_rounded_square(n, flat, corner)
    ell = 4 * (flat + corner)
    # zero-mean wave on a flat side, so it is orthogonal to the constant m
    s = ell * np.arange(n) / n
    h = _flat_side_bump(c, ell, 0.1, 0.8) * np.sin(2 * np.pi * (s - 0.1) / 0.8)
    h = h / np.sqrt(inner(LENGTH, c, h, h))
    plane = TangentPlane(c, np.full(n, 1 / ell), h)
    expected = 3 * np.pi**2 / ell**4
    assert abs(sectional_curvature(LENGTH, plane) / expected - 1) < 1e-6
    assert abs(constant_mode_curvature(plane) / expected - 1) < 1e-6


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_plane_symmetry(seed):
    rng = np.random.default_rng(seed)
    c = make_ellipse((0, 0), 1.5, 1.0, 128)
    theta = c.theta
    coef = rng.normal(size=(2, 4))
    m = sum(coef[0, j] * np.cos(j * theta + j) for j in range(4)) + 0.1
    h = sum(coef[1, j] * np.sin((j + 1) * theta) for j in range(4))
    for cf in (LENGTH, ConformalFactor.exp(0.4)):
        plane = orthonormalize(cf, c, m, h)
        assert abs(sectional_curvature(cf, plane) - sectional_curvature(cf, plane.swapped())) < 1e-10


def test_frequency_invariance_bounded_case():
    c = unit_circle()
    ks = [sectional_curvature(LENGTH, orthonormalize(LENGTH, c, 1.0, np.cos(k * c.theta))) for k in range(1, 6)]
    assert np.std(ks) < 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_reduced_formula_matches(seed):
    rng = np.random.default_rng(seed)
    c = make_ellipse((0, 0), 1.5, 1.0, 128)
    theta = c.theta
    h = sum(rng.normal() * np.cos(j * theta + rng.uniform(0, 6)) for j in range(1, 6))
    plane = orthonormalize(LENGTH, c, 1.0, h)
    full = sectional_curvature(LENGTH, plane)
    reduced = constant_mode_curvature(plane)
    assert reduced >= 0
    assert abs(full - reduced) < 1e-10


def test_boundedness_examples():
    c = unit_circle(256)
    b = boundedness(LENGTH, c, np.full(c.n, 1 / TWO_PI))
    assert b.bounded and abs(b.margin) < 1e-12
    m = orthonormalize(LENGTH, c, np.cos(c.theta), 1.0).m
    assert not boundedness(LENGTH, c, m).bounded
    cf = ConformalFactor.exp(0.5 / TWO_PI)
    m = orthonormalize(cf, c, 1.0, np.cos(c.theta)).m
    assert not boundedness(cf, c, m).bounded
    with pytest.raises(NormalizationError):
        boundedness(LENGTH, c, np.ones(c.n))


def test_blowup_region():
    c = unit_circle(256)
    assert not blowup_region(LENGTH, c, np.full(c.n, 1 / TWO_PI)).any()
    cf = ConformalFactor.exp(0.5 / TWO_PI)
    m = orthonormalize(cf, c, 1.0, np.cos(c.theta)).m
    assert blowup_region(cf, c, m).all()


def test_probe_exp_increasing():
    c = unit_circle(512)
    cf = ConformalFactor.exp(0.5 / TWO_PI)
    m = orthonormalize(cf, c, 1.0, np.cos(c.theta)).m
    ks = curvature_blowup_probe(cf, c, m, [4, 8, 16])
    assert ks[0] < ks[1] < ks[2]


def test_probe_exp_blowup_n512():
    c = unit_circle(512)
    cf = ConformalFactor.exp(0.5 / TWO_PI)
    m = orthonormalize(cf, c, 1.0, np.cos(c.theta)).m
    ks = curvature_blowup_probe(cf, c, m, [4, 8, 16, 32])
    assert all(a < b for a, b in zip(ks, ks[1:]))
    assert ks[3] > 2 * ks[2]


def test_probe_windowed_region():
    # a non-constant m under phi = length exceeds the bound only near its peak
    c = unit_circle(512)
    m = orthonormalize(LENGTH, c, 1.0 + 0.5 * np.cos(c.theta), np.sin(c.theta)).m
    mask = blowup_region(LENGTH, c, m)
    assert 0 < mask.sum() < c.n
    ks = curvature_blowup_probe(LENGTH, c, m, [8, 16, 32, 64])
    assert all(a < b for a, b in zip(ks, ks[1:]))


def test_probe_bounded_case_constant():
    c = unit_circle(512)
    ks = curvature_blowup_probe(LENGTH, c, np.full(c.n, 1 / TWO_PI), [4, 8, 16, 32])
    assert np.max(np.abs(np.array(ks) - 1 / (4 * np.pi**2))) < 1e-8


def test_probe_resolution_guard():
    c = unit_circle(64)
    with pytest.raises(ValueError):
        curvature_blowup_probe(LENGTH, c, np.full(c.n, 1 / TWO_PI), [17])
