"""End-to-end acceptance checks; each prints one PASS/FAIL line."""

import time

import numpy as np
import pytest

from conformal_curves.bounds import (
    BumpSpec,
    GridSpec,
    bump_bound,
    bump_path,
    d_flat,
    first_variation_check,
    smooth_normal_perturbation,
    swept_area,
    theorem1_bounds,
)
from conformal_curves.curvature import TangentPlane, curvature_blowup_probe, orthonormalize, sectional_curvature
from conformal_curves.curve import make_circle, make_ellipse
from conformal_curves.geodesic import geodesic_residual, geodesic_shoot, grassfire
from conformal_curves.metric import ConformalFactor, CurvePath, path_length

LENGTH = ConformalFactor.length()
ONE = ConformalFactor.one()
TWO_PI = 2 * np.pi


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def circle_shoot():
    t0 = time.perf_counter()
    sr = geodesic_shoot(LENGTH, make_circle((0, 0), 1.0, 128), -1.5, 1.0, 200)
    return sr, time.perf_counter() - t0


@pytest.fixture(scope="module")
def annulus_grassfire():
    return grassfire(make_circle((0, 0), 1.0, 256), -1.0, 1.0, 200)


@pytest.fixture(scope="module")
def big_circle():
    return make_circle((0, 0), 10.0, 512)


@pytest.fixture(scope="module")
def bump_lengths(big_circle):
    out = {}
    for cf, name in ((LENGTH, "length"), (ONE, "one")):
        for teeth in (4, 8, 16, 32, 64):
            spec = BumpSpec(0.0, 0.5, 0.01, teeth)
            out[name, teeth] = path_length(cf, bump_path(big_circle, spec, cf))
    return out


def test_criterion_01_concentric_circle_geodesic(circle_shoot, report):
    sr, elapsed = circle_shoot
    r2 = (sr.lengths / TWO_PI) ** 2
    err = np.max(np.abs(r2 - (1 + 3 * sr.times))) / 4
    report(1, err < 1e-3 and elapsed < 5.0, f"max|r^2-(1+3t)|/4 = {err:.2e}, runtime {elapsed:.2f}s")


def test_criterion_02_a_ell_conservation(circle_shoot, report):
    sr, _ = circle_shoot
    drift = np.max(np.abs(sr.a_ell - sr.a_ell[0])) / abs(sr.a_ell[0])
    report(2, drift < 1e-3, f"relative drift of a*ell = {drift:.2e}")


def test_criterion_03_grassfire_optimality(annulus_grassfire, report):
    L = path_length(LENGTH, annulus_grassfire)
    alpha = swept_area(annulus_grassfire)
    ok = abs(L / alpha - 1) < 1e-3 and abs(alpha - 3 * np.pi) < 1e-4
    report(3, ok, f"L/alpha - 1 = {L / alpha - 1:.2e}, alpha - 3pi = {alpha - 3 * np.pi:.2e}")


def _radial_path(rng, n=128, steps=100):
    theta = TWO_PI * np.arange(n) / n
    r0 = 1.0 + 0.1 * np.cos(2 * theta)
    g = rng.uniform(-0.3, 0.3) + sum(rng.uniform(-0.1, 0.1) * np.cos(k * theta + rng.uniform(0, TWO_PI))
                                     for k in range(1, 5))
    times = np.linspace(0.0, 1.0, steps + 1)
    return CurvePath(times, np.stack([np.column_stack([(r0 + t * g) * np.cos(theta), (r0 + t * g) * np.sin(theta)])
                                      for t in times]))


def _lower_bound_suite(big_circle):
    rng = np.random.default_rng(2024)
    base = make_circle((0, 0), 1.0, 128)
    times = np.linspace(0.0, 1.0, 101)
    ellipse = make_ellipse((0, 0), 1.5, 1.0, 128)
    a0 = 0.2 * np.cos(ellipse.theta) - 0.3 + 0.1 * np.sin(3 * ellipse.theta)
    return {
        "grassfire out": grassfire(base, -1.0, 1.0, 100),
        "grassfire in": grassfire(base, 0.5, 1.0, 100),
        "translation": CurvePath(times, np.stack([base.points + [t, 0.5 * t] for t in times])),
        "bump": bump_path(big_circle, BumpSpec(0.0, 0.5, 0.01, 16), LENGTH),
        "random smooth speed (geodesic)": geodesic_shoot(LENGTH, ellipse, a0, 0.5, 100).path,
        "random smooth speed (radial 1)": _radial_path(rng),
        "random smooth speed (radial 2)": _radial_path(rng),
    }


def test_criterion_04_lower_bound_law(big_circle, report):
    A = 0.1
    worst = np.inf
    for name, p in _lower_bound_suite(big_circle).items():
        alpha = swept_area(p)
        worst = min(worst, path_length(LENGTH, p) / alpha,
                    path_length(ConformalFactor.exp(A), p) / (np.sqrt(A * np.e) * alpha))
    report(4, worst >= 1 - 1e-3, f"7 paths, min L/lower bound = {worst:.6f}")


def test_criterion_05_strict_exp_bound(annulus_grassfire, report):
    r = theorem1_bounds(ConformalFactor.exp(0.05), annulus_grassfire)
    ok = r.non_minimal and r.ell_max < 1 / 0.05 and r.non_minimal_margin >= 0.01
    report(5, ok, f"flag={r.non_minimal}, margin = {r.non_minimal_margin:.3f}")


def test_criterion_06_circle_sectional_curvature(report):
    c = make_circle((0, 0), 1.0, 512)
    ks = np.array([sectional_curvature(LENGTH, TangentPlane(c, np.full(c.n, 1 / TWO_PI),
                                                            np.cos(k * c.theta) / np.sqrt(2 * np.pi**2)))
                   for k in range(1, 6)])
    err = np.max(np.abs(ks - 1 / (4 * np.pi**2)))
    report(6, err < 1e-6 and np.std(ks) < 1e-8, f"max err {err:.2e}, std {np.std(ks):.2e}")


def test_criterion_07_exp_curvature_blowup(report):
    t0 = time.perf_counter()
    c = make_circle((0, 0), 1.0, 1024)
    cf = ConformalFactor.exp(0.5 / TWO_PI)
    m = orthonormalize(cf, c, 1.0, np.cos(c.theta)).m
    ks = curvature_blowup_probe(cf, c, m, [4, 8, 16, 32])
    elapsed = time.perf_counter() - t0
    ok = all(a < b for a, b in zip(ks, ks[1:])) and ks[3] / ks[2] > 2 and elapsed < 10
    report(7, ok, f"k = {', '.join(f'{k:.3g}' for k in ks)}; k32/k16 = {ks[3] / ks[2]:.2f}; {elapsed:.2f}s")


def test_criterion_08_bump_upper_bound(big_circle, bump_lengths, report):
    bound = bump_bound(big_circle, BumpSpec(0.0, 0.5, 0.01, 64), LENGTH)
    Ls = [bump_lengths["length", t] for t in (4, 8, 16, 32, 64)]
    monotone = all(b <= a * 1.01 for a, b in zip(Ls, Ls[1:]))
    ok = Ls[-1] <= 1.1 * bound and monotone
    report(8, ok, f"L(64)/bound = {Ls[-1] / bound:.2f}; L over teeth 4..64 = "
                  f"{', '.join(f'{v:.4g}' for v in Ls)}")


def test_criterion_09_phi_one_vanishing(bump_lengths, report):
    ratio = bump_lengths["one", 64] / bump_lengths["one", 4]
    report(9, ratio < 0.5, f"L(64)/L(4) under phi=1 = {ratio:.3f}")


def test_criterion_10_d_flat_quadrature(report):
    g = GridSpec(512)
    d1 = d_flat(make_circle((0, 0), 1.0, 256), make_circle((0, 0), 2.0, 256), g)
    d2 = d_flat(make_circle((0, 0), 1.0, 256), make_circle((3, 0), 1.0, 256), g)
    e1, e2 = abs(d1 / (3 * np.pi) - 1), abs(d2 / TWO_PI - 1)
    report(10, e1 < 0.01 and e2 < 0.01, f"annulus rel err {e1:.2e}, disjoint rel err {e2:.2e}")


def test_criterion_11_first_variation(annulus_grassfire, report):
    w = smooth_normal_perturbation(annulus_grassfire, np.random.default_rng(11))
    err = first_variation_check(LENGTH, annulus_grassfire, w)
    report(11, err < 1e-3, f"relative error {err:.2e}")


def test_criterion_12_residual_convergence(circle_shoot, report):
    r200 = geodesic_residual(LENGTH, circle_shoot[0])
    r400 = geodesic_residual(LENGTH, geodesic_shoot(LENGTH, make_circle((0, 0), 1.0, 128), -1.5, 1.0, 400))
    report(12, r400 <= r200 / 3.5, f"residual ratio 200/400 = {r200 / r400:.2f}")
