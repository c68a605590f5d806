"""Distance bounds and explicit comparison paths.

Swept area and the winding-number distance give lower bounds on the length
of any path; the saw-tooth bump construction and straight-line
interpolation give concrete paths whose lengths can be compared against
the corresponding upper bounds.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .curve import (
    ON_CURVE_RTOL,
    DiscreteCurve,
    as_field,
    derivative,
    frame,
    frame_at_arclength,
    length,
    periodic_integral,
    rotate90,
    sup_distance,
)
from .kernels import winding_and_distance
from .metric import (
    ConformalFactor,
    CurvePath,
    factor_values,
    kinematics,
    path_energy,
    path_integrand,
    path_length,
    time_derivative,
)


def swept_area(p: CurvePath) -> float:
    """Area swept by the path, counted with multiplicity: the integral of ``|a| |c_theta|``."""
    kin = kinematics(p)
    per_step = periodic_integral(np.abs(kin.normal_speed) * kin.speed, axis=-1)
    return float(np.trapezoid(per_step, p.times))


def support_measure(a, c: DiscreteCurve, scheme: str = "spectral") -> float:
    """Arclength of the part of ``c`` where ``|a|`` exceeds ``1e-8 * max|a|``."""
    a = as_field(a, c.n, "a")
    peak = np.max(np.abs(a))
    if peak == 0.0:
        return 0.0
    speed = frame(c.points, scheme)[0]
    return float(periodic_integral(np.where(np.abs(a) > 1e-8 * peak, speed, 0.0)))


# ---------------------------------------------------------------------------
# winding-number distance

@dataclass(frozen=True)
class GridSpec:
    """Quadrature grid for :func:`d_flat`.

    ``padding`` is the margin added around the joint bounding box, as a
    fraction of its larger side.
    """

    resolution: int = 512
    padding: float = 0.1

    def __post_init__(self):
        if self.resolution < 32:
            raise ValueError("grid resolution must be at least 32")
        if self.padding <= 0:
            raise ValueError("grid padding must be positive")


_SUBDIVISION = 4


def _polygon_length(pts: np.ndarray) -> float:
    return float(np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1).sum())


def _winding_off_curve(centers, curves, tols, nudge):
    """Winding numbers of every curve, nudging centers that sit on a trace."""
    centers = centers.copy()
    for _ in range(8):
        results = [winding_and_distance(centers, c) for c in curves]
        close = np.zeros(centers.shape[0], dtype=bool)
        for (_, dist), tol in zip(results, tols):
            close |= dist <= tol
        if not close.any():
            break
        centers[close] += nudge
    return [w for w, _ in results]


def d_flat(c1: DiscreteCurve, c2: DiscreteCurve, grid: GridSpec = GridSpec()) -> float:
    """Area-weighted L1 distance between the winding-number functions of two curves.

    Midpoint rule over the padded joint bounding box; cells crossed by either
    trace are split into 4x4 sub-cells.
    """
    polys = [np.ascontiguousarray(c1.points), np.ascontiguousarray(c2.points)]
    both = np.vstack(polys)
    lo, hi = both.min(axis=0), both.max(axis=0)
    pad = grid.padding * float(np.max(hi - lo))
    lo, hi = lo - pad, hi + pad
    res = grid.resolution
    dx, dy = (hi - lo) / res
    xs = lo[0] + (np.arange(res) + 0.5) * dx
    ys = lo[1] + (np.arange(res) + 0.5) * dy
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    centers = np.column_stack([gx.ravel(), gy.ravel()])

    (w1, d1), (w2, d2) = (winding_and_distance(centers, p) for p in polys)
    half_diag = 0.5 * np.hypot(dx, dy)
    near = (d1 < half_diag) | (d2 < half_diag)
    total = np.abs(w1 - w2)[~near].sum() * dx * dy

    if near.any():
        s = _SUBDIVISION
        offs = (np.arange(s) + 0.5) / s - 0.5
        ox, oy = np.meshgrid(offs * dx, offs * dy, indexing="xy")
        sub = (centers[near][:, None, :] + np.column_stack([ox.ravel(), oy.ravel()])[None]).reshape(-1, 2)
        tols = [ON_CURVE_RTOL * _polygon_length(p) for p in polys]
        nudge = 4.0 * max(tols) * np.array([1.0, 0.7])
        sw1, sw2 = _winding_off_curve(sub, polys, tols, nudge)
        total += np.abs(sw1 - sw2).sum() * dx * dy / s**2
    return float(total)


# ---------------------------------------------------------------------------
# lower / upper bounds along a path

@dataclass(frozen=True)
class BoundsReport:
    path_length_value: float
    swept_area: float
    lower_bound: float
    upper_bound: float
    ratio: float
    ell_max: float
    d_flat: float | None = None
    d_flat_lower: float | None = None
    non_minimal: bool = False
    non_minimal_margin: float | None = None

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _theta_independent(p: CurvePath, rtol: float = 1e-6) -> bool:
    a = np.abs(kinematics(p).normal_speed)
    spread = a.max(axis=1) - a.min(axis=1)
    return bool(np.all(spread <= rtol * max(float(a.max()), 1e-300)))


def theorem1_bounds(cf: ConformalFactor, p: CurvePath, grid: GridSpec | None = None) -> BoundsReport:
    """Compare the path length with the swept-area bounds.

    For ``phi = length`` the lower and upper bounds are both the swept area;
    for ``phi = exp(A l)`` they are ``sqrt(A e) * area`` and
    ``sqrt(A e) * exp(A l_max / 2) * area``. With ``grid`` given, the
    winding-number distance between the end curves adds a second lower bound.
    For an exponential factor, a constant-speed path that stays shorter than
    ``1/A`` is flagged as non-minimal (``non_minimal``) with the relative
    excess of its length over the lower bound as margin.
    """
    if cf.kind == "one":
        raise ValueError("phi = 1 admits no nontrivial bound (its distance vanishes)")
    L = path_length(cf, p)
    alpha = swept_area(p)
    ell_max = float(np.max(kinematics(p).lengths))
    if cf.kind == "length":
        scale, upper_scale = 1.0, 1.0
    else:
        scale = np.sqrt(cf.A * np.e)
        upper_scale = scale * np.exp(cf.A * ell_max / 2.0)
    lower = scale * alpha
    upper = upper_scale * alpha
    # a swept area at round-off level (relative to l_max^2) means a stationary path
    moving = alpha > 1e-12 * ell_max**2
    ratio = L / lower if moving else 0.0

    df = dfl = None
    if grid is not None:
        df = d_flat(p.curve(0), p.curve(p.steps), grid)
        dfl = scale * df

    flag, margin = False, None
    if cf.kind == "exp":
        margin = ratio - 1.0 if moving else 0.0
        flag = bool(moving and ell_max < 1.0 / cf.A and _theta_independent(p) and L > lower)
    return BoundsReport(L, alpha, lower, upper, ratio, ell_max, df, dfl, flag, margin)


# ---------------------------------------------------------------------------
# rectangular bump built from saw-tooth paths

@dataclass(frozen=True)
class BumpSpec:
    """Parameters of the three-phase saw-tooth bump path.

    ``theta_start`` and ``delta`` are arclength positions on the base curve,
    ``epsilon`` is the bump height and ``teeth`` the number of saw teeth.
    ``eta`` (tooth height) is filled in by :func:`solve_bump`.
    For an ``exp`` factor ``eta`` is solved so that the saw-tooth arc has
    length ``1/A``. Other factors use ``length_target`` the same way when it
    is given, else the given ``eta``, else ``epsilon / 4``.
    """

    theta_start: float
    delta: float
    epsilon: float
    teeth: int
    eta: float | None = None
    phase_steps: int = 24
    samples_per_tooth: int = 8
    length_target: float | None = None

    def __post_init__(self):
        if self.delta <= 0 or self.epsilon <= 0:
            raise ValueError("delta and epsilon must be positive")
        if self.teeth < 1:
            raise ValueError("need at least one tooth")
        if self.phase_steps < 1:
            raise ValueError("phase_steps must be at least 1")
        if self.samples_per_tooth < 8 or self.samples_per_tooth % 2:
            raise ValueError("samples_per_tooth must be an even number >= 8")
        if self.eta is not None and not 0 < self.eta < self.epsilon / 2:
            raise ValueError("eta must lie in (0, epsilon/2)")


class BumpError(ValueError):
    """The bump construction is infeasible for the given parameters."""


@dataclass(frozen=True, eq=False)
class _BumpGeometry:
    s: np.ndarray          # arclength positions of the samples on the base
    base: np.ndarray       # base points
    normal: np.ndarray     # base unit normals
    kappa: np.ndarray      # base curvature
    n_support: int         # samples [0, n_support) lie in the bump support
    x: np.ndarray          # support coordinate in [0, 1) of the support samples
    ell0: float


def _outside_offsets(span: float, fine: float, coarse: float, growth: float = 1.25) -> np.ndarray:
    """Offsets in ``[0, span)`` whose spacing grows from ``fine`` to ``coarse`` and back."""
    ramp = []
    step = fine
    while step < coarse and 2.0 * (sum(ramp) + step) < 0.5 * span:
        ramp.append(step)
        step *= growth
    ramp = np.array(ramp)
    middle = span - 2.0 * ramp.sum()
    k = max(1, int(np.ceil(middle / coarse)))
    steps = np.concatenate([ramp, np.full(k, middle / k), ramp[::-1]])
    return np.concatenate([[0.0], np.cumsum(steps)[:-1]])


def _bump_geometry(base: DiscreteCurve, spec: BumpSpec) -> _BumpGeometry:
    ell0 = length(base)
    if not spec.delta < ell0:
        raise BumpError("support length delta must be shorter than the curve")
    n_sup = spec.teeth * spec.samples_per_tooth
    h = spec.delta / n_sup
    # the curve is stationary off the support, so it only needs base resolution there
    coarse = max(h, ell0 / max(base.n, 64))
    s_sup = spec.theta_start + spec.delta * np.arange(n_sup) / n_sup
    s_out = spec.theta_start + spec.delta + _outside_offsets(ell0 - spec.delta, h, coarse)
    s = np.mod(np.concatenate([s_sup, s_out]), ell0)
    pts, normal, kappa = frame_at_arclength(base, s)
    return _BumpGeometry(s, pts, normal, kappa, n_sup, np.arange(n_sup) / n_sup, ell0)


def _triangle(x: np.ndarray, m: int) -> np.ndarray:
    return 1.0 - np.abs(np.mod(2.0 * m * x, 2.0) - 1.0)


def _sawtooth_length(geo: _BumpGeometry, spec: BumpSpec, eta: float) -> float:
    """Length of the support arc after growing teeth of height ``eta``."""
    n = geo.n_support
    x = np.append(geo.x, 1.0)
    f = eta * _triangle(x, spec.teeth)
    kap = np.append(geo.kappa[:n], geo.kappa[n % geo.s.size])
    ds = spec.delta / n
    fmid = 0.5 * (f[1:] + f[:-1])
    kmid = 0.5 * (kap[1:] + kap[:-1])
    slope = np.diff(f) / ds
    return float(np.sum(np.sqrt((1.0 - fmid * kmid) ** 2 + slope**2)) * ds)


def _length_target(spec, cf) -> float | None:
    if cf.kind == "exp":
        if not spec.delta < 1.0 / cf.A:
            raise BumpError("exp factor requires delta < 1/A")
        return 1.0 / cf.A
    return spec.length_target


def _support_curvature_bound(geo: _BumpGeometry) -> float:
    return float(np.max(np.abs(geo.kappa[:geo.n_support])))


def _check_chart(geo, spec) -> float:
    K = _support_curvature_bound(geo)
    if spec.epsilon * K >= 1.0:
        raise BumpError("bump height too large for the local chart (epsilon*|kappa| >= 1)")
    return K


def solve_bump(base: DiscreteCurve, spec: BumpSpec, cf: ConformalFactor) -> BumpSpec:
    """Return ``spec`` with the tooth height ``eta`` solved by bisection.

    ``eta`` makes the saw-tooth arc over the support as long as the target
    (``1/A`` for an exponential factor); see :class:`BumpSpec`.
    """
    geo = _bump_geometry(base, spec)
    _check_chart(geo, spec)
    return _solve_eta(geo, spec, cf)


def _solve_eta(geo, spec, cf) -> BumpSpec:
    target = _length_target(spec, cf)
    if target is None:
        # no length constraint: keep a given tooth height, else use epsilon/4
        return spec if spec.eta is not None else dataclasses.replace(spec, eta=spec.epsilon / 4.0)
    lo, hi = 1e-12, spec.epsilon / 2.0
    if _sawtooth_length(geo, spec, lo) > target:
        raise BumpError("saw-tooth target length is shorter than the support")
    if _sawtooth_length(geo, spec, hi) < target:
        raise BumpError(f"{spec.teeth} teeth cannot reach saw-tooth length {target:.6g}; use more teeth")
    while hi - lo > 1e-10 * spec.epsilon:
        mid = 0.5 * (lo + hi)
        if _sawtooth_length(geo, spec, mid) < target:
            lo = mid
        else:
            hi = mid
    eta = 0.5 * (lo + hi)
    if not eta < spec.epsilon / 2.0 * (1.0 - 1e-9):
        raise BumpError("tooth height reaches epsilon/2; no room for the translation phase")
    return dataclasses.replace(spec, eta=eta)


def bump_profile(x: np.ndarray, t: float, eps: float, eta: float, m: int) -> np.ndarray:
    """Normal offset ``f(t, x)`` of the three-phase construction on the support ``x in [0, 1]``."""
    tri = _triangle(x, m)
    edge = 1.0 / (2.0 * m)
    left, right = x <= edge, x >= 1.0 - edge
    if t <= eta:
        return t * tri
    if t <= eps - eta:
        g = (eps * (t - eta) + eta * (eps - eta - t)) / (eps - 2.0 * eta)
        f = (eps - eta) / (eps - 2.0 * eta) * (t - eta) + eta * tri
        f = np.where(left, g * 2.0 * m * x, f)
        return np.where(right, g * 2.0 * m * (1.0 - x), f)
    raised = (eps - eta) + eta * tri
    f = (eps * (t - (eps - eta)) + (eps - t) * raised) / eta
    f = np.where(left, 2.0 * m * eps * x, f)
    return np.where(right, 2.0 * m * eps * (1.0 - x), f)


def _phase_times(spec: BumpSpec) -> tuple[np.ndarray, np.ndarray]:
    """Uniform path parameter on [0, 1] and the construction time it maps to.

    Each phase gets a third of the parameter interval; length and swept area
    do not depend on the time parametrization.
    """
    p = spec.phase_steps
    tau = np.linspace(0.0, 1.0, 3 * p + 1)
    eps, eta = spec.epsilon, spec.eta
    u = 3.0 * tau
    t = np.where(u <= 1.0, eta * u,
                 np.where(u <= 2.0, eta + (eps - 2.0 * eta) * (u - 1.0),
                          eps - eta + eta * (u - 2.0)))
    return tau, t


def bump_path(base: DiscreteCurve, spec: BumpSpec, cf: ConformalFactor) -> CurvePath:
    """Saw-tooth path from ``base`` to the rectangular bump of height ``epsilon``.

    Teeth grow for time ``eta``, the toothed arc is pushed out along the base
    normals with its ends pinned, and the teeth are retracted. The returned
    path is sampled so that every tooth spans ``spec.samples_per_tooth``
    samples, with tooth vertices on samples; use ``scheme="fd"`` geometry on
    it (set on the returned path).
    """
    geo = _bump_geometry(base, spec)
    _check_chart(geo, spec)
    spec = _solve_eta(geo, spec, cf)
    tau, t = _phase_times(spec)
    n_sup = geo.n_support
    frames = np.repeat(geo.base[None], tau.size, axis=0)
    for i, ti in enumerate(t):
        f = bump_profile(geo.x, float(ti), spec.epsilon, spec.eta, spec.teeth)
        frames[i, :n_sup] += f[:, None] * geo.normal[:n_sup]
    return CurvePath(tau, frames, scheme="fd")


def rectangular_bump_trace(base: DiscreteCurve, spec: BumpSpec, density: int = 4000) -> np.ndarray:
    """Closed polygon tracing the rectangular bump: rising wall, raised support, falling wall, rest."""
    ell0 = length(base)
    heights = np.linspace(0.0, spec.epsilon, max(8, density // 10))
    s0, s1 = spec.theta_start, spec.theta_start + spec.delta
    p0, n0, _ = frame_at_arclength(base, np.array([np.mod(s0, ell0)]))
    p1, n1, _ = frame_at_arclength(base, np.array([np.mod(s1, ell0)]))
    s_top = np.linspace(s0, s1, density)[1:-1]
    top_pts, top_n, _ = frame_at_arclength(base, np.mod(s_top, ell0))
    rest_s = s1 + (ell0 - spec.delta) * np.arange(1, density) / density
    rest = frame_at_arclength(base, np.mod(rest_s, ell0))[0]
    return np.vstack([p0 + heights[:, None] * n0,
                      top_pts + spec.epsilon * top_n,
                      p1 + heights[::-1, None] * n1,
                      rest])


def hausdorff_to_trace(points: np.ndarray, trace: np.ndarray) -> float:
    """Hausdorff distance between a sampled closed curve and a dense closed polygon."""
    pts = np.ascontiguousarray(points, dtype=float)
    tr = np.ascontiguousarray(trace, dtype=float)
    forward = winding_and_distance(pts, tr)[1].max()
    backward = winding_and_distance(tr, pts)[1].max()
    return float(max(forward, backward))


def endpoint_tolerance(base: DiscreteCurve, spec: BumpSpec) -> float:
    """Largest expected gap between the final bump curve and the rectangular trace.

    The end teeth leave ramps of width ``delta/(2 teeth)`` in place of the
    vertical walls, whose offset from the corner is at most
    ``epsilon*w/hypot(epsilon, w)`` with ``w`` the ramp width; off the support the gap is
    set by chord sagitta of the coarser sampling.
    """
    w = spec.delta / (2.0 * spec.teeth)
    ramp = spec.epsilon * w / np.hypot(spec.epsilon, w)
    geo = _bump_geometry(base, spec)
    steps = np.diff(np.append(geo.s, geo.s[0] + geo.ell0))
    steps = np.mod(steps, geo.ell0)
    sag = float(np.max(steps) ** 2 * np.max(np.abs(geo.kappa)) / 8.0)
    return max(ramp, sag) * (1.0 + 1e-3)


def bump_area(base: DiscreteCurve, spec: BumpSpec) -> float:
    """Area of the rectangular bump, ``integral_0^eps integral_support (1 - t kappa) ds dt``."""
    geo = _bump_geometry(base, spec)
    kap_int = float(np.sum(geo.kappa[:geo.n_support]) * spec.delta / geo.n_support)
    return spec.epsilon * spec.delta - 0.5 * spec.epsilon**2 * kap_int


def bump_bound(base: DiscreteCurve, spec: BumpSpec, cf: ConformalFactor) -> float:
    """Upper bound on the distance from ``base`` to its rectangular bump."""
    geo = _bump_geometry(base, spec)
    K = _check_chart(geo, spec)
    r = (1.0 + spec.epsilon * K) / (1.0 - spec.epsilon * K)
    area = bump_area(base, spec)
    if cf.kind == "length":
        return r**2 * area
    if cf.kind == "exp":
        if not spec.delta < 1.0 / cf.A:
            raise BumpError("exp factor requires delta < 1/A")
        return (r**1.5 * np.exp(cf.A * (geo.ell0 + 2.0 * spec.epsilon - spec.delta) / 2.0)
                * np.sqrt(cf.A * np.exp(r)) * area)
    raise ValueError("no bump bound for phi = 1")


@dataclass(frozen=True)
class TeethRow:
    teeth: int
    eta: float
    L: float
    bound: float | None
    ratio: float | None


def teeth_sweep(base: DiscreteCurve, spec: BumpSpec, cf: ConformalFactor, teeth) -> list[TeethRow]:
    """Path length of the bump construction for several tooth counts."""
    rows = []
    for m in teeth:
        s = dataclasses.replace(spec, teeth=int(m), eta=None)
        solved = solve_bump(base, s, cf)
        L = path_length(cf, bump_path(base, s, cf))
        bound = bump_bound(base, s, cf) if cf.kind != "one" else None
        rows.append(TeethRow(int(m), solved.eta, L, bound, L / bound if bound else None))
    return rows


# ---------------------------------------------------------------------------
# straight-line interpolation

@dataclass(frozen=True)
class LinearPathReport:
    path_length_value: float
    d_inf: float
    derived_bound: float
    stated_bound: float
    ell_max: float

    @property
    def holds(self) -> bool:
        return self.path_length_value <= self.derived_bound * (1.0 + 1e-9) + 1e-14

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["holds"] = self.holds
        return out


def linear_path(c1: DiscreteCurve, c2: DiscreteCurve, steps: int) -> CurvePath:
    """Straight-line interpolation ``(1 - t) c1 + t c2`` on ``steps`` uniform steps."""
    if c1.n != c2.n:
        raise ValueError("curves must have the same number of samples")
    t = np.linspace(0.0, 1.0, steps + 1)
    pts = (1.0 - t)[:, None, None] * c1.points + t[:, None, None] * c2.points
    try:
        return CurvePath(t, pts)
    except ValueError as exc:
        raise ValueError(f"linear interpolation leaves the immersions: {exc}") from exc


def linear_path_check(cf: ConformalFactor, c1: DiscreteCurve, c2: DiscreteCurve,
                      steps: int = 200) -> LinearPathReport:
    """Length of the straight-line path against ``d_inf * sqrt(max phi * max length)``.

    The alternative constant ``d_inf * max(phi(l1), phi(l2))`` is reported as
    ``stated_bound`` for comparison only.
    """
    p = linear_path(c1, c2, steps)
    L = path_length(cf, p)
    d_inf = sup_distance(c1, c2)
    lengths = kinematics(p).lengths
    phis = factor_values(cf, lengths).phi
    derived = d_inf * float(np.sqrt(np.max(phis) * np.max(lengths)))
    stated = d_inf * max(float(phis[0]), float(phis[-1]))
    return LinearPathReport(L, d_inf, derived, stated, float(np.max(lengths)))


# ---------------------------------------------------------------------------
# first variation of the energy

def energy_gradient_field(cf: ConformalFactor, p: CurvePath) -> np.ndarray:
    """The field ``F`` with ``dE/ds = -integral integral (c_s . F) dtheta dt``."""
    kin = kinematics(p)
    phi, dphi, _ = factor_values(cf, kin.lengths)
    vel2 = (kin.velocity**2).sum(axis=-1)
    c_theta = derivative(p.points, 1, axis=-2, scheme=p.scheme)
    momentum = (phi[:, None] * kin.speed)[..., None] * kin.velocity
    term1 = time_derivative(momentum, p.dt)
    j = periodic_integral(vel2 * kin.speed, axis=-1)
    term2 = (0.5 * dphi * j)[:, None, None] * kin.curvature[..., None] * rotate90(c_theta)
    flux = (vel2 / kin.speed)[..., None] * c_theta
    term3 = 0.5 * phi[:, None, None] * derivative(flux, 1, axis=-2, scheme=p.scheme)
    return term1 + term2 + term3


def first_variation(cf: ConformalFactor, p: CurvePath, perturbation,
                    step_sizes=(1e-3, 1e-4)) -> tuple[float, float]:
    """``(finite-difference dE/ds, -integral(c_s . F))`` for the given variation field.

    The finite difference is central at both step sizes, combined by
    Richardson extrapolation.
    """
    w = np.asarray(perturbation, dtype=float)
    if w.shape != p.points.shape:
        raise ValueError("perturbation must have the same shape as the path points")
    scale = max(float(np.max(np.abs(w))), 1e-300)
    if np.max(np.abs(w[0])) > 1e-12 * scale or np.max(np.abs(w[-1])) > 1e-12 * scale:
        raise ValueError("perturbation must vanish at both end times")

    def energy(s):
        return path_energy(cf, CurvePath(p.times, p.points + s * w, p.scheme))

    if not np.any(w):
        return 0.0, 0.0
    h1, h2 = step_sizes
    d1 = (energy(h1) - energy(-h1)) / (2.0 * h1)
    d2 = (energy(h2) - energy(-h2)) / (2.0 * h2)
    q = (h1 / h2) ** 2
    fd = (q * d2 - d1) / (q - 1.0)

    F = energy_gradient_field(cf, p)
    inner = periodic_integral((w * F).sum(axis=-1), axis=-1)
    adjoint = -float(np.trapezoid(inner, p.times))
    return float(fd), adjoint


def first_variation_check(cf: ConformalFactor, p: CurvePath, perturbation,
                          step_sizes=(1e-3, 1e-4)) -> float:
    """Relative disagreement between the two evaluations of the energy's first variation."""
    fd, adjoint = first_variation(cf, p, perturbation, step_sizes)
    scale = max(abs(fd), abs(adjoint))
    return 0.0 if scale == 0.0 else abs(fd - adjoint) / scale


def smooth_normal_perturbation(p: CurvePath, rng: np.random.Generator, modes: int = 4) -> np.ndarray:
    """Random smooth normal variation field vanishing at both end times."""
    n = p.points.shape[1]
    theta = 2.0 * np.pi * np.arange(n) / n
    g = np.zeros(n)
    for k in range(modes + 1):
        a, b = rng.normal(size=2) / (1.0 + k) ** 2
        g += a * np.cos(k * theta) + b * np.sin(k * theta)
    tau = (p.times - p.times[0]) / p.t_end
    envelope = np.sin(np.pi * tau)
    envelope[0] = envelope[-1] = 0.0
    _, _, normal, _ = frame(p.points, p.scheme)
    return envelope[:, None, None] * g[None, :, None] * normal
