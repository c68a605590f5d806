"""Closed immersed planar curves sampled on a uniform parameter grid.

A curve is stored as ``N`` points ``c(theta_j)`` with ``theta_j = 2*pi*j/N``;
the successor of the last point is the first. Everything else (tangent,
normal, curvature, length) is derived on demand.

Sign conventions follow the complex-plane picture: the unit normal is
``n = i * c_theta / |c_theta|``, i.e. the tangent rotated by +90 degrees.
For a counterclockwise circle ``n`` points inward and the curvature is
positive.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import winding_and_distance

TWO_PI = 2.0 * np.pi
MIN_SAMPLES = 8
IMMERSION_RTOL = 1e-10
ON_CURVE_RTOL = 1e-9

SCHEMES = ("spectral", "fd")


class ImmersionError(ValueError):
    """Raised when a sampled curve has a (numerically) vanishing tangent."""


class PointOnCurveError(ValueError):
    """Raised when a winding number is requested for a point on the trace."""


# ---------------------------------------------------------------------------
# periodic differentiation / integration helpers

def _wavenumbers(n: int) -> np.ndarray:
    return np.fft.fftfreq(n, d=1.0 / n)


def spectral_derivative(values: np.ndarray, order: int = 1, axis: int = 0) -> np.ndarray:
    """Derivative in theta of periodic samples via the FFT.

    For even ``n`` the Nyquist mode is dropped on odd orders so that the
    derivative of a real signal stays real.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    k = _wavenumbers(n)
    mult = (1j * k) ** order
    if order % 2 == 1 and n % 2 == 0:
        mult[n // 2] = 0.0
    shape = [1] * values.ndim
    shape[axis] = n
    coeffs = np.fft.fft(values, axis=axis) * mult.reshape(shape)
    return np.fft.ifft(coeffs, axis=axis).real


def fd_derivative(values: np.ndarray, order: int = 1, axis: int = 0) -> np.ndarray:
    """Second-order periodic central differences in theta."""
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    h = TWO_PI / n
    fwd = np.roll(values, -1, axis=axis)
    bwd = np.roll(values, 1, axis=axis)
    if order == 1:
        return (fwd - bwd) / (2.0 * h)
    if order == 2:
        return (fwd - 2.0 * values + bwd) / h**2
    raise ValueError("only first and second derivatives are supported")


def derivative(values: np.ndarray, order: int = 1, axis: int = 0,
               scheme: str = "spectral") -> np.ndarray:
    if scheme == "spectral":
        return spectral_derivative(values, order, axis)
    if scheme == "fd":
        return fd_derivative(values, order, axis)
    raise ValueError(f"unknown differentiation scheme {scheme!r}")


def spectral_filter(values: np.ndarray, axis: int = 0, strength: float = 36.0,
                    order: int = 36) -> np.ndarray:
    """Damp the top Fourier modes with ``exp(-strength * (|k| / kmax)^order)``.

    Smooth data are left unchanged to round-off; aliasing noise at the
    highest wavenumbers is suppressed.
    """
    values = np.asarray(values, dtype=float)
    n = values.shape[axis]
    k = np.abs(_wavenumbers(n)) / (n // 2)
    sigma = np.exp(-strength * k**order)
    shape = [1] * values.ndim
    shape[axis] = n
    coeffs = np.fft.fft(values, axis=axis) * sigma.reshape(shape)
    return np.fft.ifft(coeffs, axis=axis).real


def periodic_integral(values: np.ndarray, axis: int = -1) -> np.ndarray:
    """Trapezoid rule for the integral over [0, 2*pi) of periodic samples."""
    values = np.asarray(values, dtype=float)
    return values.sum(axis=axis) * (TWO_PI / values.shape[axis])


# ---------------------------------------------------------------------------
# data types

@dataclass(frozen=True, eq=False)
class DiscreteCurve:
    """Closed immersed planar curve given by ``N >= 8`` samples.

    Parameters
    ----------
    points : array_like, shape (N, 2)
        Samples ``c(theta_j)``. The curve is implicitly closed.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError("points must have shape (N, 2)")
        if pts.shape[0] < MIN_SAMPLES:
            raise ValueError(f"a curve needs at least {MIN_SAMPLES} samples, got {pts.shape[0]}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("curve coordinates must be finite")
        steps = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1)
        perimeter = steps.sum()
        # forward-difference speed against the scale-relative floor
        if perimeter <= 0.0 or np.min(steps) <= IMMERSION_RTOL * perimeter / pts.shape[0]:
            raise ImmersionError("curve has repeated adjacent samples (vanishing tangent)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.n) / self.n

    def reversed(self) -> "DiscreteCurve":
        """Same trace traversed in the opposite direction, keeping sample 0."""
        return DiscreteCurve(np.roll(self.points[::-1], 1, axis=0))

    def translated(self, offset) -> "DiscreteCurve":
        return DiscreteCurve(self.points + np.asarray(offset, dtype=float))

    def to_list(self) -> list:
        return self.points.tolist()


@dataclass(frozen=True, eq=False)
class CurveGeometry:
    tangent: np.ndarray
    normal: np.ndarray
    curvature: np.ndarray
    speed: np.ndarray
    length: float
    rotation_index: int
    total_curvature: float


def as_field(values, n: int, name: str = "field") -> np.ndarray:
    """Validate a scalar field aligned with an ``n``-sample curve."""
    if np.isscalar(values):
        return np.full(n, float(values))
    arr = np.asarray(values, dtype=float)
    if arr.shape != (n,):
        raise ValueError(f"{name} has {arr.size} samples, curve has {n}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def rotate90(v: np.ndarray) -> np.ndarray:
    """Multiply planar vectors (last axis of size 2) by ``i``."""
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def frame(points: np.ndarray, scheme: str = "spectral"):
    """Speed, unit tangent, unit normal and curvature of sampled curves.

    ``points`` may carry leading batch axes; the sample axis is ``-2``.
    """
    d1 = derivative(points, 1, axis=-2, scheme=scheme)
    d2 = derivative(points, 2, axis=-2, scheme=scheme)
    speed = np.hypot(d1[..., 0], d1[..., 1])
    tangent = d1 / speed[..., None]
    normal = rotate90(tangent)
    cross = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
    curvature = cross / speed**3
    return speed, tangent, normal, curvature


def check_speed(speed: np.ndarray) -> None:
    length = periodic_integral(speed, axis=-1)
    floor = IMMERSION_RTOL * np.asarray(length)[..., None] / TWO_PI
    if not np.all(np.isfinite(speed)) or np.any(speed <= floor):
        raise ImmersionError("vanishing discrete tangent: curve is not immersed")


def _turning_number(tangent: np.ndarray) -> int:
    angles = np.arctan2(tangent[:, 1], tangent[:, 0])
    jumps = np.diff(np.append(angles, angles[0]))
    jumps = (jumps + np.pi) % TWO_PI - np.pi
    return int(round(jumps.sum() / TWO_PI))


def geometry(c: DiscreteCurve, scheme: str = "spectral") -> CurveGeometry:
    """Differential geometry of ``c``.

    ``scheme`` selects periodic spectral differentiation (default, for smooth
    curves) or second-order central differences (``"fd"``, for piecewise
    smooth curves such as polygons).
    """
    speed, tangent, normal, kappa = frame(c.points, scheme)
    check_speed(speed)
    length = float(periodic_integral(speed))
    total = float(periodic_integral(kappa * speed))
    return CurveGeometry(
        tangent=tangent,
        normal=normal,
        curvature=kappa,
        speed=speed,
        length=length,
        rotation_index=_turning_number(tangent),
        total_curvature=total,
    )


def length(c: DiscreteCurve, scheme: str = "spectral") -> float:
    speed, _, _, _ = frame(c.points, scheme)
    return float(periodic_integral(speed))


# ---------------------------------------------------------------------------
# constructors

def make_circle(center, radius: float, n: int, clockwise: bool = False) -> DiscreteCurve:
    """Circle sampled at ``theta_j = 2*pi*j/n``; counterclockwise by default."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if n < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    theta = TWO_PI * np.arange(n) / n
    if clockwise:
        theta = -theta
    cx, cy = center
    return DiscreteCurve(np.column_stack([cx + radius * np.cos(theta),
                                          cy + radius * np.sin(theta)]))


def make_ellipse(center, a: float, b: float, n: int) -> DiscreteCurve:
    if a <= 0 or b <= 0:
        raise ValueError("semi-axes must be positive")
    theta = TWO_PI * np.arange(n) / n
    cx, cy = center
    return DiscreteCurve(np.column_stack([cx + a * np.cos(theta), cy + b * np.sin(theta)]))


def make_figure_eight(n: int, scale: float = 1.0) -> DiscreteCurve:
    """Lemniscate of Gerono: an immersion with rotation index 0."""
    theta = TWO_PI * np.arange(n) / n
    return DiscreteCurve(scale * np.column_stack([np.cos(theta), np.sin(theta) * np.cos(theta)]))


def make_curve(fn, n: int) -> DiscreteCurve:
    """Sample ``fn(theta) -> (x, y)`` on the uniform grid."""
    theta = TWO_PI * np.arange(n) / n
    x, y = fn(theta)
    return DiscreteCurve(np.column_stack([x, y]))


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(40)


def _corner_angle(u, corner):
    # integral of the sin^4 curvature profile, normalised to turn pi/2
    scale = (np.pi / 2) / (3.0 * corner / 8.0)
    w = corner
    return scale * (3 * u / 8 - w * np.sin(2 * np.pi * u / w) / (4 * np.pi)
                    + w * np.sin(4 * np.pi * u / w) / (32 * np.pi))


def rounded_square_curvature(s: np.ndarray, flat: float, corner: float) -> np.ndarray:
    """Exact curvature of :func:`make_rounded_square` at arclength ``s``."""
    period = flat + corner
    u = np.mod(s, period) - flat
    peak = (np.pi / 2) / (3.0 * corner / 8.0)
    return np.where(u > 0, peak * np.sin(np.pi * u / corner) ** 4, 0.0)


def make_rounded_square(n: int, flat: float = 1.0, corner: float = 0.25) -> DiscreteCurve:
    """Square with smoothly rounded corners, sampled uniformly in arclength.

    Each side is a straight segment of length ``flat`` followed by a corner
    arc of length ``corner`` whose curvature is a ``sin^4`` profile turning
    by pi/2, so curvature vanishes identically on the straight parts and the
    curve is C^5. Sample 0 is the start of the bottom side; the curve runs
    counterclockwise with total length ``4 * (flat + corner)``.
    """
    if flat <= 0 or corner <= 0:
        raise ValueError("flat and corner lengths must be positive")
    period = flat + corner
    s = 4.0 * period * np.arange(n) / n
    side = np.minimum((s // period).astype(int), 3)
    u = s - side * period

    # the square closes by four-fold symmetry
    corner_disp = _corner_displacement(corner)
    starts = [np.zeros(2)]
    for k in range(3):
        starts.append(starts[-1] + _rotate(np.array([flat, 0.0]) + corner_disp, k * np.pi / 2))

    pts = np.empty((n, 2))
    for j in range(n):
        k = side[j]
        dirn = _rotate(np.array([1.0, 0.0]), k * np.pi / 2)
        if u[j] <= flat:
            pts[j] = starts[k] + u[j] * dirn
        else:
            v = u[j] - flat
            nodes = 0.5 * v * (_GL_NODES + 1.0)
            ang = k * np.pi / 2 + _corner_angle(nodes, corner)
            disp = 0.5 * v * np.array([_GL_WEIGHTS @ np.cos(ang), _GL_WEIGHTS @ np.sin(ang)])
            pts[j] = starts[k] + flat * dirn + disp
    return DiscreteCurve(pts)


def _corner_displacement(corner: float) -> np.ndarray:
    nodes = 0.5 * corner * (_GL_NODES + 1.0)
    ang = _corner_angle(nodes, corner)
    return 0.5 * corner * np.array([np.dot(_GL_WEIGHTS, np.cos(ang)), np.dot(_GL_WEIGHTS, np.sin(ang))])


def _rotate(v, angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


# ---------------------------------------------------------------------------
# trigonometric interpolation and arclength resampling

def _trig_eval(values: np.ndarray, theta: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Evaluate the trigonometric interpolant of periodic samples at ``theta``.

    ``values`` has the sample axis first; extra trailing axes are carried.
    """
    n = values.shape[0]
    coeffs = np.fft.fft(values, axis=0) / n
    k = _wavenumbers(n)
    if n % 2 == 0:
        # split the Nyquist mode symmetrically so the interpolant is real
        coeffs = np.concatenate([coeffs, coeffs[n // 2:n // 2 + 1]], axis=0)
        coeffs[n // 2] *= 0.5
        coeffs[-1] *= 0.5
        k = np.append(k, n // 2)
        k[n // 2] = -n // 2
    out = np.empty((theta.size,) + values.shape[1:])
    flat = coeffs.reshape(coeffs.shape[0], -1)
    for start in range(0, theta.size, chunk):
        th = theta[start:start + chunk]
        basis = np.exp(1j * np.outer(th, k))
        out[start:start + chunk] = (basis @ flat).real.reshape((th.size,) + values.shape[1:])
    return out


def _arclength_parameters(c: DiscreteCurve, targets: np.ndarray) -> np.ndarray:
    """Parameter values theta_k with s(theta_k) = targets[k] (arclength from sample 0)."""
    speed, _, _, _ = frame(c.points, "spectral")
    check_speed(speed)
    n = c.n
    total = periodic_integral(speed)
    mean_speed = total / TWO_PI
    # antiderivative of the zero-mean part of the speed, in Fourier space
    k = _wavenumbers(n)
    coeffs = np.fft.fft(speed - mean_speed) / n
    icoef = np.zeros_like(coeffs)
    nz = k != 0
    icoef[nz] = coeffs[nz] / (1j * k[nz])
    if n % 2 == 0:
        icoef[n // 2] = 0.0
    offset = icoef.sum().real

    def s_of(theta):
        out = np.empty(theta.size)
        for start in range(0, theta.size, 4096):
            th = theta[start:start + 4096]
            out[start:start + 4096] = (np.exp(1j * np.outer(th, k)) @ icoef).real
        return mean_speed * theta + out - offset

    grid = TWO_PI * np.arange(n) / n
    s_grid = s_of(grid)
    theta = np.interp(targets, np.append(s_grid, total), np.append(grid, TWO_PI))
    for _ in range(30):
        step = (s_of(theta) - targets) / _trig_eval(speed, theta)
        theta = theta - step
        if np.max(np.abs(step)) < 1e-14:
            break
    return theta


def sample_at_arclength(c: DiscreteCurve, s: np.ndarray) -> np.ndarray:
    """Points of the smooth interpolant of ``c`` at arclength positions ``s``."""
    return _trig_eval(c.points, _arclength_parameters(c, np.asarray(s, dtype=float)))


def frame_at_arclength(c: DiscreteCurve, s: np.ndarray):
    """Points, unit normals and curvature of the smooth interpolant at arclength ``s``."""
    theta = _arclength_parameters(c, np.asarray(s, dtype=float))
    d1 = spectral_derivative(c.points, 1)
    d2 = spectral_derivative(c.points, 2)
    vals = _trig_eval(np.column_stack([c.points, d1, d2]), theta)
    pts, v1, v2 = vals[:, 0:2], vals[:, 2:4], vals[:, 4:6]
    sp = np.hypot(v1[:, 0], v1[:, 1])
    normal = rotate90(v1 / sp[:, None])
    kappa = (v1[:, 0] * v2[:, 1] - v1[:, 1] * v2[:, 0]) / sp**3
    return pts, normal, kappa


def resample_arclength(c: DiscreteCurve, m: int | None = None) -> DiscreteCurve:
    """Resample ``c`` at ``m`` points equally spaced in arclength.

    Sample 0 is kept fixed. Positions come from the trigonometric
    interpolant of the input samples, so smooth curves keep their trace and
    length to near machine precision.
    """
    m = c.n if m is None else m
    if m < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    total = length(c)
    return DiscreteCurve(sample_at_arclength(c, total * np.arange(m) / m))


def resample_with_field(c: DiscreteCurve, field: np.ndarray, m: int | None = None):
    """Arclength resampling that also transports a scalar field along the trace."""
    m = c.n if m is None else m
    total = length(c)
    theta = _arclength_parameters(c, total * np.arange(m) / m)
    out = _trig_eval(np.column_stack([c.points, field]), theta)
    return DiscreteCurve(out[:, :2]), out[:, 2]


# ---------------------------------------------------------------------------
# winding numbers and distances

def winding_number(c: DiscreteCurve, p) -> int:
    """Winding number of ``c`` around the point ``p``.

    Sums the signed angles subtended by consecutive samples as seen from
    ``p``. Raises :class:`PointOnCurveError` within ``1e-9 * length`` of the
    polygonal trace.
    """
    p = np.asarray(p, dtype=float)
    pts = c.points
    perimeter = np.linalg.norm(np.roll(pts, -1, axis=0) - pts, axis=1).sum()
    _, dist = winding_and_distance(p.reshape(1, 2), pts)
    if dist[0] <= ON_CURVE_RTOL * perimeter:
        raise PointOnCurveError(f"point {tuple(p)} lies on the curve")
    rel = pts - p
    nxt = np.roll(rel, -1, axis=0)
    cross = rel[:, 0] * nxt[:, 1] - rel[:, 1] * nxt[:, 0]
    dot = (rel * nxt).sum(axis=1)
    return int(round(np.arctan2(cross, dot).sum() / TWO_PI))


def sup_distance(c1: DiscreteCurve, c2: DiscreteCurve) -> float:
    """Largest pointwise distance between two equally sampled curves.

    This is the aligned-sample surrogate for the Frechet-type distance; no
    optimisation over reparametrizations is performed.
    """
    if c1.n != c2.n:
        raise ValueError("curves must have the same number of samples")
    return float(np.max(np.linalg.norm(c1.points - c2.points, axis=1)))
