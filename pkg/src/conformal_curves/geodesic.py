"""Geodesic shooting in the space of unparametrized curves.

The state is a curve together with its normal speed ``a`` (``c_t = a n``).
The speed evolves by

    a_t = kappa/2 * (a^2 - (phi'/phi) * I2) + (phi'/phi) * a * I1,
    I2 = integral(a^2 |c_theta|),  I1 = integral(a kappa |c_theta|),

which for ``phi = length`` conserves ``a * length`` along constant-speed
(grassfire) solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import (
    DiscreteCurve,
    ImmersionError,
    as_field,
    check_speed,
    frame,
    periodic_integral,
    resample_with_field,
    spectral_filter,
)
from .metric import ConformalFactor, CurvePath, factor_values, time_derivative


class BreakdownError(RuntimeError):
    """The evolution lost immersion (or blew up) before reaching ``t_end``.

    ``time`` is the time at which the failing step ended and ``last_step``
    the index of the last valid step.
    """

    def __init__(self, message: str, time: float, last_step: int):
        super().__init__(f"{message} at t={time:.7g} (last valid step {last_step})")
        self.time = time
        self.last_step = last_step


def _rhs_arrays(cf: ConformalFactor, points: np.ndarray, a: np.ndarray):
    speed, _, normal, kappa = frame(points)
    check_speed(speed)
    ell = periodic_integral(speed)
    vals = factor_values(cf, ell)
    ratio = vals.dphi / vals.phi
    i2 = periodic_integral(a * a * speed)
    i1 = periodic_integral(a * kappa * speed)
    a_t = 0.5 * kappa * (a * a - ratio * i2) + ratio * a * i1
    return a[:, None] * normal, a_t


def geodesic_rhs(cf: ConformalFactor, c: DiscreteCurve, a) -> np.ndarray:
    """Time derivative of the normal speed along a geodesic through ``(c, a)``."""
    a = as_field(a, c.n, "a")
    return _rhs_arrays(cf, c.points, a)[1]


@dataclass(frozen=True, eq=False)
class ShootResult:
    path: CurvePath
    speeds: np.ndarray    # a at every step, shape (T+1, N)
    lengths: np.ndarray   # ell(t)

    @property
    def times(self) -> np.ndarray:
        return self.path.times

    @property
    def mean_speed(self) -> np.ndarray:
        return self.speeds.mean(axis=1)

    @property
    def a_ell(self) -> np.ndarray:
        """Mean normal speed times length; constant along length-metric grassfire geodesics."""
        return self.mean_speed * self.lengths


def _tangents_flipped(before: np.ndarray, after: np.ndarray) -> bool:
    d0 = np.roll(before, -1, axis=0) - np.roll(before, 1, axis=0)
    d1 = np.roll(after, -1, axis=0) - np.roll(after, 1, axis=0)
    return bool(np.any((d0 * d1).sum(axis=1) <= 0.0))


def _rk4(rhs, x, a, dt):
    k1x, k1a = rhs(x, a)
    k2x, k2a = rhs(x + 0.5 * dt * k1x, a + 0.5 * dt * k1a)
    k3x, k3a = rhs(x + 0.5 * dt * k2x, a + 0.5 * dt * k2a)
    k4x, k4a = rhs(x + dt * k3x, a + dt * k3a)
    return (x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x),
            a + dt / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a))


def _integrate(rhs, x0, a0, t_end, steps, resample):
    dt = t_end / steps
    xs, as_ = [x0], [a0]
    x, a = x0, a0
    for i in range(steps):
        t_next = (i + 1) * dt
        try:
            with np.errstate(all="ignore"):
                x_new, a_new = _rk4(rhs, x, a, dt)
        except ImmersionError as exc:
            raise BreakdownError("immersion lost inside step", t_next, i) from exc
        if not (np.all(np.isfinite(x_new)) and np.all(np.isfinite(a_new))):
            raise BreakdownError("non-finite state", t_next, i)
        if _tangents_flipped(x, x_new):
            raise BreakdownError("tangent reversal (cusp or collapse)", t_next, i)
        try:
            if resample:
                curve, a_new = resample_with_field(DiscreteCurve(x_new), a_new)
                x_new, a_new = curve.points, spectral_filter(a_new)
            # aliasing at the top modes otherwise feeds back into the curve
            # (fronts moving inward amplify it); damp them so round-off cannot grow
            x_new = spectral_filter(x_new)
            curve = DiscreteCurve(x_new)
            check_speed(frame(curve.points)[0])
        except ValueError as exc:
            raise BreakdownError(f"immersion lost ({exc})", t_next, i) from exc
        x, a = x_new, a_new
        xs.append(x)
        as_.append(a)
    times = np.linspace(0.0, t_end, steps + 1)
    return times, np.stack(xs), np.stack(as_)


def geodesic_shoot(cf: ConformalFactor, c0: DiscreteCurve, a0, t_end: float,
                   steps: int) -> ShootResult:
    """Integrate the geodesic equation from curve ``c0`` with normal speed ``a0``.

    Classic RK4 on the coupled system ``(c_t = a n, a_t = geodesic_rhs)``.
    After every step the curve is resampled to equal arclength spacing
    (sample 0 fixed), ``a`` is carried along by trigonometric interpolation,
    and both are passed through :func:`~conformal_curves.curve.spectral_filter`.
    ``c0`` is itself resampled first.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    a0 = as_field(a0, c0.n, "a0")
    start, a_start = resample_with_field(c0, a0)

    def rhs(x, a):
        return _rhs_arrays(cf, x, a)

    times, xs, speeds = _integrate(rhs, np.array(start.points), a_start, t_end, steps, True)
    lengths = periodic_integral(frame(xs)[0], axis=-1)
    return ShootResult(CurvePath(times, xs), speeds, lengths)


def grassfire(c0: DiscreteCurve, speed: float, t_end: float, steps: int) -> CurvePath:
    """Evolve every point of ``c0`` along the normal with the same speed.

    Classic RK4 on ``c_t = speed * n`` with the top Fourier modes damped
    after each step; samples are not redistributed.

    With the inward normal of a counterclockwise curve, positive ``speed``
    shrinks and negative ``speed`` grows it. Raises :class:`BreakdownError`
    when a cusp or collapse forms before ``t_end``.
    """
    if steps < 1:
        raise ValueError("steps must be at least 1")
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    a0 = np.full(c0.n, float(speed))

    def rhs(x, a):
        _, _, normal, _ = frame(x)
        return a[:, None] * normal, np.zeros_like(a)

    times, xs, _ = _integrate(rhs, np.array(c0.points), a0, t_end, steps, False)
    return CurvePath(times, xs)


def circle_geodesic_exact(cf: ConformalFactor, r0: float, r1: float, t: float) -> float:
    """Radius at time ``t`` of the length-metric geodesic between concentric circles."""
    if cf.kind != "length":
        raise NotImplementedError("closed form available only for phi = length")
    if r0 <= 0 or r1 <= 0:
        raise ValueError("radii must be positive")
    if not 0.0 <= t <= 1.0:
        raise ValueError("t must lie in [0, 1]")
    return float(np.sqrt(t * r1**2 + (1.0 - t) * r0**2))


def residual_per_step(cf: ConformalFactor, sr: ShootResult) -> np.ndarray:
    """Max over samples of |finite-difference a_t - geodesic_rhs| at each step."""
    a_t = time_derivative(sr.speeds, sr.path.dt)
    out = np.empty(sr.speeds.shape[0])
    for i, (x, a) in enumerate(zip(sr.path.points, sr.speeds)):
        out[i] = np.max(np.abs(a_t[i] - _rhs_arrays(cf, x, a)[1]))
    return out


def geodesic_residual(cf: ConformalFactor, sr: ShootResult) -> float:
    """Largest geodesic-equation defect over interior steps and samples."""
    if sr.path.steps < 3:
        raise ValueError("need at least 3 steps to measure the residual")
    return float(np.max(residual_per_step(cf, sr)[1:-1]))


def shoot_from_path(path: CurvePath, speeds) -> ShootResult:
    """Wrap a precomputed path and speed history for residual checks."""
    speeds = np.asarray(speeds, dtype=float)
    lengths = periodic_integral(frame(path.points)[0], axis=-1)
    return ShootResult(path, speeds, lengths)
