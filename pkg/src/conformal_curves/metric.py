"""Length-dependent conformal factors and the metric functionals they induce.

The metric at a curve ``c`` on normal vector fields ``h*n``, ``k*n`` is

    G_c(h, k) = phi(length(c)) * integral(h * k * |c_theta| dtheta)

with ``phi`` one of ``1``, ``length`` or ``exp(A * length)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .curve import (
    DiscreteCurve,
    SCHEMES,
    as_field,
    check_speed,
    frame,
    periodic_integral,
)

KINDS = ("one", "length", "exp")


class FactorValues(NamedTuple):
    phi: float
    dphi: float
    ddphi: float


@dataclass(frozen=True)
class ConformalFactor:
    """``phi(length)``: ``"one"``, ``"length"`` or ``"exp"`` (with rate ``A > 0``)."""

    kind: str
    A: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown conformal factor {self.kind!r}")
        if self.kind == "exp":
            if self.A is None or not np.isfinite(self.A) or self.A <= 0:
                raise ValueError("exp conformal factor needs A > 0")
        elif self.A is not None:
            raise ValueError(f"{self.kind!r} conformal factor takes no parameter")

    @classmethod
    def one(cls) -> "ConformalFactor":
        return cls("one")

    @classmethod
    def length(cls) -> "ConformalFactor":
        return cls("length")

    @classmethod
    def exp(cls, A: float) -> "ConformalFactor":
        return cls("exp", float(A))

    @classmethod
    def parse(cls, text: str) -> "ConformalFactor":
        """Parse ``"one"``, ``"length"`` or ``"exp:<A>"``."""
        text = text.strip().lower()
        if text in ("one", "length"):
            return cls(text)
        if text.startswith("exp:"):
            try:
                A = float(text[4:])
            except ValueError:
                raise ValueError(f"malformed conformal factor {text!r}") from None
            return cls.exp(A)
        raise ValueError(f"malformed conformal factor {text!r}")

    def __str__(self) -> str:
        return f"exp:{self.A:g}" if self.kind == "exp" else self.kind

    def values(self, ell) -> FactorValues:
        return factor_values(self, ell)


def factor_values(cf: ConformalFactor, ell) -> FactorValues:
    """``phi``, ``dphi/dell`` and ``d2phi/dell2`` at length ``ell``.

    ``ell`` may be an array; the components are then arrays too.
    """
    ell_arr = np.asarray(ell, dtype=float)
    if np.any(ell_arr <= 0):
        raise ValueError("length must be positive")
    if cf.kind == "one":
        one = np.ones_like(ell_arr)
        vals = (one, 0.0 * one, 0.0 * one)
    elif cf.kind == "length":
        vals = (ell_arr, np.ones_like(ell_arr), np.zeros_like(ell_arr))
    else:
        e = np.exp(cf.A * ell_arr)
        vals = (e, cf.A * e, cf.A**2 * e)
    if ell_arr.ndim == 0:
        return FactorValues(*(float(v) for v in vals))
    return FactorValues(*vals)


def inner(cf: ConformalFactor, c: DiscreteCurve, h, k, scheme: str = "spectral") -> float:
    """Metric inner product of the normal fields ``h*n`` and ``k*n`` at ``c``."""
    h = as_field(h, c.n, "h")
    k = as_field(k, c.n, "k")
    speed, _, _, _ = frame(c.points, scheme)
    check_speed(speed)
    ell = periodic_integral(speed)
    return float(factor_values(cf, ell).phi * periodic_integral(h * k * speed))


@dataclass(frozen=True, eq=False)
class CurvePath:
    """Curves ``c(t_i, .)`` on a uniform time grid.

    ``scheme`` records which theta-differentiation suits the curves: the
    spectral default for smooth paths, ``"fd"`` for piecewise-linear ones.
    """

    times: np.ndarray
    points: np.ndarray
    scheme: str = field(default="spectral")

    def __post_init__(self):
        times = np.array(self.times, dtype=float)
        pts = np.array(self.points, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("a path needs at least two time samples")
        if pts.ndim != 3 or pts.shape[0] != times.size or pts.shape[2] != 2:
            raise ValueError("points must have shape (T+1, N, 2) matching times")
        dt = np.diff(times)
        if np.any(dt <= 0):
            raise ValueError("times must be strictly increasing")
        if not np.allclose(dt, dt[0], rtol=1e-9, atol=0.0):
            raise ValueError("times must be uniformly spaced")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        for curve_pts in pts:
            DiscreteCurve(curve_pts)  # validates immersion of each step
        times.setflags(write=False)
        pts.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_curves(cls, times, curves, scheme: str = "spectral") -> "CurvePath":
        curves = list(curves)
        sizes = {c.n for c in curves}
        if len(sizes) != 1:
            raise ValueError("all curves in a path must have the same number of samples")
        return cls(times, np.stack([c.points for c in curves]), scheme)

    @property
    def steps(self) -> int:
        return self.times.size - 1

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    @property
    def t_end(self) -> float:
        return float(self.times[-1] - self.times[0])

    @property
    def curves(self) -> list[DiscreteCurve]:
        return [DiscreteCurve(p) for p in self.points]

    def curve(self, i: int) -> DiscreteCurve:
        return DiscreteCurve(self.points[i])


def time_derivative(values: np.ndarray, dt: float) -> np.ndarray:
    """d/dt along axis 0: central inside, one-sided second order at the ends."""
    values = np.asarray(values, dtype=float)
    out = np.empty_like(values)
    if values.shape[0] == 2:
        out[:] = (values[1] - values[0]) / dt
        return out
    out[1:-1] = (values[2:] - values[:-2]) / (2.0 * dt)
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt)
    out[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * dt)
    return out


@dataclass(frozen=True, eq=False)
class PathKinematics:
    velocity: np.ndarray       # c_t, shape (T+1, N, 2)
    normal_speed: np.ndarray   # a = c_t . n, shape (T+1, N)
    speed: np.ndarray          # |c_theta|
    curvature: np.ndarray
    normal: np.ndarray
    lengths: np.ndarray        # ell(t)


def kinematics(p: CurvePath) -> PathKinematics:
    speed, _, normal, kappa = frame(p.points, p.scheme)
    check_speed(speed)
    vel = time_derivative(p.points, p.dt)
    a = (vel * normal).sum(axis=-1)
    return PathKinematics(vel, a, speed, kappa, normal, periodic_integral(speed, axis=-1))


def normal_velocity(p: CurvePath, i: int) -> np.ndarray:
    """Normal speed ``a = c_t . n`` of the path at step ``i``."""
    if not 0 <= i <= p.steps:
        raise IndexError(f"step {i} outside 0..{p.steps}")
    return kinematics(p).normal_speed[i]


def path_integrand(cf: ConformalFactor, p: CurvePath) -> np.ndarray:
    """``G(c_t_perp, c_t_perp)`` at every time step."""
    kin = kinematics(p)
    phi = factor_values(cf, kin.lengths).phi
    return phi * periodic_integral(kin.normal_speed**2 * kin.speed, axis=-1)


def path_length(cf: ConformalFactor, p: CurvePath) -> float:
    """Riemannian length of the path using the normal part of the velocity."""
    return float(np.trapezoid(np.sqrt(path_integrand(cf, p)), p.times))


def path_energy(cf: ConformalFactor, p: CurvePath) -> float:
    """Half the time integral of ``phi * integral(|c_t|^2 |c_theta|)``.

    Uses the full velocity ``c_t``; for purely normal motion this agrees
    with the normal-part integrand of :func:`path_length`.
    """
    kin = kinematics(p)
    phi = factor_values(cf, kin.lengths).phi
    g = phi * periodic_integral((kin.velocity**2).sum(axis=-1) * kin.speed, axis=-1)
    return float(0.5 * np.trapezoid(g, p.times))
