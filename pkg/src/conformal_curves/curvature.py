"""Christoffel symbol and sectional curvature of the conformal metrics.

All quantities are evaluated at a curve ``c`` for normal fields ``m``, ``h``
(scalar multiples of the unit normal). Inner products ``<u, v>`` are
arclength integrals ``integral(u v ds)`` and primes denote d/ds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curve import (
    TWO_PI,
    DiscreteCurve,
    as_field,
    check_speed,
    derivative,
    frame,
    periodic_integral,
)
from .metric import ConformalFactor, factor_values

NORMALIZATION_TOL = 1e-8


class NormalizationError(ValueError):
    """The fields spanning a tangent plane are not orthonormal."""


@dataclass(frozen=True, eq=False)
class _ArcCalculus:
    speed: np.ndarray
    kappa: np.ndarray
    ell: float
    scheme: str

    def ip(self, u, v) -> float:
        return float(periodic_integral(u * v * self.speed))

    def norm2(self, u) -> float:
        return self.ip(u, u)

    def d(self, u) -> np.ndarray:
        return derivative(u, 1, scheme=self.scheme) / self.speed


def _calculus(c: DiscreteCurve, scheme: str = "spectral") -> _ArcCalculus:
    speed, _, _, kappa = frame(c.points, scheme)
    check_speed(speed)
    return _ArcCalculus(speed, kappa, float(periodic_integral(speed)), scheme)


@dataclass(frozen=True, eq=False)
class TangentPlane:
    """Plane spanned by normal fields ``m``, ``h`` at ``curve``.

    Expected to satisfy ``phi*<m,m> = phi*<h,h> = 1`` and ``<m,h> = 0``;
    :func:`orthonormalize` produces such planes.
    """

    curve: DiscreteCurve
    m: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "m", as_field(self.m, self.curve.n, "m"))
        object.__setattr__(self, "h", as_field(self.h, self.curve.n, "h"))

    def swapped(self) -> "TangentPlane":
        return TangentPlane(self.curve, self.h, self.m)


def orthonormalize(cf: ConformalFactor, c: DiscreteCurve, m_raw, h_raw) -> TangentPlane:
    """Gram-Schmidt ``(m_raw, h_raw)`` and scale so that ``phi*||.||^2 = 1``."""
    calc = _calculus(c)
    m = as_field(m_raw, c.n, "m")
    h = as_field(h_raw, c.n, "h")
    nm, nh = calc.norm2(m), calc.norm2(h)
    if nm <= 0 or nh <= 0:
        raise ValueError("fields must be nonzero")
    cos = calc.ip(m, h) / np.sqrt(nm * nh)
    if 1.0 - cos * cos <= 1e-12:
        raise ValueError("fields are linearly dependent")
    phi = factor_values(cf, calc.ell).phi
    m = m / np.sqrt(phi * nm)
    h = h - phi * calc.ip(h, m) * m
    h = h / np.sqrt(phi * calc.norm2(h))
    return TangentPlane(c, m, h)


def christoffel(cf: ConformalFactor, c: DiscreteCurve, h, k) -> np.ndarray:
    """Christoffel symbol ``Gamma_0(h, k)`` at ``c`` as a scalar normal field."""
    calc = _calculus(c)
    h = as_field(h, c.n, "h")
    k = as_field(k, c.n, "k")
    vals = factor_values(cf, calc.ell)
    kap = calc.kappa
    bracket = calc.ip(kap, h) * k + calc.ip(kap, k) * h - calc.ip(h, k) * kap
    return 0.5 * kap * (h * k) + vals.dphi / (2.0 * vals.phi) * bracket


def _check_plane(cf: ConformalFactor, calc: _ArcCalculus, plane: TangentPlane) -> None:
    phi = factor_values(cf, calc.ell).phi
    defects = (phi * calc.norm2(plane.m) - 1.0,
               phi * calc.norm2(plane.h) - 1.0,
               phi * calc.ip(plane.m, plane.h))
    if max(abs(d) for d in defects) > NORMALIZATION_TOL:
        raise NormalizationError(f"plane is not orthonormal (defects {defects})")


def curvature_terms(cf: ConformalFactor, plane: TangentPlane, scheme: str = "spectral") -> dict:
    """The five contributions to the sectional curvature, keyed by name."""
    calc = _calculus(plane.curve, scheme)
    _check_plane(cf, calc, plane)
    phi, dphi, ddphi = factor_values(cf, calc.ell)
    m, h, kap = plane.m, plane.h, calc.kappa
    dm, dh = calc.d(m), calc.d(h)
    return {
        "wedge": 0.5 * phi * calc.norm2(dm * h - m * dh),
        "gradient": -dphi / (2.0 * phi) * (calc.norm2(dm) + calc.norm2(dh)),
        "weighted": dphi / (4.0 * phi) * (calc.norm2(m * kap) + calc.norm2(h * kap)),
        "projection": (3.0 * dphi**2 - 2.0 * phi * ddphi) / (4.0 * phi**2)
        * (calc.ip(m, kap) ** 2 + calc.ip(h, kap) ** 2),
        "total": -dphi**2 / (4.0 * phi**3) * calc.norm2(kap),
    }


def sectional_curvature(cf: ConformalFactor, plane: TangentPlane, scheme: str = "spectral") -> float:
    """Sectional curvature of the plane spanned by ``plane.m`` and ``plane.h``."""
    return float(sum(curvature_terms(cf, plane, scheme).values()))


def constant_mode_curvature(plane: TangentPlane) -> float:
    """Closed-form curvature for ``phi = length`` and ``m = 1/length``.

    Evaluates ``||h kappa||^2/(4 ell) + 3/(4 ell^2) (<1/ell, kappa>^2 + <h, kappa>^2)``.
    """
    calc = _calculus(plane.curve)
    ell, kap, h = calc.ell, calc.kappa, plane.h
    return (calc.norm2(h * kap) / (4.0 * ell)
            + 3.0 / (4.0 * ell**2) * (calc.ip(np.full_like(h, 1.0 / ell), kap) ** 2 + calc.ip(h, kap) ** 2))


@dataclass(frozen=True)
class Boundedness:
    bounded: bool
    margin: float


def boundedness(cf: ConformalFactor, c: DiscreteCurve, m) -> Boundedness:
    """Whether curvatures of planes containing ``m`` are bounded above.

    Holds exactly when ``max m^2 <= phi'/phi^2``; ``margin`` is the gap.
    """
    calc = _calculus(c)
    m = as_field(m, c.n, "m")
    phi, dphi, _ = factor_values(cf, calc.ell)
    if abs(phi * calc.norm2(m) - 1.0) > NORMALIZATION_TOL:
        raise NormalizationError("m must satisfy phi * ||m||^2 = 1")
    threshold = dphi / phi**2
    peak = float(np.max(m * m))
    return Boundedness(peak <= threshold + 1e-12, threshold - peak)


def blowup_region(cf: ConformalFactor, c: DiscreteCurve, m, eps: float | None = None) -> np.ndarray:
    """Boolean mask of samples where ``m^2 > phi'/phi^2 + eps``.

    ``eps`` defaults to ``1e-3 * max(m^2)``.
    """
    calc = _calculus(c)
    m = as_field(m, c.n, "m")
    phi, dphi, _ = factor_values(cf, calc.ell)
    m2 = m * m
    if eps is None:
        eps = 1e-3 * float(np.max(m2))
    return m2 > dphi / phi**2 + eps


def _largest_run(mask: np.ndarray) -> tuple[int, int]:
    """Start index and length of the longest cyclic run of True values."""
    n = mask.size
    if mask.all():
        return 0, n
    start = int(np.argmin(mask))  # a False entry; runs begin after it
    rolled = np.roll(mask, -start)
    best, best_len, cur, cur_len = 0, 0, 0, 0
    for j, v in enumerate(rolled):
        if v:
            if cur_len == 0:
                cur = j
            cur_len += 1
            if cur_len > best_len:
                best, best_len = cur, cur_len
        else:
            cur_len = 0
    return (best + start) % n, best_len


def probe_wave(c: DiscreteCurve, mask: np.ndarray, frequency: int) -> np.ndarray:
    """``sin(frequency * theta)`` windowed by a ``sin^4`` bump on the largest run of ``mask``.

    When ``mask`` covers the whole curve, the wave is not windowed.
    """
    theta = TWO_PI * np.arange(c.n) / c.n
    wave = np.sin(frequency * theta)
    start, run = _largest_run(mask)
    if run == c.n:
        return wave
    window = np.zeros(c.n)
    idx = (start + np.arange(run)) % c.n
    x = (np.arange(run) + 0.5) / run
    window[idx] = np.sin(np.pi * x) ** 4
    return wave * window


def curvature_blowup_probe(cf: ConformalFactor, c: DiscreteCurve, m, frequencies,
                           eps: float | None = None) -> list[float]:
    """Sectional curvatures of planes ``P(m, h_f)`` for increasingly wiggly ``h_f``.

    ``h_f`` is a frequency-``f`` wave supported in the region where
    ``m^2`` exceeds ``phi'/phi^2`` (see :func:`blowup_region`). If that region
    is empty the unwindowed wave is used, which probes the bounded regime.
    Frequencies above ``N/4`` are rejected.
    """
    m = as_field(m, c.n, "m")
    freqs = [int(f) for f in frequencies]
    for f in freqs:
        if f < 1 or f > c.n // 4:
            raise ValueError(f"frequency {f} outside 1..{c.n // 4} (N/4 resolution guard)")
    mask = blowup_region(cf, c, m, eps)
    if not mask.any():
        mask = np.ones(c.n, dtype=bool)
    out = []
    for f in freqs:
        plane = orthonormalize(cf, c, m, probe_wave(c, mask, f))
        out.append(sectional_curvature(cf, plane))
    return out
