"""Command-line front end.

Exit codes: 0 on success, 1 on numerical failure (breakdown of the curve
evolution, infeasible construction), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import io
from .bounds import (
    BumpError,
    BumpSpec,
    GridSpec,
    bump_bound,
    bump_path,
    d_flat,
    first_variation,
    smooth_normal_perturbation,
    solve_bump,
    teeth_sweep,
    theorem1_bounds,
)
from .curvature import (
    NormalizationError,
    boundedness,
    curvature_blowup_probe,
    orthonormalize,
    sectional_curvature,
)
from .curve import ImmersionError, resample_arclength
from .geodesic import (
    BreakdownError,
    circle_geodesic_exact,
    geodesic_shoot,
    grassfire,
    residual_per_step,
)
from .metric import ConformalFactor, inner, path_length

EXIT_OK, EXIT_NUMERICAL, EXIT_USAGE = 0, 1, 2

COMMANDS = ("geodesic", "grassfire", "circle-exact", "curvature", "probe",
            "bounds", "bump", "dflat", "variation")


class UsageError(Exception):
    """Bad flags or unreadable input."""


class NumericalFailure(Exception):
    """The computation itself failed."""


@dataclass(frozen=True)
class RunConfig:
    N: int = 256
    steps: int = 200
    grid: int = 512
    output_path: str | None = None
    format: str | None = None


@dataclass(frozen=True)
class Command:
    name: str
    options: dict


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _factor(text: str) -> ConformalFactor:
    try:
        return ConformalFactor.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="conformal-curves",
                     description="Geodesics, curvature and distance bounds for length-weighted curve metrics.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, *, n=False, steps=False, grid=False, phi=None, fmt=("json", "csv")):
        if phi is not None:
            p.add_argument("--phi", type=_factor, required=phi is True,
                           default=None if phi is True else ConformalFactor.parse(phi),
                           help='"one", "length" or "exp:<A>"')
        if n:
            p.add_argument("--n", type=_positive_int, default=RunConfig.N, help="curve samples after resampling")
        if steps:
            p.add_argument("--steps", type=_positive_int, default=RunConfig.steps)
        if grid:
            p.add_argument("--grid", type=_positive_int, default=RunConfig.grid, help="d_flat cells per axis")
        p.add_argument("--out", default=None, help="output file (stdout if omitted)")
        p.add_argument("--format", choices=fmt, default=fmt[0])

    p = sub.add_parser("geodesic", help="shoot a geodesic from a curve and normal speed")
    p.add_argument("--curve", required=True)
    p.add_argument("--a0", required=True, help="constant or scalar-field file")
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--diagnostics", default=None, help="CSV path (default: next to --out)")
    common(p, n=True, steps=True, phi=True, fmt=("json",))

    p = sub.add_parser("grassfire", help="constant normal speed evolution")
    p.add_argument("--curve", required=True)
    p.add_argument("--a0", type=float, required=True, help="constant normal speed")
    p.add_argument("--t-end", type=float, required=True)
    common(p, n=True, steps=True, fmt=("json",))

    p = sub.add_parser("circle-exact", help="closed-form radius on the concentric-circle geodesic")
    p.add_argument("--r0", type=float, required=True)
    p.add_argument("--r1", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--phi", type=_factor, default=ConformalFactor.length())

    p = sub.add_parser("curvature", help="sectional curvature of the plane spanned by m and h")
    p.add_argument("--curve", required=True)
    p.add_argument("--m", required=True, help="constant or scalar-field file")
    p.add_argument("--h", required=True, help="constant or scalar-field file")
    common(p, n=True, phi=True)

    p = sub.add_parser("probe", help="curvature along high-frequency directions")
    p.add_argument("--curve", required=True)
    p.add_argument("--m", required=True, help="constant or scalar-field file")
    p.add_argument("--freqs", type=_int_list, default=[4, 8, 16, 32])
    common(p, n=True, phi=True, fmt=("csv", "json"))

    p = sub.add_parser("bounds", help="swept-area and d_flat bounds for a path")
    p.add_argument("--path", required=True)
    p.add_argument("--no-dflat", action="store_true", help="skip the winding-number bound")
    common(p, grid=True, phi=True)

    p = sub.add_parser("bump", help="saw-tooth bump path and its bound")
    p.add_argument("--curve", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--teeth", type=_positive_int, required=True)
    p.add_argument("--start", type=float, default=0.0, help="arclength where the bump begins")
    p.add_argument("--sweep", action="store_true", help="sweep teeth over doublings from 4 up to --teeth")
    p.add_argument("--path-out", default=None, help="also write the bump path JSON")
    common(p, n=True, steps=False, phi=True, fmt=("csv", "json"))
    p.add_argument("--phase-steps", type=_positive_int, default=24)

    p = sub.add_parser("dflat", help="winding-number distance between two curves")
    p.add_argument("--curve1", required=True)
    p.add_argument("--curve2", required=True)
    common(p, grid=True)

    p = sub.add_parser("variation", help="first-variation check of the path energy")
    p.add_argument("--path", required=True)
    p.add_argument("--seed", type=int, default=0)
    common(p, phi=True)
    return parser


def parse(argv) -> Command:
    """Parse ``argv`` into a :class:`Command`; raises :class:`UsageError`."""
    ns = build_parser().parse_args(list(argv))
    opts = vars(ns)
    return Command(opts.pop("command"), opts)


def _config(cmd: Command) -> RunConfig:
    o = cmd.options
    return RunConfig(N=o.get("n", RunConfig.N), steps=o.get("steps", RunConfig.steps),
                     grid=o.get("grid", RunConfig.grid), output_path=o.get("out"),
                     format=o.get("format"))


# ---------------------------------------------------------------------------
# input helpers

def _load(fn, path):
    try:
        return fn(path)
    except FileNotFoundError:
        raise UsageError(f"no such file: {path}") from None
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _field_or_constant(text: str, n: int):
    """Parse a float constant or load a field file; returns ``(array, is_constant)``."""
    try:
        return np.full(n, float(text)), True
    except ValueError:
        pass
    vals = _load(io.read_field, text)
    if vals.size != n:
        raise UsageError(f"{text}: field has {vals.size} values, curve has {n} samples")
    return vals, False


def _is_constant(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def _curve(o, key="curve", resample=True):
    c = _load(io.read_curve, o[key])
    if resample:
        c = resample_arclength(c, o["n"])
    return c


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.output_path is None:
        sys.stdout.write(text)
    else:
        try:
            io.atomic_write(cfg.output_path, text)
        except OSError as exc:
            raise UsageError(f"cannot write {cfg.output_path}: {exc}") from None


def _emit_record(cfg: RunConfig, record: dict) -> None:
    _emit(cfg, io.csv_text([record]) if cfg.format == "csv" else io.json_text(record))


def _emit_rows(cfg: RunConfig, rows: list[dict], columns: list[str]) -> None:
    if cfg.format == "json":
        _emit(cfg, io.json_text({"rows": rows}))
    else:
        _emit(cfg, io.csv_text(rows, columns))


def _write_side(path, fn, *args):
    try:
        fn(path, *args)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from None


# ---------------------------------------------------------------------------
# commands

def _cmd_geodesic(o, cfg):
    c = _curve(o)
    a0, _ = _field_or_constant(o["a0"], c.n)
    if o["t_end"] <= 0:
        raise UsageError("--t-end must be positive")
    sr = geodesic_shoot(o["phi"], c, a0, o["t_end"], cfg.steps)
    res = residual_per_step(o["phi"], sr) if cfg.steps >= 2 else np.full(sr.times.size, np.nan)
    rows = [{"t": t, "ell": ell, "mean_a": a, "a_ell_product": p, "residual": r}
            for t, ell, a, p, r in zip(sr.times, sr.lengths, sr.mean_speed, sr.a_ell, res)]
    diag = o["diagnostics"]
    if diag is None and cfg.output_path is not None:
        diag = str(Path(cfg.output_path).with_suffix(".csv"))
    if diag is not None:
        _write_side(diag, io.atomic_write, io.csv_text(rows, list(rows[0])))
    _emit(cfg, io.path_to_json(sr.path) + "\n")


def _cmd_grassfire(o, cfg):
    c = _curve(o)
    if o["t_end"] <= 0:
        raise UsageError("--t-end must be positive")
    _emit(cfg, io.path_to_json(grassfire(c, o["a0"], o["t_end"], cfg.steps)) + "\n")


def _cmd_circle_exact(o, cfg):
    try:
        r = circle_geodesic_exact(o["phi"], o["r0"], o["r1"], o["t"])
    except (ValueError, NotImplementedError) as exc:
        raise UsageError(str(exc)) from None
    sys.stdout.write(f"{r:.7g}\n")


def _cmd_curvature(o, cfg):
    resample = _is_constant(o["m"]) and _is_constant(o["h"])
    c = _curve(o, resample=resample)
    m, _ = _field_or_constant(o["m"], c.n)
    h, _ = _field_or_constant(o["h"], c.n)
    plane = orthonormalize(o["phi"], c, m, h)
    k = sectional_curvature(o["phi"], plane)
    b = boundedness(o["phi"], c, plane.m)
    _emit_record(cfg, {"k_c": k, "bounded": b.bounded, "margin": b.margin})


def _normalized(cf, c, m):
    norm2 = inner(cf, c, m, m)
    if norm2 <= 0:
        raise UsageError("--m must be nonzero")
    return m / np.sqrt(norm2)


def _cmd_probe(o, cfg):
    c = _curve(o, resample=_is_constant(o["m"]))
    m, _ = _field_or_constant(o["m"], c.n)
    ks = curvature_blowup_probe(o["phi"], c, _normalized(o["phi"], c, m), o["freqs"])
    _emit_rows(cfg, [{"frequency": f, "k_c": k} for f, k in zip(o["freqs"], ks)], ["frequency", "k_c"])


def _cmd_bounds(o, cfg):
    p = _load(io.read_path, o["path"])
    grid = None if o["no_dflat"] else GridSpec(cfg.grid)
    _emit_record(cfg, theorem1_bounds(o["phi"], p, grid).to_dict())


def _bump_spec(o, teeth):
    return BumpSpec(o["start"], o["delta"], o["eps"], teeth, phase_steps=o["phase_steps"])


def _cmd_bump(o, cfg):
    c = _curve(o)
    cf = o["phi"]
    columns = ["teeth", "eta", "L", "bound", "ratio"]
    try:
        spec = _bump_spec(o, o["teeth"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if o["sweep"]:
        teeth = [t for t in (4 * 2**k for k in range(32)) if t <= o["teeth"]] or [o["teeth"]]
        rows = [dataclasses.asdict(r) for r in teeth_sweep(c, spec, cf, teeth)]
        _emit_rows(cfg, rows, columns)
        return
    solved = solve_bump(c, spec, cf)
    p = bump_path(c, spec, cf)
    L = path_length(cf, p)
    bound = bump_bound(c, spec, cf) if cf.kind != "one" else None
    if o["path_out"]:
        _write_side(o["path_out"], io.write_path, p)
    _emit_record(cfg, {"teeth": spec.teeth, "eta": solved.eta, "L": L, "bound": bound,
                       "ratio": L / bound if bound else None})


def _cmd_dflat(o, cfg):
    c1 = _load(io.read_curve, o["curve1"])
    c2 = _load(io.read_curve, o["curve2"])
    _emit_record(cfg, {"d_flat": d_flat(c1, c2, GridSpec(cfg.grid))})


def _cmd_variation(o, cfg):
    p = _load(io.read_path, o["path"])
    if p.steps < 2:
        raise UsageError("path needs at least 2 steps")
    w = smooth_normal_perturbation(p, np.random.default_rng(o["seed"]))
    fd, adjoint = first_variation(o["phi"], p, w)
    scale = max(abs(fd), abs(adjoint))
    _emit_record(cfg, {"finite_difference": fd, "adjoint": adjoint,
                       "relative_error": 0.0 if scale == 0 else abs(fd - adjoint) / scale})


_HANDLERS = {
    "geodesic": _cmd_geodesic,
    "grassfire": _cmd_grassfire,
    "circle-exact": _cmd_circle_exact,
    "curvature": _cmd_curvature,
    "probe": _cmd_probe,
    "bounds": _cmd_bounds,
    "bump": _cmd_bump,
    "dflat": _cmd_dflat,
    "variation": _cmd_variation,
}


def run(cmd: Command, cfg: RunConfig) -> int:
    """Execute ``cmd``; returns the exit code and reports failures on stderr."""
    try:
        with np.errstate(all="ignore"):
            _HANDLERS[cmd.name](cmd.options, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BreakdownError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ImmersionError, NormalizationError, BumpError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cmd = parse(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cmd, _config(cmd))


if __name__ == "__main__":
    sys.exit(main())
