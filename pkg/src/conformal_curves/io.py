"""JSON and CSV file formats.

Curves are ``{"points": [[x, y], ...]}`` (closed implicitly), scalar fields
``{"values": [...]}`` and paths ``{"times": [...], "curves": [[[x, y], ...], ...]}``
with an optional ``"scheme"`` key. Geometry is written at full precision;
reported numbers are rounded to 9 significant digits.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .curve import DiscreteCurve
from .metric import CurvePath

JSON_DIGITS = 9


def round_sig(x, digits: int = JSON_DIGITS):
    """Round floats (recursively through lists and dicts) to ``digits`` significant digits."""
    if isinstance(x, dict):
        return {k: round_sig(v, digits) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [round_sig(v, digits) for v in x]
    if isinstance(x, (bool, np.bool_)) or x is None:
        return bool(x) if x is not None else None
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if not np.isfinite(x) else float(f"{x:.{digits}g}")
    return x


def atomic_write(path, text: str) -> None:
    """Write ``text`` to ``path`` through a temporary file and a rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _load_json(path) -> dict:
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return data


def _points_array(raw, where: str) -> np.ndarray:
    try:
        pts = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise ValueError(f"{where}: points must be numeric [x, y] pairs") from None
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"{where}: points must be a list of [x, y] pairs")
    return pts


def read_curve(path) -> DiscreteCurve:
    data = _load_json(path)
    if "points" not in data:
        raise ValueError(f"{path}: missing 'points'")
    return DiscreteCurve(_points_array(data["points"], str(path)))


def curve_to_json(c: DiscreteCurve) -> str:
    return json.dumps({"points": c.to_list()})


def write_curve(path, c: DiscreteCurve) -> None:
    atomic_write(path, curve_to_json(c) + "\n")


def read_field(path) -> np.ndarray:
    data = _load_json(path)
    if "values" not in data:
        raise ValueError(f"{path}: missing 'values'")
    vals = np.asarray(data["values"], dtype=float)
    if vals.ndim != 1:
        raise ValueError(f"{path}: 'values' must be a flat list")
    return vals


def write_field(path, values) -> None:
    atomic_write(path, json.dumps({"values": np.asarray(values, dtype=float).tolist()}) + "\n")


def read_path(path) -> CurvePath:
    data = _load_json(path)
    for key in ("times", "curves"):
        if key not in data:
            raise ValueError(f"{path}: missing '{key}'")
    curves = data["curves"]
    if not isinstance(curves, list) or not curves:
        raise ValueError(f"{path}: 'curves' must be a non-empty list")
    pts = [_points_array(c, f"{path}: curve {i}") for i, c in enumerate(curves)]
    if len({p.shape for p in pts}) != 1:
        raise ValueError(f"{path}: all curves must have the same number of points")
    return CurvePath(np.asarray(data["times"], dtype=float), np.stack(pts),
                     data.get("scheme", "spectral"))


def path_to_json(p: CurvePath) -> str:
    return json.dumps({"times": p.times.tolist(), "curves": p.points.tolist(), "scheme": p.scheme})


def write_path(path, p: CurvePath) -> None:
    atomic_write(path, path_to_json(p) + "\n")


def json_text(record: dict) -> str:
    return json.dumps(round_sig(record), indent=2) + "\n"


def csv_text(rows: list[dict], columns: list[str] | None = None) -> str:
    """CSV with a header; floats rounded to 9 significant digits, ``None`` left blank."""
    if columns is None:
        columns = list(rows[0]) if rows else []
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if row.get(k) is None else round_sig(row.get(k)) for k in columns])
    return buf.getvalue()
