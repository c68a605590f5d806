"""Pure numpy fallback for the winding-number / trace-distance kernel."""

import numpy as np

_CHUNK_ELEMS = 2_000_000


def winding_and_distance(points: np.ndarray, poly: np.ndarray):
    """Integer winding number of the closed polygon ``poly`` around each point
    and the distance from each point to the polygon's trace."""
    points = np.ascontiguousarray(points, dtype=float)
    poly = np.ascontiguousarray(poly, dtype=float)
    x0, y0 = poly[:, 0], poly[:, 1]
    nxt = np.roll(poly, -1, axis=0)
    ex, ey = nxt[:, 0] - x0, nxt[:, 1] - y0
    y1 = nxt[:, 1]
    len2 = ex * ex + ey * ey
    safe = np.where(len2 > 0, len2, 1.0)

    wind = np.empty(points.shape[0], dtype=np.int64)
    dist = np.empty(points.shape[0])
    step = max(1, _CHUNK_ELEMS // max(1, poly.shape[0]))
    for start in range(0, points.shape[0], step):
        px = points[start:start + step, 0:1]
        py = points[start:start + step, 1:2]
        rx, ry = px - x0, py - y0
        cross = ex * ry - rx * ey
        up = (y0 <= py) & (y1 > py) & (cross > 0)
        down = (y0 > py) & (y1 <= py) & (cross < 0)
        wind[start:start + step] = up.sum(axis=1) - down.sum(axis=1)
        u = np.clip((rx * ex + ry * ey) / safe, 0.0, 1.0)
        u = np.where(len2 > 0, u, 0.0)
        dx = x0 + u * ex - px
        dy = y0 + u * ey - py
        dist[start:start + step] = np.sqrt((dx * dx + dy * dy).min(axis=1))
    return wind, dist
