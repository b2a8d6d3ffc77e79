"""Stable file formats: trajectory/matrix/series CSV, JSON reports and SVG plots.

Floats are written with ``repr`` (shortest round-trip form), so reading a
file back reproduces the binary values exactly and output bytes depend only
on the data.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dissimilarity import DissimilarityMatrix
from .errors import EmptyTrajectory, InvalidParams, ParseError
from .integrator import Trajectory

TRAJECTORY_HEADER = ("t", "u", "v", "w")
PLOT_KINDS = ("timeseries_overlay", "phase_portrait_2d", "phase_portrait_3d_projection")
COMPONENT_COLORS = {"u": "#1b9e77", "v": "#000000", "w": "#7f7f7f"}


def fmt(x):
    """Shortest round-trip decimal form of a float."""
    return repr(float(x))


def _as_bytes(text):
    return text.encode("utf-8")


def _read_text(source):
    if isinstance(source, bytes):
        return source.decode("utf-8")
    if isinstance(source, Path):
        return source.read_text(encoding="utf-8")
    if isinstance(source, str) and "\n" not in source and Path(source).exists():
        return Path(source).read_text(encoding="utf-8")
    return source


def export_trajectory(traj, format="csv"):
    """Trajectory as CSV bytes with header ``t,u,v,w``."""
    if format != "csv":
        raise ValueError(f"unsupported format {format!r}")
    lines = [",".join(TRAJECTORY_HEADER)]
    for t, (u, v, w) in zip(traj.times.tolist(), traj.states.tolist()):
        lines.append(f"{t!r},{u!r},{v!r},{w!r}")
    return _as_bytes("\n".join(lines) + "\n")


def read_trajectory(source):
    """Parse trajectory CSV (bytes, text or a path) back into a Trajectory."""
    rows = list(csv.reader(io.StringIO(_read_text(source))))
    if not rows or tuple(c.strip() for c in rows[0]) != TRAJECTORY_HEADER:
        raise ParseError("trajectory CSV must start with header t,u,v,w", 1)
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 columns, found {len(row)}", lineno)
        try:
            data.append([float(x) for x in row])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    if not data:
        raise EmptyTrajectory("trajectory CSV has no samples")
    arr = np.array(data, dtype=float)
    return Trajectory(arr[:, 0], arr[:, 1:])


def export_matrix(matrix, layout="dense"):
    """Dissimilarity matrix as CSV bytes.

    ``dense``: a ``n,r,normalized`` metadata header and its values line, then
    ``n`` rows of ``n`` values. ``long``: the same metadata, then ``i,j,value``
    rows in row-major order.
    """
    n = matrix.n
    lines = ["n,r,normalized", f"{n},{fmt(matrix.r)},{int(matrix.normalized)}"]
    values = matrix.values.tolist()
    if layout == "dense":
        lines += [",".join(repr(x) for x in row) for row in values]
    elif layout == "long":
        lines.append("i,j,value")
        lines += [f"{i},{j},{values[i][j]!r}" for i in range(n) for j in range(n)]
    else:
        raise ValueError(f"layout must be 'dense' or 'long', got {layout!r}")
    return _as_bytes("\n".join(lines) + "\n")


def read_matrix(source):
    rows = [r for r in csv.reader(io.StringIO(_read_text(source))) if r]
    if len(rows) < 2 or rows[0] != ["n", "r", "normalized"]:
        raise ParseError("matrix CSV must start with header n,r,normalized", 1)
    n, r, normalized = int(rows[1][0]), float(rows[1][1]), bool(int(rows[1][2]))
    body = rows[2:]
    values = np.zeros((n, n))
    if body and body[0] == ["i", "j", "value"]:
        for i, j, x in body[1:]:
            values[int(i), int(j)] = float(x)
    else:
        values = np.array([[float(x) for x in row] for row in body], dtype=float).reshape(n, n)
    return DissimilarityMatrix(values, r, normalized)


def export_series(series):
    """Dissimilarity series as CSV bytes: ``index,value``."""
    lines = ["index,value"]
    lines += [f"{i},{x!r}" for i, x in enumerate(series.values.tolist())]
    return _as_bytes("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if hasattr(obj, "value") and not isinstance(obj, (int, str, bool)):
        return obj.value
    return obj


def export_report(report):
    """Any mapping (or object with ``as_dict``) as sorted, indented JSON bytes."""
    if hasattr(report, "as_dict"):
        report = report.as_dict()
    return _as_bytes(json.dumps(_jsonable(report), sort_keys=True, indent=2) + "\n")


def export_equilibrium(point):
    return export_report(point)


# ---------------------------------------------------------------------------
# SVG

@dataclass(frozen=True)
class PlotSpec:
    """What to draw.

    Attributes:
        kind (str): one of ``PLOT_KINDS``.
        components (tuple of str): drawn components among ``u, v, w``. A 2-D
            portrait takes exactly two (x, y); a 3-D projection takes all
            three.
        projection (tuple of str): for the 3-D projection, the pair of
            components on the x and y axes; the remaining one drives stroke
            opacity.
    """

    kind: str = "timeseries_overlay"
    components: tuple = ("v", "w")
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    projection: tuple = None

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if self.kind not in PLOT_KINDS:
            raise InvalidParams(f"kind must be one of {PLOT_KINDS}, got {self.kind!r}", field="kind")
        if any(c not in "uvw" or len(c) != 1 for c in comps) or len(set(comps)) != len(comps):
            raise InvalidParams(f"components must be distinct names among u, v, w; got {comps!r}",
                                field="components")
        if self.kind == "timeseries_overlay" and not comps:
            raise InvalidParams("timeseries_overlay needs at least one component", field="components")
        if self.kind == "phase_portrait_2d" and len(comps) != 2:
            raise InvalidParams("phase_portrait_2d needs exactly two components", field="components")
        if self.kind == "phase_portrait_3d_projection":
            if len(comps) != 3:
                raise InvalidParams("phase_portrait_3d_projection needs all three components",
                                    field="components")
            proj = tuple(self.projection or comps[:2])
            if len(proj) != 2 or len(set(proj)) != 2 or any(c not in comps for c in proj):
                raise InvalidParams(f"projection must be two distinct drawn components, got {proj!r}",
                                    field="projection")
            object.__setattr__(self, "projection", proj)


class _Axis:
    """Linear map from a data range to a pixel interval (5% margins when padded)."""

    def __init__(self, lo, hi, p0, p1, pad=True):
        if pad and hi > lo:
            extra = 0.05 * (hi - lo)
            lo, hi = lo - extra, hi + extra
        self.lo, self.hi, self.p0, self.p1 = lo, hi, p0, p1

    def __call__(self, x):
        if not self.hi > self.lo:
            return 0.5 * (self.p0 + self.p1) + 0.0 * x
        return self.p0 + (x - self.lo) / (self.hi - self.lo) * (self.p1 - self.p0)


def _equal_aspect(xs, ys, box):
    """Axes sharing one pixels-per-unit scale so shapes keep their aspect."""
    left, top, right, bottom = box
    xlo, xhi = float(np.min(xs)), float(np.max(xs))
    ylo, yhi = float(np.min(ys)), float(np.max(ys))
    span = 1.1 * max(xhi - xlo, yhi - ylo)
    if not span > 0:
        return _Axis(xlo, xhi, left, right), _Axis(ylo, yhi, bottom, top)
    scale = min(right - left, bottom - top) / span
    cx, cy = 0.5 * (xlo + xhi), 0.5 * (ylo + yhi)
    half_w, half_h = 0.5 * (right - left) / scale, 0.5 * (bottom - top) / scale
    return (_Axis(cx - half_w, cx + half_w, left, right, pad=False),
            _Axis(cy - half_h, cy + half_h, bottom, top, pad=False))


def _points(xs, ys):
    return " ".join(f"{x:.3f},{y:.3f}" for x, y in zip(xs.tolist(), ys.tolist()))


def _esc(text):
    return (text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
            .replace('"', "&quot;"))


def render_svg(traj, spec, width=640, height=480):
    """Render a trajectory as a self-contained SVG 1.1 document.

    Returns:
        bytes
    """
    if traj is None or len(traj) == 0:
        raise EmptyTrajectory("nothing to draw")
    margin_l, margin_r, margin_t, margin_b = 60, 20, 40, 50
    box = (margin_l, margin_t, width - margin_r, height - margin_b)
    left, top, right, bottom = box
    parts = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<rect x="{left}" y="{top}" width="{right - left}" height="{bottom - top}" '
        'fill="none" stroke="#cccccc" stroke-width="1"/>',
    ]
    if spec.title:
        parts.append(f'<text x="{width / 2:.1f}" y="{margin_t / 2 + 5:.1f}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="14">{_esc(spec.title)}</text>')

    if spec.kind == "timeseries_overlay":
        ys_all = np.concatenate([traj.component(c) for c in spec.components])
        xaxis = _Axis(float(traj.times[0]), float(traj.times[-1]), left, right)
        yaxis = _Axis(float(ys_all.min()), float(ys_all.max()), bottom, top)
        xlabel, ylabel = spec.xlabel or "t", spec.ylabel or ",".join(spec.components)
        px = xaxis(traj.times)
        for c in spec.components:
            py = yaxis(traj.component(c))
            parts.append(f'<polyline class="{c}" fill="none" stroke="{COMPONENT_COLORS[c]}" '
                         f'stroke-width="1" points="{_points(px, py)}"/>')
    elif spec.kind == "phase_portrait_2d":
        cx, cy = spec.components
        xs, ys = traj.component(cx), traj.component(cy)
        xaxis, yaxis = _equal_aspect(xs, ys, box)
        xlabel, ylabel = spec.xlabel or cx, spec.ylabel or cy
        parts.append(f'<polyline class="{cx}{cy}" fill="none" stroke="#000000" stroke-width="1" '
                     f'points="{_points(xaxis(xs), yaxis(ys))}"/>')
    else:
        cx, cy = spec.projection
        (cz,) = [c for c in spec.components if c not in spec.projection]
        xs, ys, zs = traj.component(cx), traj.component(cy), traj.component(cz)
        xaxis, yaxis = _equal_aspect(xs, ys, box)
        xlabel, ylabel = spec.xlabel or cx, spec.ylabel or cy
        parts.append(_depth_polylines(xaxis(xs), yaxis(ys), zs))

    parts.append(f'<text x="{(left + right) / 2:.1f}" y="{height - 12}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12">{_esc(xlabel)}</text>')
    parts.append(f'<text x="16" y="{(top + bottom) / 2:.1f}" text-anchor="middle" '
                 f'font-family="sans-serif" font-size="12" '
                 f'transform="rotate(-90 16 {(top + bottom) / 2:.1f})">{_esc(ylabel)}</text>')
    parts.append("</svg>")
    return _as_bytes("\n".join(parts) + "\n")


def _depth_polylines(px, py, z, levels=10):
    """Split the path into runs of equal opacity; higher ``z`` is more opaque."""
    zlo, zhi = float(np.min(z)), float(np.max(z))
    if zhi > zlo:
        level = np.minimum((levels * (z - zlo) / (zhi - zlo)).astype(int), levels - 1)
    else:
        level = np.full(z.shape, levels - 1)
    out = ['<g class="projection" fill="none" stroke="#000000" stroke-width="1">']
    start = 0
    n = px.size
    for i in range(1, n + 1):
        if i == n or level[i] != level[start]:
            # runs share their boundary vertex so the path stays connected
            end = min(i + 1, n)
            opacity = 0.15 + 0.85 * (level[start] + 1) / levels
            seg = slice(start, end)
            out.append(f'<polyline stroke-opacity="{opacity:.3f}" points="{_points(px[seg], py[seg])}"/>')
            start = i
    out.append("</g>")
    return "\n".join(out)
