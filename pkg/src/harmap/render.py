"""Disk-image rendering: radial segments and concentric circles under a map,
emitted as a deterministic SVG subset plus a CSV sidecar."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np

from .errors import RadiusError
from .families import map_values
from .numerics import RADIUS_CAP, TWO_PI

DEFAULT_RAYS = 24
DEFAULT_CIRCLES = 12
DEFAULT_PTS = 400
DEFAULT_MAX_R = 0.999

# captions of the two reproduced figure batches
FIGURE_ONE_LAMBDAS = (1.0 / 5.0, 1.0 / 2.0, 5.0 / 9.0, 9.0 / 10.0)
FIGURE_TWO_PARAMS = (
    (3.0, 0.5),
    (2.5, 1.0),
    (2.1, 1.5),
    (2.75, 1.0),
    (2.05, 1.9),
    (2.05, 0.1),
    (3.0, 0.1),
    (3.85, 0.1),
)


@dataclass(frozen=True)
class CurveFamily:
    """Sampled images of rays and circles; rays all start at f(0) = 0."""

    rays: Tuple[np.ndarray, ...]
    circles: Tuple[np.ndarray, ...]
    ray_params: Tuple[np.ndarray, ...]
    circle_params: Tuple[np.ndarray, ...]

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        allpts = np.concatenate(self.rays + self.circles) if (self.rays or self.circles) else np.zeros(1, complex)
        return (
            float(np.min(allpts.real)),
            float(np.min(allpts.imag)),
            float(np.max(allpts.real)),
            float(np.max(allpts.imag)),
        )

    @property
    def vertex_count(self) -> int:
        return sum(len(c) for c in self.rays) + sum(len(c) for c in self.circles)


def sample_curves(
    obj,
    ray_count=DEFAULT_RAYS,
    circle_count=DEFAULT_CIRCLES,
    max_r=DEFAULT_MAX_R,
    pts_per_curve=DEFAULT_PTS,
) -> CurveFamily:
    """Images of ``ray_count`` equispaced radial segments and ``circle_count``
    concentric circles of radius up to ``max_r``, each with ``pts_per_curve``
    vertices."""
    if max_r > RADIUS_CAP:
        raise RadiusError(f"max_r must stay <= {RADIUS_CAP!r}")
    radii = np.linspace(0.0, max_r, pts_per_curve)
    angles_c = np.linspace(0.0, TWO_PI, pts_per_curve)

    blocks = []
    for j in range(ray_count):
        blocks.append(radii * np.exp(1j * TWO_PI * j / ray_count))
    circle_radii = [(k + 1) * max_r / circle_count for k in range(circle_count)]
    for rc in circle_radii:
        blocks.append(rc * np.exp(1j * angles_c))

    flat = np.concatenate(blocks) if blocks else np.zeros(0, complex)
    # chunked evaluation keeps the quadrature's nodes-by-points matrices small
    chunks = [
        np.asarray(map_values(obj, part), dtype=complex)
        for part in np.array_split(flat, max(1, len(flat) // 2048))
    ]
    images = np.concatenate(chunks) if chunks else np.zeros(0, complex)

    rays, circles = [], []
    pos = 0
    for _ in range(ray_count):
        rays.append(images[pos : pos + pts_per_curve])
        pos += pts_per_curve
    for _ in range(circle_count):
        circles.append(images[pos : pos + pts_per_curve])
        pos += pts_per_curve
    return CurveFamily(
        tuple(rays),
        tuple(circles),
        tuple(radii.copy() for _ in range(ray_count)),
        tuple(angles_c.copy() for _ in range(circle_count)),
    )


def _fmt(x: float) -> str:
    # fixed-precision text keeps the emitted bytes deterministic
    s = f"{x:.3f}"
    return "0.000" if s == "-0.000" else s


def emit_svg(curves: CurveFamily, path, width_px=800, stroke=1.0) -> Path:
    """Write an SVG 1.1 subset (one path per polyline, viewBox fitted to the
    bounds with a 5% margin); identical inputs produce identical bytes."""
    path = Path(path)
    x0, y0, x1, y1 = curves.bounds
    w = max(x1 - x0, 1e-9)
    h = max(y1 - y0, 1e-9)
    margin = 0.05 * max(w, h)
    x0, y0, x1, y1 = x0 - margin, y0 - margin, x1 + margin, y1 + margin
    scale = width_px / (x1 - x0)
    height_px = (y1 - y0) * scale

    def to_px(pts):
        xs = (pts.real - x0) * scale
        ys = (y1 - pts.imag) * scale
        return xs, ys

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{_fmt(width_px)}" height="{_fmt(height_px)}" '
        f'viewBox="0 0 {_fmt(width_px)} {_fmt(height_px)}">',
    ]
    for group, color in ((curves.rays, "#27496d"), (curves.circles, "#8c3b4a")):
        for pts in group:
            xs, ys = to_px(pts)
            d = "M" + "L".join(f"{_fmt(x)} {_fmt(y)}" for x, y in zip(xs, ys))
            lines.append(
                f'<path d="{d}" fill="none" stroke="{color}" stroke-width="{_fmt(stroke)}"/>'
            )
    lines.append("</svg>")
    data = "\n".join(lines).encode("utf-8") + b"\n"
    path.write_bytes(data)
    return path


def emit_csv(curves: CurveFamily, path) -> Path:
    """CSV sidecar (curve_id, t, re, im) for external plotting."""
    path = Path(path)
    rows = ["curve_id,t,re,im"]
    for j, (pts, params) in enumerate(zip(curves.rays, curves.ray_params)):
        for t, p in zip(params, pts):
            rows.append(f"ray-{j:02d},{t:.12g},{p.real:.12g},{p.imag:.12g}")
    for j, (pts, params) in enumerate(zip(curves.circles, curves.circle_params)):
        for t, p in zip(params, pts):
            rows.append(f"circle-{j:02d},{t:.12g},{p.real:.12g},{p.imag:.12g}")
    path.write_text("\n".join(rows) + "\n", encoding="utf-8")
    return path


def vertex_hash(curves: CurveFamily) -> str:
    """SHA-256 over the vertex coordinates, for figure regression pinning."""
    hasher = hashlib.sha256()
    for pts in curves.rays + curves.circles:
        hasher.update(np.ascontiguousarray(pts).tobytes())
    return hasher.hexdigest()


def svg_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
