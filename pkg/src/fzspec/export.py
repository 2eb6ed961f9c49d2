"""File formats for grids and figures.

PGM (binary, P5)::

    b"P5\\n{nx} {ny}\\n255\\n" followed by nx*ny bytes, row-major.

The first image row is the grid row with the *largest* imaginary part, so
the picture has the usual orientation. A node value ``v`` becomes the byte
``round(255 * min(max(v, 0), vmax) / vmax)`` (round half to even, as numpy
does); non-finite values map to 255. ``vmax`` defaults to the largest
finite value, or 1 if there is none.

Grid CSV::

    re,im,value
    <re>,<im>,<value>      one line per node, im ascending, re fastest

with every number written by ``format(x, ".17g")``.

SVG is deliberately plain: a fixed 800x800 viewport over [-2.2, 2.2]^2,
one ``<g>`` per layer, points as circles and curves as polylines.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ComplexGrid

__all__ = ["pgm_bytes", "write_pgm", "read_pgm", "grid_csv", "write_grid_csv", "Layer", "svg_text", "write_svg"]


def pgm_bytes(grid: ComplexGrid, vmax: float | None = None, values: np.ndarray | None = None) -> bytes:
    v = np.asarray(grid.values if values is None else values, dtype=float)
    if v.shape != (grid.ny, grid.nx):
        raise ValueError("grid carries no values of the right shape")
    finite = np.isfinite(v)
    if vmax is None:
        vmax = float(v[finite].max()) if finite.any() else 1.0
    if vmax <= 0:
        vmax = 1.0
    scaled = np.where(finite, np.clip(v, 0.0, vmax) / vmax, 1.0)
    img = np.rint(255 * scaled).astype(np.uint8)[::-1]
    return f"P5\n{grid.nx} {grid.ny}\n255\n".encode("ascii") + img.tobytes()


def write_pgm(grid: ComplexGrid, path, vmax: float | None = None, values: np.ndarray | None = None) -> Path:
    path = Path(path)
    path.write_bytes(pgm_bytes(grid, vmax, values))
    return path


def read_pgm(path) -> np.ndarray:
    """Image rows top to bottom as a uint8 array; only the files written here."""
    data = Path(path).read_bytes()
    magic, dims, maxval, rest = data.split(b"\n", 3)
    if magic != b"P5" or maxval != b"255":
        raise ValueError("not an 8-bit binary PGM")
    nx, ny = (int(t) for t in dims.split())
    return np.frombuffer(rest, dtype=np.uint8, count=nx * ny).reshape(ny, nx)


def grid_csv(grid: ComplexGrid, values: np.ndarray | None = None) -> str:
    v = np.asarray(grid.values if values is None else values, dtype=float)
    nodes = grid.nodes()
    lines = ["re,im,value"]
    for z, x in zip(nodes.ravel(), v.ravel()):
        lines.append(f"{z.real + 0.0:.17g},{z.imag + 0.0:.17g},{x:.17g}")
    return "\n".join(lines) + "\n"


def write_grid_csv(grid: ComplexGrid, path, values: np.ndarray | None = None) -> Path:
    path = Path(path)
    path.write_text(grid_csv(grid, values))
    return path


# -- SVG -----------------------------------------------------------------------

VIEW = 2.2
SIZE = 800


@dataclass
class Layer:
    name: str
    points: np.ndarray  # complex; for polylines each entry of ``curves`` is one line
    color: str = "black"
    curves: list | None = None
    radius: float = 1.2


def _px(z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = SIZE / (2 * VIEW)
    return (z.real + VIEW) * s, (VIEW - z.imag) * s


def svg_text(layers: list[Layer], title: str = "") -> str:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">',
        f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>',
    ]
    if title:
        out.append(f"<title>{title}</title>")
    for layer in layers:
        out.append(f'<g id="{layer.name}" data-count="{len(layer.points)}">')
        if layer.curves is not None:
            for curve in layer.curves:
                x, y = _px(np.asarray(curve, dtype=np.complex128))
                pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(x, y))
                out.append(f'<polyline points="{pts}" fill="none" stroke="{layer.color}" stroke-width="1"/>')
        else:
            x, y = _px(np.asarray(layer.points, dtype=np.complex128))
            for a, b in zip(x, y):
                out.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="{layer.radius}" fill="{layer.color}"/>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(layers: list[Layer], path, title: str = "") -> Path:
    path = Path(path)
    path.write_text(svg_text(layers, title))
    return path
