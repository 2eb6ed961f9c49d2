"""Shared value types, point-cloud algebra and set distances.

Complex points are stored as ``complex128`` numpy arrays; the CSV form
writes them as ``re,im`` pairs.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "SignSequence",
    "IntPolynomial",
    "SpectralPointCloud",
    "ComplexGrid",
    "poly_eval",
    "dedup",
    "merge_clouds",
    "hausdorff_distance",
    "one_sided_distance",
    "point_distances",
    "sign_string",
]


def sign_string(signs: Iterable[int]) -> str:
    return "".join("+" if s > 0 else "-" for s in signs)


class SignSequence:
    """Integer-indexed map into {-1, +1}, optionally periodic.

    ``entries`` may be a mapping ``k -> sign`` or, for periodic sequences,
    a sequence holding one period starting at index ``offset``.
    """

    def __init__(
        self,
        entries: Mapping[int, int] | Sequence[int],
        period: int | None = None,
        offset: int = 1,
    ):
        if isinstance(entries, Mapping):
            data = {int(k): int(v) for k, v in entries.items()}
        else:
            data = {offset + k: int(v) for k, v in enumerate(entries)}
        bad = [k for k, v in data.items() if v not in (-1, 1)]
        if bad:
            raise ValueError(f"sign values must be -1 or +1 (bad indices {bad[:5]})")
        if period is not None:
            if period < 1:
                raise ValueError("period must be a positive integer")
            reps: dict[int, int] = {}
            for k, v in data.items():
                r = (k - offset) % period + offset
                if reps.setdefault(r, v) != v:
                    raise ValueError(f"entries contradict period {period} at index {k}")
            if len(reps) != period:
                raise ValueError(f"a period-{period} sequence needs all {period} residues")
            data = reps
        self._data = data
        self.period = period
        self.offset = offset

    def __getitem__(self, k: int) -> int:
        if self.period is not None:
            k = (k - self.offset) % self.period + self.offset
        try:
            return self._data[k]
        except KeyError:
            raise IndexError(f"sign sequence has no entry at index {k}") from None

    def window(self, start: int, stop: int) -> tuple[int, ...]:
        """Entries for ``start <= k < stop``."""
        return tuple(self[k] for k in range(start, stop))

    def __repr__(self) -> str:
        if self.period is not None:
            body = sign_string(self.window(self.offset, self.offset + self.period))
            return f"SignSequence(period={self.period}, {body!r})"
        return f"SignSequence({len(self._data)} entries)"


@dataclass(frozen=True)
class IntPolynomial:
    """Integer polynomial; ``coeffs[k]`` is the coefficient of ``lam**k``."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @property
    def degree(self) -> int:
        """Degree of the polynomial, -1 for the zero polynomial."""
        for k in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[k]:
                return k
        return -1

    def __call__(self, lam):
        return poly_eval(self, lam)


def poly_eval(p: IntPolynomial | Sequence[int], lam):
    """Horner evaluation; works for scalars and numpy arrays of ``lam``."""
    coeffs = p.coeffs if isinstance(p, IntPolynomial) else tuple(p)
    acc = 0 * lam
    for c in reversed(coeffs):
        acc = acc * lam + c
    return acc


@dataclass(frozen=True, eq=False)
class SpectralPointCloud:
    """Finite multiset of complex points with optional integer provenance.

    ``labels`` has one row per point and one column per entry of
    ``label_names`` (for example the pattern bits and the phase index).
    ``meta`` carries what is needed to render labels as text.
    """

    points: np.ndarray
    labels: np.ndarray | None = None
    label_names: tuple[str, ...] = ()
    meta: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=np.complex128).ravel())
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int64)
            if lab.ndim == 1:
                lab = lab[:, None]
            if lab.shape[0] != pts.shape[0]:
                raise ValueError("labels must have one row per point")
            if len(self.label_names) != lab.shape[1]:
                raise ValueError("label_names must name every label column")
            lab = np.ascontiguousarray(lab)
            lab.setflags(write=False)
            object.__setattr__(self, "labels", lab)
        object.__setattr__(self, "meta", dict(self.meta))

    def __len__(self) -> int:
        return self.points.shape[0]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, float]], **kw) -> SpectralPointCloud:
        pts = [complex(re, im) for re, im in pairs]
        return cls(np.array(pts, dtype=np.complex128), **kw)

    def map(self, f: Callable[[np.ndarray], np.ndarray]) -> SpectralPointCloud:
        """Apply ``f`` to the points, keeping provenance."""
        return SpectralPointCloud(f(self.points), self.labels, self.label_names, self.meta)

    def subset(self, keep) -> SpectralPointCloud:
        keep = np.asarray(keep)
        labels = None if self.labels is None else self.labels[keep]
        return SpectralPointCloud(self.points[keep], labels, self.label_names, self.meta)

    def label_text(self, k: int) -> str:
        if self.labels is None:
            return ""
        parts = []
        for name, value in zip(self.label_names, self.labels[k]):
            if name == "pattern" and "n" in self.meta:
                width = self.meta.get("pattern_length", self.meta["n"])
                parts.append(sign_string(1 if (int(value) >> j) & 1 else -1 for j in range(width)))
            elif name == "phase" and "phi_samples" in self.meta:
                parts.append(f"phi={int(value)}/{self.meta['phi_samples']}")
            else:
                parts.append(f"{name}={int(value)}")
        return ";".join(parts)

    def to_csv(self, path: str | Path | None = None, with_labels: bool = True) -> str:
        """Serialise as ``re,im[,label]`` with 17 significant digits."""
        buf = io.StringIO()
        write_label = with_labels and self.labels is not None
        buf.write("re,im,label\n" if write_label else "re,im\n")
        # adding 0.0 maps -0.0 to 0.0 so output does not depend on sign of zero
        re = self.points.real + 0.0
        im = self.points.imag + 0.0
        for k in range(len(self)):
            line = f"{re[k]:.17g},{im[k]:.17g}"
            if write_label:
                line += "," + self.label_text(k)
            buf.write(line + "\n")
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, path: str | Path) -> SpectralPointCloud:
        return cls.parse_csv(Path(path).read_text())

    @classmethod
    def parse_csv(cls, text: str) -> SpectralPointCloud:
        """Read the ``re,im[,label]`` format back; labels are dropped."""
        rows = list(csv.reader(io.StringIO(text)))
        if not rows or rows[0][:2] != ["re", "im"]:
            raise ValueError("missing 're,im' header")
        pts = [complex(float(r[0]), float(r[1])) for r in rows[1:] if r]
        return cls(np.array(pts, dtype=np.complex128))


@dataclass(frozen=True, eq=False)
class ComplexGrid:
    """Axis-aligned rectangle of the complex plane sampled on an nx-by-ny lattice.

    ``values`` (if present) has shape ``(ny, nx)``: row ``r`` corresponds to
    imaginary part ``im_min + r*dy`` and column ``c`` to real part
    ``re_min + c*dx``.
    """

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    nx: int
    ny: int
    values: np.ndarray | None = None

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("grid bounds must satisfy min < max")
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2 samples per axis")
        if self.values is not None:
            v = np.asarray(self.values, dtype=float)
            if v.shape != (self.ny, self.nx):
                raise ValueError(f"values must have shape {(self.ny, self.nx)}, got {v.shape}")
            v = v.copy()
            v.setflags(write=False)
            object.__setattr__(self, "values", v)

    @classmethod
    def square(cls, half_width: float = 2.2, size: int = 512, center: complex = 0) -> ComplexGrid:
        c = complex(center)
        return cls(c.real - half_width, c.real + half_width, c.imag - half_width, c.imag + half_width, size, size)

    @property
    def dx(self) -> float:
        return (self.re_max - self.re_min) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return (self.im_max - self.im_min) / (self.ny - 1)

    @property
    def spacing(self) -> float:
        """Largest distance from any point of the rectangle to its nearest node."""
        return 0.5 * float(np.hypot(self.dx, self.dy))

    def nodes(self) -> np.ndarray:
        re = np.linspace(self.re_min, self.re_max, self.nx)
        im = np.linspace(self.im_min, self.im_max, self.ny)
        return re[None, :] + 1j * im[:, None]

    def with_values(self, values: np.ndarray) -> ComplexGrid:
        return ComplexGrid(self.re_min, self.re_max, self.im_min, self.im_max, self.nx, self.ny, values)

    def mask(self, eps: float) -> np.ndarray:
        """Sublevel set ``values < eps``."""
        if self.values is None:
            raise ValueError("grid carries no values")
        return self.values < eps


def _as_cloud(c) -> SpectralPointCloud:
    return c if isinstance(c, SpectralPointCloud) else SpectralPointCloud(np.asarray(c))


def _xy(points: np.ndarray) -> np.ndarray:
    return np.column_stack([points.real, points.imag])


def dedup(cloud: SpectralPointCloud, tol: float) -> SpectralPointCloud:
    """Greedy merge in lexicographic (re, im, labels) order.

    A point survives unless it lies within ``tol`` of an earlier survivor,
    so survivors are pairwise more than ``tol`` apart and every input
    point is within ``tol`` of a survivor. The output is sorted.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    cloud = _as_cloud(cloud)
    pts = cloud.points
    keys = [] if cloud.labels is None else [cloud.labels[:, k] for k in range(cloud.labels.shape[1] - 1, -1, -1)]
    order = np.lexsort((*keys, pts.imag, pts.real))
    pts = pts[order]
    labels = None if cloud.labels is None else cloud.labels[order]

    # exact repeats first: cheap and usually the bulk of the merging
    if len(pts) > 1:
        fresh = np.ones(len(pts), dtype=bool)
        fresh[1:] = pts[1:] != pts[:-1]
        pts = pts[fresh]
        labels = None if labels is None else labels[fresh]

    if tol > 0 and len(pts) > 1:
        pairs = cKDTree(_xy(pts)).query_pairs(tol, output_type="ndarray")
        if len(pairs):
            pairs.sort(axis=1)
            pairs = pairs[np.lexsort((pairs[:, 1], pairs[:, 0]))]
            keep = np.ones(len(pts), dtype=bool)
            starts = np.searchsorted(pairs[:, 0], np.arange(len(pts) + 1))
            for i in np.unique(pairs[:, 0]):
                if keep[i]:
                    keep[pairs[starts[i] : starts[i + 1], 1]] = False
            pts = pts[keep]
            labels = None if labels is None else labels[keep]
    return SpectralPointCloud(pts, labels, cloud.label_names, cloud.meta)


def merge_clouds(clouds: Sequence[SpectralPointCloud], tol: float) -> SpectralPointCloud:
    """Concatenate and dedup; the result does not depend on the order of ``clouds``."""
    clouds = [_as_cloud(c) for c in clouds]
    if not clouds:
        raise ValueError("nothing to merge")
    first = clouds[0]
    pts = np.concatenate([c.points for c in clouds])
    labels = None
    if all(c.labels is not None for c in clouds):
        labels = np.concatenate([c.labels for c in clouds])
    meta: dict[str, int] = {}
    for c in clouds:
        meta.update(c.meta)
    names = first.label_names if labels is not None else ()
    return dedup(SpectralPointCloud(pts, labels, names, meta), tol)


def point_distances(a, b) -> np.ndarray:
    """Distance from every point of ``a`` to the nearest point of ``b``."""
    a, b = _as_cloud(a), _as_cloud(b)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("point clouds must be non-empty")
    d, _ = cKDTree(_xy(b.points)).query(_xy(a.points))
    return d


def one_sided_distance(a, b) -> float:
    """sup over x in a of dist(x, b)."""
    return float(point_distances(a, b).max())


def hausdorff_distance(a, b) -> float:
    return max(one_sided_distance(a, b), one_sided_distance(b, a))
