"""Cross-module checks: inclusions, symmetries, the square bound, the unit disk.

Every check returns a :class:`CheckReport` whose ``passed`` flag is exactly
``metric <= tol``; the tolerance is part of the report so nothing is
judged against a hidden threshold. :func:`verification_suite` bundles the
checks that the ``verify`` command runs.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import ComplexGrid, SpectralPointCloud, hausdorff_distance, point_distances
from .export import Layer, write_svg
from .finite_spectra import sigma_n
from .periodic_spectra import pi_1_analytic, pi_n
from .pseudospectra import eps_n
from .sierpinski import (
    REFERENCE_GLYPHS,
    CoefficientRangeError,
    block_self_similarity,
    coefficient_table,
    eigenvector,
    forced_sign_consistency,
    format_table,
    mirror_check,
    pascal_parity_correspondence,
    residual_sup,
    sierpinski_signs,
)

__all__ = [
    "CheckReport",
    "inclusion_sigma_in_pi",
    "symmetry_report",
    "square_bound_report",
    "modulus_bound_report",
    "disk_inclusion_report",
    "table_report",
    "OverlayResult",
    "conjecture_overlay",
    "verification_suite",
]

REFERENCE_SIGNS = (1, 1, -1, -1, 1, -1, 1, -1, 1, 1, -1, 1, -1, -1, 1, -1)


def _fmt_point(z) -> str:
    z = complex(z)
    return f"{z.real + 0.0:.12g}{z.imag + 0.0:+.12g}i"


@dataclass
class CheckReport:
    name: str
    passed: bool
    metric: float
    tol: float
    witness: str = "-"
    seconds: float = 0.0

    @classmethod
    def judge(cls, name: str, metric: float, tol: float, witness: str = "-") -> CheckReport:
        metric = float(metric)
        return cls(name, bool(metric <= tol), metric, float(tol), witness.replace(" ", "") or "-")

    def line(self) -> str:
        """``name pass metric tol witness`` on one line."""
        return f"{self.name} {'pass' if self.passed else 'FAIL'} {self.metric:.6e} {self.tol:.1e} {self.witness}"


def inclusion_sigma_in_pi(n: int, phi_samples: int = 1024, tol: float = 1e-3, workers: int = 1) -> CheckReport:
    """sup over sigma_n of the distance to the sampled pi_{2n+2}."""
    sig = sigma_n(n, workers=workers)
    per = pi_n(2 * n + 2, phi_samples, workers=workers, deduplicate=False)
    d = point_distances(sig, per)
    k = int(np.argmax(d))
    return CheckReport.judge(f"inclusion_sigma{n}_in_pi{2 * n + 2}", d[k], tol, _fmt_point(sig.points[k]))


_MAPS = {
    "conj": np.conj,
    "-conj": lambda z: -np.conj(z),
    "neg": np.negative,
    "rot90": lambda z: 1j * z,
}


def symmetry_report(cloud: SpectralPointCloud, tol: float, name: str = "symmetry") -> CheckReport:
    """Worst Hausdorff distance between the cloud and its image under
    reflection in either axis, the point reflection, and the quarter turn."""
    if len(cloud) == 0:
        raise ValueError("empty cloud")
    worst, witness = -1.0, "-"
    for label, f in _MAPS.items():
        d = hausdorff_distance(cloud.map(f), cloud)
        if d > worst:
            worst, witness = d, label
    return CheckReport.judge(name, worst, tol, witness)


def square_bound_report(cloud: SpectralPointCloud, tol: float = 1e-8, name: str = "square_bound") -> CheckReport:
    z = cloud.points
    excess = np.abs(z.real) + np.abs(z.imag) - 2.0
    k = int(np.argmax(excess))
    return CheckReport.judge(name, excess[k], tol, _fmt_point(z[k]))


def modulus_bound_report(cloud: SpectralPointCloud, radius: float = 2.0, tol: float = 1e-8, name: str = "modulus_bound") -> CheckReport:
    z = cloud.points
    excess = np.abs(z) - radius
    k = int(np.argmax(excess))
    return CheckReport.judge(name, excess[k], tol, _fmt_point(z[k]))


def disk_inclusion_report(
    radius: float = 0.95, radial_steps: int = 20, angular_steps: int = 20, m: int = 4096, tol: float = 1e-9
) -> CheckReport:
    """Bounded eigenvector at every node of a polar grid inside the unit disk.

    Nodes are lam = 0 and ``r e^{i t}`` with r = radius*k/radial_steps
    (k = 1..radial_steps) and t = 2 pi j / angular_steps. At each node both
    ``residual_sup <= tol`` and ``sup |u_i| <= (1 + tol)/(1 - |lam|)`` must
    hold; the metric is the larger of the residual and
    ``sup|u| (1 - |lam|) - 1``.
    """
    if not 0 < radius < 1:
        raise ValueError("radius must lie in (0, 1)")
    r = radius * np.arange(1, radial_steps + 1) / radial_steps
    t = 2 * np.pi * np.arange(angular_steps) / angular_steps
    lam = np.concatenate([[0j], (r[:, None] * np.exp(1j * t[None, :])).ravel()])
    u = eigenvector(lam, m)
    res = residual_sup(lam, u)
    growth = u.sup() * (1 - np.abs(lam)) - 1.0
    metric = np.maximum(res, growth)
    k = int(np.argmax(metric))
    return CheckReport.judge(f"unit_disk_r{radius:g}_m{m}", metric[k], tol, _fmt_point(lam[k]))


def table_report(N: int = 16, signs=None) -> CheckReport:
    """Glyph-by-glyph comparison with the reference table; the metric is the
    number of differing rows, the witness the first of them."""
    try:
        text = format_table(coefficient_table(N, signs))
    except CoefficientRangeError as exc:
        return CheckReport("table_glyphs", False, math.inf, 0.0, str(exc).replace(" ", "_"))
    ref = REFERENCE_GLYPHS.splitlines()[:N]
    got = text.splitlines()
    bad = [i + 1 for i, (a, b) in enumerate(zip(got, ref)) if a != b]
    bad += list(range(len(ref) + 1, len(got) + 1)) if len(got) > len(ref) else []
    return CheckReport.judge("table_glyphs", len(bad), 0, f"row={bad[0]}" if bad else "-")


def _consistency(rep, name: str) -> CheckReport:
    w = f"(i,j)={rep.violations[0]}" if rep.violations else f"checked={len(rep.checked)}"
    return CheckReport.judge(name, len(rep.violations), 0, w)


def _table_range(N: int, signs) -> CheckReport:
    """Entries in {-1,0,1}, zero when i+j is odd, ones on the diagonal."""
    try:
        t = coefficient_table(N, signs)
    except CoefficientRangeError as exc:
        return CheckReport("table_range_parity", False, math.inf, 0.0, str(exc).replace(" ", "_"))
    p = t.p.astype(np.int64)
    i, j = np.indices(p.shape) + 1
    bad = ((i + j) % 2 == 1) & (p != 0)
    bad |= (j == i) & (p != 1)
    bad |= (j > i) & (p != 0)
    where = np.argwhere(bad)
    w = f"(i,j)=({where[0][0] + 1},{where[0][1] + 1})" if len(where) else f"rows={N}"
    return CheckReport.judge("table_range_parity", int(bad.sum()), 0, w)


# -- overlay -------------------------------------------------------------------


@dataclass
class OverlayResult:
    layers: dict[str, np.ndarray]
    files: list[Path] = field(default_factory=list)


def _square_outline(k: int = 101) -> np.ndarray:
    corners = np.array([2, 2j, -2, -2j, 2], dtype=np.complex128)
    t = np.linspace(0, 1, k)[:-1]
    return np.concatenate([a + t * (b - a) for a, b in zip(corners[:-1], corners[1:])])


def conjecture_overlay(
    n_sigma: int,
    n_pi: int,
    out_dir,
    grid: ComplexGrid | None = None,
    phi_samples: int = 512,
    workers: int = 1,
    fmt: str = "both",
) -> OverlayResult:
    """sigma_{n_sigma}, pi_{n_pi}, the unit circle and the square |x|+|y| = 2
    as separate layers, for looking at, not for judging.

    With ``grid`` given, the clouds are cropped to its rectangle. Writes one
    CSV per layer and/or a single SVG into ``out_dir``.
    """
    out_dir = Path(out_dir)
    if not out_dir.is_dir():
        raise FileNotFoundError(f"output directory {out_dir} does not exist")
    layers = {
        "sigma": sigma_n(n_sigma, workers=workers).points,
        "pi": pi_n(n_pi, phi_samples, workers=workers).points,
        "unit_circle": np.exp(2j * np.pi * np.arange(720) / 720),
        "square": _square_outline(),
    }
    if grid is not None:
        for key in ("sigma", "pi"):
            z = layers[key]
            keep = (z.real >= grid.re_min) & (z.real <= grid.re_max) & (z.imag >= grid.im_min) & (z.imag <= grid.im_max)
            layers[key] = z[keep]
    res = OverlayResult(layers)
    if fmt in ("csv", "both"):
        for key, z in layers.items():
            path = out_dir / f"overlay_{key}.csv"
            SpectralPointCloud(z).to_csv(path, with_labels=False)
            res.files.append(path)
    if fmt in ("svg", "both"):
        colors = {"sigma": "black", "pi": "#1f77b4", "unit_circle": "#d62728", "square": "#2ca02c"}
        svg_layers = [
            Layer("pi", layers["pi"], colors["pi"], radius=0.6),
            Layer("sigma", layers["sigma"], colors["sigma"], radius=1.0),
            Layer("unit_circle", layers["unit_circle"], colors["unit_circle"], curves=[np.append(layers["unit_circle"], 1)]),
            Layer("square", layers["square"], colors["square"], curves=[np.append(layers["square"], 2)]),
        ]
        res.files.append(write_svg(svg_layers, out_dir / "overlay.svg", f"sigma_{n_sigma} and pi_{n_pi}"))
    return res


# -- the bundled suite ---------------------------------------------------------


def _timed(fn, *args, **kw) -> CheckReport:
    t0 = time.perf_counter()
    rep = fn(*args, **kw)
    rep.seconds = time.perf_counter() - t0
    return rep


def _sign_column(signs) -> CheckReport:
    got = tuple(int(s) for s in (sierpinski_signs(1, 17) if signs is None else np.asarray(signs)[:16]))
    bad = [i + 1 for i, (a, b) in enumerate(zip(got, REFERENCE_SIGNS)) if a != b]
    return CheckReport.judge("sign_column", len(bad), 0, f"i={bad[0]}" if bad else "-")


def _eps_checks(n_max: int = 50) -> CheckReport:
    worst, wit = -math.inf, "-"
    prev = math.inf
    for n in range(1, n_max + 1):
        r = eps_n(n)
        lo, hi = r.bracket
        gap = max(r.eps_n - r.upper_bound, lo - r.theta_n, r.theta_n - hi, r.eps_n - prev)
        if gap > worst:
            worst, wit = gap, f"n={n}"
        prev = r.eps_n
    return CheckReport.judge("eps_n_bounds", max(worst, abs(eps_n(1).eps_n - 2.0) - 1e-12), 0.0, wit)


def _exact_sigma(n: int, expected) -> CheckReport:
    got = sigma_n(n)
    d = hausdorff_distance(got, SpectralPointCloud(np.asarray(expected, dtype=np.complex128)))
    return CheckReport.judge(f"sigma{n}_exact", d, 1e-10, f"count={len(got)}")


def verification_suite(quick: bool = False, signs=None, workers: int = 1) -> list[CheckReport]:
    """The checks behind ``verify``. ``signs`` replaces the sign sequence in
    the table checks (mutation testing); ``quick`` trims the sweep sizes."""
    N = 128 if quick else 512
    t_sig = None
    reps = [
        _timed(table_report, 16, signs),
        _timed(_sign_column, signs),
        _timed(_table_range, N, signs),
    ]
    try:
        t_sig = coefficient_table(N, signs)
    except CoefficientRangeError:
        pass
    if t_sig is not None:
        reps.append(_timed(lambda: _consistency(forced_sign_consistency(t_sig), "forced_sign")))
        reps.append(_timed(lambda: _consistency(block_self_similarity(t_sig), "block_self_similarity")))
    reps.append(_timed(lambda: _consistency(pascal_parity_correspondence(64), "pascal_parity")))
    for lam in (0j, 0.3 + 0.4j):
        mr = mirror_check(lam, 512, 1e-10)
        reps.append(CheckReport.judge(f"mirror_{_fmt_point(lam)}", mr.worst, mr.tol, f"i={mr.worst_index}"))
    reps.append(_timed(disk_inclusion_report, 0.95, 20, 20, 1024 if quick else 4096, 1e-9))
    reps.append(_timed(_eps_checks))
    reps.append(_timed(_exact_sigma, 2, [1, -1, 1j, -1j]))
    reps.append(_timed(_exact_sigma, 3, [0, 2**0.5, -(2**0.5), 1j * 2**0.5, -1j * 2**0.5]))
    for n in range(1, 7 if quick else 11):
        s = sigma_n(n, workers=workers)
        reps.append(_timed(symmetry_report, s, 1e-8, f"symmetry_sigma{n}"))
        reps.append(_timed(square_bound_report, s, 1e-8, f"square_bound_sigma{n}"))
    for n in range(1, 4 if quick else 5):
        reps.append(_timed(inclusion_sigma_in_pi, n, 1024, 1e-3, workers))
    p1 = pi_n(1, 1024)
    reps.append(CheckReport.judge("pi1_closed_form", pi_1_analytic().hausdorff_to(p1.points), 2e-2))
    return reps
