"""Spectra of n-periodic operators: pi_n via Floquet symbols.

For a period ``b = (b_1, ..., b_n)`` the Bloch ansatz ``u_{k+n} = e^{i phi} u_k``
turns the bi-infinite eigenproblem into the n-by-n symbol ``M(phi)``. Its
characteristic polynomial is

    det(lam I - M(phi)) = D_b(lam) - e^{i phi} - beta e^{-i phi},

where ``D_b`` is the trace of the monodromy matrix
``T_n ... T_1``, ``T_k = [[lam, -b_k], [1, 0]]``, and ``beta = b_1 ... b_n``.
``D_b`` has integer coefficients, so all patterns sharing ``(beta, D_b)`` -
in particular all cyclic rotations of a pattern - have identical spectra
for every phase. The default sweep solves each distinct ``(beta, D_b)``
once, tracking the n roots along the phase with Aberth iterations and
switching to the exact square-free solver whenever the right-hand side
``w = e^{i phi} + beta e^{-i phi}`` is a Gaussian integer (phi a multiple
of pi/2). Multiple roots occur at such phases, and there the tracked
roots would only be accurate to about sqrt(eps).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import SpectralPointCloud, dedup, sign_string
from .finite_spectra import DEDUP_TOL, CapExceeded, _run_chunks
from .linalg import aberth_roots, distinct_roots, eigenvalues_batch

__all__ = [
    "PI_CAP",
    "FloquetSymbol",
    "floquet_symbol_matrix",
    "trace_polynomial_batch",
    "phase_schedule",
    "pi_n",
    "pi_n_branches",
    "SegmentSet",
    "pi_1_analytic",
    "pi_2_analytic",
]

PI_CAP = 14


@dataclass(frozen=True)
class FloquetSymbol:
    """Period ``signs = (b_1, ..., b_n)`` at Bloch phase ``phi``."""

    signs: tuple[int, ...]
    phi: float

    def __post_init__(self):
        s = tuple(int(x) for x in self.signs)
        if not s:
            raise ValueError("period must be at least 1")
        if any(x not in (-1, 1) for x in s):
            raise ValueError("signs must be -1 or +1")
        object.__setattr__(self, "signs", s)

    @property
    def n(self) -> int:
        return len(self.signs)

    def __str__(self) -> str:
        return f"{sign_string(self.signs)}@phi={self.phi:.6g}"


def floquet_symbol_matrix(s: FloquetSymbol) -> np.ndarray:
    """Zero diagonal, ones above, ``b_k`` below (rows k > 1); corners
    ``M[1,n] += b_1 e^{-i phi}`` and ``M[n,1] += e^{i phi}`` (1-based)."""
    n = s.n
    m = np.zeros((n, n), dtype=np.complex128)
    k = np.arange(n - 1)
    m[k, k + 1] = 1.0
    m[k + 1, k] = s.signs[1:]
    m[0, n - 1] += s.signs[0] * cmath.exp(-1j * s.phi)
    m[n - 1, 0] += cmath.exp(1j * s.phi)
    return m


def _pattern_signs(bits: np.ndarray, n: int) -> np.ndarray:
    """(P, n) array of b_k; bit k-1 set means b_k = +1."""
    return np.where((bits[:, None] >> np.arange(n)) & 1, 1, -1).astype(np.int64)


def trace_polynomial_batch(n: int, bits: np.ndarray) -> np.ndarray:
    """Monodromy traces ``D_b`` for many period-n patterns, int64 (P, n+1)."""
    bits = np.asarray(bits, dtype=np.int64)
    b = _pattern_signs(bits, n)
    P = bits.shape[0]
    m00 = np.zeros((P, n + 1), np.int64)
    m01 = np.zeros_like(m00)
    m10 = np.zeros_like(m00)
    m11 = np.zeros_like(m00)
    m00[:, 0] = 1
    m11[:, 0] = 1
    for k in range(n):
        bk = b[:, k, None]
        n00 = -bk * m10
        n00[:, 1:] += m00[:, :-1]
        n01 = -bk * m11
        n01[:, 1:] += m01[:, :-1]
        m10, m11 = m00, m01
        m00, m01 = n00, n01
    return m00 + m11


def _quarter_exact(k: int, N: int) -> tuple[float, float] | None:
    """(cos, sin) of 2 pi k / N when that angle is a multiple of pi/2."""
    if (4 * k) % N:
        return None
    return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[(4 * k // N) % 4]


def phase_schedule(N: int, beta: int) -> list[tuple[int, complex]]:
    """Phase indices ``k`` (phi = 2 pi k / N) giving distinct right-hand sides
    ``w = e^{i phi} + beta e^{-i phi}``, ordered so ``w`` moves continuously.

    beta = +1: ``w = 2 cos phi`` and k, N-k coincide, so k = 0..N//2.
    beta = -1: ``w = 2i sin phi`` and (for even N) k, N/2-k coincide, so
    k runs from -N//4 to N//4 (reported mod N).
    """
    if beta == 1:
        ks = range(0, N // 2 + 1)
    elif N % 2 == 0:
        ks = range(-(N // 4), N // 4 + 1)
    else:
        ks = range(0, N)
    out = []
    for k in ks:
        kk = k % N
        exact = _quarter_exact(kk, N)
        if exact is None:
            phi = 2.0 * math.pi * kk / N
            cs, sn = math.cos(phi), math.sin(phi)
        else:
            cs, sn = exact
        w = complex(2.0 * cs, 0.0) if beta == 1 else complex(0.0, 2.0 * sn)
        out.append((kk, w))
    return out


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Roots of monic polynomials (P, d+1) low-to-high via companion eigenvalues."""
    P, d1 = coeffs.shape
    d = d1 - 1
    comp = np.zeros((P, d, d), dtype=np.complex128)
    comp[:, 0, :] = -coeffs[:, d - 1 :: -1]
    if d > 1:
        idx = np.arange(d - 1)
        comp[:, idx + 1, idx] = 1.0
    return eigenvalues_batch(comp)


def _match(prev: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Reorder ``new`` so that it follows ``prev`` as closely as possible."""
    cost = np.abs(prev[:, None] - new[None, :])
    _, cols = linear_sum_assignment(cost)
    return new[cols]


def _exact_roots(poly: np.ndarray, w: complex) -> np.ndarray:
    """Distinct roots of ``poly - w`` for a Gaussian integer ``w = a + bi``.

    For b != 0 the integer polynomial ``(poly - a)**2 + b**2`` has the roots
    of ``poly - w`` and of ``poly - conj(w)``; it goes through the exact
    square-free solver and each root is assigned to the factor it nearly
    annihilates (the two factors differ by 2bi there).
    """
    a, b = int(w.real), int(w.imag)
    p = np.array(poly, dtype=np.int64)
    p[0] -= a
    if b == 0:
        return distinct_roots(p.tolist())
    q = np.convolve(p, p)
    q[0] += b * b
    z = distinct_roots(q.tolist())
    val = np.polyval(p[::-1].astype(float), z)
    return z[np.abs(val - 1j * b) < np.abs(val + 1j * b)]


def _track(polys: np.ndarray, schedule: list[tuple[int, complex]], keep_tracks: bool):
    """Follow the roots of ``polys - w`` along the schedule.

    Returns (points, poly_index, phase_index) arrays and, if requested, the
    tracked roots as an array (len(schedule), P, d).
    """
    P, d1 = polys.shape
    d = d1 - 1
    base = polys.astype(np.complex128)
    pts, owner, phase = [], [], []
    tracks = np.empty((len(schedule), P, d), dtype=np.complex128) if keep_tracks else None
    z = None
    for step, (k, w) in enumerate(schedule):
        c = base.copy()
        c[:, 0] -= w
        if z is None:
            z = _companion_roots(c)
        else:
            z_new, ok = aberth_roots(c, z)
            if not ok.all():
                bad = np.flatnonzero(~ok)
                fresh = _companion_roots(c[bad])
                for r, row in enumerate(bad):
                    z_new[row] = _match(z[row], fresh[r])
            z = z_new
        if keep_tracks:
            tracks[step] = z
        if w.real == round(w.real) and w.imag == round(w.imag):
            for r in range(P):
                ex = _exact_roots(polys[r], w)
                pts.append(ex)
                owner.append(np.full(ex.shape, r))
                phase.append(np.full(ex.shape, k))
        else:
            pts.append(z.ravel())
            owner.append(np.repeat(np.arange(P), d))
            phase.append(np.full(P * d, k))
    return np.concatenate(pts), np.concatenate(owner), np.concatenate(phase), tracks


def _distinct_symbols(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distinct (beta, D_b) over all 2**n patterns: (beta, polys, witness bits)."""
    bits = np.arange(1 << n, dtype=np.int64)
    polys = trace_polynomial_batch(n, bits)
    beta = np.prod(_pattern_signs(bits, n), axis=1)
    key = np.column_stack([beta, polys])
    uniq, inverse = np.unique(key, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    witness = np.full(len(uniq), np.iinfo(np.int64).max)
    np.minimum.at(witness, inverse, bits)
    return uniq[:, 0], uniq[:, 1:], witness


def _pi_chunk(polys: np.ndarray, beta: int, witness: np.ndarray, N: int):
    pts, owner, phase, _ = _track(polys, phase_schedule(N, beta), keep_tracks=False)
    return pts, witness[owner], phase


def _check_pi(n: int, phi_samples: int, cap: int) -> None:
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > cap:
        raise CapExceeded(
            f"n={n} exceeds the cap {cap}: the sweep would visit 2**{n} = {1 << n} "
            f"periodic patterns at {phi_samples} phases each"
        )
    if phi_samples < 16:
        raise ValueError("phi_samples must be at least 16")


def _pi_symbol(n: int, phi_samples: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Literal route: eigenvalues of M(phi) for every pattern and every phase."""
    pts, pat, ph = [], [], []
    phis = 2.0 * np.pi * np.arange(phi_samples) / phi_samples
    for bits in range(1 << n):
        signs = tuple(1 if (bits >> k) & 1 else -1 for k in range(n))
        stack = np.stack([floquet_symbol_matrix(FloquetSymbol(signs, float(phi))) for phi in phis])
        ev = eigenvalues_batch(stack)
        pts.append(ev.ravel())
        pat.append(np.full(ev.size, bits))
        ph.append(np.repeat(np.arange(phi_samples), n))
    return np.concatenate(pts), np.concatenate(pat), np.concatenate(ph)


def pi_n(
    n: int,
    phi_samples: int = 512,
    workers: int = 1,
    cap: int = PI_CAP,
    method: str = "trace",
    deduplicate: bool = True,
    tol: float = DEDUP_TOL,
) -> SpectralPointCloud:
    """Union over all n-periodic sign sequences and phases ``2 pi k / phi_samples``
    of the Floquet spectra.

    ``method="trace"`` (default) solves one polynomial per distinct
    ``(beta, D_b)`` and visits only phases with distinct right-hand sides;
    ``method="symbol"`` computes eigenvalues of ``M(phi)`` for every pattern
    and every phase. Points carry (pattern bits, phase index) labels.
    """
    _check_pi(n, phi_samples, cap)
    if method == "symbol":
        pts, pat, ph = _pi_symbol(n, phi_samples)
    elif method == "trace":
        beta, polys, witness = _distinct_symbols(n)
        args = []
        for sgn in (1, -1):
            sel = np.flatnonzero(beta == sgn)
            for part in np.array_split(sel, max(1, workers)):
                if part.size:
                    args.append((polys[part], sgn, witness[part], phi_samples))
        parts = _run_chunks(_pi_chunk, args, workers)
        pts = np.concatenate([p[0] for p in parts])
        pat = np.concatenate([p[1] for p in parts])
        ph = np.concatenate([p[2] for p in parts])
    else:
        raise ValueError(f"unknown method {method!r}")
    cloud = SpectralPointCloud(
        pts, np.column_stack([pat, ph]), ("pattern", "phase"), {"n": n, "pattern_length": n, "phi_samples": phi_samples}
    )
    return dedup(cloud, tol) if deduplicate else cloud


def pi_n_branches(n: int, phi_samples: int = 512, cap: int = PI_CAP) -> list[tuple[int, np.ndarray]]:
    """Eigenvalue curves for drawing: one (pattern bits, polyline) per distinct
    symbol and root branch, over the phase schedule."""
    _check_pi(n, phi_samples, cap)
    beta, polys, witness = _distinct_symbols(n)
    out = []
    for sgn in (1, -1):
        sel = np.flatnonzero(beta == sgn)
        if not sel.size:
            continue
        *_, tracks = _track(polys[sel], phase_schedule(phi_samples, sgn), keep_tracks=True)
        for r, row in enumerate(sel):
            for branch in range(tracks.shape[2]):
                out.append((int(witness[row]), tracks[:, r, branch].copy()))
    return out


# -- closed forms --------------------------------------------------------------


@dataclass(frozen=True)
class SegmentSet:
    """Finite union of closed straight segments in the complex plane."""

    segments: tuple[tuple[complex, complex], ...]

    @property
    def endpoints(self) -> set[complex]:
        return {z for seg in self.segments for z in seg}

    def distance(self, z) -> np.ndarray:
        """Euclidean distance from each ``z`` to the union."""
        z = np.asarray(z, dtype=np.complex128)
        best = np.full(z.shape, np.inf)
        for a, b in self.segments:
            ab = b - a
            t = np.clip(((z - a) * np.conj(ab)).real / abs(ab) ** 2, 0.0, 1.0)
            best = np.minimum(best, np.abs(z - (a + t * ab)))
        return best

    def contains(self, z, tol: float = 1e-12) -> np.ndarray:
        return self.distance(z) <= tol

    def sample(self, per_segment: int) -> np.ndarray:
        t = np.linspace(0.0, 1.0, per_segment)
        return np.concatenate([a + t * (b - a) for a, b in self.segments])

    def hausdorff_to(self, points, per_segment: int = 200001) -> float:
        """Hausdorff distance between the union and a finite point set.

        The segment-to-points half is evaluated on ``per_segment`` samples
        per segment, so it is exact to within half the sample spacing.
        """
        from .core import one_sided_distance

        pts = np.asarray(points, dtype=np.complex128).ravel()
        there = float(self.distance(pts).max())
        back = one_sided_distance(self.sample(per_segment), pts)
        return max(there, back)


def pi_1_analytic() -> SegmentSet:
    """The real segment [-2, 2] and the imaginary segment [-2i, 2i]."""
    return SegmentSet(((-2 + 0j, 2 + 0j), (-2j, 2j)))


def pi_2_analytic() -> SegmentSet:
    """pi_1 together with the diagonals y = x and y = -x for |x| <= 1."""
    return SegmentSet(pi_1_analytic().segments + ((-1 - 1j, 1 + 1j), (-1 + 1j, 1 - 1j)))
