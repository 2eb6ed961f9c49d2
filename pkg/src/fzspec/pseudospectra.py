"""Resolvent-norm grids, the inflation constant eps_n, and numerical ranges.

The eps-pseudospectrum of a matrix ``m`` is the set where
``smin(m - lam I) < eps``. On a grid this is a sublevel set of the field
computed by :func:`resolvent_norm_grid`; :func:`pseudospectrum_mask` adds
every node within one node spacing of an eigenvalue, so eigenvalues that
fall between nodes are never lost for small eps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .core import ComplexGrid
from .linalg import as_matrix, eigenvalues, hermitian_support, smallest_singular_values_batch

__all__ = [
    "EpsNResult",
    "eps_n",
    "eps_table",
    "format_eps_table",
    "resolvent_norm_grid",
    "pseudospectrum_mask",
    "matrix_pseudospectrum",
    "NumericalRange",
    "numerical_range_boundary",
    "square_support",
]

_BLOCK = 4096


@dataclass(frozen=True)
class EpsNResult:
    n: int
    theta_n: float
    eps_n: float
    bracket: tuple[float, float]

    @property
    def upper_bound(self) -> float:
        """2 pi / (n+1), which eps_n stays below."""
        return 2 * math.pi / (self.n + 1)


def _eps_f(theta: float, n: int) -> float:
    return 2 * math.cos((n + 1) * theta) - math.cos((n - 1) * theta)


def eps_n(n: int, xtol: float = 1e-14) -> EpsNResult:
    """theta_n solves 2cos((n+1)t) = cos((n-1)t) in (pi/(2(n+3)), pi/(2(n+1)));
    eps_n = 4 sin(theta_n).

    Bisection on the bracket. A bracket without a sign change means the
    root is not where it must be, so that raises instead of guessing.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    lo, hi = math.pi / (2 * (n + 3)), math.pi / (2 * (n + 1))
    flo, fhi = _eps_f(lo, n), _eps_f(hi, n)
    if not flo * fhi < 0:
        raise ArithmeticError(f"no sign change for n={n} on [{lo!r}, {hi!r}]: f = {flo!r}, {fhi!r}")
    theta = bisect(_eps_f, lo, hi, args=(n,), xtol=xtol, maxiter=200)
    return EpsNResult(n, theta, 4 * math.sin(theta), (lo, hi))


def eps_table(n_max: int, n_min: int = 1) -> list[EpsNResult]:
    return [eps_n(n) for n in range(n_min, n_max + 1)]


def format_eps_table(rows: list[EpsNResult]) -> str:
    """Columns n, theta_n, eps_n, 2pi/(n+1); 15 decimals, right aligned."""
    head = ("n", "theta_n", "eps_n", "2pi/(n+1)")
    body = [(str(r.n), f"{r.theta_n:.15f}", f"{r.eps_n:.15f}", f"{r.upper_bound:.15f}") for r in rows]
    widths = [max(len(x) for x in col) for col in zip(head, *body)]
    lines = ["  ".join(s.rjust(w) for s, w in zip(line, widths)) for line in (head, *body)]
    return "\n".join(lines) + "\n"


# -- resolvent norm ------------------------------------------------------------


def _smin_rows(m: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    flat = nodes.ravel()
    out = np.empty(flat.shape)
    eye = np.eye(m.shape[0])
    for lo in range(0, flat.size, _BLOCK):
        z = flat[lo : lo + _BLOCK]
        out[lo : lo + _BLOCK] = smallest_singular_values_batch(m[None, :, :] - z[:, None, None] * eye)
    return out.reshape(nodes.shape)


def resolvent_norm_grid(m, grid: ComplexGrid, workers: int = 1) -> ComplexGrid:
    """Field ``smin(m - lam I) = 1/||(m - lam I)^{-1}||`` at every grid node.

    Rows of the grid are split across ``workers`` processes; the values do
    not depend on the split.
    """
    from .finite_spectra import _run_chunks

    a = np.asarray(as_matrix(m), dtype=np.complex128)
    nodes = grid.nodes()
    edges = np.linspace(0, grid.ny, max(1, min(workers, grid.ny)) + 1).astype(int)
    parts = _run_chunks(_smin_rows, [(a, nodes[lo:hi]) for lo, hi in zip(edges[:-1], edges[1:])], workers)
    return grid.with_values(np.vstack(parts))


def pseudospectrum_mask(grid: ComplexGrid, eps: float, eigs=None) -> np.ndarray:
    """``{value < eps}`` together with every node within ``grid.spacing`` of a
    point of ``eigs``. Pass the eigenvalues (or any spectral points known to
    lie in the set) as ``eigs``; the spacing used is ``grid.spacing``."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    mask = grid.mask(eps)
    if eigs is not None and len(eigs):
        from scipy.spatial import cKDTree

        nodes = grid.nodes()
        tree = cKDTree(np.column_stack([nodes.real.ravel(), nodes.imag.ravel()]))
        z = np.asarray(eigs, dtype=np.complex128).ravel()
        hits = tree.query_ball_point(np.column_stack([z.real, z.imag]), grid.spacing * (1 + 1e-12))
        flat = mask.ravel().copy()
        for h in hits:
            flat[h] = True
        mask = flat.reshape(mask.shape)
    return mask


def matrix_pseudospectrum(m, grid: ComplexGrid, eps: float, workers: int = 1) -> tuple[ComplexGrid, np.ndarray]:
    field = resolvent_norm_grid(m, grid, workers)
    return field, pseudospectrum_mask(field, eps, eigenvalues(m))


# -- numerical range -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class NumericalRange:
    """Support values of W(m) at ``theta_k = 2 pi k / angles`` and the polygon
    cut out by the corresponding supporting half-planes.

    The polygon is circumscribed: it contains the closure of W(m) and hence
    every eigenvalue. With ``angles`` a multiple of 8 the directions include
    the face normals of the square |x|+|y| <= 2, so a matrix whose support
    values stay below the square's has its polygon inside the square.
    """

    theta: np.ndarray
    support: np.ndarray
    vertices: np.ndarray

    def contains(self, z, tol: float = 1e-9) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        proj = (np.exp(-1j * self.theta) * z[..., None]).real
        return np.all(proj <= self.support + tol, axis=-1)


def numerical_range_boundary(m, angles: int = 64) -> NumericalRange:
    if angles < 8:
        raise ValueError("angles must be at least 8")
    theta = 2 * np.pi * np.arange(angles) / angles
    h = np.array([hermitian_support(m, t) for t in theta])
    # vertex k: intersection of the supporting lines at theta_k and theta_{k+1}
    t1, t2 = theta, np.roll(theta, -1)
    h1, h2 = h, np.roll(h, -1)
    det = np.sin(t2 - t1)
    x = (h1 * np.sin(t2) - h2 * np.sin(t1)) / det
    y = (h2 * np.cos(t1) - h1 * np.cos(t2)) / det
    return NumericalRange(theta, h, x + 1j * y)


def square_support(theta) -> np.ndarray:
    """Support function of |x|+|y| <= 2."""
    theta = np.asarray(theta, dtype=float)
    return 2 * np.maximum(np.abs(np.cos(theta)), np.abs(np.sin(theta)))
