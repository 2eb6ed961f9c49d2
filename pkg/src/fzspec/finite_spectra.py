"""Finite sections A_n^{b'} and the sets sigma_n, sigma_{n,eps}.

``sigma_n`` is the union of the spectra of all 2**(n-1) finite sections.
The characteristic polynomial of a finite section satisfies
``q_{k+1} = lam q_k - b_k q_{k-1}`` with integer coefficients, so the sweep
computes those polynomials exactly, groups patterns that share one, and
solves each distinct polynomial once through :func:`linalg.distinct_roots`.
Many sections are defective (for example ``b' = (+,-)`` gives ``lam**3``),
which is why a dense eigensolver is not used here.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import ComplexGrid, SpectralPointCloud, dedup, sign_string
from .linalg import distinct_roots, smallest_singular_values_batch

log = logging.getLogger(__name__)

__all__ = [
    "CapExceeded",
    "SIGMA_CAP",
    "DEDUP_TOL",
    "PatternId",
    "build_finite_matrix",
    "enumerate_patterns",
    "gray_chunks",
    "charpoly_batch",
    "sigma_n",
    "sigma_n_eps",
]

SIGMA_CAP = 20
DEDUP_TOL = 1e-9


class CapExceeded(ValueError):
    """A request would enumerate more patterns than the configured cap allows."""


@dataclass(frozen=True, order=True)
class PatternId:
    """Sign pattern ``b' = (b_1, ..., b_{n-1})``; bit k-1 set means ``b_k = +1``."""

    n: int
    bits: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if not 0 <= self.bits < 1 << (self.n - 1):
            raise ValueError(f"bits must lie in [0, 2**{self.n - 1})")

    @property
    def signs(self) -> tuple[int, ...]:
        return tuple(1 if (self.bits >> k) & 1 else -1 for k in range(self.n - 1))

    @classmethod
    def from_signs(cls, signs) -> PatternId:
        signs = tuple(signs)
        bits = sum(1 << k for k, s in enumerate(signs) if s > 0)
        return cls(len(signs) + 1, bits)

    def __str__(self) -> str:
        return f"n={self.n}:{sign_string(self.signs)}"


def build_finite_matrix(p: PatternId) -> np.ndarray:
    """Zero diagonal, ones above it, ``b_1..b_{n-1}`` below it."""
    a = np.zeros((p.n, p.n))
    if p.n > 1:
        k = np.arange(p.n - 1)
        a[k, k + 1] = 1.0
        a[k + 1, k] = p.signs
    return a


def _check_cap(n: int, cap: int) -> None:
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > cap:
        raise CapExceeded(
            f"n={n} exceeds the cap {cap}: the sweep would visit 2**{n - 1} = "
            f"{1 << (n - 1)} matrices of size {n}x{n}"
        )


def enumerate_patterns(n: int, cap: int = SIGMA_CAP) -> Iterator[PatternId]:
    """All 2**(n-1) patterns in reflected-binary Gray order: the i-th id has
    ``bits = i ^ (i >> 1)``, so consecutive ids differ in one sign."""
    _check_cap(n, cap)
    for i in range(1 << (n - 1)):
        yield PatternId(n, i ^ (i >> 1))


def gray_chunks(n: int, chunks: int) -> list[tuple[int, int]]:
    """Split the Gray-order index range [0, 2**(n-1)) into contiguous pieces."""
    total = 1 << (n - 1)
    chunks = max(1, min(chunks, total))
    edges = [total * k // chunks for k in range(chunks + 1)]
    return [(edges[k], edges[k + 1]) for k in range(chunks)]


def _gray_bits(start: int, stop: int) -> np.ndarray:
    i = np.arange(start, stop, dtype=np.int64)
    return i ^ (i >> 1)


def charpoly_batch(n: int, bits: np.ndarray) -> np.ndarray:
    """Characteristic polynomials ``det(lam I - A_n^{b'})`` for many patterns.

    Returns an int64 array of shape (len(bits), n+1), constant term first.
    """
    bits = np.asarray(bits, dtype=np.int64)
    P = bits.shape[0]
    q_prev = np.zeros((P, n + 1), dtype=np.int64)
    q_prev[:, 0] = 1
    q = np.zeros((P, n + 1), dtype=np.int64)
    q[:, 1] = 1
    for k in range(1, n):
        b = np.where((bits >> (k - 1)) & 1, 1, -1)
        nxt = np.zeros_like(q)
        nxt[:, 1:] = q[:, :-1]
        nxt -= b[:, None] * q_prev
        q_prev, q = q, nxt
    return q


def _sigma_chunk(n: int, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    """Distinct eigenvalues of the sections with Gray indices [start, stop),
    each with the smallest pattern bits that produce it."""
    bits = _gray_bits(start, stop)
    polys = charpoly_batch(n, bits)
    uniq, inverse = np.unique(polys, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    witness = np.full(len(uniq), np.iinfo(np.int64).max)
    np.minimum.at(witness, inverse, bits)
    pts, labels = [], []
    for row, w in zip(uniq, witness):
        z = distinct_roots(row.tolist())
        pts.append(z)
        labels.append(np.full(z.shape, w))
    return np.concatenate(pts), np.concatenate(labels)


def _run_chunks(func, args: list[tuple], workers: int) -> list:
    if workers <= 1 or len(args) <= 1:
        return [func(*a) for a in args]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(func, *a) for a in args]
        return [f.result() for f in futures]


def sigma_n(n: int, workers: int = 1, cap: int = SIGMA_CAP, tol: float = DEDUP_TOL) -> SpectralPointCloud:
    """Union of eigenvalues of all n-by-n finite sections, deduplicated at ``tol``.

    Points are labelled with one witnessing pattern. The pattern space is
    cut into contiguous Gray-order chunks (one per worker); the result is
    the same for any worker count.
    """
    _check_cap(n, cap)
    chunks = gray_chunks(n, workers)
    parts = _run_chunks(_sigma_chunk, [(n, a, b) for a, b in chunks], workers)
    pts = np.concatenate([p for p, _ in parts])
    labels = np.concatenate([lab for _, lab in parts])
    meta = {"n": n, "pattern_length": n - 1}
    return dedup(SpectralPointCloud(pts, labels, ("pattern",), meta), tol)


def _smin_field_chunk(n: int, start: int, stop: int, nodes: np.ndarray, eps: float | None) -> np.ndarray:
    """Running minimum of smin(A - lam I) over the patterns of one chunk.

    With ``eps`` set, nodes whose running value is already below ``eps``
    are skipped; their value is then only an upper bound below ``eps``.
    """
    flat = nodes.ravel()
    best = np.full(flat.shape, np.inf)
    eye = np.eye(n)
    for bits in _gray_bits(start, stop):
        a = build_finite_matrix(PatternId(n, int(bits)))
        todo = np.flatnonzero(best >= eps) if eps is not None else np.arange(flat.size)
        for lo in range(0, todo.size, 4096):
            idx = todo[lo : lo + 4096]
            stack = a[None, :, :] - flat[idx, None, None] * eye
            best[idx] = np.minimum(best[idx], smallest_singular_values_batch(stack))
    return best.reshape(nodes.shape)


def sigma_n_eps(
    n: int,
    eps: float,
    grid: ComplexGrid,
    workers: int = 1,
    cap: int = SIGMA_CAP,
    early_exit: bool = False,
) -> ComplexGrid:
    """Field ``min_b' smin(A_n^{b'} - lam I)`` on the grid nodes.

    The eps-pseudospectral union sigma_{n,eps} is the sublevel set
    ``{value < eps}`` (see :meth:`ComplexGrid.mask`). ``early_exit`` stops
    refining nodes once they are below ``eps``; the mask is unchanged but
    such node values become upper bounds.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    _check_cap(n, cap)
    nodes = grid.nodes()
    stop_at = eps if early_exit else None
    chunks = gray_chunks(n, workers)
    parts = _run_chunks(_smin_field_chunk, [(n, a, b, nodes, stop_at) for a, b in chunks], workers)
    return grid.with_values(np.minimum.reduce(parts))
