"""Dense kernels for small non-normal matrices.

Two eigenvalue routes live here:

* :func:`eigenvalues` - Householder reduction to Hessenberg form followed
  by single-shift complex QR iteration with deflation. Backward stable,
  so defective eigenvalues come back with the usual ``eps**(1/k)``
  forward error.
* :func:`distinct_roots` - roots of an *integer* polynomial after exact
  square-free reduction. Every remaining root is simple, so the computed
  values are accurate to a few ulps even where the matrix whose
  characteristic polynomial this is has Jordan blocks.

The finite sections and Floquet symbols of this package have integer
characteristic polynomials at the sample points that matter, so the sweeps
use the second route.
"""

from __future__ import annotations

import cmath
import math
from typing import Sequence

import numpy as np

__all__ = [
    "ConvergenceError",
    "MAX_DIM",
    "as_matrix",
    "hessenberg",
    "eigenvalues",
    "eigenvalues_batch",
    "singular_values",
    "smallest_singular_value",
    "smallest_singular_values_batch",
    "hermitian_support",
    "poly_gcd",
    "squarefree_part",
    "distinct_roots",
    "aberth_roots",
]

MAX_DIM = 64
_EPS = np.finfo(float).eps


class ConvergenceError(ArithmeticError):
    """An iterative kernel exhausted its iteration budget."""


def as_matrix(m, max_dim: int = MAX_DIM) -> np.ndarray:
    a = np.asarray(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
    if a.shape[0] > max_dim:
        raise ValueError(f"matrix dimension {a.shape[0]} exceeds the cap {max_dim}")
    return a


# -- eigenvalues ---------------------------------------------------------------


def hessenberg(m) -> np.ndarray:
    """Unitary similarity to upper Hessenberg form (Householder)."""
    h = np.array(as_matrix(m), dtype=np.complex128)
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k].copy()
        alpha = np.linalg.norm(x)
        if alpha == 0.0:
            continue
        phase = x[0] / abs(x[0]) if x[0] != 0 else 1.0
        v = x
        v[0] += phase * alpha
        v /= np.linalg.norm(v)
        h[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, k:])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        h[k + 2 :, k] = 0.0
    return h


def _wilkinson_shift(a: complex, b: complex, c: complex, d: complex) -> complex:
    """Eigenvalue of [[a, b], [c, d]] closer to d."""
    tr2 = 0.5 * (a + d)
    disc = cmath.sqrt(0.25 * (a - d) ** 2 + b * c)
    mu1, mu2 = tr2 + disc, tr2 - disc
    return mu1 if abs(mu1 - d) <= abs(mu2 - d) else mu2


def _givens(a: complex, b: complex) -> tuple[complex, complex, float]:
    r = math.hypot(abs(a), abs(b))
    if r == 0.0:
        return 1.0, 0.0, 0.0
    return a / r, b / r, r


def eigenvalues(m, max_sweeps: int | None = None, max_dim: int = MAX_DIM) -> np.ndarray:
    """All eigenvalues (with multiplicity) of a general complex matrix.

    Raises :class:`ConvergenceError` after ``max_sweeps`` QR sweeps
    (default ``100 * n``) without full deflation.
    """
    h = hessenberg(as_matrix(m, max_dim))
    n = h.shape[0]
    if max_sweeps is None:
        max_sweeps = 100 * n
    out = np.empty(n, dtype=np.complex128)
    hi = n - 1
    sweeps = 0
    stalled = 0
    scale = max(np.abs(h).max(), np.finfo(float).tiny)
    while hi >= 0:
        if hi == 0:
            out[0] = h[0, 0]
            break
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if s == 0.0:
                s = scale
            if abs(h[lo, lo - 1]) <= _EPS * s:
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            out[hi] = h[hi, hi]
            hi -= 1
            stalled = 0
            continue
        if sweeps >= max_sweeps:
            raise ConvergenceError(f"QR iteration did not converge within {max_sweeps} sweeps (n={n})")
        sweeps += 1
        stalled += 1
        if stalled % 11 == 10:
            # exceptional shift breaks cycles such as the cyclic permutation
            mu = h[hi, hi] + 0.75 * abs(h[hi, hi - 1]) * cmath.exp(1j * stalled)
        else:
            mu = _wilkinson_shift(h[hi - 1, hi - 1], h[hi - 1, hi], h[hi, hi - 1], h[hi, hi])
        _qr_sweep(h, lo, hi, mu)
    return out


def _qr_sweep(h: np.ndarray, lo: int, hi: int, mu: complex) -> None:
    """One explicitly shifted QR step on the active block h[lo:hi+1, lo:hi+1]."""
    blk = h[lo : hi + 1, lo : hi + 1]
    k = blk.shape[0]
    idx = np.arange(k)
    blk[idx, idx] -= mu
    rots = []
    for j in range(k - 1):
        c, s, _ = _givens(blk[j, j], blk[j + 1, j])
        g = np.array([[np.conj(c), np.conj(s)], [-s, c]])
        blk[j : j + 2, j:] = g @ blk[j : j + 2, j:]
        blk[j + 1, j] = 0.0
        rots.append(g)
    for j, g in enumerate(rots):
        hi_row = min(j + 2, k - 1) + 1
        blk[:hi_row, j : j + 2] = blk[:hi_row, j : j + 2] @ g.conj().T
    blk[idx, idx] += mu


def eigenvalues_batch(stack) -> np.ndarray:
    """LAPACK eigenvalues for a stack of matrices, shape (..., n, n) -> (..., n)."""
    try:
        return np.linalg.eigvals(np.asarray(stack))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc


# -- singular values and field of values ---------------------------------------


def singular_values(m) -> np.ndarray:
    try:
        return np.linalg.svd(as_matrix(m), compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc


def smallest_singular_value(m) -> float:
    return float(singular_values(m)[-1])


def smallest_singular_values_batch(stack) -> np.ndarray:
    try:
        return np.linalg.svd(np.asarray(stack), compute_uv=False)[..., -1]
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc


def hermitian_support(m, theta: float) -> float:
    """Support function of the numerical range of ``m`` in direction ``theta``:
    ``max Re(exp(-i theta) z)`` over z in W(m)."""
    a = np.asarray(as_matrix(m), dtype=np.complex128)
    rot = np.exp(-1j * theta) * a
    herm = 0.5 * (rot + rot.conj().T)
    try:
        return float(np.linalg.eigvalsh(herm)[-1])
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(str(exc)) from exc


# -- exact integer polynomials -------------------------------------------------
# Coefficient lists run from the constant term upwards.


def _trim(p: list[int]) -> list[int]:
    while p and p[-1] == 0:
        p.pop()
    return p


def _content(p: Sequence[int]) -> int:
    g = 0
    for c in p:
        g = math.gcd(g, c)
    return g


def _primitive(p: list[int]) -> list[int]:
    g = _content(p)
    if g == 0:
        return p
    if p[-1] < 0:
        g = -g
    return [c // g for c in p]


def _pseudo_rem(a: list[int], b: list[int]) -> list[int]:
    a = list(a)
    lb = b[-1]
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        la = a[-1]
        shift = len(a) - 1 - db
        a = [lb * c for c in a]
        for k, bc in enumerate(b):
            a[k + shift] -= la * bc
        _trim(a)
    return a


def poly_gcd(a: Sequence[int], b: Sequence[int]) -> list[int]:
    """Primitive gcd of two integer polynomials (positive leading coefficient)."""
    a = _primitive(_trim(list(a)))
    b = _primitive(_trim(list(b)))
    if not a:
        return b
    while b:
        a, b = b, _primitive(_pseudo_rem(a, b))
    return a


def _exact_div(a: Sequence[int], b: Sequence[int]) -> list[int]:
    a = _trim(list(a))
    q = [0] * (len(a) - len(b) + 1)
    lb = b[-1]
    for k in range(len(q) - 1, -1, -1):
        c, r = divmod(a[k + len(b) - 1], lb)
        if r:
            raise ArithmeticError("polynomial division is not exact")
        q[k] = c
        for t, bc in enumerate(b):
            a[k + t] -= c * bc
    if any(a):
        raise ArithmeticError("polynomial division is not exact")
    return q


def squarefree_part(p: Sequence[int]) -> list[int]:
    """Product of the distinct irreducible factors of ``p`` (up to sign)."""
    p = _trim([int(c) for c in p])
    if len(p) <= 2:
        return _primitive(p)
    dp = [k * p[k] for k in range(1, len(p))]
    g = poly_gcd(p, dp)
    if len(g) <= 1:
        return _primitive(p)
    return _primitive(_exact_div(p, g))


def _newton_polish(coeffs: np.ndarray, z: np.ndarray, steps: int = 3) -> np.ndarray:
    """Newton steps on a polynomial given low-to-high; keeps a step only if it
    reduces the residual."""
    rev = coeffs[::-1]
    drev = (np.arange(len(coeffs))[1:] * coeffs[1:])[::-1]
    for _ in range(steps):
        f = np.polyval(rev, z)
        df = np.polyval(drev, z)
        ok = df != 0
        cand = np.where(ok, z - np.where(ok, f / np.where(ok, df, 1), 0), z)
        better = np.abs(np.polyval(rev, cand)) < np.abs(f)
        z = np.where(better, cand, z)
    return z


def distinct_roots(p: Sequence[int]) -> np.ndarray:
    """Distinct complex roots of an integer polynomial.

    ``p`` is reduced to its square-free part in exact arithmetic; powers of
    ``lam`` are split off, and if what remains is even it is solved in
    ``lam**2``. Roots of the reduced simple polynomial come from the
    companion matrix and are polished by Newton's method.
    """
    p = _trim([int(c) for c in p])
    if not p:
        raise ValueError("the zero polynomial has no finite root set")
    lead_zero = 0
    while p[lead_zero] == 0:
        lead_zero += 1
    p = p[lead_zero:]
    roots: list[np.ndarray] = [np.zeros(1, dtype=np.complex128)] if lead_zero else []
    if len(p) > 1:
        even = all(c == 0 for c in p[1::2])
        q = p[::2] if even else p
        sf = squarefree_part(q)
        c = np.array(sf, dtype=float)
        z = np.roots(c[::-1]).astype(np.complex128)
        z = _newton_polish(c, z)
        if even:
            # q(0) != 0 because powers of lam were split off, so no root is zero
            s = np.sqrt(z)
            z = np.concatenate([s, -s])
        roots.append(z)
    if not roots:
        return np.zeros(0, dtype=np.complex128)
    return np.concatenate(roots)


def aberth_roots(
    coeffs: np.ndarray,
    start: np.ndarray,
    max_iter: int = 80,
) -> tuple[np.ndarray, np.ndarray]:
    """Simultaneous Aberth-Ehrlich iteration for a batch of monic polynomials.

    ``coeffs`` has shape (P, d+1), low to high, with ``coeffs[:, d] == 1``;
    ``start`` has shape (P, d). A row is accepted once every residual is at
    rounding level and the roots reproduce the coefficient of ``lam**(d-1)``
    (their sum), which rejects rows where two iterates settled on one root.
    Rows stop independently, so a row's result does not depend on what else
    is in the batch. Returns ``(roots, converged)``.
    """
    z = np.array(start, dtype=np.complex128, copy=True)
    P, d = z.shape
    converged = np.zeros(P, dtype=bool)
    if d == 0:
        converged[:] = True
        return z, converged
    c = np.asarray(coeffs, dtype=np.complex128)
    ac = np.abs(c)
    active = np.arange(P)
    eye = np.eye(d, dtype=bool)
    for _ in range(max_iter):
        if active.size == 0:
            break
        za = z[active]
        ca = c[active]
        f = np.zeros_like(za)
        df = np.zeros_like(za)
        bound = np.zeros(za.shape)
        az = np.abs(za)
        for k in range(d, -1, -1):
            df = df * za + f
            f = f * za + ca[:, k, None]
            bound = bound * az + ac[active, k, None]
        resid_ok = np.abs(f) <= 8 * d * _EPS * bound
        vieta = np.abs(za.sum(axis=1) + ca[:, d - 1])
        sum_ok = vieta <= 1e-9 * (1.0 + az.sum(axis=1))
        done = resid_ok.all(axis=1) & sum_ok
        converged[active[done]] = True

        diff = za[:, :, None] - za[:, None, :]
        diff[:, eye] = 1.0
        diff = np.where(diff == 0, 1e-8, diff)
        inv = 1.0 / diff
        inv[:, eye] = 0.0
        s = inv.sum(axis=2)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            ratio = f / df
            corr = ratio / (1.0 - ratio * s)
        corr = np.where(np.isfinite(corr) & ~resid_ok, corr, 0.0)
        # a root sitting exactly on a rejected configuration still needs a kick
        stuck = ~done & (np.abs(corr).max(axis=1) == 0.0)
        if stuck.any():
            corr[stuck] = 1e-6 * np.exp(2j * np.pi * np.arange(d) / d)
        za = za - np.where(done[:, None], 0.0, corr)
        z[active] = za
        active = active[~done]
    return z, converged
