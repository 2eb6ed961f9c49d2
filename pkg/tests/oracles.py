"""Reference computations that share no code with the package.

* characteristic polynomials by Laplace expansion over integer polynomials,
* roots by mpmath at 50 digits (multiple roots come out to ~1e-12 or better
  for the multiplicities that occur at n <= 6),
* periodic spectra from a large cyclic matrix instead of the Floquet symbol.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product

import mpmath
import numpy as np


def padd(a, b):
    n = max(len(a), len(b))
    return [(a[k] if k < len(a) else 0) + (b[k] if k < len(b) else 0) for k in range(n)]


def pmul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def laplace_det(m):
    """Determinant of a square matrix of integer polynomials (coefficient
    lists, constant first) by cofactor expansion along the first row."""
    n = len(m)
    if n == 1:
        return list(m[0][0])
    total = [0]
    for j in range(n):
        if not any(m[0][j]):
            continue
        minor = [row[:j] + row[j + 1 :] for row in m[1:]]
        term = pmul(m[0][j], laplace_det(minor))
        if j % 2:
            term = [-c for c in term]
        total = padd(total, term)
    return total


def section_charpoly(signs):
    """det(lam I - A) for the finite section with subdiagonal ``signs``."""
    n = len(signs) + 1
    m = [[[0] for _ in range(n)] for _ in range(n)]
    for i in range(n):
        m[i][i] = [0, 1]
        if i + 1 < n:
            m[i][i + 1] = [-1]
            m[i + 1][i] = [-signs[i]]
    p = laplace_det(m)
    return p + [0] * (n + 1 - len(p))


@lru_cache(maxsize=None)
def mp_roots(coeffs: tuple[int, ...]) -> tuple[complex, ...]:
    """All roots (with multiplicity) of an integer polynomial, constant first."""
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    # mpmath wants the leading coefficient first; strip zero roots by hand
    zeros = 0
    while c and c[0] == 0:
        c.pop(0)
        zeros += 1
    out = [0j] * zeros
    if len(c) > 1:
        with mpmath.workdps(50):
            r = mpmath.polyroots(c[::-1], maxsteps=400, extraprec=400)
        out += [complex(z) for z in r]
    return tuple(out)


def sigma_oracle(n: int) -> np.ndarray:
    pts = []
    for signs in product((1, -1), repeat=n - 1):
        pts.extend(mp_roots(tuple(section_charpoly(signs))))
    return np.array(pts, dtype=np.complex128)


def cyclic_matrix(signs, reps: int) -> np.ndarray:
    """Periodic operator restricted to ``reps`` periods with wrap-around."""
    n = len(signs)
    N = n * reps
    a = np.zeros((N, N))
    for k in range(N):
        a[k, (k + 1) % N] = 1.0
        a[(k + 1) % N, k] = signs[k % n]
    return a


def pi_cyclic_oracle(n: int, reps: int) -> np.ndarray:
    """Union of the spectra of the cyclic matrices over all sign patterns.

    Block-circulant structure gives exactly the Floquet phases 2 pi k / reps,
    so this equals pi_n sampled with ``reps`` phases.
    """
    pts = [np.linalg.eigvals(cyclic_matrix(s, reps)) for s in product((1, -1), repeat=n)]
    return np.concatenate(pts)


def lucas_odd(n: int, k: int) -> bool:
    """binomial(n, k) is odd, by multiplying out the binomial itself."""
    from math import comb

    return comb(n, k) % 2 == 1
