"""The Sierpinski sign sequence, its coefficient table and the bounded eigenvector.

The sequence ``c`` is defined by ``c_1 = 1``, ``c_{2i} = c_{2i-1} c_i``,
``c_{2i+1} = -c_{2i}`` and ``c_{-i} = c_{i+1}``. For every ``lam`` the
recurrence ``u_{i+1} = lam u_i - c_i u_{i-1}`` started from ``u_0 = 0``,
``u_1 = 1`` produces polynomials ``u_i(lam) = sum_j p_{i,j} lam**(j-1)``
whose coefficients stay in {-1, 0, 1}; hence ``|u_i| <= 1/(1-|lam|)`` inside
the unit disk.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .core import IntPolynomial, SignSequence

__all__ = [
    "CoefficientRangeError",
    "SierpinskiSequence",
    "sierpinski_sign",
    "sierpinski_signs",
    "CoefficientTable",
    "coefficient_table",
    "format_table",
    "ConsistencyReport",
    "forced_sign_consistency",
    "block_self_similarity",
    "Eigenvector",
    "eigenvector",
    "residual_sup",
    "mirror_sign",
    "mirror_check",
    "sierpinski_set",
    "nonzero_set",
    "pascal_parity_correspondence",
    "REFERENCE_GLYPHS",
]


class CoefficientRangeError(AssertionError):
    """A table coefficient left {-1, 0, 1}; only a broken sign sequence does this."""


class SierpinskiSequence:
    """Lazily extended, memoised sign sequence over all integers.

    Positive indices live in an append-only cache; non-positive indices
    resolve through ``c_{-i} = c_{i+1}`` before lookup. Extension happens
    under a lock so one instance can be shared between threads.
    """

    def __init__(self):
        self._cache: list[int] = [0, 1]  # slot 0 unused; c_1 = 1
        self._lock = threading.Lock()

    def _extend(self, upto: int) -> None:
        with self._lock:
            cache = self._cache
            for i in range(len(cache), upto + 1):
                if i % 2 == 0:
                    cache.append(cache[i - 1] * cache[i // 2])
                else:
                    cache.append(-cache[i - 1])

    def __getitem__(self, i: int) -> int:
        i = int(i)
        if i <= 0:
            i = 1 - i
        if i >= len(self._cache):
            self._extend(max(i, 2 * len(self._cache)))
        return self._cache[i]

    def range(self, start: int, stop: int) -> np.ndarray:
        """``c_k`` for ``start <= k < stop`` as an int8 array."""
        top = max(abs(start), abs(stop)) + 2
        if top >= len(self._cache):
            self._extend(top)
        k = np.arange(start, stop)
        k = np.where(k <= 0, 1 - k, k)
        return np.asarray(self._cache, dtype=np.int8)[k]

    def as_sign_sequence(self, start: int, stop: int) -> SignSequence:
        return SignSequence({k: self[k] for k in range(start, stop)})


_DEFAULT = SierpinskiSequence()


def sierpinski_sign(i: int) -> int:
    return _DEFAULT[i]


def sierpinski_signs(start: int, stop: int) -> np.ndarray:
    return _DEFAULT.range(start, stop)


# -- coefficient table ---------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Rows ``p_{i,1..i}`` for ``i = 1..N``; ``p[i-1, j-1]`` holds ``p_{i,j}``."""

    p: np.ndarray
    signs: np.ndarray  # signs[i-1] = c_i

    @property
    def rows(self) -> int:
        return self.p.shape[0]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if i < 1 or j < 1 or j > i or i > self.rows:
            return 0
        return int(self.p[i - 1, j - 1])

    def c(self, i: int) -> int:
        return int(self.signs[i - 1])

    def row(self, i: int) -> IntPolynomial:
        return IntPolynomial(tuple(self.p[i - 1, :i]))


def coefficient_table(N: int, signs=None) -> CoefficientTable:
    """Build ``p_{i,j}`` from ``p_{1,1} = 1`` and
    ``p_{i+1,j} = p_{i,j-1} - c_i p_{i-1,j}``.

    ``signs`` overrides the sign sequence (``signs[i-1] = c_i``); it exists
    so that a corrupted sequence can be fed through the same code path.
    Raises :class:`CoefficientRangeError` if any entry leaves {-1, 0, 1}.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    c = sierpinski_signs(1, N + 1) if signs is None else np.asarray(signs, dtype=np.int8)[:N]
    if len(c) < N:
        raise ValueError(f"need {N} signs, got {len(c)}")
    p = np.zeros((N, N), dtype=np.int8)
    prev = np.zeros(N + 1, dtype=np.int64)  # row i-1 with a zero in front (j = 0)
    cur = np.zeros(N + 1, dtype=np.int64)
    cur[1] = 1
    p[0, 0] = 1
    for i in range(1, N):
        nxt = np.zeros(N + 1, dtype=np.int64)
        nxt[1:] = cur[:-1]
        nxt -= int(c[i - 1]) * prev
        bad = np.flatnonzero(np.abs(nxt) > 1)
        if bad.size:
            j = int(bad[0])
            raise CoefficientRangeError(
                f"coefficient escaped {{-1,0,1}}: p[{i + 1},{j}] = {int(nxt[j])}"
            )
        p[i] = nxt[1:]
        prev, cur = cur, nxt
    return CoefficientTable(p, np.array(c, dtype=np.int8))


def _glyph(v: int) -> str:
    return "+" if v > 0 else "-" if v < 0 else " "


def format_table(t: CoefficientTable) -> str:
    """Text rendering: right-aligned row index, the sign c_i, a bar, then one
    glyph per column j = 1..i with "+", "-" and " " for +1, -1 and 0."""
    width = len(str(t.rows))
    lines = []
    for i in range(1, t.rows + 1):
        cells = "".join(_glyph(t[i, j]) for j in range(1, i + 1))
        lines.append(f"{i:>{width}} {_glyph(t.c(i))} |{cells}")
    return "\n".join(lines) + "\n"


# Rows 1..16 with their c_i, in the format_table layout.
REFERENCE_GLYPHS = """\
 1 + |+
 2 + | +
 3 - |- +
 4 - |   +
 5 + |- + +
 6 - | -   +
 7 + |-   + +
 8 - |       +
 9 + |-   + + +
10 + | -   +   +
11 - |+ - -   - +
12 + |   -       +
13 - |- +     + - +
14 - | -       +   +
15 + |-       +   + +
16 - |               +
"""


@dataclass
class ConsistencyReport:
    """Outcome of a table-wide identity check."""

    name: str
    checked: list[tuple[int, int]] = field(default_factory=list)
    violations: list[tuple[int, int]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def forced_sign_consistency(t: CoefficientTable) -> ConsistencyReport:
    """Wherever ``p_{i,j-1}`` and ``p_{i-1,j}`` are both non-zero, the next row
    stays in {-1, 0, 1} only if ``c_i = p_{i,j-1} p_{i-1,j}``. Check every such
    (i, j)."""
    rep = ConsistencyReport("forced_sign")
    p = t.p.astype(np.int64)
    N = t.rows
    for i in range(2, N + 1):
        left = p[i - 1, : i - 1]  # p_{i,j-1}, j = 2..i
        up = p[i - 2, 1:i]  # p_{i-1,j}, j = 2..i
        both = np.flatnonzero((left != 0) & (up != 0))
        for k in both:
            j = int(k) + 2
            rep.checked.append((i, j))
            if left[k] * up[k] != t.c(i):
                rep.violations.append((i, j))
    return rep


def block_self_similarity(t: CoefficientTable) -> ConsistencyReport:
    """2x2 block rule: with ``P_{i,j}`` the block of rows 2i-1, 2i and columns
    2j-1, 2j, the block is ``p_{i,j} I`` for i+j even, and
    ``c_{2i-1} p_{i-1,j} diag(1, 0)`` for i+j odd."""
    rep = ConsistencyReport("block_self_similarity")
    half = t.rows // 2
    for i in range(1, half + 1):
        for j in range(1, i + 1):
            rep.checked.append((i, j))
            off = (t[2 * i - 1, 2 * j], t[2 * i, 2 * j - 1])
            if (i + j) % 2 == 0:
                want = (t[i, j], t[i, j])
            else:
                want = (t.c(2 * i - 1) * t[i - 1, j], 0)
            if (t[2 * i - 1, 2 * j - 1], t[2 * i, 2 * j]) != want or off != (0, 0):
                rep.violations.append((i, j))
    return rep


# -- the eigenvector -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Eigenvector:
    """``u_i`` for ``-m <= i <= m``; ``values[..., i + m]`` holds ``u_i``.

    A leading batch axis is present when several ``lam`` were passed.
    """

    lam: np.ndarray | complex
    m: int
    values: np.ndarray

    def __getitem__(self, i: int):
        if not -self.m <= i <= self.m:
            raise IndexError(f"index {i} outside [-{self.m}, {self.m}]")
        return self.values[..., i + self.m]

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.m, self.m + 1)

    def sup(self):
        return np.abs(self.values).max(axis=-1)


def eigenvector(lam, m: int) -> Eigenvector:
    """Solve ``u_{i+1} = lam u_i - c_i u_{i-1}`` from ``u_0 = 0``, ``u_1 = 1``
    forwards to ``u_m`` and backwards to ``u_{-m}``.

    ``lam`` may be a scalar or an array; arrays are swept together.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    lam_arr = np.asarray(lam, dtype=np.complex128)
    c = sierpinski_signs(-m, m + 1).astype(np.float64)  # c[k + m] = c_k
    u = np.zeros(lam_arr.shape + (2 * m + 1,), dtype=np.complex128)
    u[..., m + 1] = 1.0
    for i in range(1, m):
        u[..., m + i + 1] = lam_arr * u[..., m + i] - c[m + i] * u[..., m + i - 1]
    for i in range(0, -m, -1):
        # c_i is +-1, so dividing by it is multiplying by it
        u[..., m + i - 1] = (lam_arr * u[..., m + i] - u[..., m + i + 1]) * c[m + i]
    return Eigenvector(lam if lam_arr.ndim == 0 else lam_arr, m, u)


def residual_sup(lam, u: Eigenvector):
    """sup over -m < i < m of ``|u_{i+1} - lam u_i + c_i u_{i-1}|``."""
    m = u.m
    lam_arr = np.asarray(lam, dtype=np.complex128)
    c = sierpinski_signs(-m + 1, m).astype(np.float64)
    v = u.values
    r = v[..., 2:] - lam_arr[..., None] * v[..., 1:-1] + c * v[..., :-2]
    return np.abs(r).max(axis=-1)


def mirror_sign(i: int) -> int:
    """``d_i`` with ``d_{2j} = (-1)^j c_{2j}`` and ``d_{2j+1} = (-1)^{j+1}``."""
    if i < 0:
        raise ValueError("mirror signs are defined for i >= 0")
    j, odd = divmod(i, 2)
    if odd:
        return -1 if j % 2 == 0 else 1
    return (-1 if j % 2 else 1) * sierpinski_sign(2 * j)


@dataclass
class MirrorReport:
    lam: complex
    m: int
    tol: float
    worst: float
    worst_index: int

    @property
    def ok(self) -> bool:
        return self.worst <= self.tol


def mirror_check(lam: complex, m: int, tol: float) -> MirrorReport:
    """Check ``u_{-i} = d_i u_i`` for ``i = 0..m`` with relative slack
    ``tol * (1 + |u_i|)``; ``worst`` is the largest scaled defect."""
    u = eigenvector(lam, m)
    vals = u.values
    d = np.array([mirror_sign(i) for i in range(m + 1)], dtype=np.float64)
    pos = vals[m:]
    neg = vals[m::-1]
    defect = np.abs(neg - d * pos) / (1.0 + np.abs(pos))
    k = int(np.argmax(defect))
    return MirrorReport(complex(lam), m, tol, float(defect[k]), k)


# -- index-set algebra ---------------------------------------------------------

_V = ((0, 0), (-1, -1), (1, -1))


def sierpinski_set(levels: int) -> set[tuple[int, int]]:
    """``S_1 = {(1,1)}``, ``S_{k+1} = 2 S_k + V`` with
    ``V = {(0,0), (-1,-1), (1,-1)}``; returns ``S_levels``."""
    if levels < 1:
        raise ValueError("levels must be at least 1")
    s = {(1, 1)}
    for _ in range(levels - 1):
        s = {(2 * i + a, 2 * j + b) for (i, j) in s for (a, b) in _V}
    return s


def nonzero_set(t: CoefficientTable) -> set[tuple[int, int]]:
    ii, jj = np.nonzero(t.p)
    return {(int(i) + 1, int(j) + 1) for i, j in zip(ii, jj)}


def pascal_parity_correspondence(N: int) -> ConsistencyReport:
    """``binom(i-1, j-1)`` is odd iff ``(2i-j, j)`` is a non-zero position of
    the table, for ``1 <= j <= i <= N``. Parity by the bit test
    ``(j-1) & (i-j) == 0``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    s = nonzero_set(coefficient_table(2 * N))
    rep = ConsistencyReport("pascal_parity")
    for i in range(1, N + 1):
        for j in range(1, i + 1):
            rep.checked.append((i, j))
            odd = ((j - 1) & (i - j)) == 0
            if odd != ((2 * i - j, j) in s):
                rep.violations.append((i, j))
    return rep
