"""Exact rational linear algebra on lists of ``Fraction`` rows.

Thin wrappers around sympy's ``DomainMatrix`` over ``QQ`` (gmpy-backed).
Subspaces are passed around as lists of spanning vectors.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

Vec = list  # list[Fraction]
Mat = list  # list[list[Fraction]], row-major


def _q(x) -> object:
    x = Fraction(x)
    return QQ(x.numerator, x.denominator)


def _f(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


def to_dm(rows: Sequence[Sequence], ncols: int | None = None) -> DomainMatrix:
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return DomainMatrix([[_q(x) for x in r] for r in rows], (len(rows), ncols), QQ)


def from_dm(m: DomainMatrix) -> Mat:
    return [[_f(x) for x in row] for row in m.to_list()]


def zeros(r: int, c: int) -> Mat:
    return [[Fraction(0)] * c for _ in range(r)]


def transpose(m: Mat, ncols: int | None = None) -> Mat:
    if not m:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*m)]


def matmul(a: Mat, b: Mat, inner: int | None = None) -> Mat:
    if not a:
        return []
    ncols = len(b[0]) if b else 0
    if not b:
        return [[Fraction(0)] * 0 for _ in a]
    return from_dm(to_dm(a, len(b)) * to_dm(b, ncols))


def matvec(a: Mat, x: Sequence) -> Vec:
    return [sum((Fraction(r) * Fraction(v) for r, v in zip(row, x)), Fraction(0)) for row in a]


def is_zero_matrix(m: Mat) -> bool:
    return all(x == 0 for row in m for x in row)


def rank(m: Mat, ncols: int | None = None) -> int:
    if not m or (ncols is not None and ncols == 0) or not m[0]:
        return 0
    return to_dm(m, ncols).rank()


def nullspace(m: Mat, ncols: int) -> list[Vec]:
    """Basis of ``{x : m x = 0}`` as a list of vectors of length ``ncols``."""
    if ncols == 0:
        return []
    if not m:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ns = to_dm(m, ncols).nullspace()
    return [list(map(_f, row)) for row in ns.to_list()] if ns.shape[0] else []


def span_basis(vectors: Sequence[Sequence], dim: int) -> list[Vec]:
    """Linearly independent subset of ``vectors`` spanning the same space."""
    vectors = [list(map(Fraction, v)) for v in vectors]
    if not vectors or dim == 0:
        return []
    cols = to_dm(vectors, dim).transpose()
    _, pivots = cols.rref()
    return [vectors[j] for j in pivots]


def column_space(m: Mat, ncols: int) -> list[Vec]:
    """Independent columns of ``m`` spanning its image."""
    if not m or ncols == 0:
        return []
    _, pivots = to_dm(m, ncols).rref()
    return [[row[j] for row in m] for j in pivots]


def in_span(vectors: Sequence[Sequence], x: Sequence, dim: int) -> bool:
    if all(Fraction(v) == 0 for v in x):
        return True
    if not vectors:
        return False
    r = rank([list(v) for v in vectors], dim)
    return rank([list(v) for v in vectors] + [list(x)], dim) == r


def solve(a: Mat, b: Sequence, ncols: int) -> Vec | None:
    """Some exact solution of ``a x = b`` (free variables set to 0), or None."""
    nrows = len(a)
    if nrows == 0:
        return [Fraction(0)] * ncols
    aug = [list(row) + [Fraction(bi)] for row, bi in zip(a, b)]
    red, pivots = to_dm(aug, ncols + 1).rref()
    if ncols in pivots:
        return None
    red = from_dm(red)
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][ncols]
    return x


def intersect(a: Sequence[Sequence], b: Sequence[Sequence], dim: int) -> list[Vec]:
    """Basis of ``span(a) ∩ span(b)``."""
    a = span_basis(a, dim)
    b = span_basis(b, dim)
    if not a or not b:
        return []
    # columns [a | -b] ; kernel gives coefficients
    m = [[va[i] for va in a] + [-vb[i] for vb in b] for i in range(dim)]
    ker = nullspace(m, len(a) + len(b))
    out = []
    for k in ker:
        v = [sum((k[j] * a[j][i] for j in range(len(a))), Fraction(0)) for i in range(dim)]
        out.append(v)
    return span_basis(out, dim)


def subspace_contains(big: Sequence[Sequence], small: Sequence[Sequence], dim: int) -> bool:
    """``span(small) ⊆ span(big)``."""
    if not small:
        return True
    r = rank([list(v) for v in big], dim) if big else 0
    return rank([list(v) for v in big] + [list(v) for v in small], dim) == r
