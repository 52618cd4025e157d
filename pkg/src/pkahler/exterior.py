"""Exact bigraded exterior algebra over C^n.

Forms are stored in the frame phi_1..phi_n, conj(phi_1)..conj(phi_n); a basis
element ``(I, J)`` stands for ``phi_I ^ conj(phi_J)`` with ``I`` and ``J``
strictly increasing 1-based multi-indices.  Normalising constants such as
``sigma_p`` are never folded into the basis; they live in the coefficients.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Union[int, Fraction]
MultiIndex = tuple  # strictly increasing tuple of ints in [1, n]


class Scalar:
    """Gaussian rational ``re + i*im`` with exact ``Fraction`` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational = 0, im: Rational = 0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(Fraction(x))

    @classmethod
    def parse(cls, re: str, im: str = "0") -> "Scalar":
        return cls(Fraction(re), Fraction(im))

    def __add__(self, other):
        o = Scalar.coerce(other)
        return Scalar(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = Scalar.coerce(other)
        return Scalar(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return Scalar.coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Scalar(self.re * other, self.im * other)
        o = Scalar.coerce(other)
        return Scalar(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Scalar.coerce(other)
        den = o.re * o.re + o.im * o.im
        if den == 0:
            raise ZeroDivisionError("division by zero Scalar")
        num = self * o.conjugate()
        return Scalar(num.re / den, num.im / den)

    def __rtruediv__(self, other):
        return Scalar.coerce(other) / self

    def __neg__(self):
        return Scalar(-self.re, -self.im)

    def __pow__(self, k: int):
        out, base = Scalar(1), self
        if k < 0:
            base, k = Scalar(1) / base, -k
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        try:
            o = Scalar.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"Scalar({self.re})"
        return f"Scalar({self.re}, {self.im})"


ZERO = Scalar(0)
ONE = Scalar(1)
I_UNIT = Scalar(0, 1)


def sigma_const(p: int) -> Scalar:
    """``i**(p*p) / 2**p``."""
    if p < 0:
        raise ValueError("p must be non-negative")
    return I_UNIT ** (p * p) * Fraction(1, 2 ** p)


def multi_indices(n: int, p: int) -> list[MultiIndex]:
    """Increasing multi-indices of length ``p`` in lexicographic order."""
    return list(combinations(range(1, n + 1), p))


def sort_sign(seq: Sequence[int]) -> tuple[int, MultiIndex]:
    """Sign of the permutation sorting ``seq``; ``(0, ())`` on a repeat."""
    s = list(seq)
    sign = 1
    for i in range(1, len(s)):
        j = i
        while j > 0 and s[j - 1] > s[j]:
            s[j - 1], s[j] = s[j], s[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and s[j - 1] == s[j]:
            return 0, ()
    return sign, tuple(s)


def complement(n: int, idx: MultiIndex) -> MultiIndex:
    return tuple(i for i in range(1, n + 1) if i not in idx)


@lru_cache(maxsize=None)
def complement_sign(n: int, idx: MultiIndex) -> int:
    """Sign of the shuffle ``(idx, complement(idx)) -> (1..n)``."""
    return sort_sign(idx + complement(n, idx))[0]


class Form:
    """Exterior form with exact coefficients, possibly of mixed bidegree.

    ``coeffs`` maps ``(I, J)`` to ``Scalar``; zero entries are dropped.  When
    the form is homogeneous its bidegree is available as ``(p, q)``; a zero
    form remembers the bidegree it was built with, if any.
    """

    __slots__ = ("n", "coeffs", "_bideg")

    def __init__(self, n: int, coeffs: Mapping | None = None, bidegree: tuple | None = None):
        self.n = n
        clean = {}
        for (I, J), c in (coeffs or {}).items():
            c = Scalar.coerce(c)
            if not c.is_zero():
                clean[(tuple(I), tuple(J))] = c
        self.coeffs = clean
        degs = {(len(I), len(J)) for I, J in clean}
        if len(degs) == 1:
            self._bideg = degs.pop()
        elif not degs:
            self._bideg = bidegree
        else:
            self._bideg = None

    # construction -------------------------------------------------------
    @classmethod
    def zero(cls, n: int, p: int | None = None, q: int | None = None) -> "Form":
        return cls(n, {}, None if p is None else (p, q))

    @classmethod
    def basis(cls, n: int, I: Iterable[int], J: Iterable[int], coeff=1) -> "Form":
        sign_i, si = sort_sign(tuple(I))
        sign_j, sj = sort_sign(tuple(J))
        if any(not 1 <= k <= n for k in si + sj):
            raise ValueError("index out of range")
        if sign_i == 0 or sign_j == 0:
            return cls.zero(n, len(si), len(sj))
        return cls(n, {(si, sj): Scalar.coerce(coeff) * (sign_i * sign_j)})

    @classmethod
    def phi(cls, n: int, i: int) -> "Form":
        return cls.basis(n, (i,), ())

    @classmethod
    def phibar(cls, n: int, i: int) -> "Form":
        return cls.basis(n, (), (i,))

    @classmethod
    def constant(cls, n: int, c=1) -> "Form":
        return cls(n, {((), ()): c}, (0, 0))

    # structure ----------------------------------------------------------
    @property
    def bidegree(self) -> tuple[int, int]:
        if self._bideg is None:
            raise ValueError("form is not homogeneous (or has unknown bidegree)")
        return self._bideg

    @property
    def p(self) -> int:
        return self.bidegree[0]

    @property
    def q(self) -> int:
        return self.bidegree[1]

    def bidegrees(self) -> set[tuple[int, int]]:
        return {(len(I), len(J)) for I, J in self.coeffs}

    def component(self, a: int, b: int) -> "Form":
        return Form(self.n, {k: c for k, c in self.coeffs.items()
                             if len(k[0]) == a and len(k[1]) == b}, (a, b))

    def coeff(self, I, J) -> Scalar:
        return self.coeffs.get((tuple(I), tuple(J)), ZERO)

    def is_zero(self) -> bool:
        return not self.coeffs

    def items(self) -> Iterator:
        return iter(sorted(self.coeffs.items()))

    # linear structure ---------------------------------------------------
    def _check(self, other: "Form"):
        if not isinstance(other, Form):
            raise TypeError("expected a Form")
        if other.n != self.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def _merge_bideg(self, other: "Form"):
        if self._bideg is not None and self._bideg == other._bideg:
            return self._bideg
        return None

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return Form(self.n, out, self._merge_bideg(other))

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __neg__(self) -> "Form":
        return Form(self.n, {k: -c for k, c in self.coeffs.items()}, self._bideg)

    def scale(self, c) -> "Form":
        c = Scalar.coerce(c)
        return Form(self.n, {k: c * v for k, v in self.coeffs.items()}, self._bideg)

    def __mul__(self, c) -> "Form":
        if isinstance(c, Form):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, frozenset(self.coeffs.items())))

    def __repr__(self):
        if not self.coeffs:
            return f"Form(n={self.n}, 0)"
        terms = " + ".join(f"{c!r}*{I}|{J}" for (I, J), c in self.items())
        return f"Form(n={self.n}, {terms})"

    # algebra ------------------------------------------------------------
    def wedge(self, other: "Form") -> "Form":
        return wedge(self, other)

    def __xor__(self, other: "Form") -> "Form":
        return wedge(self, other)

    def conjugate(self) -> "Form":
        return conjugate(self)

    def is_real(self) -> bool:
        return conjugate(self) == self


def wedge(a: Form, b: Form) -> Form:
    """Exterior product, signs resolved into canonical order.

    ``phi_I ^ bar(phi_J) ^ phi_K ^ bar(phi_L)`` first moves ``phi_K`` past
    ``bar(phi_J)`` (sign ``(-1)**(|J||K|)``) and then sorts ``I+K`` and ``J+L``.
    """
    a._check(b)
    out: dict = {}
    for (I, J), c1 in a.coeffs.items():
        sI, sJ = set(I), set(J)
        for (K, L), c2 in b.coeffs.items():
            if sI.intersection(K) or sJ.intersection(L):
                continue
            s1, IK = sort_sign(I + K)
            s2, JL = sort_sign(J + L)
            sign = s1 * s2 * (-1 if (len(J) * len(K)) % 2 else 1)
            key = (IK, JL)
            term = c1 * c2 * sign
            out[key] = out[key] + term if key in out else term
    bideg = None
    if a._bideg is not None and b._bideg is not None:
        bideg = (a._bideg[0] + b._bideg[0], a._bideg[1] + b._bideg[1])
        if bideg[0] > a.n or bideg[1] > a.n:
            bideg = None
    return Form(a.n, out, bideg)


def wedge_all(forms: Sequence[Form]) -> Form:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def conjugate(a: Form) -> Form:
    """``conj(c phi_I ^ bar(phi_J)) = conj(c) (-1)**(|I||J|) phi_J ^ bar(phi_I)``."""
    out = {}
    for (I, J), c in a.coeffs.items():
        sign = -1 if (len(I) * len(J)) % 2 else 1
        out[(J, I)] = c.conjugate() * sign
    bideg = None if a._bideg is None else (a._bideg[1], a._bideg[0])
    return Form(a.n, out, bideg)


def volume_form(n: int) -> Form:
    """``dv = sigma_n phi_{1..n} ^ bar(phi_{1..n})``."""
    full = tuple(range(1, n + 1))
    return Form(n, {(full, full): sigma_const(n)}, (n, n))


def fundamental_form(n: int) -> Form:
    """Standard metric form ``gamma = (i/2) sum_j phi_j ^ bar(phi_j)``."""
    s = sigma_const(1)
    return Form(n, {((j,), (j,)): s for j in range(1, n + 1)}, (1, 1))


def gamma_power(n: int, p: int) -> Form:
    """``gamma**p = p! sum_I sigma_p phi_I ^ bar(phi_I)``; ``gamma**0 = 1``."""
    from math import factorial

    s = sigma_const(p) * factorial(p)
    return Form(n, {(I, I): s for I in multi_indices(n, p)}, (p, p))


def pairing_f(a: Form, b: Form) -> Scalar:
    """Scalar ``f`` with ``a ^ b = f dv`` for a (p,p)-form and a (k,k)-form."""
    a._check(b)
    n = a.n
    pa, qa = a.bidegree
    pb, qb = b.bidegree
    if pa != qa or pb != qb:
        raise ValueError("pairing_f needs (p,p) and (k,k) forms")
    if pa + pb != n:
        raise ValueError(f"degree mismatch: {pa} + {pb} != {n}")
    full = tuple(range(1, n + 1))
    top = wedge(a, b).coeff(full, full)
    return top / sigma_const(n)


class SimpleVector:
    """Decomposable p-vector ``v_1 ^ ... ^ v_p`` given by an n x p matrix."""

    __slots__ = ("n", "p", "rows", "_pl")

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = tuple(tuple(Scalar.coerce(x) for x in r) for r in rows)
        self.n = len(self.rows)
        self.p = len(self.rows[0]) if self.rows else 0
        if any(len(r) != self.p for r in self.rows):
            raise ValueError("ragged matrix")
        self._pl = None

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence]) -> "SimpleVector":
        cols = [list(c) for c in cols]
        n = len(cols[0])
        return cls([[c[i] for c in cols] for i in range(n)])

    @classmethod
    def coordinate(cls, n: int, idx: MultiIndex) -> "SimpleVector":
        """``e_I`` for a multi-index ``I``."""
        return cls([[1 if i == k else 0 for k in idx] for i in range(1, n + 1)])

    def plucker(self) -> dict:
        """``I -> det`` of the p x p row-submatrix selected by ``I``."""
        if self._pl is None:
            pl = {}
            for I in multi_indices(self.n, self.p):
                d = det([self.rows[i - 1] for i in I])
                if not d.is_zero():
                    pl[I] = d
            self._pl = pl
        return self._pl

    def norm2(self) -> Fraction:
        """Gram determinant ``det(M^* M) = sum_I |P_I|^2`` (Cauchy-Binet)."""
        return sum((c.abs2() for c in self.plucker().values()), Fraction(0))

    def is_zero(self) -> bool:
        return not self.plucker()

    def to_complex(self):
        import numpy as np

        return np.array([[complex(x) for x in r] for r in self.rows])

    def __eq__(self, other):
        return isinstance(other, SimpleVector) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"SimpleVector({[[repr(x) for x in r] for r in self.rows]})"


def det(rows: Sequence[Sequence[Scalar]]) -> Scalar:
    """Exact determinant by fraction-exact Gaussian elimination."""
    m = [list(r) for r in rows]
    k = len(m)
    if k == 0:
        return ONE
    out = ONE
    for col in range(k):
        piv = next((r for r in range(col, k) if not m[r][col].is_zero()), None)
        if piv is None:
            return ZERO
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            out = -out
        pv = m[col][col]
        out = out * pv
        for r in range(col + 1, k):
            if m[r][col].is_zero():
                continue
            f = m[r][col] / pv
            m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return out


def strongly_positive_vector(V: SimpleVector) -> dict:
    """Coefficients of ``sigma_p^{-1} V ^ conj(V)`` in the basis ``e_K ^ bar(e_L)``."""
    s = ONE / sigma_const(V.p)
    pl = V.plucker()
    return {(K, L): s * a * b.conjugate() for K, a in pl.items() for L, b in pl.items()}


def dual_iso_g(n: int, vec: Mapping, p: int | None = None) -> Form:
    """The isomorphism (p,p)-vectors -> (k,k)-forms with ``f(Omega, g(A)) = Omega(A)``.

    ``g(e_K ^ bar(e_L)) = sigma_n (-1)**(p k) eps(K) eps(L) phi_Kc ^ bar(phi_Lc)``
    where ``eps`` is the sign of the shuffle ``(K, Kc)``.
    """
    if p is None:
        if not vec:
            raise ValueError("degree of the zero vector must be given")
        p = len(next(iter(vec))[0])
    k = n - p
    base = sigma_const(n) * (-1 if (p * k) % 2 else 1)
    out = {}
    for (K, L), c in vec.items():
        c = Scalar.coerce(c)
        if c.is_zero():
            continue
        sign = complement_sign(n, K) * complement_sign(n, L)
        out[(complement(n, K), complement(n, L))] = c * base * sign
    return Form(n, out, (k, k))


def apply_to_vector(omega: Form, vec: Mapping) -> Scalar:
    """Natural pairing ``<phi_I ^ bar(phi_J), e_K ^ bar(e_L)> = delta``."""
    total = ZERO
    for key, c in vec.items():
        w = omega.coeffs.get(key)
        if w is not None:
            total = total + w * c
    return total


def evaluate(omega: Form, V: SimpleVector) -> Scalar:
    """``Omega(sigma_p^{-1} V ^ conj(V))`` via Plücker coordinates."""
    if omega.n != V.n:
        raise ValueError("dimension mismatch")
    p, q = omega.bidegree
    if p != q or p != V.p:
        raise ValueError(f"degree mismatch: ({p},{q}) form on a {V.p}-vector")
    pl = V.plucker()
    total = ZERO
    for (K, L), c in omega.coeffs.items():
        a = pl.get(K)
        b = pl.get(L)
        if a is not None and b is not None:
            total = total + c * a * b.conjugate()
    val = total / sigma_const(p)
    if not val.is_real() and omega.is_real():
        raise AssertionError("evaluation of a real form is not real")
    return val


# real (p,p) coordinates ---------------------------------------------------
# A real (p,p)-form is sigma_p * sum h_IJ phi_I ^ bar(phi_J) with h Hermitian.
# Coordinates: h_II for every I, then (Re h_IJ, Im h_IJ) for I < J.

@lru_cache(maxsize=None)
def real_pp_layout(n: int, p: int) -> tuple:
    idx = multi_indices(n, p)
    layout = [("d", I, I) for I in idx]
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            layout.append(("re", idx[a], idx[b]))
            layout.append(("im", idx[a], idx[b]))
    return tuple(layout)


def real_pp_dim(n: int, p: int) -> int:
    from math import comb

    return comb(n, p) ** 2


def real_pp_coords(omega: Form, p: int | None = None) -> list[Fraction]:
    """Exact real coordinates of a real (p,p)-form."""
    if p is None:
        p = omega.p
    s = sigma_const(p)
    out = []
    for kind, I, J in real_pp_layout(omega.n, p):
        h = omega.coeff(I, J) / s
        if kind == "d":
            if not h.is_real():
                raise ValueError("form is not real")
            out.append(h.re)
        elif kind == "re":
            out.append(h.re)
        else:
            out.append(h.im)
    return out


def real_pp_form(n: int, p: int, x: Sequence) -> Form:
    """Inverse of :func:`real_pp_coords`."""
    s = sigma_const(p)
    coeffs = {}
    h = {}
    for (kind, I, J), v in zip(real_pp_layout(n, p), x):
        v = Fraction(v)
        if v == 0:
            continue
        if kind == "d":
            h[(I, I)] = h.get((I, I), ZERO) + Scalar(v)
        elif kind == "re":
            h[(I, J)] = h.get((I, J), ZERO) + Scalar(v)
            h[(J, I)] = h.get((J, I), ZERO) + Scalar(v)
        else:
            h[(I, J)] = h.get((I, J), ZERO) + Scalar(0, v)
            h[(J, I)] = h.get((J, I), ZERO) + Scalar(0, -v)
    for k, v in h.items():
        coeffs[k] = s * v
    return Form(n, coeffs, (p, p))


def hermitian_matrix(omega: Form, p: int | None = None):
    """Complex numpy matrix ``h`` (indexed by p-multi-indices) of a real (p,p)-form."""
    import numpy as np

    if p is None:
        p = omega.p
    idx = multi_indices(omega.n, p)
    pos = {I: a for a, I in enumerate(idx)}
    s = sigma_const(p)
    h = np.zeros((len(idx), len(idx)), dtype=complex)
    for (I, J), c in omega.coeffs.items():
        h[pos[I], pos[J]] = complex(c / s)
    return h
