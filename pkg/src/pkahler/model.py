"""Invariant-form complexes of compact quotients G/Γ from structure constants.

A :class:`LieAlgebraModel` fixes ``d`` on the invariant (1,0)-coframe::

    d phi^k = sum_{i<j} A^k_ij phi^i ^ phi^j + sum_{i,j} B^k_ij phi^i ^ bar(phi^j)

so ``d = del + delbar`` on all invariant forms.  :class:`GradedComplex` turns
the operators of the real sequences

    E^{q,q} --i del delbar--> E^{q+1,q+1} --d--> (E^{q+2,q+1} + E^{q+1,q+2})
    (E^{p,p-1} + E^{p-1,p}) --(b, bbar) -> delbar b + del bbar--> E^{p,p}
    E^{2p-1} --d--> E^{2p} --d--> E^{2p+1}

into exact rational matrices on real coordinates.  Only left-invariant forms
are modelled; every statement made from these matrices is invariant-level.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Optional

from . import linalg
from .exterior import (
    Form,
    I_UNIT,
    Scalar,
    multi_indices,
    real_pp_coords,
    real_pp_form,
    real_pp_layout,
    wedge,
)


class ModelError(ValueError):
    """Malformed model input."""


class JacobiError(ModelError):
    """``d o d != 0`` on some generator; the structure constants are inconsistent."""

    def __init__(self, generator: str, residual: Form):
        self.generator = generator
        self.residual = residual
        super().__init__(f"d(d {generator}) != 0: {residual!r}")


# --- models ----------------------------------------------------------------

class LieAlgebraModel:
    """Structure constants of an invariant complex structure; checks ``d^2 = 0``."""

    def __init__(self, name: str, n: int, A: dict | None = None, B: dict | None = None):
        self.name = name
        self.n = int(n)
        if self.n < 1:
            raise ModelError("n must be positive")
        self.A = {}
        for (k, i, j), c in (A or {}).items():
            self._check_index(k, i, j)
            if i == j:
                raise ModelError(f"A^{k}_{i}{j}: repeated index")
            c = Scalar.coerce(c)
            if i > j:
                i, j, c = j, i, -c
            self.A[(k, i, j)] = self.A.get((k, i, j), Scalar(0)) + c
        self.B = {}
        for (k, i, j), c in (B or {}).items():
            self._check_index(k, i, j)
            self.B[(k, i, j)] = self.B.get((k, i, j), Scalar(0)) + Scalar.coerce(c)
        self.A = {key: c for key, c in self.A.items() if not c.is_zero()}
        self.B = {key: c for key, c in self.B.items() if not c.is_zero()}
        self._check_d_squared()

    def _check_index(self, *idx):
        if any(not 1 <= t <= self.n for t in idx):
            raise ModelError(f"index {idx} out of range 1..{self.n}")

    def d_phi(self, k: int) -> Form:
        n = self.n
        out = Form.zero(n)
        for (kk, i, j), c in self.A.items():
            if kk == k:
                out = out + Form.basis(n, (i, j), (), c)
        for (kk, i, j), c in self.B.items():
            if kk == k:
                out = out + Form.basis(n, (i,), (j,), c)
        return out

    def _check_d_squared(self):
        cx = _Derivation(self)
        for k in range(1, self.n + 1):
            for label, g in ((f"phi^{k}", Form.phi(self.n, k)),
                             (f"bar(phi^{k})", Form.phibar(self.n, k))):
                res = cx.d(cx.d(g))
                if not res.is_zero():
                    raise JacobiError(label, res)

    def __eq__(self, other):
        return (isinstance(other, LieAlgebraModel) and self.n == other.n
                and self.A == other.A and self.B == other.B)

    def same_structure(self, other: "LieAlgebraModel") -> bool:
        return self.n == other.n and self.A == other.A and self.B == other.B

    def __repr__(self):
        return f"LieAlgebraModel({self.name!r}, n={self.n})"

    # JSON -----------------------------------------------------------------
    def to_dict(self) -> dict:
        def rows(d):
            return [{"k": k, "i": i, "j": j, "re": str(c.re), "im": str(c.im)}
                    for (k, i, j), c in sorted(d.items())]
        return {"name": self.name, "n": self.n, "A": rows(self.A), "B": rows(self.B)}

    @classmethod
    def from_dict(cls, doc: dict) -> "LieAlgebraModel":
        try:
            name = str(doc.get("name", "model"))
            n = int(doc["n"])

            def parse(rows):
                out = {}
                for r in rows or []:
                    key = (int(r["k"]), int(r["i"]), int(r["j"]))
                    c = Scalar(Fraction(str(r.get("re", "0"))), Fraction(str(r.get("im", "0"))))
                    out[key] = out.get(key, Scalar(0)) + c
                return out

            A, B = parse(doc.get("A")), parse(doc.get("B"))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ModelError(f"malformed model document: {exc}") from exc
        return cls(name, n, A, B)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "LieAlgebraModel":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ModelError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
        return cls.from_dict(doc)


def torus(n: int) -> LieAlgebraModel:
    return LieAlgebraModel(f"torus{n}", n)


def sl2c() -> LieAlgebraModel:
    """SL(2,C)/Γ with phi^1 = alpha, phi^2 = beta, phi^3 = eta.

    d alpha = -2 eta ^ alpha, d beta = 2 eta ^ beta, d eta = alpha ^ beta.
    """
    return LieAlgebraModel("sl2c", 3, A={(1, 1, 3): 2, (2, 2, 3): -2, (3, 1, 2): 1})


def iwasawa() -> LieAlgebraModel:
    """Iwasawa manifold: d phi^3 = -phi^1 ^ phi^2."""
    return LieAlgebraModel("iwasawa", 3, A={(3, 1, 2): -1})


BUNDLED = {
    "torus2": lambda: torus(2),
    "torus3": lambda: torus(3),
    "sl2c": sl2c,
    "iwasawa": iwasawa,
}


def load_model(source: str) -> LieAlgebraModel:
    """Bundled model by name, else a JSON model file."""
    if source in BUNDLED:
        return BUNDLED[source]()
    path = Path(source)
    if not path.exists():
        raise ModelError(f"unknown model {source!r} (bundled: {', '.join(BUNDLED)})")
    return LieAlgebraModel.from_json(path.read_text())


# --- derivation --------------------------------------------------------------

class _Derivation:
    """``d`` extended to all invariant forms by the graded Leibniz rule."""

    def __init__(self, model: LieAlgebraModel):
        self.model = model
        n = model.n
        self._gen = {("phi", k): model.d_phi(k) for k in range(1, n + 1)}
        for k in range(1, n + 1):
            self._gen[("bar", k)] = self._gen[("phi", k)].conjugate()
        self._cache: dict = {}

    def _d_monomial(self, I: tuple, J: tuple) -> Form:
        key = (I, J)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        n = self.model.n
        gens = [("phi", i) for i in I] + [("bar", j) for j in J]
        factors = [Form.phi(n, i) for i in I] + [Form.phibar(n, j) for j in J]
        out = Form.zero(n)
        for t, g in enumerate(gens):
            dg = self._gen[g]
            if dg.is_zero():
                continue
            term = dg
            if t > 0:
                left = factors[0]
                for f in factors[1:t]:
                    left = wedge(left, f)
                term = wedge(left, term)
            for f in factors[t + 1:]:
                term = wedge(term, f)
            out = out + (term if t % 2 == 0 else -term)
        self._cache[key] = out
        return out

    def d(self, form: Form) -> Form:
        out = {}
        for (I, J), c in form.coeffs.items():
            for key, v in self._d_monomial(I, J).coeffs.items():
                term = c * v
                out[key] = out[key] + term if key in out else term
        return Form(form.n, out)

    def partial(self, form: Form) -> Form:
        out = {}
        for (I, J), c in form.coeffs.items():
            for key, v in self._d_monomial(I, J).coeffs.items():
                if len(key[0]) == len(I) + 1:
                    term = c * v
                    out[key] = out[key] + term if key in out else term
        return Form(form.n, out)

    def dbar(self, form: Form) -> Form:
        out = {}
        for (I, J), c in form.coeffs.items():
            for key, v in self._d_monomial(I, J).coeffs.items():
                if len(key[1]) == len(J) + 1:
                    term = c * v
                    out[key] = out[key] + term if key in out else term
        return Form(form.n, out)


# --- real coordinate spaces ---------------------------------------------------

@dataclass(frozen=True)
class RealSpace:
    """Real forms with components in ``(a,b) + (b,a)`` for each block ``(a, b)``, ``a >= b``.

    Off-diagonal blocks are coordinatised by (Re, Im) of the ``(a,b)``
    coefficients; ``(a,a)`` blocks use the Hermitian layout of
    :func:`real_pp_layout`.
    """

    n: int
    blocks: tuple

    @cached_property
    def layout(self) -> tuple:
        out = []
        for a, b in self.blocks:
            if a == b:
                out.extend(("pp", a, kind, I, J) for kind, I, J in real_pp_layout(self.n, a))
            else:
                for I in multi_indices(self.n, a):
                    for J in multi_indices(self.n, b):
                        out.append(("ab", a, "re", I, J))
                        out.append(("ab", a, "im", I, J))
        return tuple(out)

    @property
    def dim(self) -> int:
        return len(self.layout)

    def basis_vector(self, j: int) -> list:
        return [Fraction(int(i == j)) for i in range(self.dim)]

    def to_form(self, x) -> Form:
        out = Form.zero(self.n)
        pos = 0
        for a, b in self.blocks:
            if a == b:
                size = len(real_pp_layout(self.n, a))
                out = out + real_pp_form(self.n, a, x[pos:pos + size])
                pos += size
            else:
                coeffs = {}
                for I in multi_indices(self.n, a):
                    for J in multi_indices(self.n, b):
                        coeffs[(I, J)] = Scalar(x[pos], x[pos + 1])
                        pos += 2
                half = Form(self.n, coeffs, (a, b))
                out = out + half + half.conjugate()
        return out

    def coords(self, form: Form, check: bool = True) -> list:
        out = []
        allowed = set()
        for a, b in self.blocks:
            allowed.update({(a, b), (b, a)})
            if a == b:
                out.extend(real_pp_coords(form.component(a, a), a))
            else:
                for I in multi_indices(self.n, a):
                    for J in multi_indices(self.n, b):
                        c = form.coeff(I, J)
                        out.extend([c.re, c.im])
        if check:
            stray = form.bidegrees() - allowed
            if stray:
                raise ValueError(f"form has components {sorted(stray)} outside {self.blocks}")
            if not form.is_real():
                raise ValueError("form is not real")
        return out

    def project(self, x, block: tuple) -> list:
        """Coordinates of the ``block`` component of ``x``."""
        pos = 0
        for a, b in self.blocks:
            size = len(real_pp_layout(self.n, a)) if a == b else 2 * len(multi_indices(self.n, a)) * len(multi_indices(self.n, b))
            if (a, b) == block:
                return list(x[pos:pos + size])
            pos += size
        raise KeyError(block)

    def embed(self, y, block: tuple) -> list:
        out = []
        for a, b in self.blocks:
            size = len(real_pp_layout(self.n, a)) if a == b else 2 * len(multi_indices(self.n, a)) * len(multi_indices(self.n, b))
            out.extend(list(y) if (a, b) == block else [Fraction(0)] * size)
        return out


def bidegree_space(n: int, a: int, b: int) -> RealSpace:
    if a < b:
        a, b = b, a
    if b < 0 or a > n:
        return RealSpace(n, ())
    return RealSpace(n, ((a, b),))


def degree_space(n: int, s: int) -> RealSpace:
    blocks = tuple((a, s - a) for a in range(s, -1, -1)
                   if a >= s - a and a <= n and s - a >= 0)
    return RealSpace(n, blocks)


# --- operators ----------------------------------------------------------------

OPERATOR_TAGS = ("sigma_2q", "sigma_2q+1", "sigma_2p-1", "sigma_2p", "d_2p", "d_2p-1")


@dataclass(frozen=True)
class OperatorId:
    """One of the real operators indexed by ``p`` (with ``q = p - 1``).

    ``sigma_2q`` = i del delbar on (q,q); ``sigma_2q+1`` = d on (p,p);
    ``sigma_2p-1`` = (b, bbar) -> delbar b + del bbar into (p,p);
    ``sigma_2p`` = i del delbar on (p,p); ``d_2p``, ``d_2p-1`` = d on real 2p-
    and (2p-1)-forms.
    """

    tag: str
    p: int

    def __post_init__(self):
        if self.tag not in OPERATOR_TAGS:
            raise ValueError(f"unknown operator {self.tag!r}")


@dataclass
class LinearMap:
    source: RealSpace
    target: RealSpace
    matrix: list  # target.dim rows x source.dim columns, Fractions

    def rank(self) -> int:
        return linalg.rank(self.matrix, self.source.dim) if self.target.dim else 0

    def kernel(self) -> list:
        if self.target.dim == 0:
            return [self.source.basis_vector(j) for j in range(self.source.dim)]
        return linalg.nullspace(self.matrix, self.source.dim)

    def image(self) -> list:
        if self.target.dim == 0:
            return []
        return linalg.column_space(self.matrix, self.source.dim)

    def apply(self, x) -> list:
        return linalg.matvec(self.matrix, x)

    def is_zero(self) -> bool:
        return linalg.is_zero_matrix(self.matrix)


class GradedComplex:
    """Invariant real form spaces and operator matrices of a model."""

    def __init__(self, model: LieAlgebraModel):
        self.model = model
        self.n = model.n
        self._der = _Derivation(model)
        self._maps: dict = {}

    # form-level operators
    def d(self, form: Form) -> Form:
        return self._der.d(form)

    def partial(self, form: Form) -> Form:
        return self._der.partial(form)

    def dbar(self, form: Form) -> Form:
        return self._der.dbar(form)

    def i_ddbar(self, form: Form) -> Form:
        return self.partial(self.dbar(form)).scale(I_UNIT)

    def sigma_odd(self, form: Form, p: int) -> Form:
        """``(b, bbar) -> delbar b + del bbar``: the (p,p) part of d."""
        return self.d(form).component(p, p)

    # matrices
    def linear_map(self, func, source: RealSpace, target: RealSpace) -> LinearMap:
        cols = []
        for j in range(source.dim):
            img = func(source.to_form(source.basis_vector(j)))
            cols.append(target.coords(img) if target.dim else [])
        matrix = [[cols[j][i] for j in range(source.dim)] for i in range(target.dim)]
        return LinearMap(source, target, matrix)

    def operator(self, op: OperatorId) -> LinearMap:
        if op in self._maps:
            return self._maps[op]
        n, p = self.n, op.p
        if not 0 <= p <= n:
            raise ValueError(f"p={p} out of range for n={n}")
        q = p - 1
        if op.tag == "sigma_2q":
            if q < 0:
                raise ValueError("sigma_2q needs p >= 1")
            m = self.linear_map(self.i_ddbar, bidegree_space(n, q, q), bidegree_space(n, p, p))
        elif op.tag == "sigma_2q+1":
            m = self.linear_map(self.d, bidegree_space(n, p, p), bidegree_space(n, p + 1, p))
        elif op.tag == "sigma_2p-1":
            if p < 1:
                raise ValueError("sigma_2p-1 needs p >= 1")
            m = self.linear_map(lambda f: self.sigma_odd(f, p),
                                bidegree_space(n, p, p - 1), bidegree_space(n, p, p))
        elif op.tag == "sigma_2p":
            m = self.linear_map(self.i_ddbar, bidegree_space(n, p, p), bidegree_space(n, p + 1, p + 1))
        elif op.tag == "d_2p":
            m = self.linear_map(self.d, degree_space(n, 2 * p), degree_space(n, 2 * p + 1))
        else:
            if p < 1:
                raise ValueError("d_2p-1 needs p >= 1")
            m = self.linear_map(self.d, degree_space(n, 2 * p - 1), degree_space(n, 2 * p))
        self._maps[op] = m
        return m

    def d_map(self, s: int) -> LinearMap:
        key = ("d", s)
        if key not in self._maps:
            self._maps[key] = self.linear_map(self.d, degree_space(self.n, s), degree_space(self.n, s + 1))
        return self._maps[key]

    def map_on(self, key: str, source: RealSpace, target: RealSpace) -> LinearMap:
        full = (key, source, target)
        if full not in self._maps:
            func = {"d": self.d, "i_ddbar": self.i_ddbar}[key]
            self._maps[full] = self.linear_map(func, source, target)
        return self._maps[full]

    # complex-valued Dolbeault pieces (for symmetry checks)
    def complex_operator(self, which: str, p: int, q: int) -> list:
        """Matrix of ``del`` or ``delbar`` on complex (p,q)-forms (Scalar entries)."""
        n = self.n
        src = [(I, J) for I in multi_indices(n, p) for J in multi_indices(n, q)]
        if which == "partial":
            tgt = [(I, J) for I in multi_indices(n, p + 1) for J in multi_indices(n, q)] if p < n else []
            func = self.partial
        else:
            tgt = [(I, J) for I in multi_indices(n, p) for J in multi_indices(n, q + 1)] if q < n else []
            func = self.dbar
        cols = [func(Form(n, {key: 1})) for key in src]
        return [[col.coeff(*key) for col in cols] for key in tgt], len(src)


def operator_matrix(c: GradedComplex, op: OperatorId) -> list:
    return c.operator(op).matrix


def build_complex(m: LieAlgebraModel) -> GradedComplex:
    return GradedComplex(m)


def complex_rank(matrix: list, ncols: int) -> int:
    """Rank over Q(i) of a Scalar matrix, via the real embedding."""
    if not matrix or ncols == 0:
        return 0
    big = [[x.re for x in row] + [-x.im for x in row] for row in matrix]
    big += [[x.im for x in row] + [x.re for x in row] for row in matrix]
    return linalg.rank(big, 2 * ncols) // 2


# --- cohomology ---------------------------------------------------------------

def cohomology_dim(c: GradedComplex, group: str, k: int) -> int:
    """Invariant cohomology dimension.

    ``group`` is ``"deRham"`` (degree k), ``"BC"`` or ``"A"`` (bidegree (k,k)),
    or ``"W"`` for ``W^{k+2,k+1} = Ker sigma_{2k+2} / Im sigma_{2k+1}``.
    """
    n = c.n
    if group == "deRham":
        if not 0 <= k <= 2 * n:
            raise ValueError("degree out of range")
        ker = c.d_map(k).kernel()
        im = c.d_map(k - 1).rank() if k >= 1 else 0
        return len(ker) - im
    if group in ("BC", "A"):
        if not 0 <= k <= n:
            raise ValueError("bidegree out of range")
        kk = bidegree_space(n, k, k)
        if group == "BC":
            ker = c.map_on("d", kk, degree_space(n, 2 * k + 1)).kernel()
            im = c.map_on("i_ddbar", bidegree_space(n, k - 1, k - 1), kk).rank() if k >= 1 else 0
        else:
            ker = c.map_on("i_ddbar", kk, bidegree_space(n, k + 1, k + 1)).kernel()
            im = c.operator(OperatorId("sigma_2p-1", k)).rank() if k >= 1 else 0
        return len(ker) - im
    if group == "W":
        q = k
        if not 0 <= q and q + 2 <= n:
            raise ValueError("W^{q+2,q+1} needs 0 <= q <= n-2")
        src = bidegree_space(n, q + 2, q + 1)
        ker = c.map_on("d", src, degree_space(n, 2 * q + 4)).kernel()
        im = c.operator(OperatorId("sigma_2q+1", q + 1)).rank()
        return len(ker) - im
    raise ValueError(f"unknown cohomology group {group!r}")


# --- SL(2,C) example ----------------------------------------------------------------

@dataclass
class IdentityCheck:
    name: str
    passed: bool
    residual: Optional[Form] = None
    detail: str = ""


class IdentityCheckFailed(AssertionError):
    def __init__(self, check: IdentityCheck):
        self.check = check
        super().__init__(f"check {check.name} failed: {check.detail}; residual = {check.residual!r}")


@dataclass
class ExampleReport:
    checks: list = field(default_factory=list)
    gamma: Optional[Form] = None  # a real (1,1)-form with omega^2 = i del delbar gamma
    exact_scale: Optional[Fraction] = None  # c with omega^2 = c dGamma

    @property
    def ok(self) -> bool:
        return all(ch.passed for ch in self.checks)

    def first_failure(self) -> Optional[IdentityCheck]:
        return next((ch for ch in self.checks if not ch.passed), None)


def sl2c_example_forms(c: GradedComplex) -> dict:
    n = 3
    alpha, beta, eta = (Form.phi(n, k) for k in (1, 2, 3))
    half_i = Scalar(0, Fraction(1, 2))
    omega = (wedge(alpha, alpha.conjugate()) + wedge(beta, beta.conjugate())
             + wedge(eta, eta.conjugate())).scale(half_i)
    Gamma = (wedge(alpha, c.d(alpha.conjugate())).scale(Fraction(1, 16))
             + wedge(beta, c.d(beta.conjugate())).scale(Fraction(1, 16))
             + wedge(eta, c.d(eta.conjugate())).scale(Fraction(1, 4)))
    return {"omega": omega, "omega2": wedge(omega, omega), "Gamma": Gamma}


def verify_sl2c_example(c: GradedComplex, strict: bool = True) -> ExampleReport:
    """Exact identities of the SL(2,C)/Γ example.

    (i) d omega != 0; (ii) d omega^2 = 0; (iii) omega^2 - dGamma = 0 for the
    quoted Gamma; (iv) omega^2 = i del delbar gamma has a real (1,1) solution.
    With ``strict`` the first failing check raises :class:`IdentityCheckFailed`.
    """
    if not c.model.same_structure(sl2c()):
        raise ModelError("model is not the bundled SL(2,C) example (sl2c)")
    f = sl2c_example_forms(c)
    omega, omega2, Gamma = f["omega"], f["omega2"], f["Gamma"]
    report = ExampleReport()

    d_omega = c.d(omega)
    report.checks.append(IdentityCheck("(i) d omega != 0", not d_omega.is_zero(), d_omega,
                                       "d omega must be non-zero"))
    d_omega2 = c.d(omega2)
    report.checks.append(IdentityCheck("(ii) d omega^2 = 0", d_omega2.is_zero(), d_omega2,
                                       "d omega^2 must vanish"))
    dGamma = c.d(Gamma)
    res = omega2 - dGamma
    report.exact_scale = _proportionality(omega2, dGamma)
    detail = "omega^2 - dGamma must vanish"
    if report.exact_scale is not None and report.exact_scale != 1:
        detail += f" (exactly: omega^2 = {report.exact_scale} * dGamma)"
    report.checks.append(IdentityCheck("(iii) omega^2 = dGamma", res.is_zero(), res, detail))

    op = c.operator(OperatorId("sigma_2q", 2))
    target = op.target.coords(omega2)
    sol = linalg.solve(op.matrix, target, op.source.dim)
    if sol is not None:
        report.gamma = op.source.to_form(sol)
        resid = c.i_ddbar(report.gamma) - omega2
        report.checks.append(IdentityCheck("(iv) omega^2 = i del delbar gamma", resid.is_zero(), resid))
    else:
        report.checks.append(IdentityCheck("(iv) omega^2 = i del delbar gamma", False, omega2,
                                           "no real (1,1) solution"))
    if strict and not report.ok:
        raise IdentityCheckFailed(report.first_failure())
    return report


def _proportionality(a: Form, b: Form) -> Optional[Fraction]:
    """Rational c with a = c b, if any."""
    if b.is_zero():
        return None
    key, bv = next(iter(b.coeffs.items()))
    ratio = a.coeff(*key) / bv
    if not ratio.is_real():
        return None
    return ratio.re if a == b.scale(ratio) else None
