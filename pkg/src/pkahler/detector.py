"""Generalized p-Kähler classes on an invariant complex, decided by LP duality.

For a class with subspace S of real (p,p)-forms, either some Omega in S is
transverse (a *primal* certificate) or there is a non-negative combination
T = sum lam_i eval(., V_i) of Dirac functionals at simple p-vectors that
kills S and has T(gamma^p) = 1 (a *dual* certificate).  Both sides come out of
one cutting-plane loop: the master LP maximises the worst normalised
evaluation over the current atoms, a Grassmannian search finds new violated
atoms, and when the LP value drops to zero the atoms carry the dual.

Everything is invariant-level: forms are left-invariant and T is a
functional on invariant forms only.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from . import linalg
from .exterior import (
    Form,
    SimpleVector,
    gamma_power,
    hermitian_matrix,
    multi_indices,
    real_pp_coords,
    real_pp_layout,
)
from .model import GradedComplex, OperatorId, bidegree_space
from .positivity import ATOM_DENOMINATOR, pairing_matrix
from .search import DEFAULT_STARTS, min_decomposable, random_unitary, rationalize, rationalize_frame

SCHEMA = "pkk-certificate/1"
PRIMAL, DUAL, INDETERMINATE = "Primal", "Dual", "Indeterminate"
DEFAULT_TOL = 1e-6
MAX_ITER = 200
SCOPE = "invariant-level"

CLASS_TAGS = ("pK", "pWK", "pS", "pPL", "E1", "E2", "E3", "E4")
# each exact class sits inside the class with the same position
EXACT_OF = {"E1": "pK", "E2": "pWK", "E3": "pS", "E4": "pPL"}
CHAIN = (("pK", "pWK", "pS", "pPL"), ("E1", "E2", "E3", "E4"))


class ConsistencyError(RuntimeError):
    """A primal and a dual certificate both validated, or an implication broke."""


@dataclass(frozen=True)
class ClassId:
    tag: str
    p: int

    def __post_init__(self):
        if self.tag not in CLASS_TAGS:
            raise ValueError(f"unknown class {self.tag!r}; expected one of {', '.join(CLASS_TAGS)}")

    def __str__(self):
        return f"{self.tag}(p={self.p})"


def implied_by(tag: str) -> list:
    """Tags whose subspace is contained in ``tag``'s subspace (excluding itself)."""
    out = []
    for chain in CHAIN:
        if tag in chain:
            out.extend(chain[:chain.index(tag)])
    if tag in CHAIN[0]:
        pos = CHAIN[0].index(tag)
        for e in CHAIN[1][:pos + 1]:
            if e not in out:
                out.append(e)
    return out


# --- class subspaces ----------------------------------------------------------

@dataclass
class ClassSubspace:
    """Spanning basis of S inside real (p,p) coordinates.

    ``lifts[j]`` is an auxiliary form attached to ``basis[j]``: the closed
    2p-form whose (p,p) part it is (pS), a primitive (E1: gamma with
    i del delbar gamma; E2: Gamma with dGamma; E4: the (p,p-1)-part beta), or
    None.  Lifts are linear, so a combination of basis vectors lifts to the
    same combination.
    """

    cls: ClassId
    n: int
    basis: list
    lifts: Optional[list] = None
    lift_kind: str = ""

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def ambient_dim(self) -> int:
        return len(real_pp_layout(self.n, self.cls.p))

    def form(self, z) -> Form:
        x = self.vector(z)
        return bidegree_space(self.n, self.cls.p, self.cls.p).to_form(x)

    def vector(self, z) -> list:
        d = self.ambient_dim
        return [sum((Fraction(zj) * b[i] for zj, b in zip(z, self.basis)), Fraction(0)) for i in range(d)]

    def lift(self, z) -> Optional[Form]:
        if self.lifts is None:
            return None
        out = None
        for zj, L in zip(z, self.lifts):
            if zj:
                term = L.scale(Fraction(zj))
                out = term if out is None else out + term
        return out if out is not None else Form.zero(self.n)

    def contains(self, omega: Form) -> bool:
        x = real_pp_coords(omega, self.cls.p) if not omega.is_zero() else [Fraction(0)] * self.ambient_dim
        return linalg.in_span(self.basis, x, self.ambient_dim)


def _with_lifts(vecs_src: list, op, n: int, p: int):
    """Independent images ``op(v)`` in (p,p) coordinates with their sources."""
    pp = bidegree_space(n, p, p)
    images = [op.apply(v) for v in vecs_src]
    keep = linalg.span_basis(images, pp.dim) if images else []
    out_b, out_l, used = [], [], set()
    for b in keep:
        j = next(j for j, im in enumerate(images) if im == b and j not in used)
        used.add(j)
        out_b.append(b)
        out_l.append(op.source.to_form(vecs_src[j]))
    return out_b, out_l


def class_subspace(c: GradedComplex, cls: ClassId) -> ClassSubspace:
    n, p = c.n, cls.p
    if not 1 <= p <= n - 1:
        raise ValueError(f"p must lie in [1, {n - 1}] for n={n}")
    cache = c.__dict__.setdefault("_class_cache", {})
    if cls in cache:
        return cache[cls]
    pp = bidegree_space(n, p, p)
    dim = pp.dim
    tag = cls.tag
    sub = None
    if tag == "pK":
        sub = ClassSubspace(cls, n, c.operator(OperatorId("sigma_2q+1", p)).kernel())
    elif tag == "pWK":
        vecs = c.operator(OperatorId("sigma_2q+1", p)).kernel() + c.operator(OperatorId("sigma_2p-1", p)).image()
        sub = ClassSubspace(cls, n, linalg.span_basis(vecs, dim))
    elif tag == "pS":
        dm = c.operator(OperatorId("d_2p", p))
        ker = dm.kernel()
        images = [dm.source.project(v, (p, p)) for v in ker]
        keep = linalg.span_basis(images, dim)
        basis, lifts, used = [], [], set()
        for b in keep:
            j = next(j for j, im in enumerate(images) if im == b and j not in used)
            used.add(j)
            basis.append(b)
            lifts.append(dm.source.to_form(ker[j]))
        sub = ClassSubspace(cls, n, basis, lifts, "closed 2p-form Psi with (p,p)-part Omega")
    elif tag == "pPL":
        sub = ClassSubspace(cls, n, c.operator(OperatorId("sigma_2p", p)).kernel())
    elif tag == "E1":
        op = c.operator(OperatorId("sigma_2q", p))
        src = [op.source.basis_vector(j) for j in range(op.source.dim)]
        b, l = _with_lifts(src, op, n, p)
        sub = ClassSubspace(cls, n, b, l, "gamma with i del delbar gamma = Omega")
    elif tag == "E2":
        sub = _pure_exact(c, cls)
    elif tag == "E3":
        im = c.operator(OperatorId("sigma_2p-1", p)).image()
        ker = c.operator(OperatorId("sigma_2q+1", p)).kernel()
        sub = ClassSubspace(cls, n, linalg.intersect(im, ker, dim))
    else:
        op = c.operator(OperatorId("sigma_2p-1", p))
        src = [op.source.basis_vector(j) for j in range(op.source.dim)]
        b, l = _with_lifts(src, op, n, p)
        sub = ClassSubspace(cls, n, b, l, "beta with delbar beta + del bbar = Omega")
    cache[cls] = sub
    return sub


def _pure_exact(c: GradedComplex, cls: ClassId) -> ClassSubspace:
    """(p,p)-forms that are d of a real (2p-1)-form."""
    n, p = c.n, cls.p
    dm = c.operator(OperatorId("d_2p-1", p))
    tgt = dm.target
    rows_off = []
    pos = 0
    for a, b in tgt.blocks:
        size = len(tgt.project([0] * tgt.dim, (a, b)))
        if (a, b) != (p, p):
            rows_off.extend(range(pos, pos + size))
        pos += size
    m = dm.matrix
    off = [m[r] for r in rows_off]
    ker = linalg.nullspace(off, dm.source.dim) if off else [dm.source.basis_vector(j) for j in range(dm.source.dim)]
    images = [tgt.project(dm.apply(v), (p, p)) for v in ker]
    dim = len(real_pp_layout(n, p))
    keep = linalg.span_basis(images, dim)
    basis, lifts, used = [], [], set()
    for b in keep:
        j = next(j for j, im in enumerate(images) if im == b and j not in used)
        used.add(j)
        basis.append(b)
        lifts.append(dm.source.to_form(ker[j]))
    return ClassSubspace(cls, n, basis, lifts, "real (2p-1)-form Gamma with dGamma = Omega")


# --- evaluation functionals ---------------------------------------------------

def evaluation_vector(n: int, p: int, V: SimpleVector) -> list:
    """Exact e with ``evaluate(Omega, V) = e . coords(Omega)``."""
    pl = V.plucker()
    out = []
    for kind, I, J in real_pp_layout(n, p):
        a, b = pl.get(I), pl.get(J)
        if a is None or b is None:
            out.append(Fraction(0))
            continue
        u = a * b.conjugate()
        if kind == "d":
            out.append(u.re)
        elif kind == "re":
            out.append(2 * u.re)
        else:
            out.append(-2 * u.im)
    return out


def _dot(a, b) -> Fraction:
    return sum((Fraction(x) * Fraction(y) for x, y in zip(a, b)), Fraction(0))


def normalizer(n: int, p: int) -> tuple:
    """(t, target): ``f(Omega, gamma^{n-p}) = t . coords(Omega)`` and its value at gamma^p."""
    F = pairing_matrix(n, p)
    gk = real_pp_coords(gamma_power(n, n - p))
    t = [sum((F[i][j] * gk[j] for j in range(len(gk))), Fraction(0)) for i in range(len(F))]
    g = real_pp_coords(gamma_power(n, p))
    return t, _dot(t, g)


class _Atoms:
    def __init__(self, n: int, p: int):
        self.n, self.p = n, p
        self.frames, self.exact, self._seen = [], [], set()
        self.gvals = []
        self._g = real_pp_coords(gamma_power(n, p))

    def add(self, V: SimpleVector) -> bool:
        e = evaluation_vector(self.n, self.p, V)
        if all(x == 0 for x in e):
            return False
        scale = max(abs(x) for x in e)
        key = tuple(x / scale for x in e)
        if key in self._seen:
            return False
        self._seen.add(key)
        self.frames.append(V)
        self.exact.append(e)
        self.gvals.append(_dot(e, self._g))
        return True

    def seed(self, seed: int, frames: int = 2):
        n, p = self.n, self.p
        for I in multi_indices(n, p):
            self.add(SimpleVector.coordinate(n, I))
        rng = np.random.default_rng(seed)
        for _ in range(frames):
            U = random_unitary(n, rng)
            for I in multi_indices(n, p):
                self.add(rationalize_frame(U[:, [i - 1 for i in I]], ATOM_DENOMINATOR))

    def numeric(self) -> np.ndarray:
        return np.array([[float(x) for x in e] for e in self.exact])


# --- certificates -----------------------------------------------------------

@dataclass
class Certificate:
    kind: str
    cls: ClassId
    omega: Optional[list] = None  # exact real (p,p) coordinates
    margin: Optional[float] = None
    witness: Optional[SimpleVector] = None
    lift: Optional[Form] = None
    atoms: Optional[list] = None  # [(lam, SimpleVector)]
    residual: Optional[list] = None
    mass: Optional[Fraction] = None
    iterations: int = 0
    constraints: int = 0
    source: str = "direct"
    note: str = ""

    def omega_form(self, n: int) -> Optional[Form]:
        if self.omega is None:
            return None
        return bidegree_space(n, self.cls.p, self.cls.p).to_form(self.omega)

    def functional(self) -> Optional[list]:
        if self.atoms is None:
            return None
        n = self.atoms[0][1].n if self.atoms else None
        if n is None:
            return []
        p = self.cls.p
        out = [Fraction(0)] * len(real_pp_layout(n, p))
        for lam, V in self.atoms:
            for i, x in enumerate(evaluation_vector(n, p, V)):
                out[i] += lam * x
        return out

    # serialisation
    def to_dict(self) -> dict:
        d = {"kind": self.kind, "class": self.cls.tag, "p": self.cls.p,
             "iterations": self.iterations, "constraints": self.constraints, "source": self.source}
        if self.note:
            d["note"] = self.note
        if self.omega is not None:
            d["omega"] = [str(x) for x in self.omega]
        if self.margin is not None:
            d["margin"] = self.margin
        if self.witness is not None:
            d["witness"] = _frame_to_json(self.witness)
        if self.lift is not None:
            d["lift"] = _form_to_json(self.lift)
        if self.atoms is not None:
            d["atoms"] = [{"lambda": str(l), "frame": _frame_to_json(V)} for l, V in self.atoms]
        if self.residual is not None:
            d["residual"] = [str(x) for x in self.residual]
        if self.mass is not None:
            d["mass"] = str(self.mass)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        return cls(
            kind=d["kind"], cls=ClassId(d["class"], int(d["p"])),
            omega=[Fraction(x) for x in d["omega"]] if "omega" in d else None,
            margin=d.get("margin"),
            witness=_frame_from_json(d["witness"]) if "witness" in d else None,
            lift=_form_from_json(d["lift"]) if "lift" in d else None,
            atoms=[(Fraction(a["lambda"]), _frame_from_json(a["frame"])) for a in d["atoms"]] if "atoms" in d else None,
            residual=[Fraction(x) for x in d["residual"]] if "residual" in d else None,
            mass=Fraction(d["mass"]) if "mass" in d else None,
            iterations=d.get("iterations", 0), constraints=d.get("constraints", 0),
            source=d.get("source", "direct"), note=d.get("note", ""),
        )

    def to_json(self) -> str:
        return json.dumps({"schema": SCHEMA, "certificate": self.to_dict()}, sort_keys=True)


def _frame_to_json(V: SimpleVector) -> list:
    return [[[str(z.re), str(z.im)] for z in row] for row in V.rows]


def _frame_from_json(rows) -> SimpleVector:
    from .exterior import Scalar

    return SimpleVector([[Scalar(Fraction(a), Fraction(b)) for a, b in row] for row in rows])


def _form_to_json(f: Form) -> dict:
    terms = [{"I": list(I), "J": list(J), "re": str(c.re), "im": str(c.im)}
             for (I, J), c in sorted(f.coeffs.items())]
    return {"n": f.n, "terms": terms}


def _form_from_json(d) -> Form:
    from .exterior import Scalar

    coeffs = {(tuple(t["I"]), tuple(t["J"])): Scalar(Fraction(t["re"]), Fraction(t["im"])) for t in d["terms"]}
    return Form(int(d["n"]), coeffs)


# --- validation -----------------------------------------------------------------

def min_margin(omega: Form, seed: int = 0, starts: int = DEFAULT_STARTS) -> tuple:
    """(min over unit simple V of evaluate(Omega, V) / p!, minimising frame)."""
    p = omega.p
    h = hermitian_matrix(omega, p)
    res = min_decomposable(h.T, omega.n, p, starts=starts, seed=seed)
    return res.value / factorial(p), res


def validate_primal(c: GradedComplex, cert: Certificate, tol: float = DEFAULT_TOL, seed: int = 0) -> bool:
    """Exact membership in S plus a numerical transversality margin >= tol."""
    if cert.kind != PRIMAL or cert.omega is None:
        return False
    sub = class_subspace(c, cert.cls)
    if not linalg.in_span(sub.basis, cert.omega, sub.ambient_dim):
        return False
    if all(x == 0 for x in cert.omega):
        return False
    m, _ = min_margin(cert.omega_form(c.n), seed=seed)
    return m >= tol


def validate_dual(c: GradedComplex, cert: Certificate) -> bool:
    """Exact: lam >= 0, T annihilates a basis of S, T(gamma^p) = 1."""
    if cert.kind != DUAL or not cert.atoms:
        return False
    if any(l < 0 for l, _ in cert.atoms):
        return False
    sub = class_subspace(c, cert.cls)
    T = cert.functional()
    if any(_dot(T, s) != 0 for s in sub.basis):
        return False
    g = real_pp_coords(gamma_power(c.n, cert.cls.p))
    return _dot(T, g) == 1


# --- cutting-plane engine -----------------------------------------------------

@dataclass
class _Run:
    primal: Optional[Certificate]
    atoms: _Atoms
    lp_value: Optional[float]
    iterations: int
    note: str = ""


def _solve_master(sub: ClassSubspace, atoms: _Atoms, t: list, target: Fraction, box: float):
    """max c : e_i . (B z) >= c * g_i, t . B z = target, |B z| <= box."""
    B = np.array([[float(x) for x in b] for b in sub.basis]).T  # ambient x m
    E = atoms.numeric()
    g = np.array([float(x) for x in atoms.gvals])
    m = B.shape[1]
    EB = E @ B
    A_ub = np.vstack([
        np.hstack([-EB, g[:, None]]),
        np.hstack([B, np.zeros((B.shape[0], 1))]),
        np.hstack([-B, np.zeros((B.shape[0], 1))]),
    ])
    b_ub = np.concatenate([np.zeros(len(g)), np.full(2 * B.shape[0], box)])
    tB = np.array([float(x) for x in t]) @ B
    A_eq = np.concatenate([tB, [0.0]])[None, :]
    obj = np.zeros(m + 1)
    obj[-1] = -1.0
    res = linprog(obj, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[float(target)],
                  bounds=[(None, None)] * (m + 1), method="highs")
    return res


def _rationalize_primal(sub: ClassSubspace, z: np.ndarray, t: list, target: Fraction) -> Optional[list]:
    zq = [rationalize(v) for v in z]
    x = sub.vector(zq)
    mass = _dot(t, x)
    if mass <= 0:
        return None
    s = target / mass
    return [zj * s for zj in zq]


def _engine(c: GradedComplex, cls: ClassId, tol: float, seed: int, max_iter: int) -> _Run:
    cache = c.__dict__.setdefault("_engine_cache", {})
    key = (cls, tol, seed, max_iter)
    if key in cache:
        return cache[key]
    n, p = c.n, cls.p
    sub = class_subspace(c, cls)
    atoms = _Atoms(n, p)
    atoms.seed(seed)
    t, target = normalizer(n, p)
    box = 1e3 * float(factorial(p))
    run = _Run(None, atoms, None, 0)
    if sub.dim == 0:
        run.note = "class subspace is zero"
        cache[key] = run
        return run
    it = 0
    for it in range(1, max_iter + 1):
        res = _solve_master(sub, atoms, t, target, box)
        if res.status != 0:
            run.note = "master LP infeasible" if res.status == 2 else f"master LP status {res.status}"
            run.lp_value = None
            break
        z, lp = res.x[:-1], float(res.x[-1])
        run.lp_value = lp
        if lp <= tol:
            run.note = "master LP value below tolerance"
            break
        zq = _rationalize_primal(sub, z, t, target)
        if zq is not None:
            x = sub.vector(zq)
            omega = bidegree_space(n, p, p).to_form(x)
            margin, found = min_margin(omega, seed=seed + it)
            if margin >= tol:
                run.primal = Certificate(
                    PRIMAL, cls, omega=x, margin=margin,
                    witness=rationalize_frame(found.frame), lift=sub.lift(zq),
                    iterations=it, constraints=len(atoms.frames))
                break
        else:
            omega = bidegree_space(n, p, p).to_form(sub.vector([rationalize(v) for v in z]))
            margin, found = min_margin(omega, seed=seed + it)
        added = False
        fact = factorial(p)
        for val, frame in found.distinct(limit=6, below=(lp - 1e-12) * fact):
            added |= atoms.add(rationalize_frame(frame, ATOM_DENOMINATOR))
        if not added:
            run.note = "no new cuts"
            break
    run.iterations = it
    cache[key] = run
    return run


def find_primal(c: GradedComplex, cls: ClassId, tol: float = DEFAULT_TOL, seed: int = 0,
                max_iter: int = MAX_ITER) -> Certificate:
    run = _engine(c, cls, tol, seed, max_iter)
    if run.primal is not None:
        return run.primal
    return Certificate(INDETERMINATE, cls, iterations=run.iterations,
                       constraints=len(run.atoms.frames), note=run.note)


def find_dual(c: GradedComplex, cls: ClassId, tol: float = DEFAULT_TOL, seed: int = 0,
              max_iter: int = MAX_ITER) -> Certificate:
    """LP ``lam >= 0, T(s_j) = 0, T(gamma^p) = 1`` over the engine's atoms, solved exactly on its support."""
    run = _engine(c, cls, tol, seed, max_iter)
    atoms = run.atoms
    sub = class_subspace(c, cls)
    cert = _dual_lp(sub, atoms)
    if cert is not None:
        cert.iterations, cert.constraints = run.iterations, len(atoms.frames)
        return cert
    return Certificate(INDETERMINATE, cls, iterations=run.iterations,
                       constraints=len(atoms.frames), note=run.note or "no dual over current atoms")


def _dual_lp(sub: ClassSubspace, atoms: _Atoms) -> Optional[Certificate]:
    na = len(atoms.frames)
    rows_exact = [[_dot(e, s) for e in atoms.exact] for s in sub.basis]
    rows_exact.append(list(atoms.gvals))
    rhs = [Fraction(0)] * len(sub.basis) + [Fraction(1)]
    A = np.array([[float(x) for x in r] for r in rows_exact]).reshape(len(rows_exact), na)
    k = A.shape[0]
    # L1 phase one: min |r| subject to A lam + r+ - r- = rhs
    obj = np.concatenate([np.zeros(na), np.ones(2 * k)])
    A_eq = np.hstack([A, np.eye(k), -np.eye(k)])
    res = linprog(obj, A_eq=A_eq, b_eq=[float(x) for x in rhs], bounds=(0, None), method="highs")
    if res.status != 0 or res.fun > 1e-7:
        return None
    lam = res.x[:na]
    support = [i for i in np.argsort(-lam, kind="stable") if lam[i] > 1e-12]
    if not support:
        return None
    cols = [[row[j] for j in support] for row in rows_exact]
    sol = linalg.solve(cols, rhs, len(support))
    if sol is None or any(s < 0 for s in sol):
        return None
    chosen = [(s, atoms.frames[j]) for s, j in zip(sol, support) if s != 0]
    cert = Certificate(DUAL, sub.cls, atoms=chosen, mass=Fraction(1))
    T = cert.functional()
    cert.residual = [_dot(T, s) for s in sub.basis]
    return cert


# --- classification ---------------------------------------------------------------

@dataclass
class Cell:
    p: int
    tag: str
    verdict: str
    primal: Optional[Certificate] = None
    dual: Optional[Certificate] = None
    seconds: float = 0.0

    def to_dict(self, timings: bool = True) -> dict:
        d = {"p": self.p, "class": self.tag, "verdict": self.verdict,
             "primal": self.primal.to_dict() if self.primal else None,
             "dual": self.dual.to_dict() if self.dual else None}
        if timings:
            d["seconds"] = self.seconds
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Cell":
        return cls(d["p"], d["class"], d["verdict"],
                   Certificate.from_dict(d["primal"]) if d.get("primal") else None,
                   Certificate.from_dict(d["dual"]) if d.get("dual") else None,
                   d.get("seconds", 0.0))


@dataclass
class DetectionReport:
    model: str
    n: int
    tol: float
    seed: int
    cells: list = field(default_factory=list)
    exclusive: bool = True
    monotone: bool = True
    scope: str = SCOPE

    def cell(self, p: int, tag: str) -> Optional[Cell]:
        return next((x for x in self.cells if x.p == p and x.tag == tag), None)

    def verdict(self, p: int, tag: str) -> Optional[str]:
        x = self.cell(p, tag)
        return x.verdict if x else None

    @property
    def consistent(self) -> bool:
        return self.exclusive and self.monotone

    def to_dict(self, timings: bool = True) -> dict:
        return {"schema": SCHEMA, "model": self.model, "n": self.n, "tol": self.tol, "seed": self.seed,
                "scope": self.scope, "exclusive": self.exclusive, "monotone": self.monotone,
                "cells": [x.to_dict(timings) for x in self.cells]}

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "DetectionReport":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {d.get('schema')!r}")
        return cls(d["model"], d["n"], d["tol"], d["seed"], [Cell.from_dict(x) for x in d["cells"]],
                   d["exclusive"], d["monotone"], d.get("scope", SCOPE))

    @classmethod
    def from_json(cls, text: str) -> "DetectionReport":
        return cls.from_dict(json.loads(text))


def classify(c: GradedComplex, p_range=None, classes=None, tol: float = DEFAULT_TOL, seed: int = 0,
             max_iter: int = MAX_ITER, strict: bool = True) -> DetectionReport:
    """Primal/dual search per (p, class), then propagation along exact inclusions.

    A primal certificate for a subspace is one for every larger subspace and
    a dual for a subspace is one for every smaller one; inclusions are
    checked by exact rank before anything is propagated.
    """
    n = c.n
    ps = list(p_range) if p_range is not None else list(range(1, n))
    tags = list(classes) if classes is not None else list(CLASS_TAGS)
    for t in tags:
        ClassId(t, 1)
    report = DetectionReport(c.model.name, n, tol, seed)
    for p in ps:
        # propagation needs the whole column, so solve every class of this p
        found = {}
        for tag in CLASS_TAGS:
            t0 = time.perf_counter()
            cls = ClassId(tag, p)
            pr = find_primal(c, cls, tol, seed, max_iter)
            du = find_dual(c, cls, tol, seed, max_iter)
            pr = pr if pr.kind == PRIMAL and validate_primal(c, pr, tol, seed) else None
            du = du if du.kind == DUAL and validate_dual(c, du) else None
            if pr is not None and du is not None:
                report.exclusive = False
                if strict:
                    raise ConsistencyError(f"{cls}: primal and dual certificates both validate")
            found[tag] = [pr, du, time.perf_counter() - t0]
        _propagate(c, p, found)
        for tag in CLASS_TAGS:
            pr, du, secs = found[tag]
            if pr is not None and du is not None:
                report.exclusive = False
                if strict:
                    raise ConsistencyError(f"{tag}(p={p}): primal and dual certificates both hold")
            verdict = PRIMAL if pr is not None else DUAL if du is not None else INDETERMINATE
            if tag in tags:
                report.cells.append(Cell(p, tag, verdict, pr, du, secs))
        if not _monotone(found):
            report.monotone = False
            if strict:
                raise ConsistencyError(f"p={p}: verdicts violate the class implications")
    return report


def _propagate(c: GradedComplex, p: int, found: dict):
    subs = {tag: class_subspace(c, ClassId(tag, p)) for tag in CLASS_TAGS}
    dim = subs["pPL"].ambient_dim
    for big in CLASS_TAGS:
        for small in implied_by(big):
            if not linalg.subspace_contains(subs[big].basis, subs[small].basis, dim):
                continue
            ps, ds = found[small][0], found[small][1]
            pb, db = found[big][0], found[big][1]
            if ps is not None and pb is None:
                cert = Certificate(PRIMAL, ClassId(big, p), omega=ps.omega, margin=ps.margin,
                                   witness=ps.witness, iterations=ps.iterations,
                                   constraints=ps.constraints, source=f"inclusion from {small}")
                found[big][0] = cert
            if db is not None and ds is None:
                cert = Certificate(DUAL, ClassId(small, p), atoms=db.atoms, mass=db.mass,
                                   iterations=db.iterations, constraints=db.constraints,
                                   source=f"inclusion from {big}")
                T = cert.functional()
                cert.residual = [_dot(T, s) for s in subs[small].basis]
                found[small][1] = cert


def _monotone(found: dict) -> bool:
    for big in CLASS_TAGS:
        for small in implied_by(big):
            if found[small][0] is not None and found[big][0] is None:
                return False
            if found[big][1] is not None and found[small][1] is None:
                return False
    return True
