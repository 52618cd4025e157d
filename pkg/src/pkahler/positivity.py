"""Membership tests for the cones SP^p ⊆ P^p ⊆ WP^p of real (p,p)-forms.

P^p is a spectrahedral condition and is decided exactly.  WP^p and
transversality quantify over the Grassmannian and are semi-decided by a
multi-start search; SP^p is decided by column generation.  Every OUT verdict
carries a witness that can be re-checked in exact arithmetic, and every SP
IN verdict carries a decomposition that re-sums exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from . import linalg
from .exterior import (
    Form,
    Scalar,
    SimpleVector,
    ZERO,
    evaluate,
    gamma_power,
    hermitian_matrix,
    multi_indices,
    pairing_f,
    real_pp_coords,
    real_pp_dim,
    real_pp_form,
    real_pp_layout,
    sigma_const,
    wedge,
)
from .search import (
    DEFAULT_STARTS,
    min_decomposable,
    random_unitary,
    rationalize,
    rationalize_frame,
)

IN, OUT, INDETERMINATE = "IN", "OUT", "INDETERMINATE"
DEFAULT_TOL = 1e-9
ATOM_DENOMINATOR = 1000


@dataclass
class HermitianMatrix:
    index: list  # k-multi-indices labelling rows and columns
    entries: list  # list of rows of Scalar

    def __post_init__(self):
        m = len(self.entries)
        for a in range(m):
            for b in range(m):
                if self.entries[a][b] != self.entries[b][a].conjugate():
                    raise ValueError("matrix is not Hermitian")

    @property
    def size(self) -> int:
        return len(self.entries)

    def quadratic(self, eta) -> Scalar:
        """``eta^* Q eta`` for a coefficient list ``eta``."""
        total = ZERO
        for a, ea in enumerate(eta):
            for b, eb in enumerate(eta):
                total = total + Scalar.coerce(ea).conjugate() * self.entries[a][b] * eb
        return total


@dataclass
class ConeVerdict:
    cone: str  # SP, P, WP, WP-interior
    status: str  # IN, OUT, INDETERMINATE
    margin: Optional[float] = None
    witness: object = None  # SimpleVector for WP/transverse, (k,0)-Form for P
    decomposition: Optional[list] = None  # SP: [(weight, SimpleVector of covector factors)]
    separator: Optional[Form] = None  # SP OUT: a weakly positive (k,k)-form
    iterations: int = 0

    def __bool__(self):
        return self.status == IN


def _require_real(omega: Form) -> int:
    p, q = omega.bidegree
    if p != q:
        raise ValueError(f"expected a (p,p)-form, got ({p},{q})")
    if not omega.is_real():
        raise ValueError("form is not real")
    return p


# --- P^p -------------------------------------------------------------------

def positivity_matrix(omega: Form) -> HermitianMatrix:
    """Q with ``eta^* Q eta dv = Omega ^ sigma_k eta ^ conj(eta)``."""
    p = _require_real(omega)
    n = omega.n
    k = n - p
    idx = multi_indices(n, k)
    sk = sigma_const(k)
    Q = [[pairing_f(omega, Form(n, {(I, J): sk}, (k, k))) for I in idx] for J in idx]
    return HermitianMatrix(idx, Q)


def _psd_witness(m: list) -> Optional[list]:
    """None if the rational symmetric matrix is PSD, else x with x^T m x < 0."""
    size = len(m)
    if size == 0:
        return None
    a = m[0][0]
    if a < 0:
        return [Fraction(1)] + [Fraction(0)] * (size - 1)
    if a == 0:
        j = next((j for j in range(1, size) if m[0][j] != 0), None)
        if j is None:
            sub = _psd_witness([row[1:] for row in m[1:]])
            return None if sub is None else [Fraction(0)] + sub
        t = -(m[j][j] + 1) / (2 * m[0][j])
        x = [Fraction(0)] * size
        x[0], x[j] = t, Fraction(1)
        return x
    col = [m[i][0] for i in range(1, size)]
    schur = [[m[i][j] - col[i - 1] * col[j - 1] / a for j in range(1, size)] for i in range(1, size)]
    sub = _psd_witness(schur)
    if sub is None:
        return None
    lead = -sum((c * y for c, y in zip(col, sub)), Fraction(0)) / a
    return [lead] + sub


def is_positive(omega: Form) -> ConeVerdict:
    """Exact decision of ``Omega ∈ P^p`` via a pivoted LDL^T on the real embedding."""
    Q = positivity_matrix(omega)
    m = Q.size
    A = [[Q.entries[i][j].re for j in range(m)] for i in range(m)]
    B = [[Q.entries[i][j].im for j in range(m)] for i in range(m)]
    big = [A[i] + [-x for x in B[i]] for i in range(m)] + [B[i] + A[i] for i in range(m)]
    x = _psd_witness(big)
    if x is None:
        return ConeVerdict("P", IN)
    n, k = omega.n, omega.n - omega.p
    eta = Form(n, {(I, ()): Scalar(x[a], x[m + a]) for a, I in enumerate(Q.index)}, (k, 0))
    val = Q.quadratic([Scalar(x[a], x[m + a]) for a in range(m)])
    return ConeVerdict("P", OUT, margin=float(val.re), witness=eta)


def positive_witness_value(omega: Form, eta: Form) -> Scalar:
    """``f(Omega, sigma_k eta ^ conj(eta))``; negative for a valid P witness."""
    k = eta.p
    return pairing_f(omega, wedge(eta, eta.conjugate()).scale(sigma_const(k)))


# --- WP^p and transversality -----------------------------------------------

def _min_evaluation(omega: Form, starts: int, seed: int):
    h = hermitian_matrix(omega)
    return min_decomposable(h.T, omega.n, omega.p, starts=starts, seed=seed)


def _exact_violator(omega: Form, res, strict: bool) -> Optional[tuple]:
    """Rationalised minimiser with ``evaluate < 0`` (or ``<= 0`` when not strict)."""
    for _, frame in res.distinct(limit=4):
        V = rationalize_frame(frame)
        if V.is_zero():
            continue
        val = evaluate(omega, V)
        if val.re < 0 or (not strict and val.re == 0):
            return V, val
    return None


def is_weakly_positive(omega: Form, tol: float = DEFAULT_TOL, starts: int = DEFAULT_STARTS,
                       seed: int = 0) -> ConeVerdict:
    """Semi-decide ``Omega ∈ WP^p``: OUT only with an exact negative violator."""
    _require_real(omega)
    if omega.is_zero():
        return ConeVerdict("WP", IN, margin=0.0)
    res = _min_evaluation(omega, starts, seed)
    if res.value >= tol:
        return ConeVerdict("WP", IN, margin=res.value)
    hit = _exact_violator(omega, res, strict=True)
    if hit is not None:
        return ConeVerdict("WP", OUT, margin=res.value, witness=hit[0])
    return ConeVerdict("WP", INDETERMINATE, margin=res.value,
                       witness=rationalize_frame(res.frame))


def is_transverse(omega: Form, tol: float = DEFAULT_TOL, starts: int = DEFAULT_STARTS,
                  seed: int = 0) -> ConeVerdict:
    """IN iff the minimum of ``evaluate`` over unit simple vectors is at least ``tol``."""
    _require_real(omega)
    if omega.is_zero():
        n, p = omega.n, omega.p
        return ConeVerdict("WP-interior", OUT, margin=0.0,
                           witness=SimpleVector.coordinate(n, tuple(range(1, p + 1))))
    res = _min_evaluation(omega, starts, seed)
    if res.value >= tol:
        return ConeVerdict("WP-interior", IN, margin=res.value, witness=rationalize_frame(res.frame))
    hit = _exact_violator(omega, res, strict=False)
    if hit is not None:
        return ConeVerdict("WP-interior", OUT, margin=res.value, witness=hit[0])
    return ConeVerdict("WP-interior", INDETERMINATE, margin=res.value,
                       witness=rationalize_frame(res.frame))


# --- SP^p ------------------------------------------------------------------

def functional_hermitian(n: int, p: int, w) -> np.ndarray:
    """G with ``w . coords(sigma_p eta ^ conj(eta)) = eta^* G eta``."""
    idx = multi_indices(n, p)
    pos = {I: a for a, I in enumerate(idx)}
    G = np.zeros((len(idx), len(idx)), dtype=complex)
    for (kind, I, J), c in zip(real_pp_layout(n, p), w):
        a, b = pos[I], pos[J]
        if kind == "d":
            G[a, a] += c
        elif kind == "re":
            G[a, b] += c / 2
            G[b, a] += c / 2
        else:
            G[a, b] += 1j * c / 2
            G[b, a] -= 1j * c / 2
    return G


def atom_coords(n: int, p: int, eta: dict) -> list:
    """Real coordinates of ``sigma_p eta ^ conj(eta)`` from Plücker data ``I -> eta_I``."""
    out = []
    for kind, I, J in real_pp_layout(n, p):
        a = eta.get(I)
        b = eta.get(J)
        if a is None or b is None:
            out.append(Fraction(0))
            continue
        h = a * b.conjugate()
        out.append(h.im if kind == "im" else h.re)
    return out


def atom_form(eta_frame: SimpleVector) -> Form:
    """``sigma_p eta ^ conj(eta)`` with ``eta`` the wedge of the frame's columns as covectors."""
    n, p = eta_frame.n, eta_frame.p
    return real_pp_form(n, p, atom_coords(n, p, eta_frame.plucker()))


def resum_decomposition(n: int, p: int, decomposition: list) -> Form:
    total = Form.zero(n, p, p)
    for w, frame in decomposition:
        total = total + atom_form(frame).scale(w)
    return total


@lru_cache(maxsize=None)
def pairing_matrix(n: int, p: int) -> tuple:
    """Exact F with ``f(X, Y) = coords(X)^T F coords(Y)`` for X (p,p), Y (k,k)."""
    k = n - p
    dp, dk = real_pp_dim(n, p), real_pp_dim(n, k)
    bp = [real_pp_form(n, p, [int(i == a) for i in range(dp)]) for a in range(dp)]
    bk = [real_pp_form(n, k, [int(i == b) for i in range(dk)]) for b in range(dk)]
    rows = []
    for X in bp:
        row = []
        for Y in bk:
            v = pairing_f(X, Y)
            assert v.is_real()
            row.append(v.re)
        rows.append(tuple(row))
    return tuple(rows)


def form_from_functional(n: int, p: int, w: list) -> Form:
    """The real (k,k)-form Psi with ``f(X, Psi) = w . coords(X)``."""
    F = [list(r) for r in pairing_matrix(n, p)]
    psi = linalg.solve(F, w, len(F[0]))
    if psi is None:
        raise ArithmeticError("pairing matrix is singular")
    return real_pp_form(n, n - p, psi)


class _AtomPool:
    """Rational simple covectors and their real coordinates (exact and float)."""

    def __init__(self, n: int, p: int):
        self.n, self.p = n, p
        self.frames: list = []
        self.exact: list = []
        self.numeric: list = []
        self._seen: set = set()

    def add(self, frame: SimpleVector) -> bool:
        pl = frame.plucker()
        if not pl:
            return False
        key = tuple(sorted(pl.items(), key=lambda kv: kv[0]))
        # normalise projectively for deduplication
        lead = key[0][1]
        key = tuple((K, v / lead) for K, v in key)
        if key in self._seen:
            return False
        self._seen.add(key)
        coords = atom_coords(self.n, self.p, pl)
        self.frames.append(frame)
        self.exact.append(coords)
        self.numeric.append(np.array([float(c) for c in coords]))
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

    def matrix(self) -> np.ndarray:
        return np.array(self.numeric).T


def _exact_decomposition(pool: _AtomPool, lam: np.ndarray, target: list) -> Optional[list]:
    """Exact non-negative weights on the LP support reproducing ``target``, or None."""
    dim = len(target)
    order = list(np.argsort(-lam))
    support = [i for i in order if lam[i] > 1e-12]
    candidates = [support]
    extended = list(support)
    basis = linalg.span_basis([pool.exact[i] for i in extended], dim) if extended else []
    r = len(basis)
    for i in order:
        if r >= dim:
            break
        if i in extended:
            continue
        if linalg.rank([pool.exact[j] for j in extended] + [pool.exact[i]], dim) > r:
            extended.append(i)
            r += 1
    if extended != support:
        candidates.append(extended)
    for cols in candidates:
        if not cols:
            if all(t == 0 for t in target):
                return []
            continue
        A = [[pool.exact[j][row] for j in cols] for row in range(dim)]
        sol = linalg.solve(A, target, len(cols))
        if sol is None or any(s < 0 for s in sol):
            continue
        return [(s, pool.frames[j]) for s, j in zip(sol, cols) if s != 0]
    return None


def is_strongly_positive(omega: Form, tol: float = DEFAULT_TOL, seed: int = 0,
                         max_iter: int = 200, starts: int = DEFAULT_STARTS) -> ConeVerdict:
    """Column generation over ``sigma_p eta ^ conj(eta)`` atoms.

    Solves the L1 phase-one LP ``min |s| : A lam + s = Omega, lam >= 0``.  A
    zero optimum is turned into an exact decomposition; otherwise the LP dual
    is a functional negative on Omega and non-negative on the current atoms.
    Pricing minimises it over all simple covectors: a negative minimum gives
    new atoms, a (nearly) non-negative one gives a separating (k,k)-form which
    is shifted by a multiple of gamma^k into the interior of WP^k and
    re-checked.
    """
    p = _require_real(omega)
    n, k = omega.n, omega.n - p
    if omega.is_zero():
        return ConeVerdict("SP", IN, decomposition=[])
    quick = _separator_from_p_witness(omega, tol, seed)
    if quick is not None:
        return ConeVerdict("SP", OUT, margin=float(pairing_f(omega, quick).re), separator=quick)
    target = real_pp_coords(omega)
    scale = max(abs(float(t)) for t in target)
    b = np.array([float(t) for t in target]) / scale
    dim = len(target)
    gk = gamma_power(n, k)
    mass = float(pairing_f(omega, gk).re) / scale
    pool = _AtomPool(n, p)
    pool.seed(seed)
    for it in range(1, max_iter + 1):
        A = pool.matrix()
        na = A.shape[1]
        c = np.concatenate([np.zeros(na), np.ones(2 * dim)])
        A_eq = np.hstack([A, np.eye(dim), -np.eye(dim)])
        res = linprog(c, A_eq=A_eq, b_eq=b, bounds=(0, None), method="highs")
        if res.status != 0:
            break
        v = res.fun
        lam = res.x[:na]
        if v <= 1e-10:
            decomp = _exact_decomposition(pool, lam, target)
            if decomp is not None:
                return ConeVerdict("SP", IN, decomposition=decomp, iterations=it)
            break
        y = res.eqlin.marginals
        w = -y  # functional: >= 0 on atoms, = -v on Omega
        found = min_decomposable(functional_hermitian(n, p, w), n, p, starts=starts, seed=seed + it)
        m = found.value
        required = (2 * max(-m, 0.0) + 10 * tol) / factorial(k)
        # largest shift keeping f(Omega, Psi + shift gamma^k) <= -v/2
        shift = v / (2 * mass) if mass > 0 else 1.0
        if shift >= required:
            sep = _certify_separator(omega, w, shift, scale, tol, seed)
            if sep is not None:
                return ConeVerdict("SP", OUT, margin=-v, separator=sep, iterations=it)
        added = False
        for val, frame in found.distinct(limit=6, below=-1e-12):
            added |= pool.add(rationalize_frame(frame, ATOM_DENOMINATOR))
        if not added:
            break
    return ConeVerdict("SP", INDETERMINATE, iterations=it)


def _separator_from_p_witness(omega: Form, tol: float, seed: int) -> Optional[Form]:
    """SP ⊆ P: an exact P witness eta gives the atom sigma_k eta ^ conj(eta), nudged into WP interior."""
    v = is_positive(omega)
    if v.status != OUT:
        return None
    n, k = omega.n, omega.n - omega.p
    eta = v.witness
    big = max(max(abs(c.re), abs(c.im)) for c in eta.coeffs.values())
    eta = eta.scale(1 / big)
    atom = wedge(eta, eta.conjugate()).scale(sigma_const(k))
    a = pairing_f(omega, atom).re
    gk = gamma_power(n, k)
    b = pairing_f(omega, gk).re
    eps = -a / (2 * abs(b) + 1)
    psi = atom + gk.scale(eps)
    if not pairing_f(omega, psi).re < 0:
        return None
    if is_weakly_positive(psi, tol=tol, seed=seed).status != IN:
        return None
    return psi


def _certify_separator(omega: Form, w: np.ndarray, shift: float, scale: float,
                       tol: float, seed: int) -> Optional[Form]:
    n, p = omega.n, omega.p
    k = n - p
    wq = [rationalize(x) for x in w]
    psi = form_from_functional(n, p, wq) + gamma_power(n, k).scale(rationalize(shift, 10 ** 9))
    if not pairing_f(omega, psi).re < 0:
        return None
    if is_weakly_positive(psi, tol=tol, seed=seed).status != IN:
        return None
    return psi


def check_separator(omega: Form, psi: Form, tol: float = DEFAULT_TOL, seed: int = 0) -> bool:
    """Exact ``f(Omega, Psi) < 0`` plus the (numerical) WP verdict on Psi."""
    return pairing_f(omega, psi).re < 0 and is_weakly_positive(psi, tol=tol, seed=seed).status == IN
