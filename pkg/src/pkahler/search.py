"""Floating-point minimisation over decomposable p-vectors.

``min_decomposable`` minimises the Rayleigh quotient ``P^* H P / |P|^2`` where
``P`` ranges over Plücker vectors of complex n x p frames.  With all columns
but one fixed, ``P`` is linear in the free column and the problem is a small
Hermitian eigenproblem on the orthogonal complement of the fixed columns, so
every step is an exact block-coordinate minimisation.  All starts are
processed as one numpy batch.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .exterior import Scalar, SimpleVector, multi_indices

DEFAULT_STARTS = 64
MAX_DENOMINATOR = 10 ** 6


@dataclass
class SearchResult:
    value: float
    frame: np.ndarray  # n x p, orthonormal columns
    values: list = field(default_factory=list)
    frames: list = field(default_factory=list)

    def distinct(self, limit: int = 4, below: float | None = None) -> list:
        """Up to ``limit`` local minimisers with pairwise distinct planes."""
        out, planes = [], []
        for v, f in zip(self.values, self.frames):
            if below is not None and v >= below:
                break
            pl = plucker(f[None])[0]
            pl = pl / np.linalg.norm(pl)
            if any(abs(np.vdot(q, pl)) > 0.999 for q in planes):
                continue
            planes.append(pl)
            out.append((v, f))
            if len(out) >= limit:
                break
        return out


@lru_cache(maxsize=None)
def _cofactor_table(n: int, p: int):
    """For each p-index K and row r in K: (K position, r, sign, rows of K without r)."""
    table = []
    for a, K in enumerate(multi_indices(n, p)):
        for t, r in enumerate(K):
            rest = [k - 1 for k in K if k != r]
            table.append((a, r - 1, (-1) ** (t + p - 1), rest))
    return table


def plucker(frames: np.ndarray) -> np.ndarray:
    """Batched Plücker coordinates: (S, n, p) -> (S, C(n,p))."""
    S, n, p = frames.shape
    idx = multi_indices(n, p)
    out = np.empty((S, len(idx)), dtype=complex)
    for a, K in enumerate(idx):
        out[:, a] = np.linalg.det(frames[:, [k - 1 for k in K], :])
    return out


def rayleigh(H: np.ndarray, frames: np.ndarray) -> np.ndarray:
    P = plucker(frames)
    num = np.einsum("si,ij,sj->s", P.conj(), H, P).real
    return num / np.einsum("si,si->s", P.conj(), P).real


def _orthonormal(frames: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(frames)
    return q


def _sweeps(H: np.ndarray, M: np.ndarray, max_sweeps: int, rtol: float) -> tuple[np.ndarray, np.ndarray]:
    S, n, p = M.shape
    table = _cofactor_table(n, p)
    m = H.shape[0]
    scale = max(np.abs(H).max(), 1e-300)
    prev = np.full(S, np.inf)
    vals = prev
    for _ in range(max_sweeps):
        for j in range(p):
            others = np.delete(M, j, axis=2)
            Q, _ = np.linalg.qr(others, mode="complete")
            O = Q[:, :, : p - 1]
            B = Q[:, :, p - 1:]
            L = np.zeros((S, m, n), dtype=complex)
            for a, r, sign, rest in table:
                L[:, a, r] += sign * np.linalg.det(O[:, rest, :])
            A = np.conj(np.swapaxes(L, 1, 2)) @ H @ L
            C = np.conj(np.swapaxes(B, 1, 2)) @ A @ B
            C = 0.5 * (C + np.conj(np.swapaxes(C, 1, 2)))
            w, U = np.linalg.eigh(C)
            v = B @ U[:, :, :1]
            M = np.concatenate([O, v], axis=2)
            vals = w[:, 0]
        if np.all(np.abs(prev - vals) <= rtol * scale):
            break
        prev = vals
    return vals, M


def _hyperplane_frame(P: np.ndarray, n: int) -> np.ndarray:
    """Orthonormal n x (n-1) frame whose Plücker vector is proportional to ``P``.

    Cofactor expansion of det[x | M] gives c . x = 0 on the column space of M,
    with ``c_j = (-1)**j P_{[n] - j}`` (0-based j).
    """
    idx = multi_indices(n, n - 1)
    c = np.empty(n, dtype=complex)
    for a, K in enumerate(idx):
        j = next(t for t in range(n) if t + 1 not in K)
        c[j] = (-1) ** j * P[a]
    # null space of the bilinear row c
    _, _, vh = np.linalg.svd(c[None, :])
    return vh[1:].conj().T


def min_decomposable(H: np.ndarray, n: int, p: int, starts: int = DEFAULT_STARTS,
                     seed: int = 0, max_sweeps: int = 200, rtol: float = 1e-14) -> SearchResult:
    """Minimise ``P^* H P / |P|^2`` over decomposable ``P`` in Λ^p C^n."""
    H = np.asarray(H, dtype=complex)
    H = 0.5 * (H + H.conj().T)
    if p == n:
        frame = np.eye(n, dtype=complex)
        val = float(H[0, 0].real)
        return SearchResult(val, frame, [val], [frame])
    if p == 1 or p == n - 1:
        # every p-vector is decomposable: the minimum is an eigenvalue
        w, U = np.linalg.eigh(H)
        frames = [U[:, [i]] if p == 1 else _hyperplane_frame(U[:, i], n) for i in range(len(w))]
        return SearchResult(float(w[0]), frames[0], [float(x) for x in w], frames)
    rng = np.random.default_rng(seed)
    coord = [np.eye(n, dtype=complex)[:, [k - 1 for k in K]] for K in multi_indices(n, p)]
    rand = rng.standard_normal((starts, n, p)) + 1j * rng.standard_normal((starts, n, p))
    M0 = np.concatenate([np.array(coord), rand], axis=0)
    M0 = _orthonormal(M0)
    vals, M = _sweeps(H, M0, max_sweeps, rtol)
    vals = rayleigh(H, M)
    order = np.argsort(vals, kind="stable")
    frames = [M[i] for i in order]
    values = [float(vals[i]) for i in order]
    return SearchResult(values[0], frames[0], values, frames)


def rationalize(x: float, max_den: int = MAX_DENOMINATOR) -> Fraction:
    """Best rational approximation with bounded denominator (continued fractions)."""
    return Fraction(float(x)).limit_denominator(max_den)


def rationalize_frame(frame: np.ndarray, max_den: int = MAX_DENOMINATOR) -> SimpleVector:
    """Exact simple vector from a numeric frame, rescaled to unit-ish entries."""
    frame = np.asarray(frame, dtype=complex)
    big = np.abs(frame).max()
    if big > 0:
        frame = frame / big
    rows = [[Scalar(rationalize(z.real, max_den), rationalize(z.imag, max_den)) for z in row]
            for row in frame]
    return SimpleVector(rows)


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))
