from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pkahler import linalg
from pkahler.exterior import (
    Form,
    I_UNIT,
    Scalar,
    SimpleVector,
    complement,
    complement_sign,
    conjugate,
    dual_iso_g,
    evaluate,
    fundamental_form,
    gamma_power,
    multi_indices,
    pairing_f,
    real_pp_coords,
    real_pp_form,
    sigma_const,
    strongly_positive_vector,
    volume_form,
    wedge,
    wedge_all,
)
from strategies import forms, frames, rand_frame, rand_real_form, real_forms, scalars


def _perm_sign(seq):
    inv = sum(1 for a, b in itertools.combinations(seq, 2) if a > b)
    return -1 if inv % 2 else 1


def _oracle_wedge(n, I, J, K, L):
    """phi_I bar(phi_J) ^ phi_K bar(phi_L) by sorting the generator word."""
    word = [(0, i) for i in I] + [(1, j) for j in J] + [(0, k) for k in K] + [(1, l) for l in L]
    if len(set(word)) < len(word):
        return Form.zero(n)
    s = _perm_sign(word)
    srt = sorted(word)
    return Form(n, {(tuple(i for t, i in srt if t == 0), tuple(j for t, j in srt if t == 1)): s})


def test_sigma_const_values():
    assert sigma_const(1) == Scalar(0, Fraction(1, 2))
    assert sigma_const(2) == Scalar(Fraction(1, 4))
    assert sigma_const(3) == Scalar(0, Fraction(1, 8))
    assert sigma_const(0) == Scalar(1)


def test_repeated_factor_vanishes():
    assert wedge(Form.phi(3, 1), Form.phi(3, 1)).is_zero()
    assert wedge(Form.phibar(3, 2), Form.phibar(3, 2)).is_zero()


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_product_of_kahler_terms_is_volume(n):
    terms = [Form.basis(n, (j,), (j,), sigma_const(1)) for j in range(1, n + 1)]
    assert wedge_all(terms) == volume_form(n)


def test_two_kahler_terms_give_sigma_two():
    a = Form.basis(2, (1,), (1,), sigma_const(1))
    b = Form.basis(2, (2,), (2,), sigma_const(1))
    assert wedge(a, b) == Form.basis(2, (1, 2), (1, 2), sigma_const(2))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_wedge_matches_permutation_oracle(n):
    monos = [(I, J) for p in range(0, 3) for q in range(0, 3)
             for I in multi_indices(n, p) for J in multi_indices(n, q)]
    for (I, J), (K, L) in itertools.product(monos[:40], repeat=2):
        got = wedge(Form.basis(n, I, J), Form.basis(n, K, L))
        assert got == _oracle_wedge(n, I, J, K, L), (I, J, K, L)


def test_gamma_power_matches_repeated_wedge():
    for n in (2, 3, 4):
        g = fundamental_form(n)
        acc = g
        for p in range(2, n + 1):
            acc = wedge(acc, g)
            assert acc == gamma_power(n, p)


def test_conjugate_examples():
    a = Form.basis(3, (1,), (2,))
    # conj(phi_1 ^ bar phi_2) = bar phi_1 ^ phi_2 = -phi_2 ^ bar phi_1
    assert conjugate(a) == Form.basis(3, (2,), (1,), -1)
    # the reordering sign cancels the scalar conjugation: i phi_1 ^ bar(phi_1) is real
    b = Form.basis(2, (1,), (1,), I_UNIT)
    assert conjugate(b) == b
    assert not Form.basis(2, (1,), (1,)).is_real()
    assert Form.basis(2, (1,), (1,), sigma_const(1)).is_real()


@settings(max_examples=60, deadline=None)
@given(frames(3, 2))
def test_sigma_eta_wedge_conj_is_real(V):
    pl = V.plucker()
    eta = Form(3, {(I, ()): c for I, c in pl.items()}, (2, 0))
    form = wedge(eta, eta.conjugate()).scale(sigma_const(2))
    assert form.is_real()


@settings(max_examples=60, deadline=None)
@given(forms(3, 1, 0), forms(3, 1, 1), forms(3, 0, 1))
def test_wedge_associative(a, b, c):
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.integers(0, 2), st.data())
def test_graded_anticommutativity(p, q, r, s, data):
    a = data.draw(forms(3, p, q))
    b = data.draw(forms(3, r, s))
    sign = -1 if ((p + q) * (r + s)) % 2 else 1
    assert wedge(a, b) == wedge(b, a).scale(sign)


@settings(max_examples=60, deadline=None)
@given(forms(3, 1, 1), forms(3, 1, 0))
def test_conjugation_is_multiplicative(a, b):
    assert conjugate(wedge(a, b)) == wedge(conjugate(a), conjugate(b))
    assert conjugate(conjugate(a)) == a


def test_pairing_examples():
    a = Form.basis(2, (1,), (1,), sigma_const(1))
    b = Form.basis(2, (2,), (2,), sigma_const(1))
    assert pairing_f(a, b) == Scalar(1)
    assert pairing_f(a, Form.zero(2, 1, 1)) == Scalar(0)
    with pytest.raises(ValueError):
        pairing_f(a, Form.basis(2, (1, 2), (1, 2)))


def test_dual_iso_examples():
    inv = Scalar(1) / sigma_const(1)
    assert dual_iso_g(2, {((1,), (1,)): inv}) == Form.basis(2, (2,), (2,), sigma_const(1))
    inv2 = Scalar(1) / sigma_const(2)
    assert dual_iso_g(3, {((1, 2), (1, 2)): inv2}) == Form.basis(3, (3,), (3,), sigma_const(1))
    assert dual_iso_g(3, {}, p=1).is_zero()


@pytest.mark.parametrize("n,p", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_dual_iso_is_bijective(n, p):
    keys = [(K, L) for K in multi_indices(n, p) for L in multi_indices(n, p)]
    out_keys = [(K, L) for K in multi_indices(n, n - p) for L in multi_indices(n, n - p)]
    cols = []
    for key in keys:
        img = dual_iso_g(n, {key: 1})
        col = []
        for ok in out_keys:
            c = img.coeff(*ok)
            col.extend([c.re, c.im])
        cols.append(col)
    # real embedding of a complex-linear map: rank 2 * dim
    big = [[x for x in col] for col in cols] + [
        [(-v if t % 2 == 0 else v) for t, v in enumerate(_swap(col))] for col in cols]
    assert linalg.rank(big, len(cols[0])) == 2 * len(keys)


def _swap(col):
    out = []
    for t in range(0, len(col), 2):
        out.extend([col[t + 1], col[t]])
    return out


def test_evaluate_examples():
    om = Form.basis(2, (1,), (1,), sigma_const(1))
    e1 = SimpleVector.coordinate(2, (1,))
    e2 = SimpleVector.coordinate(2, (2,))
    assert evaluate(om, e1) == Scalar(1)
    assert evaluate(om, e2) == Scalar(0)
    v = SimpleVector([[1], [1]])
    assert evaluate(om, v) / v.norm2() == Scalar(Fraction(1, 2))


@pytest.mark.parametrize("n,p", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_duality_identity_random(n, p):
    rng = random.Random(n * 10 + p)
    dv = volume_form(n)
    for _ in range(40):
        om = rand_real_form(rng, n, p)
        V = rand_frame(rng, n, p)
        lhs = dv.scale(evaluate(om, V))
        rhs = wedge(om, dual_iso_g(n, strongly_positive_vector(V), p))
        assert lhs == rhs


@settings(max_examples=40, deadline=None)
@given(real_forms(3, 2), frames(3, 2), scalars, scalars, scalars)
def test_plucker_scaling(om, V, a, b, c):
    # right-multiply by [[a, b], [0, c]]: determinant a c
    M = [[a, b], [Scalar(0), c]]
    rows = [[sum((r[k] * M[k][j] for k in range(2)), Scalar(0)) for j in range(2)] for r in V.rows]
    W = SimpleVector(rows)
    d = a * c
    assert evaluate(om, W) == evaluate(om, V) * d.abs2()


@settings(max_examples=40, deadline=None)
@given(real_forms(3, 1))
def test_real_coordinates_round_trip(om):
    assert real_pp_form(3, 1, real_pp_coords(om)) == om


def test_complement_sign_convention():
    assert complement(4, (1, 3)) == (2, 4)
    for K in multi_indices(4, 2):
        assert complement_sign(4, K) == _perm_sign(list(K) + list(complement(4, K)))
