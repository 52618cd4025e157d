from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings

from pkahler.exterior import (
    Form,
    Scalar,
    SimpleVector,
    evaluate,
    fundamental_form,
    gamma_power,
    multi_indices,
    pairing_f,
    real_pp_form,
    sigma_const,
)
from pkahler.positivity import (
    IN,
    INDETERMINATE,
    OUT,
    atom_form,
    check_separator,
    is_positive,
    is_strongly_positive,
    is_transverse,
    is_weakly_positive,
    positive_witness_value,
    positivity_matrix,
    resum_decomposition,
)
from pkahler.search import min_decomposable, rationalize_frame
from strategies import rand_cone_form, rand_frame, real_forms


def kahler_terms(n, signs):
    s = sigma_const(1)
    return Form(n, {((j,), (j,)): s * sg for j, sg in zip(range(1, n + 1), signs)}, (1, 1))


def _entries(Q):
    return [[x for x in row] for row in Q.entries]


def test_positivity_matrix_examples():
    assert _entries(positivity_matrix(kahler_terms(2, [1, 1]))) == [[Scalar(1), Scalar(0)], [Scalar(0), Scalar(1)]]
    Q = _entries(positivity_matrix(kahler_terms(2, [1, -1])))
    assert sorted([Q[0][0].re, Q[1][1].re]) == [-1, 1]
    assert Q[0][1] == Scalar(0)
    zero = positivity_matrix(Form.zero(2, 1, 1))
    assert all(x == Scalar(0) for row in zero.entries for x in row)


@pytest.mark.parametrize("n,p", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_gamma_power_is_positive(n, p):
    assert is_positive(gamma_power(n, p)).status == IN


def test_indefinite_form_is_not_positive():
    om = kahler_terms(2, [1, -1])
    v = is_positive(om)
    assert v.status == OUT
    assert positive_witness_value(om, v.witness).re < 0
    assert is_positive(Form.zero(2, 1, 1)).status == IN


def test_weakly_positive_examples():
    om = kahler_terms(2, [1, -1])
    v = is_weakly_positive(om)
    assert v.status == OUT
    assert evaluate(om, v.witness).re < 0
    assert evaluate(om, SimpleVector.coordinate(2, (2,))) == Scalar(-1)


def test_transverse_examples():
    v = is_transverse(fundamental_form(2))
    assert v.status == IN
    assert v.margin == pytest.approx(1.0)
    v = is_transverse(kahler_terms(2, [1, 0]))
    assert v.status == OUT
    assert evaluate(kahler_terms(2, [1, 0]), v.witness) == Scalar(0)
    assert is_transverse(Form.zero(2, 1, 1)).status == OUT


@pytest.mark.parametrize("n,p", [(3, 1), (3, 2), (4, 2)])
def test_single_atom_is_strongly_positive(n, p):
    I = multi_indices(n, p)[-1]
    om = Form(n, {(I, I): sigma_const(p)}, (p, p))
    v = is_strongly_positive(om)
    assert v.status == IN
    assert resum_decomposition(n, p, v.decomposition) == om
    assert len(v.decomposition) == 1


@pytest.mark.parametrize("n,p", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_gamma_power_decomposes(n, p):
    v = is_strongly_positive(gamma_power(n, p))
    assert v.status == IN
    assert resum_decomposition(n, p, v.decomposition) == gamma_power(n, p)
    assert all(w > 0 for w, _ in v.decomposition)


def test_positive_but_not_strongly_positive_at_n4():
    # sigma_2 (phi_12 + phi_34) ^ conj: positive, not a combination of simple atoms
    s = sigma_const(2)
    keys = [(1, 2), (3, 4)]
    om = Form(4, {(a, b): s for a in keys for b in keys}, (2, 2))
    assert is_positive(om).status == IN
    v = is_strongly_positive(om)
    assert v.status == OUT
    assert check_separator(om, v.separator)
    assert pairing_f(om, v.separator).re < 0


@settings(max_examples=30, deadline=None)
@given(real_forms(3, 1))
def test_weak_positivity_matches_exact_test_at_p1(om):
    w = is_weakly_positive(om)
    if w.status != INDETERMINATE:
        assert (w.status == IN) == (is_positive(om).status == IN)


def test_inclusion_chain_on_random_forms():
    rng = random.Random(11)
    for n, p in [(3, 1), (4, 2)]:
        for _ in range(12):
            om = rand_cone_form(rng, n, p)
            sp = is_strongly_positive(om, max_iter=30)
            pp = is_positive(om)
            wp = is_weakly_positive(om)
            if sp.status == IN:
                assert pp.status == IN
            if pp.status == IN:
                assert wp.status != OUT


def test_weakly_positive_pairs_nonnegatively_with_atoms():
    rng = random.Random(5)
    n, p = 4, 2
    checked = 0
    for _ in range(20):
        om = rand_cone_form(rng, n, p)
        if is_weakly_positive(om).status != IN:
            continue
        for _ in range(5):
            psi = atom_form(rand_frame(rng, n, n - p))
            assert pairing_f(om, psi).re >= 0
            checked += 1
    assert checked > 0


def test_transverse_forms_evaluate_positively():
    rng = random.Random(8)
    om = gamma_power(3, 2) + real_pp_form(3, 2, [Fraction(rng.randint(-1, 1), 5) for _ in range(9)])
    assert is_transverse(om).status == IN
    for _ in range(50):
        V = rand_frame(rng, 3, 2)
        if not V.is_zero():
            assert evaluate(om, V).re > 0


def test_verdicts_reproducible():
    om = kahler_terms(3, [1, 2, -1])
    a = is_weakly_positive(om, seed=4)
    b = is_weakly_positive(om, seed=4)
    assert a.witness == b.witness and a.margin == b.margin


def test_min_decomposable_finds_coordinate_minimum():
    # diagonal weights on Λ^2 C^4: minimum over decomposable vectors is the smallest weight
    H = np.diag([3.0, 1.0, 2.0, 5.0, 4.0, 0.5])
    res = min_decomposable(H, 4, 2, seed=0)
    assert res.value == pytest.approx(0.5, abs=1e-9)
    V = rationalize_frame(res.frame)
    assert V.plucker().keys() == {(3, 4)}
