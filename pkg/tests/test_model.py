from __future__ import annotations

import json
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pkahler import linalg
from pkahler.exterior import Form, multi_indices, sigma_const, wedge
from pkahler.model import (
    BUNDLED,
    GradedComplex,
    IdentityCheckFailed,
    JacobiError,
    LieAlgebraModel,
    ModelError,
    OperatorId,
    bidegree_space,
    build_complex,
    cohomology_dim,
    complex_rank,
    degree_space,
    sl2c_example_forms,
    iwasawa,
    load_model,
    operator_matrix,
    sl2c,
    torus,
    verify_sl2c_example,
)
from strategies import rationals

MODELS = sorted(BUNDLED)


def complexes():
    return [build_complex(load_model(name)) for name in MODELS]


def all_monomials(n):
    return [(I, J) for p in range(n + 1) for q in range(n + 1)
            for I in multi_indices(n, p) for J in multi_indices(n, q)]


def test_sl2c_structure_equations():
    c = build_complex(sl2c())
    a, b, e = (Form.phi(3, k) for k in (1, 2, 3))
    assert c.d(a) == wedge(e, a).scale(-2)
    assert c.d(b) == wedge(e, b).scale(2)
    assert c.d(e) == wedge(a, b)
    assert c.d(wedge(a, b)).is_zero()


def test_torus_operators_vanish():
    c = build_complex(torus(3))
    for p in (1, 2):
        for tag in ("sigma_2q", "sigma_2q+1", "sigma_2p-1", "sigma_2p", "d_2p", "d_2p-1"):
            assert linalg.is_zero_matrix(operator_matrix(c, OperatorId(tag, p)))


def test_iwasawa_accepted():
    c = build_complex(iwasawa())
    assert c.d(Form.phi(3, 3)) == wedge(Form.phi(3, 1), Form.phi(3, 2)).scale(-1)


def test_corrupted_sl2c_rejected():
    # flip the sign of d alpha only
    with pytest.raises(JacobiError) as err:
        LieAlgebraModel("bad", 3, A={(1, 1, 3): -2, (2, 2, 3): -2, (3, 1, 2): 1})
    assert not err.value.residual.is_zero()


def test_space_dimensions():
    for n in (2, 3):
        for p in range(n + 1):
            for q in range(p + 1):
                dim = bidegree_space(n, p, q).dim
                expected = comb(n, p) * comb(n, q) * (1 if p == q else 2)
                assert dim == expected
        for s in range(2 * n + 1):
            assert degree_space(n, s).dim == comb(2 * n, s)


@pytest.mark.parametrize("name", MODELS)
def test_structural_identities(name):
    c = build_complex(load_model(name))
    n = c.n
    for I, J in all_monomials(n):
        f = Form.basis(n, I, J)
        assert c.d(c.d(f)).is_zero()
        assert c.partial(c.partial(f)).is_zero()
        assert c.dbar(c.dbar(f)).is_zero()
        assert (c.partial(c.dbar(f)) + c.dbar(c.partial(f))).is_zero()
        assert c.d(f) == c.partial(f) + c.dbar(f)
        assert c.partial(f).conjugate() == c.dbar(f.conjugate())


@pytest.mark.parametrize("name", MODELS)
def test_sigma_composition_vanishes(name):
    c = build_complex(load_model(name))
    for p in range(1, c.n):
        a = c.operator(OperatorId("sigma_2p", p)).matrix
        b = c.operator(OperatorId("sigma_2p-1", p)).matrix
        prod = [[sum((a[i][k] * b[k][j] for k in range(len(b))), Fraction(0))
                 for j in range(len(b[0]))] for i in range(len(a))]
        assert linalg.is_zero_matrix(prod)
        # the real sequence closes up as well
        e = c.operator(OperatorId("sigma_2q+1", p)).matrix
        g = c.operator(OperatorId("sigma_2q", p)).matrix
        prod = [[sum((e[i][k] * g[k][j] for k in range(len(g))), Fraction(0))
                 for j in range(len(g[0]))] for i in range(len(e))]
        assert linalg.is_zero_matrix(prod)


def test_sl2c_iddbar_on_real_11_has_rank():
    c = build_complex(sl2c())
    op = c.operator(OperatorId("sigma_2p", 1))
    assert op.rank() >= 1
    eta = Form.basis(3, (3,), (3,), sigma_const(1))
    assert not c.i_ddbar(eta).is_zero()


@pytest.mark.parametrize("name", MODELS)
def test_dolbeault_kernels_conjugation_symmetric(name):
    c = build_complex(load_model(name))
    n = c.n
    for p in range(n + 1):
        for q in range(n + 1):
            m1, k1 = c.complex_operator("dbar", p, q)
            m2, k2 = c.complex_operator("partial", q, p)
            assert k1 - complex_rank(m1, k1) == k2 - complex_rank(m2, k2)


def test_cohomology_examples():
    t2 = build_complex(torus(2))
    assert cohomology_dim(t2, "deRham", 1) == 4
    s = build_complex(sl2c())
    assert cohomology_dim(s, "deRham", 1) == 0
    for n in (2, 3):
        t = build_complex(torus(n))
        for k in range(n + 1):
            assert cohomology_dim(t, "BC", k) == comb(n, k) ** 2
            assert cohomology_dim(t, "A", k) == comb(n, k) ** 2


def test_iwasawa_bott_chern_aeppli():
    c = build_complex(iwasawa())
    assert [cohomology_dim(c, "BC", k) for k in range(4)] == [1, 4, 8, 1]
    assert [cohomology_dim(c, "A", k) for k in range(4)] == [1, 8, 4, 1]
    assert [cohomology_dim(c, "deRham", j) for j in range(7)] == [1, 4, 8, 10, 8, 4, 1]


@pytest.mark.parametrize("name", MODELS)
def test_euler_characteristic_vanishes(name):
    c = build_complex(load_model(name))
    chi = sum((-1) ** j * cohomology_dim(c, "deRham", j) for j in range(2 * c.n + 1))
    assert chi == 0


def test_cohomology_rejects_bad_group():
    c = build_complex(torus(2))
    with pytest.raises(ValueError):
        cohomology_dim(c, "Dolbeault", 1)
    with pytest.raises(ValueError):
        cohomology_dim(c, "deRham", 9)


def test_example_identities_i_ii_iv():
    c = build_complex(sl2c())
    rep = verify_sl2c_example(c, strict=False)
    by = {ch.name[:4]: ch for ch in rep.checks}
    assert by["(i) "].passed
    assert by["(ii)"].passed and by["(ii)"].residual.is_zero()
    assert by["(iv)"].passed
    assert c.i_ddbar(rep.gamma) == sl2c_example_forms(c)["omega2"]
    assert rep.gamma.is_real() and rep.gamma.bidegree == (1, 1)


def test_example_quoted_primitive_is_off_by_two():
    c = build_complex(sl2c())
    f = sl2c_example_forms(c)
    assert f["omega2"] == c.d(f["Gamma"]).scale(2)
    rep = verify_sl2c_example(c, strict=False)
    assert rep.exact_scale == 2


def test_example_strict_mode_raises_with_residual():
    c = build_complex(sl2c())
    with pytest.raises(IdentityCheckFailed) as err:
        verify_sl2c_example(c, strict=True)
    assert err.value.check.residual is not None


def test_example_requires_sl2c():
    with pytest.raises(ModelError, match=r"not the bundled SL\(2,C\) example"):
        verify_sl2c_example(build_complex(torus(3)))


@pytest.mark.parametrize("name", MODELS)
def test_model_json_round_trip(name):
    m = load_model(name)
    back = LieAlgebraModel.from_json(m.to_json())
    assert back == m and back.name == m.name


def test_model_json_errors(tmp_path):
    with pytest.raises(ModelError, match="line"):
        LieAlgebraModel.from_json("{not json")
    with pytest.raises(ModelError):
        LieAlgebraModel.from_dict({"A": []})
    with pytest.raises(ModelError):
        LieAlgebraModel.from_dict({"n": 2, "A": [{"k": 3, "i": 1, "j": 2, "re": "1"}]})
    with pytest.raises(ModelError):
        load_model(str(tmp_path / "missing.json"))
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"name": "heis", "n": 3, "A": [{"k": 3, "i": 1, "j": 2, "re": "-1/1", "im": "0"}]}))
    assert load_model(str(path)).same_structure(iwasawa())


def test_antisymmetric_input_normalised():
    m = LieAlgebraModel("swap", 3, A={(3, 2, 1): 1})
    assert m.same_structure(iwasawa())


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_real_space_round_trip(data):
    space = degree_space(3, 3)
    x = data.draw(st.lists(rationals, min_size=space.dim, max_size=space.dim))
    f = space.to_form(x)
    assert f.is_real()
    assert space.coords(f) == x


def test_graded_complex_is_cached_and_read_only():
    c = GradedComplex(sl2c())
    a = c.operator(OperatorId("sigma_2p", 1))
    assert c.operator(OperatorId("sigma_2p", 1)) is a
    with pytest.raises(ValueError):
        c.operator(OperatorId("sigma_2q", 0))
    with pytest.raises(ValueError):
        OperatorId("sigma_7", 1)
