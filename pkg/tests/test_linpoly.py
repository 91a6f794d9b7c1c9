import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatterlab.ff import FElem, build_field, extension_field, norm_rel
from scatterlab.linpoly import (
    LinearizedPoly,
    as_matrix,
    evaluate,
    is_ell_normalized,
    kernel_dim,
    lp_binomial,
    make_linpoly,
    monomial,
    pseudoregulus,
    u_f_subspace,
)

F4 = build_field(2, [2])
F8 = build_field(2, [3])


def brute_kernel_dim(f):
    zeros = sum(1 for x in f.field.elements() if evaluate(f, x).value == 0)
    return round(math.log(zeros, f.q))


def test_construction():
    assert make_linpoly(F8, [0, 1]).coeffs == (0, 1)
    assert str(make_linpoly(F8, [1, 0, 1])) == "x + x^4"
    with pytest.raises(ValueError):
        make_linpoly(F4, [0, 0, 1])
    assert make_linpoly(F8, [0, 0]).is_zero


def test_evaluate_examples():
    g = F4.gen()
    assert evaluate(make_linpoly(F4, [0, 1]), g) == g + 1
    assert evaluate(make_linpoly(F4, [1, 1]), g) == F4.one()
    for f in [make_linpoly(F8, [3, 5, 1]), make_linpoly(F8, [])]:
        assert evaluate(f, F8.zero()).value == 0


def test_evaluate_in_extension():
    f = make_linpoly(F4, [2, 1])
    F16 = build_field(2, [4])
    with pytest.raises(Exception):
        evaluate(f, F16(5))
    x = F16(5)
    g = f.embed(F16)
    assert evaluate(f, x, embed=True) == evaluate(g, x)


def test_normalization_examples():
    assert is_ell_normalized(make_linpoly(F8, [0, 1]), 0)
    fam = lp_binomial(3, 4, 1, 3, normalize=True)
    assert is_ell_normalized(fam.poly, 1)
    chk = is_ell_normalized(make_linpoly(F8, [1, 1]), 1)
    assert not chk and chk.reason == "coefficient-at-ell-nonzero"
    assert is_ell_normalized(make_linpoly(F8, [0, 0, 2]), 1).reason == "not-monic"
    assert is_ell_normalized(make_linpoly(F8, [0, 0, 1]), 1).reason == "not-separable"


def test_as_matrix_examples():
    assert as_matrix(make_linpoly(F4, [0, 1])).tolist() == [[1, 1], [0, 1]]
    assert as_matrix(make_linpoly(F8, [1])).tolist() == np.eye(3, dtype=int).tolist()
    assert not as_matrix(make_linpoly(F8, [])).a.any()


def test_kernel_dim_examples():
    F, base = extension_field(3, 3)
    assert kernel_dim(LinearizedPoly(F, (F.neg_int(1), 1), base)) == 1
    assert kernel_dim(make_linpoly(F8, [1])) == 0
    assert kernel_dim(make_linpoly(F8, [1, 1, 1])) == 2


def test_family_examples():
    fam = pseudoregulus(2, 3, 1)
    assert str(fam.poly) == "x^2" and fam.holds
    assert not pseudoregulus(2, 4, 2).holds
    fam = pseudoregulus(3, 5, 2)
    assert str(fam.poly) == "x^9" and fam.holds
    assert not lp_binomial(2, 4, 1, 1).conditions["norm"]
    fam = lp_binomial(2, 5, 2, 3)
    assert fam.conditions["gcd"] and fam.poly.k == 4
    with pytest.raises(ValueError):
        lp_binomial(2, 4, 2, 1)


def test_family_flags_recomputed():
    for q, n in [(2, 4), (3, 4), (2, 5), (4, 3)]:
        F, base = extension_field(q, n)
        for s in range(1, n):
            assert pseudoregulus(q, n, s).holds == (math.gcd(s, n) == 1)
        for s in range(1, (n + 1) // 2):
            for d in range(1, F.order, 7):
                fam = lp_binomial(q, n, s, d)
                acc = F.one()
                for i in range(n):
                    acc = acc * F(d) ** (q**i)
                assert fam.conditions["norm"] == (acc.value != 1)
                assert fam.conditions["gcd"] == (math.gcd(s, n) == 1)


def test_u_f_examples():
    U = u_f_subspace(make_linpoly(F8, [1]), 0)
    assert U.dim == 3 and all(u == v for u, v in U.basis)
    U = u_f_subspace(make_linpoly(F8, []), 0)
    assert U.dim == 3 and all(v == 0 for _, v in U.basis)
    assert u_f_subspace(make_linpoly(F4, [0, 1]), 0).dim == 2


def test_monomial_kernel_law():
    for q, n in [(2, 4), (2, 6), (3, 4), (4, 3), (2, 8), (3, 3), (5, 2)]:
        F, base = extension_field(q, n)
        for s in range(1, n):
            for y in range(1, F.order, max(1, F.order // 40)):
                m = F.pow_int(y, q**s - 1)
                f = LinearizedPoly(F, (F.neg_int(m),) + (0,) * (s - 1) + (1,), base)
                assert kernel_dim(f) == math.gcd(s, n)


polys = st.sampled_from([(2, 3), (2, 4), (3, 2), (4, 2), (3, 3)]).flatmap(
    lambda qn: st.tuples(
        st.just(qn), st.lists(st.integers(0, qn[0] ** qn[1] - 1), min_size=0, max_size=qn[1])
    )
)


@settings(max_examples=150, deadline=None)
@given(polys, st.data())
def test_linearity_and_rank_nullity(case, data):
    (q, n), coeffs = case
    F, base = extension_field(q, n)
    f = LinearizedPoly(F, tuple(coeffs), base)
    lam = F(data.draw(st.integers(0, q - 1)))
    x, y = (F(data.draw(st.integers(0, F.order - 1))) for _ in range(2))
    assert f(lam * x + y) == lam * f(x) + f(y)
    assert kernel_dim(f) == brute_kernel_dim(f)
    assert kernel_dim(f) + as_matrix(f).rank() == n
    assert u_f_subspace(f, data.draw(st.integers(0, n - 1))).dim == n
    vals = f.values()
    assert all(vals[v] == f(F(v)).value for v in range(0, F.order, 3))
