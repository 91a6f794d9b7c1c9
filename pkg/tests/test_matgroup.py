import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatterlab.ff import FElem, build_field, norm_rel
from scatterlab.matgroup import (
    EmbeddingContext,
    check_commutation,
    companion_matrix,
    eta,
    extend_symplectic_basis,
    frobenius_block,
    is_symplectic,
    omega,
    phi,
    random_invertible,
    random_symplectic,
    sl_complete,
    symplectic_form,
)
from scatterlab.matrix import Matrix

F2 = build_field(2, [1])
F3 = build_field(3, [1])
F4 = build_field(2, [2])


def test_companion_examples():
    assert companion_matrix([1, 1, 1], F2).tolist() == [[0, 1], [1, 1]]
    assert companion_matrix([F3.neg_int(1), 1], F3).tolist() == [[1]]
    C = companion_matrix([1, 1, 0, 1], F2)
    assert C.column(2).tolist() == [1, 1, 0]
    with pytest.raises(ValueError):
        companion_matrix([1, 1, 2], F3)


def test_companion_char_poly():
    # char poly of the companion equals the input: p(C) = 0 and C has no smaller annihilator
    for coeffs, F in (([1, 1, 0, 1], F2), ([2, 1, 1], F3), ([1, 0, 2, 1, 1], F3), ([2, 3, 1], F4)):
        C = companion_matrix(coeffs, F)
        acc = Matrix.zeros(F, C.rows)
        for c in reversed(coeffs):
            acc = acc @ C + Matrix.identity(F, C.rows).scale(c)
        assert not acc.a.any()


def test_phi_examples():
    ctx = EmbeddingContext(2, 2, 2)
    assert phi(1, ctx) == Matrix.identity(ctx.base, 2)
    assert phi(ctx.gamma, ctx) == ctx.companion
    g = ctx.mid.gen()
    assert phi(g + 1, ctx).tolist() == [[1, 1], [1, 0]]
    assert phi(g + 1, ctx) == Matrix.identity(ctx.base, 2) + ctx.companion


def test_eta_examples():
    ctx = EmbeddingContext(2, 2, 3)
    assert eta(Matrix.identity(ctx.mid, 3), ctx) == Matrix.identity(ctx.base, 6)
    T = Matrix.diagonal(ctx.mid, [ctx.gamma, 1, 1])
    I2 = Matrix.identity(ctx.base, 2)
    assert eta(T, ctx) == Matrix.block_diag(ctx.base, [ctx.companion, I2, I2])
    ctx2 = EmbeddingContext(2, 2, 2)
    E = eta(Matrix.diagonal(ctx2.mid, [ctx2.gamma, 1]), ctx2)
    assert (E - Matrix.identity(ctx2.base, 4)).rank() == 2


def test_frobenius_examples():
    ctx = EmbeddingContext(2, 2, 2)
    assert ctx.frobenius.tolist() == [[1, 1], [0, 1]]
    assert ctx.frobenius ** 2 == Matrix.identity(ctx.base, 2)
    M = frobenius_block(ctx)
    assert M == Matrix.block_diag(ctx.base, [ctx.frobenius, ctx.frobenius]) and M.shape == (4, 4)
    for q, m in [(2, 3), (3, 2), (4, 2), (2, 4)]:
        c = EmbeddingContext(q, m, 1)
        I = Matrix.identity(c.base, m)
        assert c.frobenius ** m == I
        assert all(c.frobenius ** i != I for i in range(1, m))


@pytest.mark.parametrize("q,m,n", [(2, 2, 2), (2, 3, 2), (2, 2, 3), (3, 2, 2), (2, 2, 1)])
def test_phi_ring_homomorphism_exhaustive(q, m, n):
    ctx = EmbeddingContext(q, m, n)
    K = ctx.mid
    mats = {a: phi(a, ctx) for a in range(K.order)}
    assert len({M for M in mats.values()}) == K.order
    for a in range(K.order):
        for b in range(K.order):
            assert mats[K.add_int(a, b)] == mats[a] + mats[b]
            assert mats[K.mul_int(a, b)] == mats[a] @ mats[b]


@pytest.mark.parametrize("q,m,n", [(2, 2, 2), (2, 3, 2), (2, 2, 3), (3, 2, 2), (4, 2, 2)])
def test_commutation_exhaustive(q, m, n):
    ctx = EmbeddingContext(q, m, n)
    assert all(check_commutation(a, ctx) for a in range(1, ctx.mid.order))


def test_basis_c_independent():
    for q, m, n in [(2, 2, 3), (3, 2, 2), (2, 3, 2)]:
        ctx = EmbeddingContext(q, m, n)
        # products alpha_i gamma^j as elements of the top field, flattened over F_q
        Qm = ctx.mid.order
        elems = [ctx.top.mul_int(Qm**i, int(g)) for i in range(n) for g in ctx.basis]
        coords = [[(e // q**t) % q for t in range(m * n)] for e in elems]
        assert Matrix(ctx.base, coords).rank() == m * n


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([(2, 2, 2), (2, 3, 2), (2, 2, 3), (3, 2, 2)]), st.integers(0, 2**31))
def test_eta_laws(cfg, seed):
    ctx = EmbeddingContext(*cfg)
    rng = np.random.default_rng(seed)
    A = Matrix(ctx.mid, rng.integers(0, ctx.mid.order, (ctx.n, ctx.n)))
    B = Matrix(ctx.mid, rng.integers(0, ctx.mid.order, (ctx.n, ctx.n)))
    assert eta(A @ B, ctx) == eta(A, ctx) @ eta(B, ctx)
    assert eta(A, ctx).det().value == norm_rel(FElem(ctx.top, A.det().value), ctx.base, ctx.mid).value
    assert eta(A, ctx).is_invertible() == A.is_invertible()
    v = rng.integers(0, ctx.mid.order, ctx.n)
    assert eta(A, ctx).apply(ctx.vec_coords(v)).tolist() == ctx.vec_coords(A.apply(v)).tolist()
    assert ctx.from_vec_coords(ctx.vec_coords(v)).tolist() == v.tolist()


def test_symplectic_form_examples():
    assert symplectic_form(2, F3).tolist() == [[0, 1], [2, 0]]
    H = symplectic_form(4, F2)
    assert H.tolist() == [[0, 0, 1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0]]
    for F in (F2, F3, F4):
        H = symplectic_form(4, F)
        assert H @ H == -Matrix.identity(F, 4)
    with pytest.raises(ValueError):
        symplectic_form(3, F2)


def test_is_symplectic_examples():
    F = build_field(5, [1])
    assert is_symplectic(Matrix.identity(F, 4))
    assert is_symplectic(symplectic_form(4, F))
    assert is_symplectic(Matrix.diagonal(F, [3, F.inv_int(3)]))
    assert not is_symplectic(Matrix.diagonal(F, [3, 3]))
    with pytest.raises(ValueError):
        is_symplectic(Matrix.identity(F, 4), 2)


def test_extend_examples():
    basis, D = extend_symplectic_basis([], 4, F4)
    assert D == Matrix.identity(F4, 4)
    basis, D = extend_symplectic_basis([[1, 0]], 2, F3)
    assert D == Matrix.identity(F3, 2)
    basis, D = extend_symplectic_basis([[1, 0, 0, 0], [0, 1, 0, 0]], 4, F4)
    H = symplectic_form(4, F4)
    assert D.T @ H @ D == H
    with pytest.raises(ValueError):
        extend_symplectic_basis([[1, 0, 0, 0], [0, 0, 1, 0]], 4, F4)
    with pytest.raises(ValueError):
        extend_symplectic_basis([[1, 0, 0, 0], [1, 0, 0, 0]], 4, F4)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([(2, [2]), (3, [1]), (3, [2]), (5, [1]), (2, [1])]), st.sampled_from([2, 4, 6]),
       st.integers(0, 2**31), st.data())
def test_extend_random_isotropic(pc, e, seed, data):
    F = build_field(*pc)
    rng = np.random.default_rng(seed)
    S = random_symplectic(F, e, rng)
    h = data.draw(st.integers(0, e // 2))
    picks = [S.column(i) for i in range(h)]  # columns 0..h-1 of a symplectic matrix are isotropic
    basis, D = extend_symplectic_basis(picks, e, F)
    H = symplectic_form(e, F)
    assert D.T @ H @ D == H and is_symplectic(D)
    for i in range(h):
        assert D.column(i).tolist() == picks[i].tolist()
    assert omega(basis[0], basis[e // 2], H) == 1


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(2, [2]), (3, [1]), (5, [1])]), st.integers(0, 2**31))
def test_symplectic_closure(pc, seed):
    F = build_field(*pc)
    rng = np.random.default_rng(seed)
    A, B = random_symplectic(F, 4, rng), random_symplectic(F, 4, rng)
    assert is_symplectic(A) and is_symplectic(B)
    assert is_symplectic(A @ B) and is_symplectic(A.inverse())


def test_sl_complete_examples():
    assert sl_complete([1, 0, 0], [0, 1, 0], 3, 1, F2) == Matrix.identity(F2, 3)
    assert sl_complete([1, 0, 0], [0, 1, 0], 3, 2, F3) == Matrix.diagonal(F3, [1, 1, 2])
    D = sl_complete([2, 0, 0, 0], [0, 2, 0, 0], 4, 1, F4)
    assert D.det().value == 1 and D.column(0).tolist() == [2, 0, 0, 0]
    with pytest.raises(ValueError):
        sl_complete([1, 0], [0, 1], 2, 1, F3)
    with pytest.raises(ValueError):
        sl_complete([1, 0, 0], [2, 0, 0], 3, 1, F3)


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(2, [2]), (3, [2]), (5, [1])]), st.integers(3, 5), st.integers(0, 2**31))
def test_sl_complete_random(pc, e, seed):
    F = build_field(*pc)
    rng = np.random.default_rng(seed)
    A = random_invertible(F, e, rng)
    t = int(rng.integers(1, F.order))
    D = sl_complete(A.column(0), A.column(1), e, t, F)
    assert D.det().value == t
    assert D.column(0).tolist() == A.column(0).tolist() and D.column(1).tolist() == A.column(1).tolist()
