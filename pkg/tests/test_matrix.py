import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatterlab.ff import FieldError, build_field
from scatterlab.matrix import Matrix, batch_rank


def rank_mod_p(a, p):
    """Plain Gaussian elimination over F_p on Python ints."""
    a = [list(map(int, r)) for r in a]
    rows, cols = len(a), len(a[0]) if a else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] % p), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], p - 2, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] % p:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        r += 1
    return r


def test_basic_ranks():
    F = build_field(2, [1])
    I = Matrix.identity(F, 4)
    assert (I - I).rank() == 0
    assert I.rank() == 4
    assert I.det().value == 1


def test_entries_validated():
    with pytest.raises(FieldError):
        Matrix(build_field(3, [1]), [[0, 3]])


def test_nullspace_small():
    F = build_field(3, [1])
    A = Matrix(F, [[1, 2, 0], [2, 1, 0]])
    ns = A.nullspace()
    assert len(ns) == 3 - A.rank()
    for v in ns:
        assert not A.apply(v).any()


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([(2, [2]), (3, [2]), (2, [3]), (5, [1]), (2, [2, 2])]), st.integers(1, 5), st.data())
def test_inverse_and_det(pc, n, data):
    F = build_field(*pc)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**31)))
    A = Matrix(F, rng.integers(0, F.order, (n, n)))
    B = Matrix(F, rng.integers(0, F.order, (n, n)))
    assert (A @ B).det() == A.det() * B.det()
    assert A.is_invertible() == bool(A.det())
    if A.is_invertible():
        assert A @ A.inverse() == Matrix.identity(F, n)
        assert A ** -2 @ A**2 == Matrix.identity(F, n)
    assert A.rank() <= n


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5, 7]), st.integers(1, 7), st.integers(1, 9), st.integers(0, 2**31))
def test_batch_rank_matches_elimination(p, r, c, seed):
    rng = np.random.default_rng(seed)
    mats = rng.integers(0, p, (20, r, c))
    # push some towards low rank
    mats[::3, : r // 2] = 0
    got = batch_rank(mats, p)
    want = [rank_mod_p(m, p) for m in mats]
    assert got.tolist() == want
    F = build_field(p, [1])
    assert [Matrix(F, m).rank() for m in mats] == want
