import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from scatterlab.certify import (
    SpElement,
    aut_sp_compose,
    aut_sp_decompose,
    fm_rank_criterion,
    gammaL1_sieve,
    hering_cases,
    nonsquare,
    random_sl_input,
    random_sp_element,
    sl_certificate,
    sp_certificate,
    spread_constraints,
)
from scatterlab.ff import build_field
from scatterlab.matgroup import EmbeddingContext, eta, frobenius_block, is_symplectic
from scatterlab.matrix import Matrix

PRIME_POWERS = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 23, 25, 27, 29, 32, 49, 59]


def tags(cases):
    return {(c.tag, c.e) for c in cases}


def test_hering_examples():
    t = tags(hering_cases(2, 6))
    assert {("SL", e) for e in (1, 2, 3, 6)} <= t and ("Sp", 6) in t and ("G2", 6) in t
    assert not any(tag == "sporadic" for tag, _ in t)
    t = tags(hering_cases(3, 1))
    assert t == {("SL", 1), ("gammaL1", 1)}
    t = tags(hering_cases(2, 4))
    assert ("sporadic", None) in t and ("Sp", 4) in t and {("SL", e) for e in (1, 2, 4)} <= t


def test_hering_structure_random():
    rng = np.random.default_rng(11)
    listed = {25, 49, 121, 529, 841, 3481, 16, 81, 729}
    for _ in range(1000):
        q = int(rng.choice(PRIME_POWERS))
        d = int(rng.integers(1, 25))
        p = min(x for x in range(2, q + 1) if q % x == 0)
        want = {("gammaL1", 1)}
        want |= {("SL", e) for e in range(1, d + 1) if d % e == 0}
        want |= {("Sp", e) for e in range(4, d + 1, 2) if d % e == 0}
        if p == 2 and d % 6 == 0:
            want.add(("G2", 6))
        if q**d in listed:
            want.add(("sporadic", None))
        got = hering_cases(q, d)
        assert tags(got) == want
        assert got == hering_cases(q, d)
        for c in got:
            if c.e:
                assert d % c.e == 0


def test_fm_rank_criterion_examples():
    F = build_field(2, [1])
    assert fm_rank_criterion(Matrix.identity(F, 4), 4)
    A = Matrix(F, [[0, 1], [1, 1]])  # A - I = [[1,1],[1,0]] is invertible
    assert not fm_rank_criterion(A, 2)
    ctx = EmbeddingContext(2, 2, 2)
    B = Matrix.block_diag(F, [ctx.companion, Matrix.identity(F, 2)])
    assert fm_rank_criterion(B, 4)
    with pytest.raises(ValueError):
        fm_rank_criterion(B, 3)


def test_sl_identity_case():
    ctx = EmbeddingContext(2, 2, 3)
    c = sl_certificate(Matrix.identity(ctx.mid, 3), 0, ctx)
    assert c.companion["alpha"] == Matrix.identity(ctx.mid, 3) and c.rank == 0 and c.verify()


def test_sl_batch_and_errors():
    ctx = EmbeddingContext(2, 2, 3)
    rng = np.random.default_rng(3)
    for _ in range(50):
        beta, j = random_sl_input(ctx, rng)
        c = sl_certificate(beta, j, ctx)
        assert c.rank <= 4 and c.verify()
        assert c.to_json()["verified"]
    with pytest.raises(ValueError):
        sl_certificate(Matrix.zeros(ctx.mid, 3), 0, ctx)
    with pytest.raises(ValueError):
        sl_certificate(Matrix.identity(EmbeddingContext(2, 2, 2).mid, 2), 0, EmbeddingContext(2, 2, 2))


def test_sl_exhaustive_gl32():
    ctx = EmbeddingContext(2, 1, 3)
    F = ctx.mid
    count = 0
    for bits in itertools.product(range(2), repeat=9):
        beta = Matrix(F, np.array(bits).reshape(3, 3))
        if not beta.is_invertible():
            continue
        c = sl_certificate(beta, 0, ctx)
        assert c.rank <= 1 and c.verify()
        count += 1
    assert count == 168


@pytest.mark.parametrize("q,m,e", [(3, 2, 3), (2, 3, 3), (4, 1, 4), (3, 1, 5), (2, 2, 4)])
def test_sl_other_configs(q, m, e):
    ctx = EmbeddingContext(q, m, e)
    rng = np.random.default_rng(q + m + e)
    for _ in range(10):
        beta, _ = random_sl_input(ctx, rng)
        for j in range(-1, m + 1):
            c = sl_certificate(beta, j, ctx)
            assert c.rank <= ctx.d - 2 and c.verify()


def test_sp_identity_case():
    ctx = EmbeddingContext(2, 2, 4)
    el = SpElement(ctx, None, 0, 1, Matrix.identity(ctx.mid, 4))
    assert el.eta() == Matrix.identity(ctx.base, 8)
    c = sp_certificate(el)
    assert c.companion["B"] == Matrix.identity(ctx.mid, 4) and c.rank == 0


def test_sp_nonsquare_r():
    ctx = EmbeddingContext(3, 2, 4)
    a = nonsquare(ctx.mid)
    el = SpElement(ctx, 0, 0, 1, Matrix.identity(ctx.mid, 4))
    assert el.r_matrix() == Matrix.diagonal(ctx.mid, [1, 1, a, a])
    T, j = aut_sp_compose(el)
    assert T == el.r_matrix() and j == 0


def test_sp_errors():
    ctx = EmbeddingContext(2, 2, 4)
    with pytest.raises(ValueError):
        SpElement(ctx, None, 0, 0, Matrix.identity(ctx.mid, 4))
    with pytest.raises(ValueError):
        SpElement(ctx, None, 0, 1, Matrix.diagonal(ctx.mid, [2, 1, 1, 1]))
    with pytest.raises(ValueError):
        SpElement(ctx, 0, 0, 1, Matrix.identity(ctx.mid, 4))
    el = random_sp_element(EmbeddingContext(2, 3, 2), np.random.default_rng(0))
    with pytest.raises(ValueError):
        sp_certificate(el)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([(2, 2, 4), (3, 1, 4), (3, 2, 4), (5, 1, 4), (4, 1, 6), (2, 1, 6)]), st.integers(0, 2**31))
def test_sp_round_trip_and_certificate(cfg, seed):
    ctx = EmbeddingContext(*cfg)
    rng = np.random.default_rng(seed)
    el = random_sp_element(ctx, rng)
    T, j = aut_sp_compose(el)
    assert aut_sp_decompose(T, j, ctx) == el
    assert eta(T, ctx) @ frobenius_block(ctx) ** j == el.eta()
    c = sp_certificate(el)
    assert c.rank <= ctx.d - ctx.n // 2 and c.verify()
    assert is_symplectic(c.companion["B"])


def test_sieve_examples():
    v = gammaL1_sieve(3, 3, 1)
    assert v.quantity == 12 and v.verdict == "excluded"
    assert gammaL1_sieve(5, 0, 4).verdict == "monomial-branch"
    v = gammaL1_sieve(2, 2, 1)
    assert v.quantity == 2 and v.verdict == "unresolved"
    assert spread_constraints(2, 4, 2).verdict == "survivor"
    assert spread_constraints(2, 4, 1).verdict == "excluded"
    assert spread_constraints(2, 1, 4).verdict == "excluded"
    with pytest.raises(ValueError):
        spread_constraints(2, 3, 1)
    with pytest.raises(ValueError):
        gammaL1_sieve(2, 3, 3)


def test_sieve_quantity_oracle():
    # Q recomputed with fractions; excluded iff Q > d
    from fractions import Fraction
    from math import gcd

    for q in (2, 3, 4, 5, 7, 8, 9):
        for k in range(1, 12):
            for ell in range(0, 12):
                if k == ell:
                    continue
                g = gcd(k, ell)
                Q = Fraction(abs(q**k - q**ell), q**g - 1)
                assert Q.denominator == 1
                v = gammaL1_sieve(q, k, ell)
                assert v.quantity == Q
                assert (v.verdict == "excluded") == (Q > max(k, ell))
