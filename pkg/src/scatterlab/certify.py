"""Rank certificates for the SL and Sp cases, and the arithmetic sieves.

A semilinear element of GL(e, q^m) x <Frobenius> is stored as (T, j) and
acts as v -> T v^(q^j).  Under the block embedding it becomes
eta(T) @ M^j, with M the blockwise Frobenius.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .ff import Field, prime_power
from .matgroup import (
    EmbeddingContext,
    conjugate_entries,
    eta,
    extend_symplectic_basis,
    frobenius_block,
    is_symplectic,
    random_invertible,
    random_symplectic,
    sl_complete,
    symplectic_form,
)
from .matrix import Matrix

SPORADIC_ORDERS = frozenset({5**2, 7**2, 11**2, 23**2, 29**2, 59**2, 2**4, 3**4, 3**6})


# -- Hering cases -------------------------------------------------------------


@dataclass(frozen=True)
class HeringCase:
    tag: str  # SL | Sp | G2 | sporadic | gammaL1
    e: int | None = None
    field_order: int | None = None

    def to_json(self) -> dict:
        return {"tag": self.tag, "e": self.e, "field_order": self.field_order}


def hering_cases(q: int, d: int) -> list[HeringCase]:
    """Every case of the transitive-linear-group classification that can occur for (q, d)."""
    p, _ = prime_power(q)
    if d < 1:
        raise ValueError("d must be >= 1")
    divs = [e for e in range(1, d + 1) if d % e == 0]
    out = [HeringCase("gammaL1", 1, q**d)]
    out += [HeringCase("SL", e, q ** (d // e)) for e in divs]
    out += [HeringCase("Sp", e, q ** (d // e)) for e in divs if e % 2 == 0 and e >= 4]
    if p == 2 and d % 6 == 0:
        out.append(HeringCase("G2", 6, q ** (d // 6)))
    if q**d in SPORADIC_ORDERS:
        out.append(HeringCase("sporadic", None, q**d))
    return out


def fm_rank_criterion(A: Matrix, d: int) -> bool:
    """True iff rank(A - I_d) < d - 1."""
    if A.shape != (d, d):
        raise ValueError(f"expected a {d}x{d} matrix, got {A.shape}")
    return (A - Matrix.identity(A.field, d)).rank() < d - 1


# -- certificates ---------------------------------------------------------------


@dataclass
class RankCertificate:
    kind: str
    ctx: EmbeddingContext
    input: dict
    companion: dict
    product: Matrix
    rank: int
    bound: int
    extra: dict = dc_field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.ctx.d

    def verify(self) -> bool:
        """Recompute the product from the stored parts and check the rank bound."""
        ctx = self.ctx
        if self.kind == "sl":
            beta, j, alpha = self.input["beta"], self.input["j"], self.companion["alpha"]
            if alpha.det().value != 1:
                return False
            prod = eta(alpha, ctx) @ eta(beta, ctx) @ frobenius_block(ctx) ** (j % ctx.m)
        else:
            el, B = self.input["element"], self.companion["B"]
            if not is_symplectic(B) or B != el.A.inverse() @ self.extra["basis_matrix"]:
                return False
            prod = el.eta() @ eta(B, ctx)
        r = (prod - Matrix.identity(ctx.base, ctx.d)).rank()
        return prod == self.product and r == self.rank and r <= self.bound and r < ctx.d - 1

    def to_json(self) -> dict:
        ctx = self.ctx
        params = {"q": ctx.q, "e": ctx.n, "d": ctx.d}
        if self.kind == "sl":
            inp = {"beta": self.input["beta"].to_json(), "j": self.input["j"]}
            comp = {"alpha": self.companion["alpha"].to_json()}
        else:
            inp = self.input["element"].to_json()
            comp = {"B": self.companion["B"].to_json(), "basis": self.extra["basis_matrix"].to_json()}
        return {"kind": self.kind, "params": params, "input": inp, "companion": comp,
                "rank": self.rank, "bound": self.bound, "verified": self.verify()}


def _sl_context(ctx: EmbeddingContext):
    if ctx.n <= 2:
        raise ValueError("the SL certificate needs e > 2")


def sl_certificate(beta: Matrix, j: int, ctx: EmbeddingContext) -> RankCertificate:
    """Find alpha in SL(e, q^m) with rank(eta(alpha) eta(beta) M^j - I) <= d - 2.

    With jj = j mod m, the target columns are columns 1 and m+1 of M^(-jj),
    read back as vectors over F_{q^m}.  D carries them as its first two
    columns and has det D = det(beta conjugated by Frobenius^(-jj)); then
    alpha = D^(q^jj) beta^(-1) has determinant 1.
    """
    _sl_context(ctx)
    e, m, d = ctx.n, ctx.m, ctx.d
    if beta.field is not ctx.mid or beta.shape != (e, e):
        raise ValueError(f"beta must be {e}x{e} over {ctx.mid.literal}")
    if not beta.is_invertible():
        raise ValueError("beta is singular")
    jj = j % m
    Mj = frobenius_block(ctx) ** jj
    Minv = frobenius_block(ctx) ** ((m - jj) % m)
    c1 = ctx.from_vec_coords(Minv.column(0))
    c2 = ctx.from_vec_coords(Minv.column(m))
    beta_bar = conjugate_entries(beta, -jj, ctx.q)
    D = sl_complete(c1, c2, e, beta_bar.det(), ctx.mid)
    alpha = conjugate_entries(D, jj, ctx.q) @ beta.inverse()
    if alpha.det().value != 1:
        raise AssertionError("companion element is not in SL")
    prod = eta(alpha, ctx) @ eta(beta, ctx) @ Mj
    r = (prod - Matrix.identity(ctx.base, d)).rank()
    return RankCertificate("sl", ctx, {"beta": beta, "j": j}, {"alpha": alpha, "D": D}, prod, r, d - 2)


def nonsquare(F: Field) -> int:
    """Smallest nonsquare of an odd-characteristic field."""
    if F.p == 2:
        raise ValueError("every element is a square in characteristic 2")
    return next(x for x in range(2, F.order) if F.log_int(x) % 2)


def _is_square(F: Field, x: int) -> bool:
    return x == 0 or F.p == 2 or F.log_int(x) % 2 == 0


def _sqrt_small(F: Field, x: int) -> int:
    """The square root with the smaller integer (the unique one when p = 2)."""
    if x == 0:
        return 0
    L = F.log_int(x)
    if F.p == 2:
        return F.exp_int(L * (F.order // 2))
    if L % 2:
        raise ValueError("not a square")
    r = F.exp_int(L // 2)
    return min(r, F.neg_int(r))


@dataclass(frozen=True)
class SpElement:
    """R_a o sigma^frob o S_alpha o A, with a = 1 (r_exp None) or nu^(q^r_exp).

    nu is the smallest nonsquare of F_{q^m}; it only exists in odd
    characteristic.  ``A`` is symplectic over F_{q^m}.
    """

    ctx: EmbeddingContext
    r_exp: int | None
    frob: int
    alpha: int
    A: Matrix

    def __post_init__(self):
        F, e = self.ctx.mid, self.ctx.n
        if self.alpha == 0:
            raise ValueError("scalar part must be nonzero")
        if self.r_exp is not None and F.p == 2:
            raise ValueError("R_a is trivial in characteristic 2")
        if self.A.field is not F or not is_symplectic(self.A, e):
            raise ValueError("A is not symplectic")

    def r_value(self) -> int:
        F = self.ctx.mid
        if self.r_exp is None:
            return 1
        return F.pow_int(nonsquare(F), self.ctx.q**self.r_exp)

    def r_matrix(self) -> Matrix:
        e = self.ctx.n
        return Matrix.diagonal(self.ctx.mid, [1] * (e // 2) + [self.r_value()] * (e // 2))

    def linear_part(self) -> Matrix:
        """T with the element acting as v -> T v^(q^frob)."""
        F, e = self.ctx.mid, self.ctx.n
        lam = F.pow_int(self.alpha, self.ctx.q**self.frob)
        S = Matrix.diagonal(F, [lam] * e)
        return self.r_matrix() @ S @ conjugate_entries(self.A, self.frob, self.ctx.q)

    def frobenius_part(self) -> Matrix:
        """eta of R o sigma o S, block diagonal."""
        F, e, ctx = self.ctx.mid, self.ctx.n, self.ctx
        lam = F.pow_int(self.alpha, ctx.q**self.frob)
        RS = self.r_matrix() @ Matrix.diagonal(F, [lam] * e)
        return eta(RS, ctx) @ frobenius_block(ctx) ** (self.frob % ctx.m)

    def eta(self) -> Matrix:
        return eta(self.linear_part(), self.ctx) @ frobenius_block(self.ctx) ** (self.frob % self.ctx.m)

    def to_json(self) -> dict:
        return {"r_exp": self.r_exp, "frob": self.frob, "alpha": list(self.ctx.mid(self.alpha).flat),
                "A": self.A.to_json()}


def aut_sp_compose(el: SpElement) -> tuple[Matrix, int]:
    return el.linear_part(), el.frob % el.ctx.m


def aut_sp_decompose(T: Matrix, j: int, ctx: EmbeddingContext) -> SpElement:
    """Canonical decomposition of v -> T v^(q^j) as R_a o sigma^j o S_alpha o A.

    T H T^t = lambda^2 a H with lambda = alpha^(q^j); a = 1 when the
    multiplier is a square, else the fixed nonsquare (r_exp 0), and alpha is
    the smaller of its two square roots.
    """
    F, e, q = ctx.mid, ctx.n, ctx.q
    j %= ctx.m
    H = symplectic_form(e, F)
    mu = (T @ H @ T.T).a[0, e // 2]
    if mu == 0:
        raise ValueError("element does not preserve the form up to a scalar")
    if _is_square(F, mu):
        r_exp, a = None, 1
    else:
        r_exp, a = 0, nonsquare(F)
    lam_sq = F.mul_int(mu, F.inv_int(a))
    alpha = _sqrt_small(F, F.pow_int(lam_sq, q ** ((ctx.m - j) % ctx.m)))
    lam = F.pow_int(alpha, q**j)
    R = Matrix.diagonal(F, [1] * (e // 2) + [a] * (e // 2))
    A_sig = (R @ Matrix.diagonal(F, [lam] * e)).inverse() @ T
    A = conjugate_entries(A_sig, -j, q)
    return SpElement(ctx, r_exp, j, alpha, A)


def sp_certificate(el: SpElement) -> RankCertificate:
    """Find B in Sp(e, q^m) with rank(eta(M B) - I) <= d - e/2.

    M = D o A with D = R o sigma o S block diagonal under eta.  Columns
    0, m, ..., (e/2 - 1) m of eta(D)^-1 are read back as isotropic vectors
    f_i, extended to a symplectic basis D~, and B = A^-1 D~.
    """
    ctx = el.ctx
    e, m, d = ctx.n, ctx.m, ctx.d
    if e % 2 or e < 4:
        raise ValueError("the Sp certificate needs even e >= 4")
    Dinv = el.frobenius_part().inverse()
    fs = [ctx.from_vec_coords(Dinv.column(i * m)) for i in range(e // 2)]
    basis, Dt = extend_symplectic_basis(fs, e, ctx.mid)
    B = el.A.inverse() @ Dt
    prod = el.eta() @ eta(B, ctx)
    r = (prod - Matrix.identity(ctx.base, d)).rank()
    return RankCertificate("sp", ctx, {"element": el}, {"B": B}, prod, r, d - e // 2,
                           {"basis_matrix": Dt})


def random_sl_input(ctx: EmbeddingContext, rng: np.random.Generator) -> tuple[Matrix, int]:
    beta = random_invertible(ctx.mid, ctx.n, rng)
    return beta, int(rng.integers(0, ctx.m))


def random_sp_element(ctx: EmbeddingContext, rng: np.random.Generator) -> SpElement:
    """A random element with canonical parts (so decompose inverts compose)."""
    F = ctx.mid
    r_exp = None if F.p == 2 or rng.integers(2) == 0 else 0
    alpha = int(rng.integers(1, F.order))
    alpha = _sqrt_small(F, F.mul_int(alpha, alpha))
    return SpElement(ctx, r_exp, int(rng.integers(0, ctx.m)), alpha, random_symplectic(F, ctx.n, rng))


# -- sieves -------------------------------------------------------------------------


@dataclass(frozen=True)
class SieveVerdict:
    q: int
    k: int
    ell: int
    d: int
    branch: str
    quantity: int
    bound: int
    verdict: str
    notes: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"q": self.q, "k": self.k, "ell": self.ell, "d": self.d, "branch": self.branch,
                "quantity": self.quantity, "bound": self.bound, "verdict": self.verdict,
                "notes": list(self.notes)}


def _check_pair(q: int, k: int, ell: int):
    prime_power(q)
    if k < 0 or ell < 0:
        raise ValueError("k and ell must be >= 0")
    if k == ell and k > 0:
        raise ValueError("k = ell is impossible for an ell-normalized polynomial")


def gammaL1_sieve(q: int, k: int, ell: int) -> SieveVerdict:
    """Orbit-divisibility test for the one-dimensional semilinear case.

    Q = (q^max - q^min)/(q^gcd - 1) must divide an index i <= d; Q > d
    excludes the pair.  gcd(k, 0) is taken to be k.
    """
    _check_pair(q, k, ell)
    d = max(k, ell)
    g = math.gcd(k, ell)
    Q = (q ** d - q ** min(k, ell)) // (q**g - 1) if g else 0
    notes = ("bound i <= d",)
    if k == 0:
        return SieveVerdict(q, k, ell, d, "k=0", Q, d, "monomial-branch", notes)
    branch = "l<k" if ell < k else "k<l"
    verdict = "excluded" if Q > d else "unresolved"
    return SieveVerdict(q, k, ell, d, branch, Q, d, verdict, notes)


def spread_constraints(q: int, k: int, ell: int) -> SieveVerdict:
    """Orbit sizes against a Desarguesian d/2-spread.

    The fixed-point orbit of size q^min - 1 must be a union of spread
    elements, so (q^(d/2) - 1) | (q^min - 1).  With d = k this leaves only
    ell = d/2; with d = ell it forces k = d/2, a branch the further
    linearity argument rules out.  ``quantity`` is q^(d/2) - 1 and
    ``bound`` is q^min - 1.
    """
    _check_pair(q, k, ell)
    d = max(k, ell)
    if d % 2:
        raise ValueError(f"d = {d} must be even")
    low = min(k, ell)
    div, target = q ** (d // 2) - 1, q**low - 1
    divides = target % div == 0
    if ell == d:
        branch = "d=l"
        if k == 0:
            return SieveVerdict(q, k, ell, d, branch, div, target, "monomial-branch")
        verdict = "excluded-by-linearity" if divides else "excluded"
        return SieveVerdict(q, k, ell, d, branch, div, target, verdict)
    branch = "d=k"
    if ell == 0:
        return SieveVerdict(q, k, ell, d, branch, div, target, "unresolved",
                            ("empty fixed-point orbit gives no constraint",))
    verdict = "survivor" if divides else "excluded"
    return SieveVerdict(q, k, ell, d, branch, div, target, verdict)
