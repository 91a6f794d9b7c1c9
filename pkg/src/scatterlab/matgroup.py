"""GL(n, q^m) inside GL(nm, q): the block embedding, Frobenius, symplectic helpers.

Vectors of F_{q^m}^n are identified with F_q^{nm} by expanding each entry in
the basis B = {1, g, ..., g^(m-1)} of F_{q^m}, where g is the primitive
element.  Multiplication by a in that basis is ``phi(a)``; a matrix T over
F_{q^m} becomes the block matrix ``eta(T)`` of the phi-images of its entries.
The q-Frobenius acts blockwise through ``frobenius_block``.
"""

from __future__ import annotations

from functools import cached_property
from typing import Sequence

import numpy as np

from .ff import FElem, Field, FieldError, build_field, min_poly, prime_power
from .matrix import Matrix


def _coerce_int(F: Field, a) -> int:
    if isinstance(a, FElem):
        if a.field is not F:
            if a.field in F.levels:
                return a.value
            raise FieldError(f"{a!r} is not an element of {F.literal}")
        return a.value
    v = int(a)
    if not 0 <= v < F.order:
        raise FieldError(f"{v} is not an element of {F.literal}")
    return v


def apply_matrix(M: Matrix, vecs: np.ndarray) -> np.ndarray:
    """M applied to every vector along the last axis of ``vecs``."""
    F = M.field
    vecs = np.asarray(vecs, dtype=np.int64)
    if F.degree == 1:
        return (vecs @ M.a.T) % F.p
    return F.vsum(F.vmul(vecs[..., None, :], M.a), axis=-1)


def conjugate_entries(T: Matrix, j: int, q: int) -> Matrix:
    """Apply x -> x^(q^j) to every entry; negative j means the inverse power."""
    F = T.field
    r = round(np.log(F.order) / np.log(q))
    if q**r != F.order:
        raise FieldError(f"{q} is not a subfield order of {F.literal}")
    return Matrix._wrap(F, F.vpow(T.a, q ** (j % r)))


class EmbeddingContext:
    """Bases and the maps phi, eta for GL(n, q^m) -> GL(nm, q).

    The tower is F_q < F_{q^m} < F_{q^{nm}}.  The basis of F_{q^{nm}} over
    F_{q^m} is the power basis of the top generator, so an element's
    coordinates over F_{q^m} are the base-q^m digits of its integer.
    """

    def __init__(self, q: int, m: int, n: int):
        if m < 1 or n < 1:
            raise ValueError("m and n must be positive")
        p, a = prime_power(q)
        self.q, self.m, self.n = q, m, n
        self.top = build_field(p, [a, m, n])
        by_order = {L.order: L for L in self.top.levels}
        self.base: Field = by_order[q]
        self.mid: Field = by_order[q**m]
        self.gamma = self.mid.primitive
        self.basis = np.array([self.mid.pow_int(self.gamma, j) for j in range(m)], dtype=np.int64)
        self._tower_to_b = Matrix(self.base, self._tower(self.basis).T).inverse()

    def __repr__(self):
        return f"EmbeddingContext(q={self.q}, m={self.m}, n={self.n})"

    @property
    def d(self) -> int:
        return self.n * self.m

    def _tower(self, xs) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        return (xs[..., None] // self.q ** np.arange(self.m, dtype=np.int64)) % self.q

    def coords(self, xs) -> np.ndarray:
        """(x)_B for elements of F_{q^m}; shape (..., m)."""
        return apply_matrix(self._tower_to_b, self._tower(xs))

    def from_coords(self, c) -> np.ndarray:
        """Inverse of ``coords``: sum c_j g^j."""
        M = self.mid
        c = np.asarray(c, dtype=np.int64)
        return M.vsum(M.vmul(c, self.basis), axis=-1)

    def vec_coords(self, v) -> np.ndarray:
        """Coordinates of a vector of F_{q^m}^n in the blocked basis; shape (nm,)."""
        return self.coords(np.asarray(v, dtype=np.int64)).reshape(-1)

    def from_vec_coords(self, c) -> np.ndarray:
        return self.from_coords(np.asarray(c, dtype=np.int64).reshape(self.n, self.m))

    def element_vector(self, x: int) -> np.ndarray:
        """An element of F_{q^{nm}} as its coordinate vector over F_{q^m}."""
        Qm = self.mid.order
        return (int(x) // Qm ** np.arange(self.n, dtype=np.int64)) % Qm

    def vector_element(self, v) -> int:
        return int(np.asarray(v, dtype=np.int64) @ (self.mid.order ** np.arange(self.n, dtype=np.int64)))

    @cached_property
    def companion(self) -> Matrix:
        mp = min_poly(FElem(self.mid, self.gamma), self.base)
        return companion_matrix([c.value for c in mp], self.base)

    @cached_property
    def frobenius(self) -> Matrix:
        """M-bar: matrix of x -> x^q in the basis B."""
        imgs = self.mid.vpow(self.basis, self.q)
        return Matrix._wrap(self.base, self.coords(imgs).T)


def companion_matrix(minpoly: Sequence, field: Field) -> Matrix:
    """Matrix of multiplication by a root, in the power basis of that root.

    ``minpoly`` lists coefficients low degree first and must be monic.
    Column i is the image of t^i, so the last column is -c_0, ..., -c_(m-1).
    """
    c = [_coerce_int(field, v) for v in minpoly]
    if len(c) < 2:
        raise ValueError("polynomial must have degree >= 1")
    if c[-1] != 1:
        raise ValueError("polynomial must be monic")
    m = len(c) - 1
    a = np.zeros((m, m), dtype=np.int64)
    a[np.arange(1, m), np.arange(m - 1)] = 1
    a[:, m - 1] = field.vneg(np.array(c[:-1], dtype=np.int64))
    return Matrix._wrap(field, a)


def phi(a, ctx: EmbeddingContext) -> Matrix:
    """m x m matrix over F_q of x -> a x in the basis B."""
    v = _coerce_int(ctx.mid, a)
    imgs = ctx.mid.vmul(v, ctx.basis)
    return Matrix._wrap(ctx.base, ctx.coords(imgs).T)


def eta(T: Matrix, ctx: EmbeddingContext) -> Matrix:
    """Block matrix (phi(t_ij)) over F_q."""
    if T.field is not ctx.mid:
        raise FieldError(f"expected a matrix over {ctx.mid.literal}, got {T.field.literal}")
    r, c = T.shape
    m = ctx.m
    imgs = ctx.mid.vmul(T.a[:, :, None], ctx.basis)  # (r, c, m): t_ij * g^k
    blocks = ctx.coords(imgs)  # (r, c, k, row)
    out = blocks.transpose(0, 3, 1, 2).reshape(r * m, c * m)
    return Matrix._wrap(ctx.base, out)


def frobenius_block(ctx: EmbeddingContext) -> Matrix:
    """diag(M-bar, ..., M-bar), the q-Frobenius on F_q^{nm}."""
    return Matrix.block_diag(ctx.base, [ctx.frobenius] * ctx.n)


def check_commutation(a, ctx: EmbeddingContext) -> bool:
    """diag(phi(a), I, ..., I) M == M diag(phi(a^(q^(m-1))), I, ..., I)."""
    v = _coerce_int(ctx.mid, a)
    if v == 0:
        raise ValueError("a must be nonzero")
    I = Matrix.identity(ctx.base, ctx.m)
    M = frobenius_block(ctx)
    left = Matrix.block_diag(ctx.base, [phi(v, ctx)] + [I] * (ctx.n - 1))
    w = ctx.mid.pow_int(v, ctx.q ** (ctx.m - 1))
    right = Matrix.block_diag(ctx.base, [phi(w, ctx)] + [I] * (ctx.n - 1))
    return left @ M == M @ right


def symplectic_form(e: int, field: Field) -> Matrix:
    """[[0, I], [-I, 0]] of size e."""
    if e < 2 or e % 2:
        raise ValueError(f"symplectic form needs even e >= 2, got {e}")
    h = e // 2
    a = np.zeros((e, e), dtype=np.int64)
    a[np.arange(h), np.arange(h, e)] = 1
    a[np.arange(h, e), np.arange(h)] = field.neg_int(1)
    return Matrix._wrap(field, a)


def is_symplectic(A: Matrix, e: int | None = None) -> bool:
    e = A.rows if e is None else e
    if A.shape != (e, e):
        raise ValueError(f"expected an {e}x{e} matrix, got {A.shape}")
    H = symplectic_form(e, A.field)
    return A.is_invertible() and A @ H @ A.T == H


def omega(u, w, H: Matrix) -> int:
    F = H.field
    Hw = apply_matrix(H, np.asarray(w, dtype=np.int64))
    return int(F.vsum(F.vmul(np.asarray(u, dtype=np.int64), Hw)))


def _solve(F: Field, rows: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """A particular solution of rows @ x = rhs, free variables set to 0."""
    aug = Matrix._wrap(F, np.concatenate([rows, rhs[:, None]], axis=1))
    R, piv = aug.rref()
    n = rows.shape[1]
    if n in piv:
        raise ValueError("inconsistent linear system")
    x = np.zeros(n, dtype=np.int64)
    for i, c in enumerate(piv):
        x[c] = R.a[i, n]
    return x


def extend_symplectic_basis(vectors: Sequence, e: int, field: Field) -> tuple[list[np.ndarray], Matrix]:
    """Extend pairwise orthogonal vectors u_1..u_h to a symplectic basis.

    Returns the basis (u_1, ..., u_{e/2}, w_1, ..., w_{e/2}) with Gram matrix
    exactly H, and the matrix having these vectors as columns.  Partners of
    the given vectors are the particular solutions of the pairing equations;
    further pairs are taken greedily from projected standard vectors.
    """
    F = field
    H = symplectic_form(e, F)
    h = e // 2
    us = [np.array([_coerce_int(F, x) for x in v], dtype=np.int64) for v in vectors]
    if len(us) > h:
        raise ValueError(f"at most {h} vectors can be isotropic and independent")
    if any(len(u) != e for u in us):
        raise ValueError(f"vectors must have length {e}")
    if us and Matrix._wrap(F, np.stack(us)).rank() < len(us):
        raise ValueError("input vectors are linearly dependent")
    for i, u in enumerate(us):
        for v in us[i + 1 :]:
            if omega(u, v, H):
                raise ValueError("input vectors are not pairwise orthogonal")

    def hrow(v):  # omega(v, .) as a row vector
        return apply_matrix(H.T, v)

    ws: list[np.ndarray] = []
    for i in range(len(us)):
        rows = [hrow(u) for u in us] + [hrow(w) for w in ws]
        rhs = np.zeros(len(rows), dtype=np.int64)
        rhs[i] = 1
        ws.append(_solve(F, np.stack(rows), rhs))

    def project(v):
        out = v.copy()
        for u, w in zip(us, ws):
            out = F.vsub(out, F.vmul(omega(v, w, H), u))
            out = F.vadd(out, F.vmul(omega(v, u, H), w))
        return out

    std = np.eye(e, dtype=np.int64)
    while len(us) < h:
        proj = [project(s) for s in std]
        u = next(v for v in proj if v.any())
        for v in proj:
            c = omega(u, v, H)
            if c:
                w = F.vmul(v, F.inv_int(c))
                break
        us.append(u)
        ws.append(w)

    basis = us + ws
    D = Matrix.from_columns(F, basis)
    if D.T @ H @ D != H:
        raise AssertionError("extended basis has the wrong Gram matrix")
    return basis, D


def sl_complete(c1, c2, e: int, det_target, field: Field) -> Matrix:
    """e x e matrix with first columns c1, c2 and the requested determinant.

    Standard basis vectors are added in index order while they keep the
    columns independent; the last added column is then rescaled.
    """
    F = field
    if e <= 2:
        raise ValueError("column completion needs e > 2")
    target = _coerce_int(F, det_target)
    if target == 0:
        raise ValueError("target determinant must be nonzero")
    cols = [np.array([_coerce_int(F, x) for x in c], dtype=np.int64) for c in (c1, c2)]
    if any(len(c) != e for c in cols):
        raise ValueError(f"columns must have length {e}")
    if Matrix.from_columns(F, cols).rank() < 2:
        raise ValueError("prescribed columns are linearly dependent")
    for k in range(e):
        if len(cols) == e:
            break
        s = np.zeros(e, dtype=np.int64)
        s[k] = 1
        if Matrix.from_columns(F, cols + [s]).rank() == len(cols) + 1:
            cols.append(s)
    det = Matrix.from_columns(F, cols).det().value
    cols[-1] = F.vmul(cols[-1], F.mul_int(target, F.inv_int(det)))
    return Matrix.from_columns(F, cols)


def random_invertible(field: Field, e: int, rng: np.random.Generator) -> Matrix:
    while True:
        A = Matrix._wrap(field, rng.integers(0, field.order, size=(e, e)))
        if A.is_invertible():
            return A


def random_symplectic(field: Field, e: int, rng: np.random.Generator, steps: int | None = None) -> Matrix:
    """Product of random symplectic transvections x -> x + c omega(u, x) u."""
    H = symplectic_form(e, field)
    A = Matrix.identity(field, e)
    for _ in range(steps or 2 * e + 2):
        u = rng.integers(0, field.order, size=e)
        c = int(rng.integers(1, field.order))
        Hu = apply_matrix(H.T, u)  # row of omega(u, .)
        t = field.vmul(c, field.vmul(u[:, None], Hu[None, :]))
        A = Matrix._wrap(field, field.vadd(np.eye(e, dtype=np.int64), t)) @ A
    return A
