"""Dense matrices over a field level, plus batched rank over prime fields."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .ff import FElem, Field, FieldError


class Matrix:
    """Immutable dense matrix whose entries are integers of ``field``."""

    __slots__ = ("field", "a")

    def __init__(self, field: Field, entries):
        a = np.array(_as_ints(entries), dtype=np.int64)
        if a.ndim == 1:
            a = a.reshape(1, -1) if a.size else a.reshape(0, 0)
        if a.ndim != 2:
            raise ValueError("matrix entries must be two-dimensional")
        if a.size and (a.min() < 0 or a.max() >= field.order):
            raise FieldError(f"entries out of range for {field.literal}")
        a.setflags(write=False)
        self.field = field
        self.a = a

    @classmethod
    def _wrap(cls, field: Field, a: np.ndarray) -> "Matrix":
        m = cls.__new__(cls)
        a = np.ascontiguousarray(a, dtype=np.int64)
        a.setflags(write=False)
        m.field = field
        m.a = a
        return m

    @classmethod
    def identity(cls, field: Field, n: int) -> "Matrix":
        return cls._wrap(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: Field, rows: int, cols: int | None = None) -> "Matrix":
        return cls._wrap(field, np.zeros((rows, rows if cols is None else cols), dtype=np.int64))

    @classmethod
    def from_columns(cls, field: Field, columns: Sequence) -> "Matrix":
        cols = [np.asarray(_as_ints(c), dtype=np.int64) for c in columns]
        return cls._wrap(field, np.stack(cols, axis=1))

    @classmethod
    def diagonal(cls, field: Field, values: Sequence) -> "Matrix":
        return cls._wrap(field, np.diag(np.asarray(_as_ints(values), dtype=np.int64)))

    @classmethod
    def block(cls, field: Field, blocks: Sequence[Sequence["Matrix"]]) -> "Matrix":
        return cls._wrap(field, np.block([[b.a for b in row] for row in blocks]))

    @classmethod
    def block_diag(cls, field: Field, blocks: Sequence["Matrix"]) -> "Matrix":
        n = sum(b.rows for b in blocks)
        m = sum(b.cols for b in blocks)
        out = np.zeros((n, m), dtype=np.int64)
        r = c = 0
        for b in blocks:
            out[r : r + b.rows, c : c + b.cols] = b.a
            r += b.rows
            c += b.cols
        return cls._wrap(field, out)

    # -- shape and access ------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def rows(self) -> int:
        return self.a.shape[0]

    @property
    def cols(self) -> int:
        return self.a.shape[1]

    def __getitem__(self, idx):
        r = self.a[idx]
        if np.ndim(r) == 0:
            return FElem(self.field, int(r))
        return Matrix._wrap(self.field, np.atleast_2d(r))

    def column(self, j: int) -> np.ndarray:
        return self.a[:, j].copy()

    def entry(self, i: int, j: int) -> FElem:
        return FElem(self.field, int(self.a[i, j]))

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(self.field, self.a.T)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.a, other.a))

    def __hash__(self):
        return hash((self.shape, self.a.tobytes()))

    def __repr__(self):
        return f"Matrix({self.field.literal}, {self.a.tolist()})"

    def to_json(self) -> list:
        """Row-major nested lists of flat prime-field coordinate tuples."""
        F = self.field
        return [[list(FElem(F, int(v)).flat) for v in row] for row in self.a]

    def tolist(self) -> list[list[int]]:
        return self.a.tolist()

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: "Matrix"):
        if other.field is not self.field:
            raise FieldError(f"matrix field mismatch: {self.field.literal} vs {other.field.literal}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._wrap(self.field, self.field.vadd(self.a, other.a))

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        return Matrix._wrap(self.field, self.field.vsub(self.a, other.a))

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(self.field, self.field.vneg(self.a))

    def scale(self, c) -> "Matrix":
        c = int(c.value if isinstance(c, FElem) else c)
        return Matrix._wrap(self.field, self.field.vmul(self.a, c))

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._check(other)
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        F = self.field
        if F.degree == 1:
            return Matrix._wrap(F, (self.a @ other.a) % F.p)
        prod = F.vmul(self.a[:, :, None], other.a[None, :, :])
        return Matrix._wrap(F, F.vsum(prod, axis=1))

    def __pow__(self, e: int) -> "Matrix":
        if self.rows != self.cols:
            raise ValueError("power of a non-square matrix")
        if e < 0:
            return self.inverse() ** (-e)
        result = Matrix.identity(self.field, self.rows)
        base = self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def apply(self, vec) -> np.ndarray:
        v = np.asarray(_as_ints(vec), dtype=np.int64)
        return (self @ Matrix._wrap(self.field, v.reshape(-1, 1))).a[:, 0]

    def map_entries(self, fn) -> "Matrix":
        return Matrix._wrap(self.field, np.vectorize(fn, otypes=[np.int64])(self.a))

    # -- elimination ---------------------------------------------------------

    def rref(self) -> tuple["Matrix", list[int]]:
        R, piv, _ = _eliminate(self.field, self.a)
        return Matrix._wrap(self.field, R), piv

    def rank(self) -> int:
        return len(_eliminate(self.field, self.a)[1])

    def det(self) -> FElem:
        if self.rows != self.cols:
            raise ValueError("determinant of a non-square matrix")
        _, piv, d = _eliminate(self.field, self.a)
        if len(piv) < self.rows:
            return FElem(self.field, 0)
        return FElem(self.field, d)

    def is_invertible(self) -> bool:
        return self.rows == self.cols and self.rank() == self.rows

    def inverse(self) -> "Matrix":
        n = self.rows
        if n != self.cols:
            raise ValueError("inverse of a non-square matrix")
        aug = np.concatenate([self.a, np.eye(n, dtype=np.int64)], axis=1)
        R, piv, _ = _eliminate(self.field, aug, ncols=n)
        if len(piv) < n:
            raise ZeroDivisionError("matrix is singular")
        return Matrix._wrap(self.field, R[:, n:])

    def nullspace(self) -> list[np.ndarray]:
        """Basis of the right kernel, one vector per free column."""
        F = self.field
        R, piv, _ = _eliminate(F, self.a)
        free = [j for j in range(self.cols) if j not in piv]
        basis = []
        for f in free:
            v = np.zeros(self.cols, dtype=np.int64)
            v[f] = 1
            for i, pc in enumerate(piv):
                v[pc] = F.neg_int(int(R[i, f]))
            basis.append(v)
        return basis


def _as_ints(entries):
    if isinstance(entries, Matrix):
        return entries.a
    if isinstance(entries, np.ndarray):
        return entries
    if isinstance(entries, FElem):
        return entries.value
    if isinstance(entries, Iterable):
        return [_as_ints(e) for e in entries]
    return int(entries)


def _eliminate(F: Field, a: np.ndarray, ncols: int | None = None):
    """Reduced row echelon form with first-nonzero pivoting.

    Returns (R, pivot columns, product of pivots with row-swap signs).
    """
    R = np.array(a, dtype=np.int64, copy=True)
    rows, cols = R.shape
    ncols = cols if ncols is None else ncols
    piv: list[int] = []
    det = 1
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.nonzero(R[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            R[[r, k]] = R[[k, r]]
            det = F.neg_int(det)
        pv = int(R[r, c])
        det = F.mul_int(det, pv)
        R[r] = F.vmul(R[r], F.inv_int(pv))
        factors = R[:, c].copy()
        factors[r] = 0
        if factors.any():
            R = F.vsub(R, F.vmul(factors[:, None], R[r][None, :]))
        piv.append(c)
        r += 1
    return R, piv, det


def batch_rank(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a stack of matrices over the prime field F_p, shape (B, R, C)."""
    mats = np.asarray(mats, dtype=np.int64)
    B, R, C = mats.shape
    if B == 0:
        return np.zeros(0, dtype=np.int64)
    if p == 2 and C <= 62:
        return _batch_rank_gf2(pack_rows(mats), C)
    M = mats % p
    inv = np.array([0] + [pow(v, p - 2, p) for v in range(1, p)], dtype=np.int64)
    used = np.zeros((B, R), dtype=bool)
    rank = np.zeros(B, dtype=np.int64)
    ar = np.arange(B)
    for c in range(C):
        cand = (M[:, :, c] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = cand.argmax(axis=1)
        prow = M[ar, piv, :] * inv[M[ar, piv, c]][:, None] % p
        f = M[:, :, c].copy()
        f[ar, piv] = 0
        f[~has] = 0
        M = (M - f[:, :, None] * prow[:, None, :]) % p
        hb = ar[has]
        M[hb, piv[has]] = prow[has]
        used[hb, piv[has]] = True
        rank += has
    return rank


def pack_rows(mats: np.ndarray) -> np.ndarray:
    """Pack 0/1 rows into integers, bit j = column j."""
    C = mats.shape[-1]
    w = (1 << np.arange(C, dtype=np.int64)).astype(np.int64)
    return (np.asarray(mats, dtype=np.int64) & 1) @ w


def _batch_rank_gf2(rows: np.ndarray, C: int) -> np.ndarray:
    M = rows.copy()
    B, R = M.shape
    used = np.zeros((B, R), dtype=bool)
    rank = np.zeros(B, dtype=np.int64)
    ar = np.arange(B)
    for c in range(C):
        bit = np.int64(1) << c
        hits = (M & bit) != 0
        cand = hits & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        piv = cand.argmax(axis=1)
        prow = M[ar, piv]
        hits[ar, piv] = False
        hits &= has[:, None]
        M ^= np.where(hits, prow[:, None], 0)
        used[ar[has], piv[has]] = True
        rank += has
    return rank
