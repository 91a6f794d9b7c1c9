"""q-linearized polynomials over F_{q^n} and the two known exceptional families."""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from typing import Iterator, Sequence

import numpy as np

from .ff import FElem, Field, FieldError, extension_field, get_embedding, norm_rel
from .matrix import Matrix


@dataclass(frozen=True)
class LinearizedPoly:
    """sum_i a_i x^(q^i) over ``field``, with F_q the level ``base``.

    Coefficients are stored as integers of ``field``; trailing zeros are
    trimmed so the zero polynomial has no coefficients.
    """

    field: Field
    coeffs: tuple[int, ...]
    base: int = 0

    def __post_init__(self):
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(int(v) for v in c))
        if not 0 <= self.base < self.field.level:
            raise FieldError(f"base level {self.base} must lie strictly below {self.field.literal}")
        if len(self.coeffs) - 1 >= self.n:
            raise ValueError(f"q-degree {len(self.coeffs) - 1} must be smaller than n={self.n}")

    @property
    def base_field(self) -> Field:
        return self.field.levels[self.base]

    @property
    def q(self) -> int:
        return self.base_field.order

    @property
    def n(self) -> int:
        return self.field.degree // self.base_field.degree

    @property
    def k(self) -> int:
        """q-degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, i: int) -> FElem:
        return FElem(self.field, self.coeffs[i] if i < len(self.coeffs) else 0)

    def terms(self) -> Iterator[tuple[int, FElem]]:
        for i, c in enumerate(self.coeffs):
            if c:
                yield i, FElem(self.field, c)

    def __call__(self, x: FElem) -> FElem:
        return evaluate(self, x)

    def scale(self, c: FElem | int) -> "LinearizedPoly":
        F = self.field
        c = int(c.value if isinstance(c, FElem) else c)
        return LinearizedPoly(F, tuple(F.mul_int(c, a) for a in self.coeffs), self.base)

    def __sub__(self, other: "LinearizedPoly") -> "LinearizedPoly":
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return LinearizedPoly(F, tuple(F.sub_int(x, y) for x, y in zip(a, b)), self.base)

    def values(self, xs=None) -> np.ndarray:
        """f evaluated on an integer array (default: every field element)."""
        F = self.field
        xs = np.arange(F.order, dtype=np.int64) if xs is None else np.asarray(xs, dtype=np.int64)
        acc = np.zeros_like(xs)
        for i, a in self.terms():
            acc = F.vadd(acc, F.vmul(a.value, F.vpow(xs, self.q**i)))
        return acc

    def fp_matrix(self) -> np.ndarray:
        """Matrix of f as an F_p-linear map on flat coordinates."""
        F = self.field
        imgs = self.values(F.p ** np.arange(F.degree, dtype=np.int64))
        return F.digits(imgs).T.copy()

    def embed(self, target: Field) -> "LinearizedPoly":
        """Push coefficients into a larger field via the deterministic embedding."""
        E = get_embedding(self.field, target)
        base = target.levels.index(self.base_field) if self.base_field in target.levels else None
        if base is None:
            raise FieldError(f"{self.base_field.literal} is not a level of {target.literal}")
        return LinearizedPoly(target, tuple(int(v) for v in E.apply(np.array(self.coeffs, dtype=np.int64))), base)

    def to_json(self) -> list[list[int]]:
        return [list(FElem(self.field, c).flat) for c in self.coeffs]

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i, a in self.terms():
            mono = "x" if i == 0 else f"x^{self.q ** i}"
            parts.append(mono if a.value == 1 else f"{list(a.flat)}*{mono}")
        return " + ".join(parts)


def make_linpoly(field: Field, coeffs: Sequence, base: int = 0) -> LinearizedPoly:
    """Validated polynomial from FElem or integer coefficients."""
    vals = []
    for c in coeffs:
        if isinstance(c, FElem):
            c = field.lift(c).value
        elif isinstance(c, (list, tuple)):
            c = field.element(c).value
        else:
            c = field.element(int(c)).value
        vals.append(c)
    return LinearizedPoly(field, tuple(vals), base)


def evaluate(f: LinearizedPoly, x: FElem, *, embed: bool = False) -> FElem:
    """sum a_i x^(q^i).  With ``embed`` the coefficients are first mapped into x's field."""
    if x.field is not f.field:
        if x.field in f.field.levels:
            x = f.field.lift(x)
        elif embed:
            f = f.embed(x.field)
        else:
            raise FieldError(f"{x!r} is not in {f.field.literal}; pass embed=True")
    F = f.field
    acc = 0
    for i, a in f.terms():
        acc = F.add_int(acc, F.mul_int(a.value, F.pow_int(x.value, f.q**i)))
    return FElem(F, acc)


@dataclass(frozen=True)
class NormalizationCheck:
    ok: bool
    reason: str | None = None

    def __bool__(self):
        return self.ok


def is_ell_normalized(f: LinearizedPoly, ell: int) -> NormalizationCheck:
    """Check the four normalisation conditions for index ell, in order."""
    if not 0 <= ell < f.n:
        raise ValueError(f"index {ell} outside 0..{f.n - 1}")
    if f.k >= f.n:
        return NormalizationCheck(False, "q-degree-not-below-n")
    if f.is_zero or f.coeffs[-1] != 1:
        return NormalizationCheck(False, "not-monic")
    if f.coefficient(ell).value != 0:
        return NormalizationCheck(False, "coefficient-at-ell-nonzero")
    if ell > 0 and f.coefficient(0).value == 0:
        return NormalizationCheck(False, "not-separable")
    return NormalizationCheck(True)


def as_matrix(f: LinearizedPoly) -> Matrix:
    """n x n matrix over F_q; column j holds the coordinates of f(b_j).

    b_j is the j-th element of the tower basis over F_q, which is the power
    basis of the top generator when F_q is the level right below.
    """
    F, K = f.field, f.base_field
    basis = K.order ** np.arange(f.n, dtype=np.int64)
    imgs = f.values(basis)
    cols = [(imgs // K.order**i) % K.order for i in range(f.n)]
    return Matrix(K, np.stack(cols, axis=0))


def kernel_dim(f: LinearizedPoly) -> int:
    return f.n - as_matrix(f).rank()


def monomial(field: Field, s: int, base: int = 0) -> LinearizedPoly:
    return LinearizedPoly(field, (0,) * s + (1,), base)


@dataclass(frozen=True)
class FamilyPoly:
    """A member of a named family with its defining conditions evaluated."""

    kind: str
    poly: LinearizedPoly
    index: int
    params: dict = dc_field(default_factory=dict)
    conditions: dict = dc_field(default_factory=dict)
    scale: int = 1

    @property
    def holds(self) -> bool:
        return all(self.conditions.values())

    def conditions_in(self, target: Field) -> dict:
        """Family conditions re-evaluated after embedding into ``target``."""
        g = self.poly.embed(target)
        n = g.n
        s = self.params["s"]
        out = {"gcd": math.gcd(s, n) == 1}
        if self.kind == "lp":
            delta = get_embedding(self.poly.field, target)(FElem(self.poly.field, self.params["delta"]))
            out["norm"] = norm_rel(delta, g.base).value != 1
            out["shape"] = 2 * s < n
        return out


def pseudoregulus(q: int, n: int, s: int) -> FamilyPoly:
    """x^(q^s) over F_{q^n}, index 0; the family needs gcd(s, n) = 1."""
    if not 1 <= s < n:
        raise ValueError("need 1 <= s < n")
    F, base = extension_field(q, n)
    return FamilyPoly("pseudoregulus", monomial(F, s, base), 0, {"q": q, "n": n, "s": s},
                      {"gcd": math.gcd(s, n) == 1})


def lp_binomial(q: int, n: int, s: int, delta, *, normalize: bool = False) -> FamilyPoly:
    """x + delta x^(q^(2s)) over F_{q^n}, index s.

    With ``normalize`` the monic rescaling delta^-1 x + x^(q^(2s)) is returned
    and the applied scalar is recorded in ``scale``.
    """
    if 2 * s >= n:
        raise ValueError(f"need 2s < n, got s={s}, n={n}")
    if s < 1:
        raise ValueError("need s >= 1")
    F, base = extension_field(q, n)
    d = F.element(delta) if not isinstance(delta, FElem) else F.lift(delta)
    if d.value == 0:
        raise ValueError("delta must be nonzero")
    coeffs = [1] + [0] * (2 * s - 1) + [d.value]
    scale = 1
    if normalize:
        scale = F.inv_int(d.value)
        coeffs = [F.mul_int(scale, c) for c in coeffs]
    poly = LinearizedPoly(F, tuple(coeffs), base)
    conds = {"gcd": math.gcd(s, n) == 1, "norm": norm_rel(d, base).value != 1}
    return FamilyPoly("lp", poly, s, {"q": q, "n": n, "s": s, "delta": d.value}, conds, scale)


@dataclass(frozen=True)
class UfSubspace:
    """The F_q-subspace {(x^(q^ell), f(x))} of F_{q^n} x F_{q^n}."""

    poly: LinearizedPoly
    ell: int
    basis: tuple[tuple[int, int], ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def points(self) -> np.ndarray:
        """All q^n points as an (q^n, 2) integer array, indexed by x."""
        F = self.poly.field
        xs = np.arange(F.order, dtype=np.int64)
        return np.stack([F.vpow(xs, self.poly.q**self.ell), self.poly.values(xs)], axis=1)


def u_f_subspace(f: LinearizedPoly, ell: int) -> UfSubspace:
    """Row-reduced F_q-basis of U_f, obtained from all its points."""
    if not 0 <= ell < f.n:
        raise ValueError(f"index {ell} outside 0..{f.n - 1}")
    F, K = f.field, f.base_field
    pts = UfSubspace(f, ell, ()).points()
    n = f.n
    coords = np.concatenate([(pts[:, :1] // K.order ** np.arange(n)) % K.order,
                             (pts[:, 1:] // K.order ** np.arange(n)) % K.order], axis=1)
    R, piv = Matrix(K, coords).rref()
    rows = R.a[: len(piv)]
    w = K.order ** np.arange(n, dtype=np.int64)
    basis = tuple((int(r[:n] @ w), int(r[n:] @ w)) for r in rows)
    return UfSubspace(f, ell, basis)
