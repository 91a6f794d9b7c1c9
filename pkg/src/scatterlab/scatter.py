"""Scatteredness tests for linearized polynomials.

f is scattered of index ell when f(y)/y^(q^ell) = f(z)/z^(q^ell) forces
y/z in F_q.  Equivalently every f - m x^(q^ell) has an F_q-kernel of
dimension at most one.  The kernels of these maps for distinct m meet only
in 0 and cover the field, so all kernel dimensions come out of one pass
that sorts each nonzero x into the fiber of its quotient m; the per-m rank
route is kept as ``strategy="rank"`` for cross-checking.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field as dc_field

import numpy as np

from .ff import FElem, Field, FieldError, extend
from .linpoly import FamilyPoly, LinearizedPoly, UfSubspace, as_matrix, kernel_dim
from .matrix import batch_rank

PAIR_LIMIT = 1 << 14
_CHUNK = 1 << 16


@dataclass
class ScatterReport:
    scattered: bool
    method: str
    field: str
    ell: int
    poly: list
    witness: dict | None
    field_size: int
    elapsed_ms: int = 0

    @property
    def verdict(self) -> str:
        return "scattered" if self.scattered else "not-scattered"

    def to_json(self) -> dict:
        return {
            "test": "scattered",
            "field": self.field,
            "ell": self.ell,
            "poly": self.poly,
            "verdict": self.scattered,
            "witness": self.witness,
            "method": self.method,
            "elapsed_ms": self.elapsed_ms,
        }


def _check_ell(f: LinearizedPoly, ell: int):
    if not 0 <= ell < f.n:
        raise ValueError(f"index {ell} outside 0..{f.n - 1}")


def fiber_counts(f: LinearizedPoly, ell: int) -> np.ndarray:
    """counts[m] = #{x != 0 : f(x) = m x^(q^ell)}, for every m in the field."""
    F = f.field
    Q, p = F.order, F.p
    A = f.fp_matrix().T
    shift = pow(f.q, ell, Q - 1) if Q > 2 else 0
    counts = np.zeros(Q, dtype=np.int64)
    for s in range(0, Q - 1, _CHUNK):
        k = np.arange(s, min(Q - 1, s + _CHUNK), dtype=np.int64)
        x = F._exp[k]
        fx = F.pack(F.digits(x) @ A % p)
        lm = (F._log[fx] - k * shift) % max(Q - 1, 1)
        m = np.where(fx == 0, 0, F._exp[lm])
        counts += np.bincount(m, minlength=Q)
    return counts


def _dim_from_size(size: int, q: int) -> int:
    d, s = 0, 1
    while s < size:
        s *= q
        d += 1
    if s != size:
        raise AssertionError(f"kernel size {size} is not a power of {q}")
    return d


def kernel_dims(f: LinearizedPoly, ell: int, strategy: str = "fibers") -> np.ndarray:
    """dims[m] = dim_Fq ker(f - m x^(q^ell)) for every m (integer order)."""
    _check_ell(f, ell)
    q = f.q
    if strategy == "fibers":
        counts = fiber_counts(f, ell)
        sizes = counts + 1
        dims = np.zeros_like(sizes)
        s, d = q, 1
        while (sizes >= s).any():
            dims[sizes >= s] = d
            s *= q
            d += 1
        return dims
    if strategy == "rank":
        return _kernel_dims_rank(f, ell)
    raise ValueError(f"unknown strategy {strategy!r}")


def _kernel_dims_rank(f: LinearizedPoly, ell: int) -> np.ndarray:
    F = f.field
    Q, p, N = F.order, F.p, F.degree
    a = f.base_field.degree
    basis = p ** np.arange(N, dtype=np.int64)
    Fp = f.fp_matrix()
    # P: x -> x^(q^ell); G[t] = Mul(p^t) @ P
    P = F.digits(F.vpow(basis, f.q**ell)).T
    G = []
    for t in range(N):
        mul_t = F.digits(F.vmul(int(basis[t]), basis)).T
        G.append(mul_t @ P % p)
    G = np.stack(G)
    dims = np.zeros(Q, dtype=np.int64)
    step = max(1, (1 << 21) // (N * N))
    for s in range(0, Q, step):
        ms = np.arange(s, min(Q, s + step), dtype=np.int64)
        mats = (Fp[None] - np.einsum("bt,tij->bij", F.digits(ms), G)) % p
        dims[s : s + len(ms)] = (N - batch_rank(mats, p)) // a
    return dims


def _shifted(f: LinearizedPoly, ell: int, m: int) -> LinearizedPoly:
    F = f.field
    c = list(f.coeffs) + [0] * max(0, ell + 1 - len(f.coeffs))
    c[ell] = F.sub_int(c[ell], m)
    return LinearizedPoly(F, tuple(c), f.base)


def _kernel_witness(f: LinearizedPoly, ell: int, m: int) -> dict:
    F = f.field
    q = f.q
    xs = np.arange(1, F.order, dtype=np.int64)
    lhs = f.values(xs)
    rhs = F.vmul(m, F.vpow(xs, q**ell))
    ker = xs[lhs == rhs]
    x1 = int(ker[0])
    ratios = F.vmul(ker, F.inv_int(x1))
    x2 = int(ker[np.nonzero(ratios >= q)[0][0]])
    dim = _dim_from_size(len(ker) + 1, q)
    rank_dim = kernel_dim(_shifted(f, ell, m))
    if rank_dim != dim:
        raise AssertionError(f"kernel size {dim} disagrees with rank nullity {rank_dim}")
    return {
        "m": list(FElem(F, m).flat),
        "kernel_dim": dim,
        "kernel": [list(FElem(F, x1).flat), list(FElem(F, x2).flat)],
    }


def verify_witness(f: LinearizedPoly, ell: int, witness: dict) -> bool:
    """Re-check a not-scattered witness by direct field arithmetic."""
    F = f.field
    K = f.base_field
    qe = f.q**ell
    if "m" in witness:
        m = F.element(witness["m"])
        x1, x2 = (F.element(v) for v in witness["kernel"])
        if not x1 or not x2:
            return False
        ok = all(f(x) == m * x**qe for x in (x1, x2))
        return ok and (x2 / x1).value >= K.order
    y, z = F.element(witness["y"]), F.element(witness["z"])
    if not y or not z:
        return False
    same = f(y) / y**qe == f(z) / z**qe
    return same and (y / z).value >= K.order


def is_scattered_kernel(f: LinearizedPoly, ell: int, strategy: str = "fibers") -> ScatterReport:
    """Scattered iff dim ker(f - m x^(q^ell)) <= 1 for all m.

    The witness is the smallest m (integer order) with a larger kernel,
    together with two F_q-independent kernel vectors.
    """
    _check_ell(f, ell)
    t0 = time.perf_counter()
    dims = kernel_dims(f, ell, strategy)
    bad = np.nonzero(dims >= 2)[0]
    witness = None
    if bad.size:
        witness = _kernel_witness(f, ell, int(bad[0]))
        if not verify_witness(f, ell, witness):
            raise AssertionError("kernel witness failed re-verification")
    return ScatterReport(
        scattered=not bad.size,
        method="kernel",
        field=f.field.literal,
        ell=ell,
        poly=f.to_json(),
        witness=witness,
        field_size=f.field.order,
        elapsed_ms=int((time.perf_counter() - t0) * 1000),
    )


def is_scattered_pairs(f: LinearizedPoly, ell: int, limit: int = PAIR_LIMIT) -> ScatterReport:
    """Reference oracle: test every pair (y, z) of nonzero elements.

    Equality of quotients is tested by cross-multiplication,
    f(y) z^(q^ell) = f(z) y^(q^ell), and y/z in F_q by membership of the
    ratio in the F_q level.
    """
    _check_ell(f, ell)
    F = f.field
    if F.order > limit:
        raise FieldError(f"pair oracle limited to fields of size <= {limit}")
    t0 = time.perf_counter()
    q = f.q
    ys = np.arange(1, F.order, dtype=np.int64)
    fy = f.values(ys)
    yq = F.vpow(ys, q**ell)
    yinv = F.vinv(ys)
    witness = None
    step = max(1, (1 << 20) // len(ys))
    for s in range(0, len(ys), step):
        Y = slice(s, s + step)
        same = F.vmul(fy[Y, None], yq[None, :]) == F.vmul(fy[None, :], yq[Y, None])
        outside = F.vmul(ys[Y, None], yinv[None, :]) >= q
        bad = same & outside
        if bad.any():
            i, j = np.argwhere(bad)[0]
            witness = {"y": list(FElem(F, int(ys[s + i])).flat), "z": list(FElem(F, int(ys[j])).flat)}
            break
    if witness is not None and not verify_witness(f, ell, witness):
        raise AssertionError("pair witness failed re-verification")
    return ScatterReport(
        scattered=witness is None,
        method="pairs",
        field=F.literal,
        ell=ell,
        poly=f.to_json(),
        witness=witness,
        field_size=F.order,
        elapsed_ms=int((time.perf_counter() - t0) * 1000),
    )


def is_scattered(f: LinearizedPoly, ell: int) -> bool:
    return is_scattered_kernel(f, ell).scattered


@dataclass
class ProbeEntry:
    m: int
    field: str
    report: ScatterReport
    conditions: dict | None = None

    def to_json(self) -> dict:
        return {"m": self.m, "field": self.field, "report": self.report.to_json(), "conditions": self.conditions}


@dataclass
class ProbeReport:
    entries: list[ProbeEntry] = dc_field(default_factory=list)
    truncated: bool = False

    @property
    def first_failure(self) -> int | None:
        for e in self.entries:
            if not e.report.scattered:
                return e.m
        return None

    @property
    def all_scattered(self) -> bool:
        return self.first_failure is None

    def to_json(self) -> dict:
        return {
            "entries": [e.to_json() for e in self.entries],
            "first_failure": self.first_failure,
            "truncated": self.truncated,
        }


def probe_exceptional(f: LinearizedPoly | FamilyPoly, ell: int, m_max: int) -> ProbeReport:
    """Run the kernel test over F_{q^(nm)} for m = 1..m_max.

    For a family member the family conditions are recomputed in every
    extension.  Extensions beyond the desk-scale bound end the probe with
    ``truncated`` set.
    """
    if m_max < 1:
        raise ValueError("m_max must be >= 1")
    family = f if isinstance(f, FamilyPoly) else None
    poly = family.poly if family else f
    out = ProbeReport()
    for m in range(1, m_max + 1):
        try:
            target = poly.field if m == 1 else extend(poly.field, m)
        except FieldError:
            out.truncated = True
            break
        g = poly if m == 1 else poly.embed(target)
        rep = is_scattered_kernel(g, ell)
        conds = family.conditions_in(target) if family else None
        out.entries.append(ProbeEntry(m, target.literal, rep, conds))
    return out


@dataclass(frozen=True)
class UfCheck:
    scattered: bool
    max_dim: int
    worst_point: tuple | None

    def __bool__(self):
        return self.scattered


def check_uf_scattered(U: UfSubspace) -> UfCheck:
    """Largest F_q-dimension of U meeting a Desarguesian spread element.

    Spread elements are {(lambda a, lambda b)} for projective points (a:b),
    taken as (1:b) for every b followed by (0:1).  Dimensions come from
    ranks over F_p of the stacked spanning sets.
    """
    f = U.poly
    F, K = f.field, f.base_field
    N, p, a = F.degree, F.p, K.degree
    if U.dim * a != N:
        raise AssertionError("U_f must have F_q-dimension n")
    lam = p ** np.arange(a, dtype=np.int64)
    urows = []
    for u, v in U.basis:
        for t in lam:
            urows.append(np.concatenate([F.digits(F.vmul(int(t), u)), F.digits(F.vmul(int(t), v))]))
    urows = np.array(urows, dtype=np.int64)
    beta = p ** np.arange(N, dtype=np.int64)
    points = [(1, b) for b in range(F.order)] + [(0, 1)]
    best, worst = -1, None
    step = max(1, (1 << 21) // (4 * N * N))
    for s in range(0, len(points), step):
        chunk = points[s : s + step]
        A = np.array([c[0] for c in chunk], dtype=np.int64)
        B = np.array([c[1] for c in chunk], dtype=np.int64)
        left = F.digits(F.vmul(beta[None, :], A[:, None]))
        right = F.digits(F.vmul(beta[None, :], B[:, None]))
        srows = np.concatenate([left, right], axis=2)
        mats = np.concatenate([np.broadcast_to(urows, (len(chunk),) + urows.shape), srows], axis=1)
        dims = (2 * N - batch_rank(mats, p)) // a
        i = int(dims.argmax())
        if dims[i] > best:
            best, worst = int(dims[i]), chunk[i]
    return UfCheck(best <= 1, best, worst)
