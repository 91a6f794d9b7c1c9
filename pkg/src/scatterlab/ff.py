"""Finite fields and two-level towers F_p < F_{p^a} < ... with deterministic moduli.

Every element of a tower is stored as a single integer whose base-p digits
are its coordinates over the prime field (low degree first).  Read in base
|K| for any intermediate level K, the same integer gives the coordinates over
K with respect to the power basis of the next generator, so an element of a
lower level keeps the same integer when viewed in the top field.

Multiplication goes through Zech-style exp/log tables built once per field.
"""

from __future__ import annotations

import functools
import math
import os
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MAX_FIELD = 1 << 24
_CHUNK = 1 << 16


class FieldError(ValueError):
    """Invalid field construction or mixing of unrelated fields."""


def max_field_size() -> int:
    return int(os.environ.get("SCATTERLAB_MAX_FIELD", DEFAULT_MAX_FIELD))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division."""
    out = []
    f = 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out.append(n)
    return out


def prime_power(q: int) -> tuple[int, int]:
    """Return (p, a) with q = p**a, or raise FieldError."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    p = prime_factors(q)
    if len(p) != 1:
        raise FieldError(f"{q} is not a prime power")
    a = round(math.log(q, p[0]))
    if p[0] ** a != q:
        raise FieldError(f"{q} is not a prime power")
    return p[0], a


# --------------------------------------------------------------------------
# dense polynomials over a field level, coefficient lists of ints, low first
# --------------------------------------------------------------------------


class _PolyOps:
    def __init__(self, field: "Field"):
        self.F = field

    @staticmethod
    def trim(a: list[int]) -> list[int]:
        while a and a[-1] == 0:
            a.pop()
        return a

    def sub(self, a, b):
        F = self.F
        n = max(len(a), len(b))
        a = list(a) + [0] * (n - len(a))
        b = list(b) + [0] * (n - len(b))
        return self.trim([F.sub_int(x, y) for x, y in zip(a, b)])

    def mul(self, a, b):
        F = self.F
        if not a or not b:
            return []
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y:
                    out[i + j] = F.add_int(out[i + j], F.mul_int(x, y))
        return self.trim(out)

    def divmod(self, a, b):
        F = self.F
        a = list(a)
        db = len(b) - 1
        inv_lead = F.inv_int(b[-1])
        quo = [0] * max(len(a) - db, 0)
        for i in range(len(a) - 1, db - 1, -1):
            c = a[i]
            if c == 0:
                continue
            c = F.mul_int(c, inv_lead)
            quo[i - db] = c
            for j, y in enumerate(b):
                a[i - db + j] = F.sub_int(a[i - db + j], F.mul_int(c, y))
        return self.trim(quo), self.trim(a[:db] if db > 0 else [])

    def mod(self, a, b):
        return self.divmod(a, b)[1]

    def gcd(self, a, b):
        a, b = self.trim(list(a)), self.trim(list(b))
        while b:
            a, b = b, self.mod(a, b)
        if a:
            inv = self.F.inv_int(a[-1])
            a = [self.F.mul_int(c, inv) for c in a]
        return a

    def powmod(self, a, e: int, m):
        result = [1]
        base = self.mod(a, m)
        while e:
            if e & 1:
                result = self.mod(self.mul(result, base), m)
            base = self.mod(self.mul(base, base), m)
            e >>= 1
        return result

    def is_irreducible(self, f) -> bool:
        """Rabin's test for a monic f over self.F."""
        d = len(f) - 1
        if d <= 1:
            return d == 1
        Q = self.F.order
        x = [0, 1]
        h = x
        powers = {}
        for i in range(1, d + 1):
            h = self.powmod(h, Q, f)
            powers[i] = h
        if self.sub(powers[d], x):
            return False
        for r in prime_factors(d):
            g = self.gcd(f, self.sub(powers[d // r], x))
            if len(g) > 1:
                return False
        return True

    def evaluate(self, a, x: int) -> int:
        F = self.F
        acc = 0
        for c in reversed(a):
            acc = F.add_int(F.mul_int(acc, x), c)
        return acc


# --------------------------------------------------------------------------
# fields
# --------------------------------------------------------------------------


class Field:
    """One level of a tower; ``levels`` lists the whole chain from F_p up."""

    def __init__(self, p: int, chain: tuple[int, ...], parent: "Field | None"):
        self.p = p
        self.chain = chain
        self.parent = parent
        self.level = len(chain)
        self.degree = math.prod(chain)
        self.order = p**self.degree
        self.rel_degree = chain[-1] if chain else 1
        self.levels: tuple[Field, ...] = (parent.levels if parent else ()) + (self,)
        self._pw = p ** np.arange(self.degree, dtype=np.int64)
        self._exp = self._log = None
        if parent is None:
            self.modulus: tuple[int, ...] | None = None
        else:
            self.modulus = _smallest_irreducible(parent, self.rel_degree)
        self.primitive = self._find_primitive()
        self._build_tables()

    def __reduce__(self):
        return build_field, (self.p, list(self.chain))

    def __repr__(self):
        return f"Field({self.literal})"

    @property
    def literal(self) -> str:
        return f"{self.p}^[{','.join(map(str, self.chain or (1,)))}]"

    # -- slow arithmetic used only while bootstrapping the tables -----------

    def _slow_mul(self, a: int, b: int) -> int:
        if self.parent is None:
            return (a * b) % self.p
        P = self.parent
        Qp = P.order
        ops = _PolyOps(P)
        pa = _int_digits(a, Qp, self.rel_degree)
        pb = _int_digits(b, Qp, self.rel_degree)
        r = ops.mod(ops.mul(ops.trim(pa), ops.trim(pb)), list(self.modulus))
        return sum(c * Qp**i for i, c in enumerate(r))

    def _slow_pow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            e >>= 1
        return result

    def _find_primitive(self) -> int:
        Q = self.order
        if Q == 2:
            return 1
        exps = [(Q - 1) // r for r in prime_factors(Q - 1)]
        for v in range(2, Q):
            if all(self._slow_pow(v, e) != 1 for e in exps):
                return v
        raise AssertionError("no primitive element")  # pragma: no cover

    def _slow_mul_matrix(self, t: int) -> np.ndarray:
        """F_p-matrix of x -> t*x on flat coordinates (columns = images)."""
        N, p = self.degree, self.p
        cols = [_int_digits(self._slow_mul(t, p**i), p, N) for i in range(N)]
        return np.array(cols, dtype=np.int64).T

    def _build_tables(self):
        Q = self.order
        exp = np.zeros(max(Q - 1, 1), dtype=np.int64)
        exp[0] = 1
        filled, t = 1, self.primitive
        while filled < Q - 1:
            take = min(filled, Q - 1 - filled)
            M = self._slow_mul_matrix(t).T
            for s in range(0, take, _CHUNK):
                e = min(take, s + _CHUNK)
                D = self.digits(exp[s:e])
                exp[filled + s : filled + e] = self.pack(D @ M % self.p)
            filled += take
            t = self._slow_mul(t, t)
        log = np.zeros(Q, dtype=np.int64)
        log[exp] = np.arange(Q - 1, dtype=np.int64)
        self._exp = exp
        self._log = log
        exp.setflags(write=False)
        log.setflags(write=False)

    # -- scalar integer arithmetic -------------------------------------------

    def add_int(self, a: int, b: int) -> int:
        p = self.p
        if p == 2:
            return a ^ b
        if self.degree == 1:
            return (a + b) % p
        out, w = 0, 1
        while a or b:
            out += ((a % p + b % p) % p) * w
            a //= p
            b //= p
            w *= p
        return out

    def neg_int(self, a: int) -> int:
        p = self.p
        if p == 2:
            return a
        out, w = 0, 1
        while a:
            out += ((-(a % p)) % p) * w
            a //= p
            w *= p
        return out

    def sub_int(self, a: int, b: int) -> int:
        return self.add_int(a, self.neg_int(b))

    def mul_int(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return int(self._exp[(self._log[a] + self._log[b]) % (self.order - 1)])

    def inv_int(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return int(self._exp[(-self._log[a]) % (self.order - 1)])

    def pow_int(self, a: int, e: int) -> int:
        if a == 0:
            if e < 0:
                raise ZeroDivisionError("inverse of zero")
            return 1 if e == 0 else 0
        return int(self._exp[(int(self._log[a]) * e) % (self.order - 1)])

    def log_int(self, a: int) -> int:
        if a == 0:
            raise ValueError("log of zero")
        return int(self._log[a])

    def exp_int(self, k: int) -> int:
        return int(self._exp[k % (self.order - 1)])

    # -- vectorised arithmetic over int64 arrays -----------------------------

    def digits(self, a) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._pw) % self.p

    def pack(self, d) -> np.ndarray:
        return np.asarray(d, dtype=np.int64) @ self._pw

    def vadd(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.p == 2:
            return a ^ b
        if self.degree == 1:
            return (a + b) % self.p
        return self.pack((self.digits(a) + self.digits(b)) % self.p)

    def vneg(self, a):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return a
        if self.degree == 1:
            return (-a) % self.p
        return self.pack((-self.digits(a)) % self.p)

    def vsub(self, a, b):
        return self.vadd(a, self.vneg(b))

    def vmul(self, a, b):
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.degree == 1:
            return (a * b) % self.p
        r = self._exp[(self._log[a] + self._log[b]) % (self.order - 1)]
        return np.where((a == 0) | (b == 0), 0, r)

    def vinv(self, a):
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise ZeroDivisionError("inverse of zero")
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def vpow(self, a, e: int):
        a = np.asarray(a, dtype=np.int64)
        r = self._exp[(self._log[a] * (e % (self.order - 1))) % (self.order - 1)]
        if e == 0:
            return np.ones_like(a)
        return np.where(a == 0, 0, r)

    def vsum(self, a, axis: int = -1):
        a = np.asarray(a, dtype=np.int64)
        if self.p == 2:
            return np.bitwise_xor.reduce(a, axis=axis)
        if self.degree == 1:
            return a.sum(axis=axis) % self.p
        ax = axis if axis < 0 else axis
        d = self.digits(a)
        return self.pack(d.sum(axis=ax - 1 if ax < 0 else ax) % self.p)

    def subfield_elements(self, level: "int | Field") -> np.ndarray:
        """Integers of the given sub-level, ascending (they are just 0..|K|-1)."""
        K = self.resolve(level)
        return np.arange(K.order, dtype=np.int64)

    # -- element helpers -------------------------------------------------------

    def __call__(self, value) -> "FElem":
        return self.element(value)

    def element(self, value) -> "FElem":
        """Build an element from an int, a flat digit list, or nested coefficients."""
        if isinstance(value, FElem):
            return self.lift(value)
        if isinstance(value, (int, np.integer)):
            v = int(value)
            if not 0 <= v < self.order:
                raise FieldError(f"{v} is not an element of {self.literal}")
            return FElem(self, v)
        return FElem(self, self._from_coeffs(value))

    def _from_coeffs(self, coeffs) -> int:
        coeffs = list(coeffs)
        if all(isinstance(c, (int, np.integer)) for c in coeffs):
            if len(coeffs) > self.degree or any(not 0 <= c < self.p for c in coeffs):
                raise FieldError(f"bad coefficient vector {coeffs} for {self.literal}")
            return sum(int(c) * self.p**i for i, c in enumerate(coeffs))
        if self.parent is None or len(coeffs) > self.rel_degree:
            raise FieldError(f"bad coefficient vector {coeffs} for {self.literal}")
        Qp = self.parent.order
        return sum(self.parent._from_coeffs(c) * Qp**i for i, c in enumerate(coeffs))

    def zero(self) -> "FElem":
        return FElem(self, 0)

    def one(self) -> "FElem":
        return FElem(self, 1)

    def gen(self) -> "FElem":
        """Generator of this level over its parent (the root of the modulus)."""
        if self.parent is None:
            return FElem(self, 1)
        return FElem(self, self.parent.order)

    def elements(self) -> Iterable["FElem"]:
        for v in range(self.order):
            yield FElem(self, v)

    def resolve(self, level: "int | Field") -> "Field":
        if isinstance(level, Field):
            if level not in self.levels:
                raise FieldError(f"{level.literal} is not a level of {self.literal}")
            return level
        if not 0 <= level < len(self.levels):
            raise FieldError(f"invalid level {level} for {self.literal}")
        return self.levels[level]

    def lift(self, a: "FElem") -> "FElem":
        if a.field is self:
            return a
        if a.field in self.levels:
            return FElem(self, a.value)
        raise FieldError(f"{a.field.literal} is not a subfield level of {self.literal}")

    def is_in_level(self, value: int, level: "int | Field") -> bool:
        return value < self.resolve(level).order


@dataclass(frozen=True)
class FElem:
    """Immutable element of a tower level."""

    field: Field
    value: int

    def _coerce(self, other) -> tuple[Field, int, int]:
        if isinstance(other, FElem):
            if other.field is self.field:
                return self.field, self.value, other.value
            if other.field in self.field.levels:
                return self.field, self.value, other.value
            if self.field in other.field.levels:
                return other.field, self.value, other.value
            raise FieldError(f"field mismatch: {self.field.literal} vs {other.field.literal}")
        if isinstance(other, (int, np.integer)):
            F = self.field
            return F, self.value, int(other) % F.p
        return NotImplemented

    def __add__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        F, a, b = c
        return FElem(F, F.add_int(a, b))

    __radd__ = __add__

    def __sub__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        F, a, b = c
        return FElem(F, F.sub_int(a, b))

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return FElem(self.field, self.field.neg_int(self.value))

    def __mul__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        F, a, b = c
        return FElem(F, F.mul_int(a, b))

    __rmul__ = __mul__

    def inverse(self) -> "FElem":
        return FElem(self.field, self.field.inv_int(self.value))

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is NotImplemented:
            return c
        F, a, b = c
        return FElem(F, F.mul_int(a, F.inv_int(b)))

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        return FElem(self.field, self.field.pow_int(self.value, e))

    def __bool__(self):
        return self.value != 0

    def __int__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, FElem):
            if other.field is self.field or other.field in self.field.levels or self.field in other.field.levels:
                return self.value == other.value
            return False
        if isinstance(other, (int, np.integer)):
            return self.value == int(other) % self.field.p and self.value < self.field.p
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __lt__(self, other: "FElem"):
        return self.value < other.value

    @property
    def flat(self) -> tuple[int, ...]:
        """Coordinates over the prime field, low degree first."""
        return tuple(_int_digits(self.value, self.field.p, self.field.degree))

    @property
    def coeffs(self) -> tuple[int, ...]:
        """Coordinates over the immediate base level (as integers of that level)."""
        F = self.field
        if F.parent is None:
            return (self.value,)
        return tuple(_int_digits(self.value, F.parent.order, F.rel_degree))

    def to_json(self) -> list[int]:
        return list(self.flat)

    def __repr__(self):
        return f"{self.field.literal}{list(self.flat)}"

    def order(self) -> int:
        """Multiplicative order."""
        if self.value == 0:
            raise ValueError("zero has no multiplicative order")
        n = self.field.order - 1
        return n // math.gcd(n, self.field.log_int(self.value))


def _int_digits(v: int, base: int, n: int) -> list[int]:
    out = []
    for _ in range(n):
        v, r = divmod(v, base)
        out.append(r)
    return out


def _smallest_irreducible(base: Field, d: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree d over ``base``.

    Candidates t^d + c_{d-1} t^{d-1} + ... + c_0 are ordered by the integer
    sum c_i |K|^i, i.e. low-degree coefficients are the least significant.
    """
    ops = _PolyOps(base)
    Q = base.order
    for idx in range(Q**d):
        f = _int_digits(idx, Q, d) + [1]
        if f[0] == 0 and d > 1:
            continue
        if ops.is_irreducible(f):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# --------------------------------------------------------------------------
# public operations
# --------------------------------------------------------------------------

_FIELD_CACHE: dict[tuple[int, tuple[int, ...]], Field] = {}


def build_field(p: int, chain: Sequence[int] = ()) -> Field:
    """Build (or fetch) the tower F_p < F_{p^{d1}} < F_{p^{d1 d2}} < ...

    Levels of degree 1 are dropped, so ``build_field(3, [1])`` is F_3.
    """
    if not is_prime(p):
        raise FieldError(f"{p} is not prime")
    if any(int(d) < 1 for d in chain):
        raise FieldError(f"degrees must be >= 1, got {list(chain)}")
    chain = tuple(int(d) for d in chain if int(d) != 1)
    size = p ** math.prod(chain)
    if size > max_field_size():
        raise FieldError(f"field of size {size} exceeds the desk-scale bound {max_field_size()}")
    key = (p, chain)
    F = _FIELD_CACHE.get(key)
    if F is None:
        parent = build_field(p, chain[:-1]) if chain else None
        F = Field(p, chain, parent)
        _FIELD_CACHE[key] = F
    return F


_LITERAL = re.compile(r"^\s*(\d+)\s*\^\s*\[\s*([\d\s,]*)\]\s*$")


def parse_field(text: str) -> Field:
    """Parse the literal ``p^[d1,d2,...]``."""
    m = _LITERAL.match(text)
    if not m:
        raise FieldError(f"bad field literal {text!r}; expected p^[d1,d2,...]")
    chain = [int(x) for x in m.group(2).split(",") if x.strip()]
    return build_field(int(m.group(1)), chain)


def extension_field(q: int, n: int) -> tuple[Field, int]:
    """F_{q^n} built as a tower over F_q; returns (field, index of the F_q level)."""
    p, a = prime_power(q)
    F = build_field(p, [a, n])
    base = build_field(p, [a])
    return F, F.levels.index(base)


def extend(field: Field, m: int) -> Field:
    """The field whose top relative degree is multiplied by m (same lower levels)."""
    if not field.chain:
        return build_field(field.p, [m])
    return build_field(field.p, list(field.chain[:-1]) + [field.chain[-1] * m])


def _check_same(a: FElem, b: FElem):
    if a.field is not b.field:
        raise FieldError(f"field mismatch: {a.field.literal} vs {b.field.literal}")


def add(a: FElem, b: FElem) -> FElem:
    _check_same(a, b)
    return a + b


def sub(a: FElem, b: FElem) -> FElem:
    _check_same(a, b)
    return a - b


def mul(a: FElem, b: FElem) -> FElem:
    _check_same(a, b)
    return a * b


def inv(a: FElem) -> FElem:
    return a.inverse()


def power(a: FElem, e: int) -> FElem:
    return a**e


def frobenius_pow(a: FElem, i: int, base_level: "int | Field" = 0) -> FElem:
    """a^(q0^i) where q0 is the size of the given level."""
    q0 = a.field.resolve(base_level).order
    if i < 0:
        raise ValueError("Frobenius power must be >= 0")
    F = a.field
    if a.value == 0:
        return a
    e = pow(q0, i, F.order - 1)
    return FElem(F, F.exp_int(F.log_int(a.value) * e))


def _level_pair(a: FElem, sub_level, top_level) -> tuple[Field, Field]:
    top = a.field if top_level is None else a.field.resolve(top_level)
    sub = a.field.resolve(sub_level)
    if sub.degree > top.degree or top.degree % sub.degree or sub not in top.levels:
        raise FieldError(f"{sub.literal} is not below {top.literal}")
    if a.value >= top.order:
        raise FieldError(f"{a!r} does not lie in {top.literal}")
    return sub, top


def norm_rel(a: FElem, sub_level: "int | Field" = 0, top_level: "int | Field | None" = None) -> FElem:
    """Relative norm N_{top/sub}(a); the result is returned as an element of ``sub``."""
    sub, top = _level_pair(a, sub_level, top_level)
    if a.value == 0:
        return FElem(sub, 0)
    e = (top.order - 1) // (sub.order - 1)
    return FElem(sub, top.pow_int(a.value, e))


def trace_rel(a: FElem, sub_level: "int | Field" = 0, top_level: "int | Field | None" = None) -> FElem:
    sub, top = _level_pair(a, sub_level, top_level)
    acc, c = 0, a.value
    for _ in range(top.degree // sub.degree):
        acc = top.add_int(acc, c)
        c = top.pow_int(c, sub.order)
    return FElem(sub, acc)


def primitive_element(F: Field) -> FElem:
    """Smallest element (integer order) generating the multiplicative group."""
    return FElem(F, F.primitive)


def min_poly(a: FElem, sub_level: "int | Field" = 0) -> tuple[FElem, ...]:
    """Minimal polynomial of a over the sub-level, monic, coefficients low degree first."""
    F = a.field
    sub = F.resolve(sub_level)
    conj = [a.value]
    c = F.pow_int(a.value, sub.order)
    while c != a.value:
        conj.append(c)
        c = F.pow_int(c, sub.order)
    ops = _PolyOps(F)
    poly = [1]
    for r in conj:
        poly = ops.mul(poly, [F.neg_int(r), 1])
    if any(v >= sub.order for v in poly):
        raise AssertionError("minimal polynomial left the subfield")  # pragma: no cover
    return tuple(FElem(sub, v) for v in poly)


def poly_eval(coeffs: Sequence[FElem], x: FElem) -> FElem:
    """Horner evaluation of sum c_i x^i in the field of x."""
    acc = x.field.zero()
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class Embedding:
    """Injective ring map from one tower into another of the same characteristic.

    Level by level, the generator of each level is sent to the smallest root
    (integer order) in the target of its modulus pushed through the map so far.
    The map is F_p-linear, so it is stored as the images of the F_p-basis.
    """

    def __init__(self, source: Field, target: Field):
        if source.p != target.p or target.degree % source.degree:
            raise FieldError(f"{source.literal} does not embed in {target.literal}")
        self.source = source
        self.target = target
        T = target
        images = np.array([1], dtype=np.int64)  # F_p basis of the prime level
        for L in source.levels[1:]:
            P = L.parent
            mod_img = [self._apply_partial(images, P, c) for c in L.modulus]
            r = self._smallest_root(mod_img, L)
            new = []
            rj = 1
            for _ in range(L.rel_degree):
                new.extend(int(v) for v in T.vmul(images, rj))
                rj = T.mul_int(rj, r)
            images = np.array(new, dtype=np.int64)
        self.images = images
        self.images.setflags(write=False)

    def _apply_partial(self, images, P: Field, v: int) -> int:
        d = P.digits(v)
        return int(self.target.vsum(self.target.vmul(d, images)))

    def _smallest_root(self, poly: list[int], L: Field) -> int:
        T = self.target
        k = L.order
        cand = np.concatenate(([0], T._exp[:: (T.order - 1) // (k - 1)][: k - 1]))
        acc = np.zeros_like(cand)
        for c in reversed(poly):
            acc = T.vadd(T.vmul(acc, cand), c)
        roots = cand[acc == 0]
        return int(roots.min())

    def __call__(self, a: FElem) -> FElem:
        F = self.source
        if a.field is not F:
            a = F.lift(a)
        return FElem(self.target, int(self.apply(np.array(a.value))))

    def apply(self, values) -> np.ndarray:
        T = self.target
        d = self.source.digits(values)
        return T.vsum(T.vmul(d, self.images), axis=-1)


@functools.lru_cache(maxsize=None)
def get_embedding(source: Field, target: Field) -> Embedding:
    return Embedding(source, target)


def embed_tower(a: FElem, source: Field | None = None, target: Field | None = None) -> FElem:
    """Image of a under the deterministic embedding source -> target."""
    if target is None:
        raise FieldError("target field required")
    source = a.field if source is None else source
    return get_embedding(source, target)(a)
