"""Exact arithmetic and linear algebra over GF(p^e).

Field elements are integer codes: the coefficient vector ``(c_0, ..., c_{e-1})``
of the canonical polynomial representative packed base ``p``, i.e.
``code = sum(c_i * p**i)``. Matrices store these codes in ``int64`` arrays.

Vectors of F_q^n are indexed big-endian, ``index(v) = sum(v_j * q**(n-1-j))``,
which is the order produced by :func:`all_vectors`.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator

import numpy as np

from . import kernels
from .errors import (
    DimensionError,
    FieldMismatchError,
    GuardExceededError,
    SingularMatrixError,
)

# Dense q x q tables above this size cost more memory than they save.
TABLE_LIMIT = 1 << 10

INVERTIBLE_GUARD = 1 << 24
SUBSPACE_GUARD = 1 << 20
SAMPLE_CAP = 10_000

AES_POLY = (1, 1, 0, 1, 1, 0, 0, 0, 1)  # x^8 + x^4 + x^3 + x + 1


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    return all(p % d for d in range(3, math.isqrt(p) + 1, 2))


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q`` into ``(p, e)`` with ``q == p**e``; raise if not a prime power."""
    if q < 2:
        raise ValueError(f"q={q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            e, r = 0, q
            while r % p == 0:
                r //= p
                e += 1
            if r != 1 or not is_prime(p):
                raise ValueError(f"q={q} is not a prime power")
            return p, e
    raise ValueError(f"q={q} is not a prime power")  # pragma: no cover


# ---------------------------------------------------------------------------
# Polynomials over a field given by scalar callables. Coefficients are
# listed constant-term first; the zero polynomial is the empty list.
# ---------------------------------------------------------------------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod(a, b, add, sub, mul, inv):
    """Remainder of ``a`` divided by nonzero ``b``."""
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = inv(b[-1])
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        f = mul(a[-1], lead_inv)
        shift = len(a) - 1 - db
        for i, c in enumerate(b):
            a[shift + i] = sub(a[shift + i], mul(f, c))
        a = _trim(a)
    return a


def monic_polys(q: int, degree: int) -> Iterator[tuple[int, ...]]:
    """All monic polynomials of ``degree`` over codes ``0..q-1``.

    Ordered by the packed value ``sum(c_i * q**i)`` of the lower
    coefficients, which is the order used for "smallest" throughout.
    """
    for low in range(q ** degree):
        coeffs = []
        for _ in range(degree):
            coeffs.append(low % q)
            low //= q
        yield tuple(coeffs) + (1,)


def is_irreducible(poly, q, add, sub, mul, inv) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    poly = _trim(poly)
    d = len(poly) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    for k in range(1, d // 2 + 1):
        for g in monic_polys(q, k):
            if not poly_mod(poly, g, add, sub, mul, inv):
                return False
    return True


def _prime_ops(p):
    return (
        lambda a, b: (a + b) % p,
        lambda a, b: (a - b) % p,
        lambda a, b: (a * b) % p,
        lambda a: pow(a, p - 2, p),
    )


@lru_cache(maxsize=None)
def smallest_irreducible(p: int, e: int) -> tuple[int, ...]:
    """Smallest monic irreducible polynomial of degree ``e`` over GF(p)."""
    ops = _prime_ops(p)
    for poly in monic_polys(p, e):
        if is_irreducible(poly, p, *ops):
            return poly
    raise ValueError(f"no irreducible polynomial of degree {e} over GF({p})")  # pragma: no cover


# ---------------------------------------------------------------------------
# Field description and lookup tables
# ---------------------------------------------------------------------------

class _LazyRow:
    __slots__ = ("fn", "a")

    def __init__(self, fn, a):
        self.fn = fn
        self.a = a

    def __getitem__(self, b):
        return self.fn(self.a, b)


class _LazyTable:
    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn

    def __getitem__(self, a):
        return _LazyRow(self.fn, a)


class _LazyVector:
    __slots__ = ("fn",)

    def __init__(self, fn):
        self.fn = fn

    def __getitem__(self, a):
        return self.fn(a)


@dataclass(frozen=True)
class FieldTables:
    """Operation tables handed to the kernels."""

    add: object
    sub: object
    mul: object
    inv: object
    dense: bool

    @cached_property
    def add_l(self):
        return self.add.tolist() if self.dense else self.add

    @cached_property
    def sub_l(self):
        return self.sub.tolist() if self.dense else self.sub

    @cached_property
    def mul_l(self):
        return self.mul.tolist() if self.dense else self.mul

    @cached_property
    def inv_l(self):
        return self.inv.tolist() if self.dense else self.inv


@dataclass(frozen=True)
class FieldSpec:
    """The finite field GF(p^e) = GF(p)[x] / (reduction_poly).

    Parameters
    ----------
    p : int
        Characteristic (prime).
    e : int
        Extension degree, at least 1.
    reduction_poly : tuple of int, optional
        Monic degree-``e`` polynomial over GF(p), constant term first. Must be
        irreducible. Defaults to the AES polynomial for GF(2^8) and to the
        smallest monic irreducible otherwise.
    """

    p: int
    e: int = 1
    reduction_poly: tuple = field(default=None)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.e < 1:
            raise ValueError("extension degree must be >= 1")
        if self.e * math.log2(self.p) > 32:
            raise ValueError("fields beyond 32 bits are not supported")
        poly = self.reduction_poly
        if poly is None:
            poly = AES_POLY if (self.p, self.e) == (2, 8) else smallest_irreducible(self.p, self.e)
        poly = tuple(int(c) % self.p for c in poly)
        if len(poly) != self.e + 1 or poly[-1] != 1:
            raise ValueError(f"reduction polynomial must be monic of degree {self.e}")
        if not is_irreducible(poly, self.p, *_prime_ops(self.p)):
            raise ValueError(f"reduction polynomial {poly} is reducible over GF({self.p})")
        object.__setattr__(self, "reduction_poly", poly)

    @property
    def q(self) -> int:
        return self.p ** self.e

    def __str__(self):
        return f"GF({self.p}^{self.e})/poly={self.poly_code():x}"

    def __repr__(self):
        return f"FieldSpec({self})"

    def poly_code(self) -> int:
        return sum(c * self.p ** i for i, c in enumerate(self.reduction_poly))

    @classmethod
    def parse(cls, text: str) -> "FieldSpec":
        """Parse ``"GF(p^e)/poly=<hex>"``, ``"GF(p^e)"`` or ``"GF(q)"``."""
        m = re.fullmatch(r"\s*GF\((\d+)(?:\^(\d+))?\)(?:/poly=([0-9a-fA-F]+))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse field descriptor {text!r}")
        base = int(m.group(1))
        if m.group(2) is None:
            p, e = prime_power(base)
        else:
            p, e = base, int(m.group(2))
        poly = None
        if m.group(3) is not None:
            code = int(m.group(3), 16)
            poly = []
            for _ in range(e + 1):
                poly.append(code % p)
                code //= p
            if code:
                raise ValueError(f"polynomial code {m.group(3)} has degree > {e}")
        return field_spec(p, e, None if poly is None else tuple(poly))

    # -- element encoding ---------------------------------------------------

    def digits(self, a: int) -> list[int]:
        out = []
        for _ in range(self.e):
            out.append(a % self.p)
            a //= self.p
        return out

    def from_digits(self, coeffs) -> int:
        return sum((c % self.p) * self.p ** i for i, c in enumerate(coeffs))

    def check(self, a: int) -> int:
        a = int(a)
        if not 0 <= a < self.q:
            raise ValueError(f"{a} is not an element code of {self}")
        return a

    # -- scalar arithmetic --------------------------------------------------

    def _raw_mul(self, a: int, b: int) -> int:
        p, e = self.p, self.e
        if e == 1:
            return (a * b) % p
        da, db = self.digits(a), self.digits(b)
        prod = [0] * (2 * e - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] = (prod[i + j] + x * y) % p
        red = self.reduction_poly
        for k in range(2 * e - 2, e - 1, -1):
            f = prod[k]
            if f:
                for i in range(e + 1):
                    prod[k - e + i] = (prod[k - e + i] - f * red[i]) % p
        return self.from_digits(prod[:e])

    def add(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.e == 1:
            return (a + b) % self.p
        return self.from_digits(x + y for x, y in zip(self.digits(a), self.digits(b)))

    def sub(self, a: int, b: int) -> int:
        if self.p == 2:
            return a ^ b
        if self.e == 1:
            return (a - b) % self.p
        return self.from_digits(x - y for x, y in zip(self.digits(a), self.digits(b)))

    def neg(self, a: int) -> int:
        return self.sub(0, a)

    def mul(self, a: int, b: int) -> int:
        if self.q <= TABLE_LIMIT:
            return int(self.tables.mul[a, b])
        return self._raw_mul(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in {self}")
        if self.q <= TABLE_LIMIT:
            return int(self.tables.inv[a])
        return self.pow(a, self.q - 2)

    def pow(self, a: int, k: int) -> int:
        result, base = 1, a
        while k:
            if k & 1:
                result = self._raw_mul(result, base)
            base = self._raw_mul(base, base)
            k >>= 1
        return result

    def element(self, a: int) -> "FieldElement":
        return FieldElement(self, self.check(a))

    @cached_property
    def tables(self) -> FieldTables:
        if self.q > TABLE_LIMIT:
            inv = _LazyVector(self.inv)
            return FieldTables(_LazyTable(self.add), _LazyTable(self.sub),
                               _LazyTable(self._raw_mul), inv, dense=False)
        return _build_tables(self)

    @cached_property
    def scalar_ops(self):
        """``(add, sub, mul, inv)`` callables, for polynomial helpers."""
        return self.add, self.sub, self.mul, self.inv


def _build_tables(spec: FieldSpec) -> FieldTables:
    q, p, e = spec.q, spec.p, spec.e
    codes = np.arange(q, dtype=np.int64)
    digits = np.stack([(codes // p ** i) % p for i in range(e)], axis=1)
    weights = p ** np.arange(e, dtype=np.int64)
    add = (((digits[:, None, :] + digits[None, :, :]) % p) @ weights).astype(np.int64)
    sub = (((digits[:, None, :] - digits[None, :, :]) % p) @ weights).astype(np.int64)
    # log/exp tables from a generator of the multiplicative group
    exp = None
    for g in range(1, q):
        seq = [1]
        x = 1
        for _ in range(q - 2):
            x = spec._raw_mul(x, g)
            if x == 1:
                break
            seq.append(x)
        if len(seq) == q - 1:
            exp = np.array(seq, dtype=np.int64)
            break
    log = np.zeros(q, dtype=np.int64)
    log[exp] = np.arange(q - 1)
    mul = np.zeros((q, q), dtype=np.int64)
    nz = codes[1:]
    mul[1:, 1:] = exp[(log[nz][:, None] + log[nz][None, :]) % (q - 1)]
    inv = np.zeros(q, dtype=np.int64)
    inv[nz] = exp[(-log[nz]) % (q - 1)]
    for t in (add, sub, mul, inv):
        t.setflags(write=False)
    return FieldTables(add, sub, mul, inv, dense=True)


@lru_cache(maxsize=None)
def field_spec(p: int, e: int = 1, reduction_poly: tuple | None = None) -> FieldSpec:
    """Cached :class:`FieldSpec` constructor (tables are built once per field)."""
    return FieldSpec(p, e, reduction_poly)


def gf(q: int, reduction_poly: tuple | None = None) -> FieldSpec:
    """The field with ``q`` elements and default (or given) reduction polynomial."""
    p, e = prime_power(q)
    return field_spec(p, e, reduction_poly)


@dataclass(frozen=True)
class FieldElement:
    """A single element of a :class:`FieldSpec`, supporting ``+ - * /``."""

    spec: FieldSpec
    value: int

    def _other(self, other):
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise FieldMismatchError(f"{self.spec} vs {other.spec}")
            return other.value
        return self.spec.check(other)

    def __add__(self, other):
        return FieldElement(self.spec, self.spec.add(self.value, self._other(other)))

    def __sub__(self, other):
        return FieldElement(self.spec, self.spec.sub(self.value, self._other(other)))

    def __mul__(self, other):
        return FieldElement(self.spec, self.spec.mul(self.value, self._other(other)))

    def __truediv__(self, other):
        return self * ff_inv(FieldElement(self.spec, self._other(other)))

    def __neg__(self):
        return FieldElement(self.spec, self.spec.neg(self.value))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value}@GF({self.spec.q})"


def ff_mul(a: FieldElement, b: FieldElement) -> FieldElement:
    if a.spec != b.spec:
        raise FieldMismatchError(f"{a.spec} vs {b.spec}")
    return FieldElement(a.spec, a.spec.mul(a.value, b.value))


def ff_inv(a: FieldElement) -> FieldElement:
    return FieldElement(a.spec, a.spec.inv(a.value))


# ---------------------------------------------------------------------------
# Matrices and subspaces
# ---------------------------------------------------------------------------

class Matrix:
    """Immutable dense matrix of element codes over one field."""

    __slots__ = ("spec", "data", "_hash")

    def __init__(self, spec: FieldSpec, data):
        arr = np.array(data, dtype=np.int64)
        if arr.ndim == 1 and arr.size == 0:
            arr = arr.reshape(0, 0)
        if arr.ndim != 2:
            raise DimensionError(f"matrix data must be 2-D, got shape {arr.shape}")
        if arr.size and (arr.min() < 0 or arr.max() >= spec.q):
            raise ValueError(f"entries out of range for {spec}")
        arr.setflags(write=False)
        self.spec = spec
        self.data = arr
        self._hash = None

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "Matrix":
        return cls(spec, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, spec: FieldSpec, rows: int, cols: int) -> "Matrix":
        return cls(spec, np.zeros((rows, cols), dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def __getitem__(self, idx):
        return int(self.data[idx])

    def __eq__(self, other):
        return (isinstance(other, Matrix) and self.spec == other.spec
                and self.shape == other.shape and np.array_equal(self.data, other.data))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self.shape, self.data.tobytes()))
        return self._hash

    def __repr__(self):
        return f"Matrix(GF({self.spec.q}), {self.data.tolist()})"

    def _same_field(self, other):
        if self.spec != other.spec:
            raise FieldMismatchError(f"{self.spec} vs {other.spec}")

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            self._same_field(other)
            if self.cols != other.rows:
                raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
            return Matrix(self.spec, kernels.matmul(self.data, other.data, self.spec.tables))
        vec = np.asarray(other, dtype=np.int64)
        if vec.ndim != 1 or vec.shape[0] != self.cols:
            raise DimensionError(f"cannot multiply {self.shape} by vector of shape {vec.shape}")
        return kernels.matmul(self.data, vec[:, None], self.spec.tables)[:, 0]

    def __add__(self, other):
        self._same_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} vs {other.shape}")
        return Matrix(self.spec, _elementwise(self.spec, "add", self.data, other.data))

    def __sub__(self, other):
        self._same_field(other)
        if self.shape != other.shape:
            raise DimensionError(f"{self.shape} vs {other.shape}")
        return Matrix(self.spec, _elementwise(self.spec, "sub", self.data, other.data))

    @property
    def T(self) -> "Matrix":
        return Matrix(self.spec, self.data.T)

    def vstack(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        return Matrix(self.spec, np.vstack([self.data, other.data]))

    def rref(self) -> tuple["Matrix", list[int]]:
        out, pivots = kernels.rref(self.data, self.spec.tables)
        return Matrix(self.spec, out), pivots

    def rank(self) -> int:
        return mat_rank(self)

    def kernel(self) -> "Subspace":
        return mat_kernel(self)

    def inverse(self) -> "Matrix":
        return mat_inverse(self)

    def row_space(self) -> "Subspace":
        return Subspace.span(self.spec, self.cols, self.data)

    def kron_identity(self, m: int) -> "Matrix":
        """``self ⊗ I_m``."""
        return Matrix(self.spec, np.kron(self.data, np.eye(m, dtype=np.int64)))

    def to_json(self) -> list[list[int]]:
        return self.data.tolist()

    @classmethod
    def from_json(cls, spec: FieldSpec, rows) -> "Matrix":
        return cls(spec, rows)


def _elementwise(spec, op, a, b):
    if spec.tables.dense:
        return getattr(spec.tables, op)[a, b]
    fn = getattr(spec, op)
    return np.vectorize(fn, otypes=[np.int64])(a, b)


def mat_rank(M: Matrix) -> int:
    return len(M.rref()[1])


def mat_kernel(M: Matrix) -> "Subspace":
    """Right null space ``{x : M x = 0}`` as a canonical :class:`Subspace`."""
    spec, cols = M.spec, M.cols
    R, pivots = M.rref()
    free = [c for c in range(cols) if c not in set(pivots)]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = spec.neg(int(R.data[i, f]))
    return Subspace.span(spec, cols, basis)


def mat_inverse(M: Matrix) -> Matrix:
    if M.rows != M.cols:
        raise DimensionError(f"inverse of non-square matrix {M.shape}")
    n = M.rows
    aug = np.hstack([M.data, np.eye(n, dtype=np.int64)])
    R, pivots = kernels.rref(aug, M.spec.tables)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise SingularMatrixError("matrix is singular")
    return Matrix(M.spec, R[:, n:])


class Subspace:
    """Subspace of F_q^ambient held by its reduced row-echelon basis."""

    __slots__ = ("spec", "ambient", "basis")

    def __init__(self, spec: FieldSpec, ambient: int, basis: Matrix):
        if basis.cols != ambient:
            raise DimensionError("basis width differs from ambient dimension")
        self.spec = spec
        self.ambient = ambient
        self.basis = basis

    @classmethod
    def span(cls, spec: FieldSpec, ambient: int, vectors) -> "Subspace":
        arr = np.asarray(vectors, dtype=np.int64).reshape(-1, ambient)
        R, pivots = kernels.rref(arr, spec.tables)
        return cls(spec, ambient, Matrix(spec, R[: len(pivots)]))

    @classmethod
    def zero(cls, spec: FieldSpec, ambient: int) -> "Subspace":
        return cls(spec, ambient, Matrix.zeros(spec, 0, ambient))

    @property
    def dim(self) -> int:
        return self.basis.rows

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.spec == other.spec
                and self.ambient == other.ambient and self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self):
        return f"Subspace(GF({self.spec.q})^{self.ambient}, basis={self.basis.data.tolist()})"

    def size(self) -> int:
        return self.spec.q ** self.dim

    def elements(self) -> np.ndarray:
        """All ``q**dim`` vectors, as rows of an array."""
        coeffs = all_vectors(self.spec.q, self.dim)
        if self.dim == 0:
            return np.zeros((1, self.ambient), dtype=np.int64)
        return kernels.matmul(coeffs, self.basis.data, self.spec.tables)

    def contains(self, v) -> bool:
        v = np.asarray(v, dtype=np.int64).reshape(1, self.ambient)
        return mat_rank(Matrix(self.spec, np.vstack([self.basis.data, v]))) == self.dim


def all_vectors(q: int, n: int) -> np.ndarray:
    """Every vector of F_q^n, rows ordered by big-endian index."""
    idx = np.arange(q ** n, dtype=np.int64)
    return np.stack([(idx // q ** (n - 1 - j)) % q for j in range(n)], axis=1).reshape(q ** n, n)


def vector_index(vectors, q: int) -> np.ndarray:
    """Big-endian indices of the rows of ``vectors`` (inverse of :func:`all_vectors`)."""
    vectors = np.asarray(vectors, dtype=np.int64)
    n = vectors.shape[-1]
    weights = q ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return vectors @ weights


def gaussian_binomial(q: int, n: int, k: int) -> int:
    """Number of ``k``-dimensional subspaces of F_q^n."""
    if not 0 <= k <= n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** n - q ** i
        den *= q ** k - q ** i
    return num // den


def sample_invertible(spec: FieldSpec, dim: int, rng) -> Matrix:
    """Uniform sample from GL(dim, q) by rejection from uniform matrices.

    The acceptance rate is ``prod_{i=1..dim} (1 - q**-i)``, at least 0.288 for
    q = 2 and 0.58 for q >= 4. A hard cap of ``SAMPLE_CAP`` draws guards
    against a broken random source.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(rng)
    for _ in range(SAMPLE_CAP):
        cand = rng.integers(0, spec.q, size=(dim, dim), dtype=np.int64)
        _, pivots = kernels.rref(cand, spec.tables)
        if len(pivots) == dim:
            return Matrix(spec, cand)
    raise RuntimeError("rejection sampling did not terminate; check the random source")


@lru_cache(maxsize=32)
def _enumerate_invertible(spec: FieldSpec, dim: int) -> tuple:
    q = spec.q
    vecs = all_vectors(q, dim)
    zero_span = frozenset([0])
    out = []

    def extend(rows, span):
        if len(rows) == dim:
            out.append(Matrix(spec, np.array(rows, dtype=np.int64)))
            return
        for idx in range(q ** dim):
            if idx in span:
                continue
            v = vecs[idx]
            # span + <v>: translates of the current span by every multiple of v
            multiples = [spec.tables.mul[c, v] if spec.tables.dense else
                         np.array([spec.mul(c, int(x)) for x in v]) for c in range(q)]
            new = set()
            span_vecs = vecs[sorted(span)]
            for mv in multiples:
                shifted = _elementwise(spec, "add", span_vecs, np.broadcast_to(mv, span_vecs.shape))
                new.update(vector_index(shifted, q).tolist())
            extend(rows + [v], frozenset(new))

    extend([], zero_span)
    return tuple(out)


def enumerate_invertible(spec: FieldSpec, dim: int) -> tuple[Matrix, ...]:
    """Every matrix of GL(dim, q) exactly once (guard: ``q**(dim**2) <= 2**24``)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if spec.q ** (dim * dim) > INVERTIBLE_GUARD:
        raise GuardExceededError(f"q^(dim^2) = {spec.q}^{dim * dim} exceeds 2^24")
    return _enumerate_invertible(spec, dim)


def enumerate_subspaces(spec: FieldSpec, ambient: int, dim: int) -> Iterator[Subspace]:
    """Yield every ``dim``-dimensional subspace of F_q^ambient once.

    Walks pivot patterns of reduced row-echelon bases and fills the free
    positions with every field element.
    """
    if not 0 <= dim <= ambient:
        raise ValueError(f"need 0 <= dim <= ambient, got dim={dim}, ambient={ambient}")
    if gaussian_binomial(spec.q, ambient, dim) > SUBSPACE_GUARD:
        raise GuardExceededError("subspace count exceeds 2^20")
    q = spec.q
    for pivots in itertools.combinations(range(ambient), dim):
        pset = set(pivots)
        free = [(i, j) for i, pc in enumerate(pivots) for j in range(pc + 1, ambient) if j not in pset]
        for fill in itertools.product(range(q), repeat=len(free)):
            basis = np.zeros((dim, ambient), dtype=np.int64)
            for i, pc in enumerate(pivots):
                basis[i, pc] = 1
            for (i, j), val in zip(free, fill):
                basis[i, j] = val
            yield Subspace(spec, ambient, Matrix(spec, basis))
