"""Two-universality checks for families of linear maps.

A family ``{f}`` from a finite domain to a codomain of size ``N`` is
two-universal when every pair of distinct inputs collides with probability
at most ``1/N`` under a uniformly drawn member. Two checkers are provided:

* :func:`verify_two_universal` counts collisions pair by pair;
* :func:`orbit_collision_prob` uses the group structure: for a group ``G``
  of invertible matrices and a fixed ``B``, inputs ``x1, x2`` collide under
  ``B g`` exactly when ``g (x1 - x2)`` lands in ``ker B``, and ``g v`` is
  uniform on the orbit of ``v``.

All probabilities are exact :class:`fractions.Fraction` values.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import GuardExceededError
from .gf import FieldSpec, Matrix, all_vectors, enumerate_invertible, is_irreducible, monic_polys, vector_index

HASH_GUARD = 1 << 28
FULL_GL = "full_gl"
FROBENIUS = "frobenius"
EXPLICIT = "explicit"


@dataclass(frozen=True)
class HashFamily:
    """A finite family of functions, stored as matrices or as value tables.

    For ``full_gl`` and ``frobenius`` families the members are ``B @ g`` for
    ``g`` in ``group``; the codomain is ``im(B)``. For ``explicit`` families
    ``tables[f][x]`` is the output label of member ``f`` on input ``x``.
    """

    kind: str
    codomain_size: int
    spec: FieldSpec | None = None
    dim: int | None = None
    B: Matrix | None = None
    group: tuple = ()
    tables: tuple = ()

    def __post_init__(self):
        if self.kind not in (FULL_GL, FROBENIUS, EXPLICIT):
            raise ValueError(f"unknown family kind {self.kind!r}")
        if len(self) == 0:
            raise ValueError("hash family must be nonempty")
        if self.codomain_size < 1:
            raise ValueError("codomain must be nonempty")

    def __len__(self):
        return len(self.tables) if self.kind == EXPLICIT else len(self.group)

    @property
    def domain_size(self) -> int:
        if self.kind == EXPLICIT:
            return len(self.tables[0])
        return self.spec.q ** self.dim

    @classmethod
    def full_gl(cls, spec: FieldSpec, B: Matrix) -> "HashFamily":
        """``{B g : g in GL(mn, q)}`` with ``mn`` the column count of ``B``."""
        return cls(FULL_GL, spec.q ** B.rank(), spec, B.cols, B, enumerate_invertible(spec, B.cols))

    @classmethod
    def explicit(cls, tables: Iterable[Sequence[int]], codomain_size: int) -> "HashFamily":
        tables = tuple(tuple(int(v) for v in t) for t in tables)
        if len({len(t) for t in tables}) > 1:
            raise ValueError("every member must be defined on the same domain")
        if any(not 0 <= v < codomain_size for t in tables for v in t):
            raise ValueError("output label outside the codomain")
        return cls(EXPLICIT, codomain_size, tables=tables)

    @classmethod
    def from_matrices(cls, spec: FieldSpec, B: Matrix, group: Sequence[Matrix]) -> "HashFamily":
        """Explicit family ``{B g : g in group}`` for an arbitrary list of matrices."""
        stub = cls(FULL_GL, 1, spec, B.cols, B, tuple(group))
        _, labels = np.unique(stub.images(), return_inverse=True)
        labels = labels.reshape(len(group), -1)
        return cls.explicit(labels.tolist(), spec.q ** B.rank())

    def compose(self, B: Matrix) -> "HashFamily":
        """Replace the outer matrix: ``{B g}`` over the same group."""
        if self.kind == EXPLICIT:
            raise TypeError("explicit families have no group to compose with")
        if B.cols != self.dim or B.spec != self.spec:
            raise ValueError(f"B must have {self.dim} columns over {self.spec}")
        return HashFamily(self.kind, self.spec.q ** B.rank(), self.spec, self.dim, B, self.group)

    def images(self) -> np.ndarray:
        """``(members, domain)`` array of output labels."""
        if self.kind == EXPLICIT:
            return np.array(self.tables, dtype=np.int64)
        q = self.spec.q
        X = Matrix(self.spec, all_vectors(q, self.dim).T)
        out = np.empty((len(self.group), q ** self.dim), dtype=np.int64)
        if self.B.rows == 0:
            out[:] = 0
            return out
        for f, g in enumerate(self.group):
            out[f] = vector_index(((self.B @ g) @ X).data.T, q)
        return out


@dataclass(frozen=True)
class CollisionReport:
    max_collision: Fraction
    threshold: Fraction
    passed: bool
    pairs_checked: int

    def to_json(self) -> dict:
        return {
            "max_collision": str(self.max_collision),
            "threshold": str(self.threshold),
            "pass": self.passed,
            "pairs_checked": self.pairs_checked,
        }


def verify_two_universal(fam: HashFamily, backend: str | None = None) -> CollisionReport:
    """Exhaustive collision count over all pairs of distinct inputs."""
    work = len(fam) * fam.domain_size ** 2
    if work > HASH_GUARD:
        raise GuardExceededError(f"|family| * |domain|^2 = {work} exceeds 2^28")
    best, pairs = kernels.max_pair_collisions(fam.images(), backend=backend)
    mc = Fraction(best, len(fam))
    threshold = Fraction(1, fam.codomain_size)
    return CollisionReport(mc, threshold, mc <= threshold, pairs)


@dataclass(frozen=True)
class OrbitProfile:
    representative: tuple
    orbit_size: int
    in_kernel: int

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.in_kernel, self.orbit_size)


@dataclass(frozen=True)
class OrbitVerdict:
    profiles: tuple
    threshold: Fraction
    passed: bool

    @property
    def max_ratio(self) -> Fraction:
        return max(p.ratio for p in self.profiles)


def _group_matrices(group, spec: FieldSpec, mn: int) -> tuple:
    if group == FULL_GL:
        return enumerate_invertible(spec, mn)
    if group == FROBENIUS:
        return frobenius_matrices(spec, mn)
    return tuple(group)


def orbits(group: Sequence[Matrix], spec: FieldSpec, mn: int) -> list[np.ndarray]:
    """Orbits of the nonzero vectors under ``group``, as arrays of vector indices."""
    q = spec.q
    X = Matrix(spec, all_vectors(q, mn).T)
    moved = np.stack([vector_index((g @ X).data.T, q) for g in group])
    seen = np.zeros(q ** mn, dtype=bool)
    seen[0] = True
    out = []
    for v in range(1, q ** mn):
        if not seen[v]:
            orb = np.unique(moved[:, v])
            seen[orb] = True
            out.append(orb)
    return out


def orbit_collision_prob(group, spec: FieldSpec, mn: int, B: Matrix) -> OrbitVerdict:
    """Orbit profiles of ``group`` against ``ker B`` and the resulting verdict.

    ``group`` is ``"full_gl"``, ``"frobenius"`` or a sequence of matrices
    closed under composition. For the two named groups, which act
    transitively on nonzero vectors, the closed forms ``|O| = q^mn - 1`` and
    ``|O ∩ ker B| = q^mn / |im B| - 1`` are checked against enumeration.
    """
    if B.cols != mn:
        raise ValueError(f"B must have {mn} columns")
    q = spec.q
    mats = _group_matrices(group, spec, mn)
    if len(mats) * q ** mn > HASH_GUARD:
        raise GuardExceededError("orbit enumeration exceeds 2^28 work")
    image = q ** B.rank()
    X = all_vectors(q, mn)
    if B.rows == 0:
        in_ker = np.ones(q ** mn, dtype=bool)
    else:
        in_ker = ~(B @ Matrix(spec, X.T)).data.any(axis=0)
    profiles = []
    for orb in orbits(mats, spec, mn):
        profiles.append(OrbitProfile(tuple(int(c) for c in X[orb[0]]), len(orb), int(in_ker[orb].sum())))
    if group in (FULL_GL, FROBENIUS):
        expected = OrbitProfile(profiles[0].representative, q ** mn - 1, q ** mn // image - 1)
        assert profiles == [expected], "orbit closed form disagrees with enumeration"
    threshold = Fraction(1, image)
    return OrbitVerdict(tuple(profiles), threshold, all(p.ratio <= threshold for p in profiles))


def closed_form_ratio(q: int, mn: int, rank: int) -> Fraction:
    """``(q^{mn - rank} - 1) / (q^{mn} - 1)`` for the full linear group."""
    return Fraction(q ** (mn - rank) - 1, q ** mn - 1)


def fiber_sizes(group: Sequence[Matrix], z) -> dict:
    """``{x: |{g : g z = x}|}`` for a vector ``z``; keys are tuples."""
    z = np.asarray(z, dtype=np.int64)
    counts: dict = {}
    for g in group:
        x = tuple(int(c) for c in g @ z)
        counts[x] = counts.get(x, 0) + 1
    return counts


def smallest_irreducible_over(spec: FieldSpec, degree: int) -> tuple:
    """Smallest monic irreducible of ``degree`` over ``spec`` (packed-code order)."""
    for poly in monic_polys(spec.q, degree):
        if is_irreducible(poly, spec.q, *spec.scalar_ops):
            return poly
    raise ValueError(f"no irreducible polynomial of degree {degree} over {spec}")  # pragma: no cover


def frobenius_matrices(spec: FieldSpec, mn: int) -> tuple[Matrix, ...]:
    """Matrices of multiplication by each nonzero element of ``F_{q^mn}``.

    ``F_{q^mn}`` is built as ``F_q[x]/(f)`` with ``f`` from
    :func:`smallest_irreducible_over`; coordinates are the coefficients of
    ``1, x, ..., x^{mn-1}``. Element ``a`` (packed base ``q``, constant
    first) maps to ``sum_i a_i C^i`` with ``C`` the companion matrix of ``f``.
    """
    f = smallest_irreducible_over(spec, mn)
    C = np.zeros((mn, mn), dtype=np.int64)
    for i in range(mn - 1):
        C[i + 1, i] = 1
    for i in range(mn):
        C[i, mn - 1] = spec.neg(f[i])
    Cm = Matrix(spec, C)
    powers = [Matrix.identity(spec, mn)]
    for _ in range(mn - 1):
        powers.append(powers[-1] @ Cm)
    out = []
    q = spec.q
    for code in range(1, q ** mn):
        acc = Matrix.zeros(spec, mn, mn)
        for i in range(mn):
            a = (code // q ** i) % q
            if a:
                acc = acc + Matrix(spec, [[spec.mul(a, int(v)) for v in row] for row in powers[i].data])
        out.append(acc)
    return tuple(out)


def frobenius_family(spec: FieldSpec, mn: int, B: Matrix | None = None) -> HashFamily:
    """The ``q^mn - 1`` field-multiplication maps, optionally composed with ``B``."""
    if B is None:
        B = Matrix.identity(spec, mn)
    if B.cols != mn:
        raise ValueError(f"B must have {mn} columns")
    return HashFamily(FROBENIUS, spec.q ** B.rank(), spec, mn, B, frobenius_matrices(spec, mn))
