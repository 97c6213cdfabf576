"""Source-node precoding, packetisation and the eavesdropper's view.

Symbols are laid out packet-major: symbol ``j`` of packet ``i`` (both
0-based) is coordinate ``i*m + j`` of the precoded vector. Under this order
a wiretap on links described by ``B_{mu x n}`` observes
``(B_{mu x n} ⊗ I_m) · ℓ · s``.

Message indices are 1-based, matching the naming S_1, ..., S_{T+1}; the
last block ``S_{T+1}`` is auxiliary randomness and never part of an index
set ``I``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DimensionError
from .gf import (
    FieldSpec,
    Matrix,
    Subspace,
    enumerate_subspaces,
    gaussian_binomial,
    mat_kernel,
    sample_invertible,
    SUBSPACE_GUARD,
)
from .errors import GuardExceededError


@dataclass(frozen=True)
class Scenario:
    """Message layout ``(q, m, n, T, k_1..k_{T+1})`` with ``sum(k) == m*n``."""

    field: FieldSpec
    m: int
    n: int
    T: int
    k: tuple

    def __post_init__(self):
        object.__setattr__(self, "k", tuple(int(x) for x in self.k))
        if self.m < 1 or self.n < 1 or self.T < 1:
            raise ValueError("m, n and T must all be >= 1")
        if len(self.k) != self.T + 1:
            raise ValueError(f"k must have T+1 = {self.T + 1} entries, got {len(self.k)}")
        if any(x < 0 for x in self.k):
            raise ValueError("message lengths must be nonnegative")
        if sum(self.k) != self.m * self.n:
            raise ValueError(f"sum(k) = {sum(self.k)} differs from m*n = {self.m * self.n}")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def mn(self) -> int:
        return self.m * self.n

    @cached_property
    def offsets(self) -> tuple:
        out = [0]
        for x in self.k:
            out.append(out[-1] + x)
        return tuple(out)

    def check_index_set(self, I: Iterable[int]) -> tuple:
        I = tuple(sorted(set(int(i) for i in I)))
        if not I:
            raise ValueError("index set must be nonempty")
        if I[0] < 1 or I[-1] > self.T:
            raise ValueError(f"index set {I} not within 1..{self.T}")
        return I

    def coords(self, I: Iterable[int]) -> list[int]:
        """0-based coordinates of the blocks in ``I`` (any of 1..T+1), ascending."""
        out = []
        for i in sorted(set(I)):
            out.extend(range(self.offsets[i - 1], self.offsets[i]))
        return out

    def complement(self, I: Iterable[int]) -> tuple:
        I = set(I)
        return tuple(i for i in range(1, self.T + 2) if i not in I)

    def k_of(self, I: Iterable[int]) -> int:
        return sum(self.k[i - 1] for i in set(I))

    def to_json(self) -> dict:
        return {"field": str(self.field), "m": self.m, "n": self.n, "T": self.T, "k": list(self.k)}

    @classmethod
    def from_json(cls, obj) -> "Scenario":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(FieldSpec.parse(obj["field"]), int(obj["m"]), int(obj["n"]),
                   int(obj["T"]), tuple(obj["k"]))


class Precoder:
    """The agreed invertible ``mn x mn`` matrix ℓ."""

    def __init__(self, scenario: Scenario, matrix: Matrix):
        if matrix.spec != scenario.field:
            raise ValueError("precoder field differs from scenario field")
        if matrix.shape != (scenario.mn, scenario.mn):
            raise DimensionError(f"precoder must be {scenario.mn}x{scenario.mn}, got {matrix.shape}")
        if matrix.rank() != scenario.mn:
            raise ValueError("precoder matrix is singular")
        self.scenario = scenario
        self.matrix = matrix

    @classmethod
    def random(cls, scenario: Scenario, rng) -> "Precoder":
        return cls(scenario, sample_invertible(scenario.field, scenario.mn, rng))

    @classmethod
    def identity(cls, scenario: Scenario) -> "Precoder":
        return cls(scenario, Matrix.identity(scenario.field, scenario.mn))

    @cached_property
    def inverse(self) -> Matrix:
        return self.matrix.inverse()

    def __eq__(self, other):
        return isinstance(other, Precoder) and self.scenario == other.scenario and self.matrix == other.matrix

    def __hash__(self):
        return hash((self.scenario, self.matrix))

    def __repr__(self):
        return f"Precoder({self.matrix.data.tolist()})"


class EavesdropClass:
    """A wiretap pattern ``B_{mu x n}`` of full row rank, keyed by its kernel.

    Two patterns with the same kernel let Eve compute each other's
    observation, so the kernel is the class identity.
    """

    def __init__(self, base: Matrix):
        if base.rank() != base.rows:
            raise ValueError(f"wiretap matrix must have full row rank {base.rows}")
        if base.rows > base.cols:
            raise DimensionError("mu cannot exceed n")
        self.base = base

    @classmethod
    def from_kernel(cls, kernel: Subspace) -> "EavesdropClass":
        """Canonical representative: the echelon basis of the annihilator of ``kernel``."""
        spec, n = kernel.spec, kernel.ambient
        if kernel.dim == 0:
            return cls(Matrix.identity(spec, n))
        ann = mat_kernel(kernel.basis)
        return cls(ann.basis)

    @property
    def mu(self) -> int:
        return self.base.rows

    @property
    def n(self) -> int:
        return self.base.cols

    @cached_property
    def kernel(self) -> Subspace:
        return mat_kernel(self.base)

    def same_class(self, other: "EavesdropClass") -> bool:
        return self.kernel == other.kernel

    def __repr__(self):
        return f"EavesdropClass(mu={self.mu}, B={self.base.data.tolist()})"


@dataclass(frozen=True)
class PacketSet:
    """``n`` packets of ``m`` symbols each, stored as an ``(n, m)`` array."""

    symbols: np.ndarray

    def __post_init__(self):
        arr = np.array(self.symbols, dtype=np.int64)
        if arr.ndim != 2:
            raise DimensionError("packets must form an (n, m) array")
        arr.setflags(write=False)
        object.__setattr__(self, "symbols", arr)

    @property
    def n(self) -> int:
        return self.symbols.shape[0]

    @property
    def m(self) -> int:
        return self.symbols.shape[1]

    def concat(self) -> np.ndarray:
        return self.symbols.reshape(-1)

    def __eq__(self, other):
        return isinstance(other, PacketSet) and np.array_equal(self.symbols, other.symbols)

    def to_json(self) -> list:
        return self.symbols.tolist()

    @classmethod
    def from_json(cls, rows) -> "PacketSet":
        return cls(np.array(rows, dtype=np.int64))


def _as_vector(s, length: int) -> np.ndarray:
    vec = np.asarray(s, dtype=np.int64).reshape(-1)
    if vec.shape[0] != length:
        raise DimensionError(f"expected a vector of length {length}, got {vec.shape[0]}")
    return vec


def expand_eavesdrop(cls: EavesdropClass, m: int) -> Matrix:
    """The ``m*mu x m*n`` observation matrix ``B_{mu x n} ⊗ I_m``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if cls.mu == 0:
        return Matrix.zeros(cls.base.spec, 0, m * cls.n)
    return cls.base.kron_identity(m)


def encode(s, pre: Precoder) -> PacketSet:
    sc = pre.scenario
    x = pre.matrix @ _as_vector(s, sc.mn)
    return PacketSet(x.reshape(sc.n, sc.m))


def decode(p: PacketSet, pre: Precoder) -> np.ndarray:
    sc = pre.scenario
    if p.symbols.shape != (sc.n, sc.m):
        raise DimensionError(f"expected {sc.n} packets of {sc.m} symbols, got {p.symbols.shape}")
    return pre.inverse @ p.concat()


def observation_matrix(cls: EavesdropClass, pre: Precoder) -> Matrix:
    """``B ℓ``, the linear map from messages to Eve's observation."""
    sc = pre.scenario
    if cls.n != sc.n:
        raise DimensionError(f"wiretap width {cls.n} differs from n = {sc.n}")
    B = expand_eavesdrop(cls, sc.m)
    if B.rows == 0:
        return B
    return B @ pre.matrix


def observe(cls: EavesdropClass, pre: Precoder, s) -> np.ndarray:
    W = observation_matrix(cls, pre)
    vec = _as_vector(s, pre.scenario.mn)
    if W.rows == 0:
        return np.zeros(0, dtype=np.int64)
    return W @ vec


def enumerate_wiretap_classes(spec: FieldSpec, n: int, mu: int) -> Iterator[EavesdropClass]:
    """One representative per kernel class of rank-``mu`` wiretaps on ``n`` links."""
    if not 0 <= mu <= n:
        raise ValueError(f"need 0 <= mu <= n, got mu={mu}, n={n}")
    if gaussian_binomial(spec.q, n, mu) > SUBSPACE_GUARD:
        raise GuardExceededError("wiretap class count exceeds 2^20")
    if mu == 0:
        yield EavesdropClass(Matrix.zeros(spec, 0, n))
        return
    for K in enumerate_subspaces(spec, n, n - mu):
        yield EavesdropClass.from_kernel(K)


def message_slice(s, scenario: Scenario, I: Sequence[int]) -> np.ndarray:
    """``S_I``: the blocks of ``s`` for message indices ``I`` in ascending order."""
    I = scenario.check_index_set(I)
    vec = _as_vector(s, scenario.mn)
    return vec[scenario.coords(I)]
