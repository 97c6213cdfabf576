"""Message distributions and exact information measures.

Entropies and mutual information are in nats unless a function says
otherwise; Rényi entropies are reported in ``log_q`` units. Probabilities
are held in ``np.longdouble`` (80-bit extended on x86-64). Rational inputs
additionally keep exact integer weights so that independence, and hence
zero leakage, can be decided without rounding.
"""
from __future__ import annotations

import itertools
import json
import math
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import ConvergenceError, GuardExceededError
from .gf import all_vectors, vector_index
from .netcode import EavesdropClass, Precoder, Scenario, observation_matrix

TABLE_GUARD = 1 << 20
SUBSET_GUARD = 1 << 20
LIMIT_RHOS = (1e-3, 1e-4, 1e-5)


def _parse_prob(x):
    """Return ``(Fraction, exact)`` for a probability given as str/int/Fraction/float."""
    if isinstance(x, Fraction):
        return x, True
    if isinstance(x, int):
        return Fraction(x), True
    if isinstance(x, str):
        return Fraction(x.strip()), "." not in x and "e" not in x.lower()
    return Fraction(float(x)), False


class MessageDist:
    """Joint distribution of ``S = (S_1, ..., S_{T+1})`` over F_q^{mn}.

    Build with :meth:`uniform`, :meth:`product`, :meth:`table` or
    :meth:`from_probs`. ``probs[idx]`` is the probability of the message
    vector with big-endian index ``idx``.
    """

    def __init__(self, scenario: Scenario, form: str, probs, weights=None, denominator=None, source=None):
        size = scenario.q ** scenario.mn
        if size > TABLE_GUARD:
            raise GuardExceededError(f"q^(mn) = {size} exceeds the 2^20 table guard")
        probs = np.asarray(probs, dtype=np.longdouble).reshape(-1)
        if probs.shape[0] != size:
            raise ValueError(f"expected {size} probabilities, got {probs.shape[0]}")
        if (probs < 0).any():
            raise ValueError("probabilities must be nonnegative")
        if weights is not None:
            if sum(int(w) for w in weights) != denominator:
                raise ValueError("exact weights do not sum to one")
        elif abs(float(probs.sum()) - 1.0) > 1e-15 * max(1, size) ** 0.5 + 1e-15:
            raise ValueError(f"probabilities sum to {float(probs.sum())}, not 1")
        self.scenario = scenario
        self.form = form
        self.probs = probs
        self.weights = weights
        self.denominator = denominator
        self._source = source

    @property
    def exact(self) -> bool:
        return self.weights is not None

    # -- constructors -------------------------------------------------------

    @classmethod
    def uniform(cls, scenario: Scenario) -> "MessageDist":
        size = scenario.q ** scenario.mn
        weights = np.ones(size, dtype=object)
        probs = np.full(size, np.longdouble(1) / np.longdouble(size), dtype=np.longdouble)
        return cls(scenario, "uniform", probs, weights, size, {"form": "uniform"})

    @classmethod
    def product(cls, scenario: Scenario, tables: Sequence[Sequence]) -> "MessageDist":
        """Independent messages; ``tables[i]`` has ``q**k_{i+1}`` entries."""
        if len(tables) != scenario.T + 1:
            raise ValueError(f"need T+1 = {scenario.T + 1} tables, got {len(tables)}")
        fracs, exact = [], True
        for i, t in enumerate(tables):
            if len(t) != scenario.q ** scenario.k[i]:
                raise ValueError(f"table {i + 1} needs {scenario.q ** scenario.k[i]} entries")
            parsed = [_parse_prob(x) for x in t]
            exact &= all(e for _, e in parsed)
            fr = [f for f, _ in parsed]
            if sum(fr) != 1 and exact:
                raise ValueError(f"table {i + 1} does not sum to 1")
            fracs.append(fr)
        source = {"form": "product", "tables": [[_fmt(x) for x in t] for t in tables]}
        if exact:
            dens = [math.lcm(*[f.denominator for f in fr]) for fr in fracs]
            ints = [np.array([int(f * d) for f in fr], dtype=object) for fr, d in zip(fracs, dens)]
            w = ints[0]
            for t in ints[1:]:
                w = np.multiply.outer(w, t).reshape(-1)
            denom = math.prod(dens)
            probs = np.array([np.longdouble(int(x)) / np.longdouble(denom) for x in w], dtype=np.longdouble)
            return cls(scenario, "product", probs, w, denom, source)
        p = np.array([float(f) for f in fracs[0]], dtype=np.longdouble)
        for fr in fracs[1:]:
            p = np.multiply.outer(p, np.array([float(f) for f in fr], dtype=np.longdouble)).reshape(-1)
        return cls(scenario, "product", p, source=source)

    @classmethod
    def table(cls, scenario: Scenario, probs: dict) -> "MessageDist":
        """Explicit joint table keyed by hex-coded message vectors.

        Each symbol is written as fixed-width hex (width enough for ``q-1``);
        a message is the concatenation of its symbols. Missing keys have
        probability zero. Values are ``"num/den"`` strings or numbers.
        """
        q, mn = scenario.q, scenario.mn
        width = len(f"{q - 1:x}")
        size = q ** mn
        entries, exact = {}, True
        for key, val in probs.items():
            key = key.lower()
            if len(key) != width * mn:
                raise ValueError(f"key {key!r} must have {width * mn} hex digits")
            vec = [int(key[j * width:(j + 1) * width], 16) for j in range(mn)]
            if any(v >= q for v in vec):
                raise ValueError(f"key {key!r} has a symbol outside GF({q})")
            idx = int(vector_index(np.array(vec), q))
            f, e = _parse_prob(val)
            exact &= e
            entries[idx] = entries.get(idx, Fraction(0)) + f
        source = {"form": "table", "probs": {k: _fmt(v) for k, v in probs.items()}}
        if exact:
            if sum(entries.values()) != 1:
                raise ValueError("table probabilities do not sum to 1")
            denom = math.lcm(*[f.denominator for f in entries.values()]) if entries else 1
            w = np.zeros(size, dtype=object)
            for idx, f in entries.items():
                w[idx] = int(f * denom)
            probs_arr = np.array([np.longdouble(int(x)) / np.longdouble(denom) for x in w], dtype=np.longdouble)
            return cls(scenario, "table", probs_arr, w, denom, source)
        p = np.zeros(size, dtype=np.longdouble)
        for idx, f in entries.items():
            p[idx] = np.longdouble(float(f))
        return cls(scenario, "table", p, source=source)

    @classmethod
    def from_probs(cls, scenario: Scenario, probs) -> "MessageDist":
        """Wrap a floating-point probability vector (inexact)."""
        probs = np.asarray(probs, dtype=np.longdouble)
        return cls(scenario, "table", probs, source=None)

    @classmethod
    def from_weights(cls, scenario: Scenario, weights) -> "MessageDist":
        """Exact distribution proportional to nonnegative integer ``weights``."""
        w = np.array([int(x) for x in np.asarray(weights).reshape(-1)], dtype=object)
        denom = int(sum(w))
        probs = np.array([np.longdouble(int(x)) / np.longdouble(denom) for x in w], dtype=np.longdouble)
        return cls(scenario, "table", probs, w, denom, source=None)

    @classmethod
    def from_json(cls, scenario: Scenario, obj) -> "MessageDist":
        if isinstance(obj, str):
            obj = json.loads(obj)
        form = obj.get("form")
        if form == "uniform":
            return cls.uniform(scenario)
        if form == "product":
            return cls.product(scenario, obj["tables"])
        if form == "table":
            return cls.table(scenario, obj["probs"])
        raise ValueError(f"unknown distribution form {form!r}")

    def to_json(self) -> dict:
        if self._source is not None:
            return self._source
        width = len(f"{self.scenario.q - 1:x}")
        vecs = all_vectors(self.scenario.q, self.scenario.mn)
        out = {}
        for idx in np.nonzero(self.probs)[0]:
            key = "".join(f"{int(v):0{width}x}" for v in vecs[idx])
            if self.exact:
                out[key] = _fmt(Fraction(int(self.weights[idx]), self.denominator))
            else:
                out[key] = float(self.probs[idx])
        return {"form": "table", "probs": out}

    # -- views --------------------------------------------------------------

    def _tensor(self, values):
        sc = self.scenario
        return np.asarray(values).reshape((sc.q,) * sc.mn) if sc.mn else np.asarray(values)

    def _grouped(self, values, rows: Sequence[int], cols: Sequence[int]):
        sc = self.scenario
        t = self._tensor(values).transpose(list(rows) + list(cols))
        return t.reshape(sc.q ** len(rows), sc.q ** len(cols))

    def joint(self, I: Iterable[int]) -> np.ndarray:
        """Table ``P[x, y]`` with ``x`` = S_Ī (rows) and ``y`` = S_I (columns).

        ``I`` may be empty, in which case there is a single column.
        """
        sc = self.scenario
        cols = sc.coords(I)
        rows = [c for c in range(sc.mn) if c not in set(cols)]
        return self._grouped(self.probs, rows, cols)

    def marginal(self, I: Iterable[int]) -> np.ndarray:
        return self.joint(I).sum(axis=0)


def _fmt(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return x


# ---------------------------------------------------------------------------
# Entropies
# ---------------------------------------------------------------------------

def _cond_powers(joint):
    joint = np.asarray(joint, dtype=np.longdouble)
    py = joint.sum(axis=0)
    mask = joint > 0
    cond = np.zeros_like(joint)
    cond[mask] = (joint / np.where(py > 0, py, 1)[None, :])[mask]
    return joint, cond, mask


def conditional_power_sum(joint, rho: float) -> float:
    """``E[P_{X|Y}(X|Y)^rho]`` for a table ``joint[x, y]``."""
    joint, cond, mask = _cond_powers(joint)
    return float((joint[mask] * cond[mask] ** np.longdouble(rho)).sum())


def renyi_cond_entropy(joint, rho: float, q: int) -> float:
    """Conditional Rényi entropy of order ``1+rho`` in ``log_q`` units.

    ``H_{1+rho}(X|Y) = -log_q E[P_{X|Y}(X|Y)^rho] / rho``, with ``joint[x, y]``
    the joint table. Multiply by ``ln q`` for nats.
    """
    if not 0 < rho <= 1:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    joint, cond, mask = _cond_powers(joint)
    e = (joint[mask] * cond[mask] ** np.longdouble(rho)).sum()
    val = -np.log(e) / (np.longdouble(rho) * np.log(np.longdouble(q)))
    return max(float(val), 0.0)


def shannon_cond_entropy(joint) -> float:
    """``H(X|Y)`` in nats."""
    joint, cond, mask = _cond_powers(joint)
    return max(float(-(joint[mask] * np.log(cond[mask])).sum()), 0.0)


def entropy(p) -> float:
    """Shannon entropy (nats) of a probability vector, with 0 log 0 = 0."""
    p = np.asarray(p, dtype=np.longdouble).reshape(-1)
    p = p[p > 0]
    return max(float(-(p * np.log(p)).sum()), 0.0)


def renyi_limit_check(joint, q: int, rhos: Sequence[float] = LIMIT_RHOS) -> float:
    """Conditional Shannon entropy in ``log_q`` units, after checking that
    ``H_{1+rho}`` approaches it monotonically as ``rho`` shrinks along ``rhos``.
    """
    shannon = shannon_cond_entropy(joint) / math.log(q)
    gaps = [abs(renyi_cond_entropy(joint, r, q) - shannon) for r in rhos]
    for a, b in zip(gaps, gaps[1:]):
        if b > a + 1e-12:
            raise ConvergenceError(f"Rényi entropies do not converge monotonically: gaps {gaps}")
    return shannon


def power_sum(dist: MessageDist, I: Iterable[int], rho: float) -> float:
    """``E[P_{S_Ī|S_I}(S_Ī|S_I)^rho]``; with ``I`` empty, the unconditional sum."""
    if not 0 < rho <= 1:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    return conditional_power_sum(dist.joint(I), rho)


def nonempty_subsets(T: int) -> list[tuple]:
    out = []
    for r in range(1, T + 1):
        out.extend(itertools.combinations(range(1, T + 1), r))
    return out


def delta_rho(dist: MessageDist, rho: float) -> float:
    """Smallest admissible non-uniformity constant at this block length.

    Max over nonempty ``I ⊆ {1..T}`` of
    ``n - k_I/m - H_{1+rho}(S_Ī|S_I)/m`` (entropy in ``log_q`` units),
    clamped below at zero.
    """
    sc = dist.scenario
    if 2 ** sc.T > SUBSET_GUARD:
        raise GuardExceededError("2^T exceeds the subset guard")
    best = 0.0
    for I in nonempty_subsets(sc.T):
        h = renyi_cond_entropy(dist.joint(I), rho, sc.q)
        best = max(best, sc.n - sc.k_of(I) / sc.m - h / sc.m)
    return best


# ---------------------------------------------------------------------------
# Leakage
# ---------------------------------------------------------------------------

def _observation_keys(dist: MessageDist, pre: Precoder, cls: EavesdropClass, I):
    sc = dist.scenario
    I = sc.check_index_set(I)
    W = observation_matrix(cls, pre)
    svecs = all_vectors(sc.q, sc.mn)
    if W.rows:
        z = kernels.matmul(svecs, np.ascontiguousarray(W.data.T), sc.field.tables)
        zkey = vector_index(z, sc.q)
    else:
        zkey = np.zeros(len(svecs), dtype=np.int64)
    akey = vector_index(svecs[:, sc.coords(I)], sc.q)
    return akey, zkey


def _group_sum(keys, values):
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    starts = np.flatnonzero(np.r_[True, k[1:] != k[:-1]])
    return k[starts], np.add.reduceat(values[order], starts), order, starts


def exact_leakage(dist: MessageDist, pre: Precoder, cls: EavesdropClass, I: Iterable[int]) -> float:
    """``I(S_I; B ℓ S^t)`` in nats by enumerating every message vector."""
    akey, zkey = _observation_keys(dist, pre, cls, I)
    p = dist.probs
    support = p > 0
    akey, zkey, p = akey[support], zkey[support], p[support]
    nz = int(zkey.max()) + 1 if zkey.size else 1
    _, pj, _, _ = _group_sum(akey * nz + zkey, p)
    ka, pa, _, _ = _group_sum(akey, p)
    kz, pz, _, _ = _group_sum(zkey, p)
    h = lambda v: -(v * np.log(v)).sum()
    mi = h(pa) + h(pz) - h(pj)
    return max(float(mi), 0.0)


def leakage_is_zero(dist: MessageDist, pre: Precoder, cls: EavesdropClass, I: Iterable[int]) -> bool:
    """Exact test of ``I(S_I; B ℓ S^t) == 0`` (independence) using integer weights."""
    if not dist.exact:
        raise ValueError("exact zero test needs a rational distribution")
    akey, zkey = _observation_keys(dist, pre, cls, I)
    w = dist.weights
    support = np.array([int(x) > 0 for x in w], dtype=bool)
    akey, zkey, w = akey[support], zkey[support], w[support]
    nz = int(zkey.max()) + 1
    kj, wj, _, _ = _group_sum(akey * nz + zkey, w)
    ka, wa, _, _ = _group_sum(akey, w)
    kz, wz, _, _ = _group_sum(zkey, w)
    if len(kj) != len(ka) * len(kz):
        return False
    wa_map = dict(zip(ka.tolist(), wa.tolist()))
    wz_map = dict(zip(kz.tolist(), wz.tolist()))
    total = dist.denominator
    for key, wv in zip(kj.tolist(), wj.tolist()):
        a, z = divmod(key, nz)
        if int(wv) * total != int(wa_map[a]) * int(wz_map[z]):
            return False
    return True


def mutual_information(joint) -> float:
    """``I(X; Y)`` in nats from a table ``joint[x, y]``."""
    joint = np.asarray(joint, dtype=np.longdouble)
    return max(entropy(joint.sum(axis=1)) + entropy(joint.sum(axis=0)) - entropy(joint), 0.0)
