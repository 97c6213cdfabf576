"""Leakage bounds, wiretap-class counting, block-length planning and audits.

Bound arithmetic runs in the natural-log domain on a private mpmath context
(40 significant digits), because the Markov slack ``C1`` of realistic
parameter sets is far outside double range. Bound functions return
``mpf`` values; pass ``log=True`` to get the natural log instead.

Quantities named ``power_sum`` are ``E[P_{S_Ī|S_I}(S_Ī|S_I)^rho]``; each
function also accepts ``log_power_sum`` for values that underflow doubles.
Likewise ``C1`` may be replaced by ``log_C1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import mpmath
import numpy as np

from .errors import InfeasibleError, SearchExhaustedError
from .gf import gaussian_binomial, prime_power
from .infoprob import MessageDist, exact_leakage, leakage_is_zero, nonempty_subsets
from .netcode import Precoder, Scenario, enumerate_wiretap_classes

mp = mpmath.MPContext()
mp.dps = 40


def _check_rho(rho):
    if not 0 < rho <= 1:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")


def _log_of(value, log_value, name):
    if log_value is not None:
        return mp.mpf(log_value)
    if value is None:
        raise TypeError(f"{name} or log_{name} is required")
    value = mp.mpf(value)
    if value < 0:
        raise ValueError(f"{name} must be nonnegative")
    return mp.log(value) if value > 0 else mp.ninf


def _out(log_value, log):
    return log_value if log else mp.exp(log_value)


# ---------------------------------------------------------------------------
# Privacy amplification and realisation bounds
# ---------------------------------------------------------------------------

def pa_bound(rho, codomain_size=None, power_sum=None, *, log_codomain=None, log_power_sum=None):
    """Natural log of ``1 + |A_3|^rho * E[P_{A1|A2}^rho]``."""
    _check_rho(rho)
    lc = _log_of(codomain_size, log_codomain, "codomain_size")
    lp = _log_of(power_sum, log_power_sum, "power_sum")
    if lp == mp.ninf:
        return mp.mpf(0)
    return mp.log1p(mp.exp(rho * lc + lp))


def avg_leak_bound(rho, q, m, mu, power_sum=None, *, log_power_sum=None, log=False):
    """Average leakage bound ``q^{m rho mu} E[P^rho] / rho`` (nats)."""
    _check_rho(rho)
    lp = _log_of(power_sum, log_power_sum, "power_sum")
    return _out(m * rho * mu * mp.log(q) + lp - mp.log(rho), log)


def realization_bound_ub5(C1=None, rho=None, q=None, m=None, mu=None, power_sum=None, *,
                          log_C1=None, log_power_sum=None, log=False):
    """``C1 q^{m rho mu} E[P^rho] / rho`` (nats): the leakage bound met by
    a drawn precoder with probability controlled by ``C1``.
    """
    lc = _log_of(C1, log_C1, "C1")
    if lc <= 0:
        raise ValueError("C1 must exceed 1")
    base = avg_leak_bound(rho, q, m, mu, power_sum, log_power_sum=log_power_sum, log=True)
    return _out(lc + base, log)


def realization_bound_ub7(C1=None, rho=None, q=None, m=None, mu=None, power_sum=None, *,
                          log_C1=None, log_power_sum=None):
    """Per-symbol bound ``ln C1/(m rho) + |mu ln q + (1 + ln E[P^rho])/(m rho)|^+``.

    The positive part is ``max(0, x)``; ``x == 0`` gives 0.
    """
    _check_rho(rho)
    if m < 1:
        raise ValueError("m must be >= 1")
    lc = _log_of(C1, log_C1, "C1")
    if lc <= 0:
        raise ValueError("C1 must exceed 1")
    lp = _log_of(power_sum, log_power_sum, "power_sum")
    inner = mu * mp.log(q) + (1 + lp) / (m * rho)
    return lc / (m * rho) + (inner if inner > 0 else mp.mpf(0))


# ---------------------------------------------------------------------------
# Counting wiretap classes
# ---------------------------------------------------------------------------

class GrassmannCount(NamedTuple):
    exact: int
    lower: int  # q^{mu(n-mu)}
    upper_product: int  # prod (q^{n-mu+1}-1)/(q-1), exact integer
    upper_power: int  # q^{mu(n-mu+1)}
    upper_uniform: mpmath.mpf  # q^{(n+1)^2/4}


def grassmann_count(q: int, n: int, mu: int) -> GrassmannCount:
    """Number of kernel classes of rank-``mu`` wiretaps, with its bounds."""
    prime_power(q)
    if not 0 <= mu <= n:
        raise ValueError(f"need 0 <= mu <= n, got mu={mu}, n={n}")
    exact = gaussian_binomial(q, n, mu)
    per = (q ** (n - mu + 1) - 1) // (q - 1)
    return GrassmannCount(
        exact=exact,
        lower=q ** (mu * (n - mu)),
        upper_product=per ** mu,
        upper_power=q ** (mu * (n - mu + 1)),
        upper_uniform=mp.power(q, mp.mpf((n + 1) ** 2) / 4),
    )


class ClassTotal(NamedTuple):
    exact: int
    bound: mpmath.mpf


def total_classes_bound(q: int, n: int) -> ClassTotal:
    """Sum over ``mu = 1..n`` of class counts, and its bound ``n q^{(n+1)^2/4}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    prime_power(q)
    exact = sum(gaussian_binomial(q, n, mu) for mu in range(1, n + 1))
    bound = n * mp.power(q, mp.mpf((n + 1) ** 2) / 4)
    assert exact <= bound, "class total exceeds its closed-form bound"
    return ClassTotal(exact, bound)


def log_union_factor(T: int, n: int, q: int):
    """``ln(2 (2^T - 1) n q^{(n+1)^2/4})``, the union-bound numerator."""
    return mp.log(2 * (2 ** T - 1) * n) + mp.mpf((n + 1) ** 2) / 4 * mp.log(q)


class SuccessProb(NamedTuple):
    value: mpmath.mpf
    useful: bool


def success_prob(C1=None, T=None, n=None, q=None, *, log_C1=None) -> SuccessProb:
    """Guaranteed probability that a drawn precoder meets both realisation
    bounds for every wiretap and every ``I``. Negative values mean ``C1`` is
    too small to guarantee anything; they are returned unchanged.
    """
    lc = _log_of(C1, log_C1, "C1")
    value = 1 - mp.exp(log_union_factor(T, n, q) - lc)
    return SuccessProb(value, bool(value > 0))


def zero_condition(n, mu, kI_rate, delta_rho) -> bool:
    """``mu < n - k_I/m - delta_rho``: the average bound then vanishes as m grows."""
    return mu < n - kI_rate - delta_rho


class Rate(NamedTuple):
    raw: float
    clamped: float


def asymptotic_rate(q, n, mu, kI_rate, delta_rho) -> Rate:
    """Limiting per-symbol leakage bound ``(mu + delta - (n - k_I/m)) ln q``."""
    raw = (mu + delta_rho - (n - kI_rate)) * math.log(q)
    return Rate(raw, max(raw, 0.0))


# ---------------------------------------------------------------------------
# Block-length planner
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlannerInput:
    """Targets for the planner.

    ``rates`` holds ``k_i/m`` for the ``T`` secret messages (constant in m);
    ``eps_leak`` is the per-message leakage target in nats and ``eps_fail``
    the allowed probability of drawing a bad precoder.
    """

    q: int
    n: int
    T: int
    mu: int
    rates: tuple
    delta_rho: float
    rho: float = 0.5
    eps_leak: float = 1e-6
    eps_fail: float = 1e-12

    def __post_init__(self):
        object.__setattr__(self, "rates", tuple(float(r) for r in self.rates))
        _check_rho(self.rho)
        if len(self.rates) != self.T:
            raise ValueError(f"need T = {self.T} rates, got {len(self.rates)}")
        if any(r < 0 for r in self.rates) or sum(self.rates) > self.n + 1e-12:
            raise ValueError("rates must be nonnegative and sum to at most n")
        if not 0 <= self.mu <= self.n:
            raise ValueError("need 0 <= mu <= n")
        if self.delta_rho < 0:
            raise ValueError("delta_rho must be nonnegative")
        for name in ("eps_leak", "eps_fail"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")


@dataclass
class PlanReport:
    inputs: PlannerInput
    log_C1: mpmath.mpf
    m_real: mpmath.mpf
    m: int
    precoder_dim: int
    log_bound_at_m: mpmath.mpf
    success: SuccessProb

    @property
    def C1(self):
        return mp.exp(self.log_C1)

    def to_json(self) -> dict:
        p = self.inputs
        return {
            "inputs": {"q": p.q, "n": p.n, "T": p.T, "mu": p.mu, "rates": list(p.rates),
                       "delta_rho": p.delta_rho, "rho": p.rho, "eps_leak": p.eps_leak,
                       "eps_fail": p.eps_fail},
            "C1": mp.nstr(self.C1, 17),
            "log_C1": float(self.log_C1),
            "m_real": float(self.m_real),
            "m": self.m,
            "precoder_dim": [self.precoder_dim, self.precoder_dim],
            "bound_at_m": mp.nstr(mp.exp(self.log_bound_at_m), 17),
            "success_prob": mp.nstr(self.success.value, 20),
        }


def planner_log_bound(p: PlannerInput, m, log_C1=None):
    """Log of ``C1 q^{m rho (mu - n + r + delta)} / rho`` at block length ``m``.

    ``r`` is the largest per-message rate. This is the bound on a drawn
    precoder's leakage after ``E[P^rho]`` is replaced by its
    non-uniformity estimate.
    """
    if log_C1 is None:
        log_C1 = log_union_factor(p.T, p.n, p.q) - mp.log(p.eps_fail)
    r = max(p.rates)
    a = p.rho * (p.mu - p.n + mp.mpf(r) + mp.mpf(p.delta_rho))
    return log_C1 + m * a * mp.log(p.q) - mp.log(p.rho)


def plan_block_length(p: PlannerInput) -> PlanReport:
    """Smallest block length ``m`` meeting both targets for every single message."""
    r = max(p.rates)
    if not zero_condition(p.n, p.mu, r, p.delta_rho):
        raise InfeasibleError(
            f"mu={p.mu} >= n - k_I/m - delta = {p.n - r - p.delta_rho}: no finite m exists")
    log_C1 = log_union_factor(p.T, p.n, p.q) - mp.log(p.eps_fail)
    a = p.rho * (p.mu - p.n + mp.mpf(r) + mp.mpf(p.delta_rho))
    m_real = (log_C1 - mp.log(p.rho) - mp.log(p.eps_leak)) / (-a * mp.log(p.q))
    m = max(1, int(mp.ceil(m_real)))
    while planner_log_bound(p, m, log_C1) >= mp.log(p.eps_leak):
        m += 1
    return PlanReport(
        inputs=p,
        log_C1=log_C1,
        m_real=m_real,
        m=m,
        precoder_dim=m * p.n,
        log_bound_at_m=planner_log_bound(p, m, log_C1),
        success=success_prob(log_C1=log_C1, T=p.T, n=p.n, q=p.q),
    )


RHO_GRID = tuple(round(0.1 * i, 1) for i in range(1, 11))


def plan_over_rho(p: PlannerInput, rhos: Sequence[float] = RHO_GRID) -> PlanReport:
    """Run the planner for each ``rho`` (same ``delta_rho``) and keep the smallest ``m``."""
    best = None
    for rho in rhos:
        q = PlannerInput(p.q, p.n, p.T, p.mu, p.rates, p.delta_rho, rho, p.eps_leak, p.eps_fail)
        rep = plan_block_length(q)
        if best is None or (rep.m, rep.m_real) < (best.m, best.m_real):
            best = rep
    return best


# ---------------------------------------------------------------------------
# Strong-security audit
# ---------------------------------------------------------------------------

@dataclass
class AuditEntry:
    mu: int
    I: tuple
    base: list
    kernel: list
    leakage: float
    secure: bool


@dataclass
class AuditReport:
    """Exact leakage for every (wiretap class, index set) and the security
    level it certifies.

    ``eta_universal`` is the largest eta for which every pair with
    ``m(mu - eta) < sum_{i not in I} k_i`` is secure (None: no insecure
    pair, so any eta qualifies). ``eta_single_symbol`` applies the
    ``mu - eta <= T - |I|`` rule and is only set when ``m == 1`` and every
    message is one symbol.
    """

    scenario: Scenario
    precoder: Precoder
    leak_tol: float
    target_eta: float
    entries: list
    max_leakage: float
    eta_universal: float | None
    eta_single_symbol: int | None
    passed: bool
    single_symbol_passed: bool | None

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario.to_json(),
            "precoder": self.precoder.matrix.to_json(),
            "leak_tol": _json_float(self.leak_tol),
            "target_eta": self.target_eta,
            "max_leakage": self.max_leakage,
            "eta_universal": self.eta_universal,
            "eta_single_symbol": self.eta_single_symbol,
            "pass": self.passed,
            "single_symbol_pass": self.single_symbol_passed,
            "entries": [
                {"mu": e.mu, "I": list(e.I), "B": e.base, "kernel": e.kernel,
                 "leakage": e.leakage, "secure": e.secure}
                for e in self.entries
            ],
        }

    def to_text(self) -> str:
        lines = [
            f"scenario      {self.scenario.to_json()}",
            f"leak_tol      {self.leak_tol}",
            f"target eta    {self.target_eta}",
            f"max leakage   {self.max_leakage:.12g} nats",
            f"eta (univ.)   {self.eta_universal}",
            f"verdict       {'PASS' if self.passed else 'FAIL'}",
            "",
            f"{'mu':>3} {'I':<12} {'leakage':>16} {'secure':>7}  B",
        ]
        for e in self.entries:
            lines.append(f"{e.mu:>3} {str(list(e.I)):<12} {e.leakage:>16.10g} {str(e.secure):>7}  {e.base}")
        return "\n".join(lines)


def _json_float(x):
    return None if math.isinf(x) else x


def universal_qualifies(scenario: Scenario, mu: int, I: Iterable[int], eta: float) -> bool:
    """``m (mu - eta) < sum of k_i over i in 1..T+1 not in I``."""
    return scenario.m * (mu - eta) < scenario.k_of(scenario.complement(I))


def single_symbol_qualifies(scenario: Scenario, mu: int, I: Iterable[int], eta: float) -> bool:
    """``mu - eta <= T - |I|``."""
    return mu - eta <= scenario.T - len(tuple(I))


def _single_symbol(scenario: Scenario) -> bool:
    return scenario.m == 1 and all(x == 1 for x in scenario.k[:-1])


def _classes(scenario: Scenario, mus):
    out = []
    for mu in mus:
        out.extend(enumerate_wiretap_classes(scenario.field, scenario.n, mu))
    return out


def _is_secure(dist, pre, cls, I, leak_tol) -> bool:
    if leak_tol == 0:
        return leakage_is_zero(dist, pre, cls, I)
    return exact_leakage(dist, pre, cls, I) <= leak_tol


def strong_security_audit(scenario: Scenario, dist: MessageDist, pre: Precoder, leak_tol: float,
                          *, mus: Iterable[int] | None = None, index_sets: Iterable[tuple] | None = None,
                          target_eta: float | None = None) -> AuditReport:
    """Exhaustive audit of ``pre`` over every wiretap class and index set.

    ``leak_tol == 0`` switches to the exact (rational) independence test.
    ``target_eta`` defaults to ``k_{T+1}/m``.
    """
    if dist.scenario != scenario or pre.scenario != scenario:
        raise ValueError("distribution and precoder must share the scenario")
    mus = tuple(range(scenario.n + 1)) if mus is None else tuple(mus)
    sets = nonempty_subsets(scenario.T) if index_sets is None else [scenario.check_index_set(I) for I in index_sets]
    target = scenario.k[-1] / scenario.m if target_eta is None else target_eta
    entries = []
    for cls in _classes(scenario, mus):
        for I in sets:
            leak = exact_leakage(dist, pre, cls, I)
            if leak_tol == 0:
                secure = leakage_is_zero(dist, pre, cls, I)
            else:
                secure = leak <= leak_tol
            entries.append(AuditEntry(cls.mu, tuple(I), cls.base.to_json(),
                                      cls.kernel.basis.to_json(), leak, bool(secure)))
    insecure = [e for e in entries if not e.secure]
    eta_u = None
    if insecure:
        eta_u = min(e.mu - scenario.k_of(scenario.complement(e.I)) / scenario.m for e in insecure)
    passed = all(e.secure for e in entries if universal_qualifies(scenario, e.mu, e.I, target))
    eta_s = single_pass = None
    if _single_symbol(scenario):
        if insecure:
            eta_s = min(e.mu - scenario.T + len(e.I) for e in insecure) - 1
        single_pass = all(e.secure for e in entries if single_symbol_qualifies(scenario, e.mu, e.I, target))
    return AuditReport(
        scenario=scenario,
        precoder=pre,
        leak_tol=leak_tol,
        target_eta=target,
        entries=entries,
        max_leakage=max((e.leakage for e in entries), default=0.0),
        eta_universal=eta_u,
        eta_single_symbol=eta_s,
        passed=passed,
        single_symbol_passed=single_pass,
    )


@dataclass
class SearchResult:
    precoder: Precoder
    report: AuditReport
    draws: int


def search_precoder(scenario: Scenario, dist: MessageDist, leak_tol: float, budget: int, rng,
                    *, mus: Iterable[int] | None = None, index_sets: Iterable[tuple] | None = None,
                    target_eta: float | None = None) -> SearchResult:
    """Draw precoders until one passes the audit at ``target_eta``.

    Candidates are screened with early exit on the first insecure
    qualifying pair; the winner then gets a full audit. Raises
    :class:`SearchExhaustedError` after ``budget`` draws.
    """
    rng = np.random.default_rng(rng)
    mus = tuple(range(scenario.n + 1)) if mus is None else tuple(mus)
    sets = nonempty_subsets(scenario.T) if index_sets is None else [scenario.check_index_set(I) for I in index_sets]
    target = scenario.k[-1] / scenario.m if target_eta is None else target_eta
    checks = [(cls, I) for cls in _classes(scenario, mus) for I in sets
              if universal_qualifies(scenario, cls.mu, I, target)]
    for draw in range(1, budget + 1):
        pre = Precoder.random(scenario, rng)
        if math.isinf(leak_tol) or all(_is_secure(dist, pre, c, I, leak_tol) for c, I in checks):
            report = strong_security_audit(scenario, dist, pre, leak_tol, mus=mus,
                                           index_sets=sets, target_eta=target)
            return SearchResult(pre, report, draw)
    raise SearchExhaustedError(f"no passing precoder in {budget} draws")
