import math

import numpy as np
import pytest

from securenc.errors import InfeasibleError, SearchExhaustedError
from securenc.gf import Matrix, enumerate_invertible, enumerate_subspaces, gf
from securenc.infoprob import MessageDist, entropy, exact_leakage, power_sum
from securenc.netcode import EavesdropClass, Precoder, Scenario, enumerate_wiretap_classes
from securenc.secbounds import (
    PlannerInput,
    asymptotic_rate,
    avg_leak_bound,
    single_symbol_qualifies,
    universal_qualifies,
    grassmann_count,
    mp,
    pa_bound,
    plan_block_length,
    plan_over_rho,
    planner_log_bound,
    realization_bound_ub5,
    realization_bound_ub7,
    search_precoder,
    strong_security_audit,
    success_prob,
    total_classes_bound,
    zero_condition,
)

PAPER_INPUT = PlannerInput(256, 10, 5, 3, (2,) * 5, 0.5, 0.5, 1e-6, 1e-12)


def test_pa_bound_examples():
    assert float(pa_bound(1.0, 2, 1 / 8)) == pytest.approx(math.log(1.25), abs=1e-12)
    assert float(pa_bound(1.0, 2, 1 / 8)) == pytest.approx(0.223144, abs=1e-6)
    assert pa_bound(0.5, 4, 0.0) == 0
    assert float(pa_bound(1.0, 8, 1 / 8)) == pytest.approx(math.log(2))
    with pytest.raises(ValueError):
        pa_bound(0.0, 2, 0.5)


def test_pa_bound_log_inputs_match():
    direct = pa_bound(0.5, 2 ** 40, 1e-30)
    logged = pa_bound(0.5, log_codomain=40 * math.log(2), log_power_sum=math.log(1e-30))
    assert float(direct) == pytest.approx(float(logged), rel=1e-12)


def test_avg_leak_bound_closed_forms():
    q, m, n, rho = 4, 3, 2, 0.5
    uniform = avg_leak_bound(rho, q, m, 0, q ** (-rho * m * n))
    assert float(uniform) == pytest.approx(q ** (-rho * m * n) / rho)
    assert float(avg_leak_bound(rho, q, m, n, 1.0)) == pytest.approx(q ** (rho * m * n) / rho)


def test_ub5_is_C1_times_average():
    avg = avg_leak_bound(0.5, 3, 2, 1, 0.01)
    for C1 in (1.0001, 2, 7.5):
        ub5 = realization_bound_ub5(C1, 0.5, 3, 2, 1, 0.01)
        assert float(ub5 / avg) == pytest.approx(C1, rel=1e-12)
    a = realization_bound_ub5(3, 0.5, 3, 2, 1, 0.01, log=True)
    b = realization_bound_ub5(6, 0.5, 3, 2, 1, 0.01, log=True)
    assert float(b - a) == pytest.approx(math.log(2), rel=1e-15)
    with pytest.raises(ValueError):
        realization_bound_ub5(1.0, 0.5, 3, 2, 1, 0.01)


def test_ub5_at_operating_point_meets_target():
    rep = plan_block_length(PAPER_INPUT)
    log_E = -0.5 * 18 * (10 - 2 - 0.5) * mp.log(256)
    ub5 = realization_bound_ub5(log_C1=rep.log_C1, rho=0.5, q=256, m=18, mu=3, log_power_sum=log_E)
    assert ub5 < 1e-6
    assert float(mp.log(ub5)) == pytest.approx(float(rep.log_bound_at_m), rel=1e-12)


def test_ub7_clamp_and_two_paths():
    C1, rho, q, m, mu = 5.0, 0.5, 2, 4, 1
    # tiny power sum: the positive part is clamped
    assert float(realization_bound_ub7(C1, rho, q, m, mu, 1e-300)) == pytest.approx(math.log(C1) / (m * rho))
    # uniform, mu = n: direct float formula vs log-domain evaluation
    n = 2
    E = q ** (-rho * m * n)
    direct = math.log(C1) / (m * rho) + max(0.0, mu * math.log(q) + (1 + math.log(E)) / (m * rho))
    assert float(realization_bound_ub7(C1, rho, q, m, n, E)) == pytest.approx(
        math.log(C1) / (m * rho) + n * math.log(q) + (1 + math.log(E)) / (m * rho), rel=1e-12)
    assert float(realization_bound_ub7(C1, rho, q, m, mu, E)) == pytest.approx(direct, rel=1e-12)


def test_ub7_tie_goes_to_clamped_branch():
    # mu ln q + (1 + ln E)/(m rho) == 0 exactly
    q, m, rho, mu = math.e, 1, 1.0, 1
    val = realization_bound_ub7(2.0, rho, q, m, mu, log_power_sum=-2)
    assert float(val) == pytest.approx(math.log(2.0))


def test_ub7_converges_to_asymptotic_rate():
    q, n, mu, r, delta, rho, m = 256, 10, 8, 2, 0.5, 1.0, 10 ** 6
    C1 = 1.01
    log_E = -rho * m * (n - r - delta) * mp.log(q)
    ub7 = realization_bound_ub7(C1, rho, q, m, mu, log_power_sum=log_E)
    target = asymptotic_rate(q, n, mu, r, delta).clamped
    assert target == pytest.approx(2.772589, abs=1e-6)
    assert float(ub7) == pytest.approx(target, rel=1e-6)
    # the gap is exactly (1 + ln C1)/(m rho)
    assert float(ub7) - target == pytest.approx((1 + math.log(C1)) / (m * rho), rel=1e-6)


def test_grassmann_counts_and_bounds():
    assert grassmann_count(2, 2, 1).exact == 3
    assert grassmann_count(2, 3, 1).exact == 7
    for q in (2, 3, 4):
        for n in range(1, 6):
            assert grassmann_count(q, n, 0).exact == 1 == grassmann_count(q, n, n).exact
            for mu in range(n + 1):
                g = grassmann_count(q, n, mu)
                assert g.lower <= g.exact <= g.upper_product <= g.upper_power
                assert g.exact <= g.upper_uniform


@pytest.mark.parametrize("q", [2, 3])
def test_grassmann_matches_enumeration(q):
    F = gf(q)
    for n in range(1, 5):
        for mu in range(n + 1):
            assert grassmann_count(q, n, mu).exact == sum(1 for _ in enumerate_subspaces(F, n, n - mu))


def test_total_classes():
    tot = total_classes_bound(2, 2)
    assert tot.exact == 4 and float(tot.bound) == pytest.approx(2 * 2 ** 2.25)
    assert float(tot.bound) == pytest.approx(9.513, abs=1e-3)
    assert total_classes_bound(2, 3).exact == 15
    assert total_classes_bound(5, 1).exact == 1


def test_success_prob_examples():
    rep = plan_block_length(PAPER_INPUT)
    sp = success_prob(log_C1=rep.log_C1, T=5, n=10, q=256)
    assert sp.useful and float(1 - sp.value) == pytest.approx(1e-12, rel=1e-12)
    threshold = 2 * (2 ** 5 - 1) * 10 * mp.power(256, mp.mpf(121) / 4)
    assert abs(success_prob(threshold, 5, 10, 256).value) < mp.mpf(10) ** -30
    assert not success_prob(threshold / 2, 5, 10, 256).useful
    assert float(success_prob(mp.mpf(10) ** 500, 5, 10, 256).value) == pytest.approx(1.0)


def test_zero_condition_examples():
    assert zero_condition(10, 3, 2, 0.5)
    assert not zero_condition(10, 8, 2, 0.5)
    assert not zero_condition(4, 4, 0.5, 0.0)


def test_asymptotic_rate_sign():
    assert asymptotic_rate(256, 10, 3, 2, 0.5).raw < 0
    assert asymptotic_rate(256, 10, 3, 2, 0.5).clamped == 0
    assert asymptotic_rate(3, 5, 3, 2, 0.0).raw == 0


def test_planner_operating_point():
    rep = plan_block_length(PAPER_INPUT)
    assert float(rep.m_real) == pytest.approx(17.3373, abs=1e-3)
    assert rep.m == 18 and rep.precoder_dim == 180
    expected = mp.log(2 * 10 * 31) + mp.mpf(121) / 4 * mp.log(256) + 12 * mp.log(10)
    assert abs(rep.log_C1 / expected - 1) < 1e-12
    assert rep.log_bound_at_m < mp.log(1e-6)
    assert planner_log_bound(PAPER_INPUT, 17) >= mp.log(1e-6)


def _with(**kw):
    base = dict(q=256, n=10, T=5, mu=3, rates=(2,) * 5, delta_rho=0.5, rho=0.5, eps_leak=1e-6, eps_fail=1e-12)
    base.update(kw)
    return PlannerInput(**base)


def test_planner_monotonicity():
    ms = [plan_block_length(_with(eps_leak=e)).m for e in (1e-9, 1e-6, 1e-3, 1e-1)]
    assert ms == sorted(ms, reverse=True) and ms[0] > ms[-1]
    ms = [plan_block_length(_with(eps_fail=e)).m for e in (1e-15, 1e-12, 1e-6, 1e-2)]
    assert ms == sorted(ms, reverse=True)
    reals = [plan_block_length(_with(delta_rho=d)).m_real for d in (0.4, 0.5, 0.6)]
    assert reals[0] < reals[1] < reals[2]


def test_planner_rejects_bad_inputs():
    with pytest.raises(InfeasibleError):
        plan_block_length(_with(mu=8))
    for bad in (0.0, 1.0, 2.0):
        with pytest.raises(ValueError):
            _with(eps_leak=bad)
    with pytest.raises(ValueError):
        _with(rates=(3,) * 5)


def test_rho_grid_not_worse_than_default():
    assert plan_over_rho(PAPER_INPUT).m <= plan_block_length(PAPER_INPUT).m


def test_markov_fraction_below_inverse_C1():
    F = gf(2)
    sc = Scenario(F, 1, 2, 1, (1, 1))
    dists = [MessageDist.uniform(sc), MessageDist.from_weights(sc, [5, 1, 1, 1]),
             MessageDist.table(sc, {"00": "1/2", "11": "1/2"})]
    for d in dists:
        for rho in (0.25, 0.5, 1.0):
            for C1 in (2, 4, 8):
                for mu in (1, 2):
                    E = power_sum(d, [1], rho)
                    bound = float(realization_bound_ub5(C1, rho, 2, 1, mu, E))
                    for cls in enumerate_wiretap_classes(F, 2, mu):
                        bad = sum(exact_leakage(d, Precoder(sc, L), cls, [1]) > bound
                                  for L in enumerate_invertible(F, 2))
                        assert bad / 6 < 1 / C1


def test_average_leakage_below_average_bound():
    F = gf(2)
    sc = Scenario(F, 1, 3, 1, (1, 2))
    d = MessageDist.from_weights(sc, [3, 1, 1, 2, 1, 1, 4, 1])
    Ls = enumerate_invertible(F, 3)
    for rho in (0.25, 0.5, 1.0):
        E = power_sum(d, [1], rho)
        for mu in range(4):
            bound = avg_leak_bound(rho, 2, 1, mu, E)
            for cls in enumerate_wiretap_classes(F, 3, mu):
                avg = sum(exact_leakage(d, Precoder(sc, L), cls, [1]) for L in Ls) / len(Ls)
                assert avg <= float(bound)


# -- audit and search -------------------------------------------------------

def _tiny():
    F = gf(2)
    sc = Scenario(F, 1, 2, 2, (1, 1, 0))
    return sc, MessageDist.uniform(sc), Precoder(sc, Matrix(F, [[1, 1], [0, 1]]))


def test_audit_tiny_table():
    sc, d, pre = _tiny()
    rep = strong_security_audit(sc, d, pre, 0.0)
    assert len(rep.entries) == 5 * 3
    assert all(e.leakage == 0 for e in rep.entries if e.mu == 0)
    rank1_I1 = {tuple(map(tuple, e.kernel)): e.leakage for e in rep.entries if e.mu == 1 and e.I == (1,)}
    assert rank1_I1.pop(((1, 1),)) == pytest.approx(math.log(2))
    assert all(v == 0 for v in rank1_I1.values())
    full = [e for e in rep.entries if e.mu == 2 and e.I == (1, 2)][0]
    assert full.leakage == pytest.approx(entropy(d.marginal([1, 2])))
    assert rep.max_leakage == pytest.approx(2 * math.log(2))
    assert rep.eta_universal == 0.0
    assert rep.eta_single_symbol == -1


def test_audit_mu_zero_only_passes():
    sc, d, pre = _tiny()
    rep = strong_security_audit(sc, d, pre, 0.0, mus=[0])
    assert rep.passed and rep.max_leakage == 0 and rep.eta_universal is None


def test_audit_tolerance_path_agrees_with_exact():
    sc, d, pre = _tiny()
    exact = strong_security_audit(sc, d, pre, 0.0)
    tol = strong_security_audit(sc, d, pre, 1e-9)
    assert [e.secure for e in exact.entries] == [e.secure for e in tol.entries]


def test_qualification_rules():
    sc = Scenario(gf(4), 1, 3, 2, (1, 1, 1))
    assert universal_qualifies(sc, 1, (1,), 1.0)  # 0 < 2
    assert not universal_qualifies(sc, 2, (1, 2), 1.0)  # 1 < 1 fails
    assert single_symbol_qualifies(sc, 2, (1,), 1.0)  # 1 <= 1
    assert not single_symbol_qualifies(sc, 2, (1, 2), 1.0)  # 1 <= 0 fails


def test_every_precoder_leaks_a_symbol_at_m1():
    # a rank-1 wiretap whose row is the first row of the inverse precoder reads S_1
    F = gf(4)
    sc = Scenario(F, 1, 3, 2, (1, 1, 1))
    d = MessageDist.uniform(sc)
    for seed in range(20):
        pre = Precoder.random(sc, seed)
        cls = EavesdropClass(Matrix(F, pre.inverse.data[:1]))
        assert exact_leakage(d, pre, cls, [1]) == pytest.approx(math.log(4))


def test_search_infinite_tolerance_returns_first_draw():
    sc, d, _ = _tiny()
    res = search_precoder(sc, d, math.inf, 5, np.random.default_rng(1))
    assert res.draws == 1
    first = Precoder.random(sc, np.random.default_rng(1))
    assert res.precoder == first


def test_search_zero_budget_fails():
    sc, d, _ = _tiny()
    with pytest.raises(SearchExhaustedError):
        search_precoder(sc, d, 0.0, 0, 0)


def test_search_finds_precoder_for_attainable_requirement():
    # m = 2: a rank-1 wiretap sees two of four symbols, and a random precoder
    # hides S_1 from all three such classes about half the time
    F = gf(2)
    sc = Scenario(F, 2, 2, 1, (1, 3))
    d = MessageDist.uniform(sc)
    res = search_precoder(sc, d, 0.0, 100, 3, mus=[0, 1])
    assert res.report.passed
    for cls in enumerate_wiretap_classes(F, 2, 1):
        assert exact_leakage(d, res.precoder, cls, [1]) == 0.0
