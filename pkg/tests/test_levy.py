import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

import oracles
from pgtime.errors import DomainError
from pgtime.levy import (CpgParams, MixedLaw, Pmf, SkellamParams, TailRule, cpg_laplace_exponent,
                         cpg_levy_density, cpg_log_mgf, cpg_transition_law, en_bessel_density,
                         poisson_law, skellam_exponents, skellam_law, skellam_pmf, tabulate)

UNIT = CpgParams(1.0, 1.0, 1.0)


# -- parameters ---------------------------------------------------------------------------

@pytest.mark.parametrize("bad", [0.0, -1.0, float("nan"), float("inf"), "1"])
def test_params_reject(bad):
    with pytest.raises(DomainError):
        CpgParams(bad, 1.0, 1.0)
    with pytest.raises(DomainError):
        SkellamParams(1.0, bad)


def test_tilde_constructor():
    p = CpgParams.tilde(0.25)
    assert (p.lambda_, p.alpha, p.beta) == (4.0, 1.0, 4.0)
    assert p.is_exponential and p.is_erlang(1)
    assert cpg_laplace_exponent(p, 2.0) == pytest.approx(2.0 / (1 + 0.25 * 2.0), rel=1e-15)


def test_swap_needs_exponential():
    assert CpgParams(2.0, 1.0, 3.0).swapped() == CpgParams(3.0, 1.0, 2.0)
    with pytest.raises(DomainError):
        CpgParams(2.0, 1.5, 3.0).swapped()


# -- Laplace exponent -----------------------------------------------------------------------

def test_laplace_exponent_values():
    assert cpg_laplace_exponent(UNIT, 0.0) == 0.0
    assert cpg_laplace_exponent(UNIT, 1.0) == pytest.approx(0.5, rel=1e-15)
    assert cpg_laplace_exponent(CpgParams(2.0, 3.0, 0.5), 1e8) == pytest.approx(2.0, rel=1e-12)
    assert cpg_laplace_exponent(UNIT, math.inf) == 1.0
    with pytest.raises(DomainError):
        cpg_laplace_exponent(UNIT, -0.1)


@given(st.floats(0.01, 5), st.floats(0.01, 5), st.floats(0, 50))
def test_tilde_family_composes_additively(a1, a2, u):
    # f_{a1} after f_{a2} is f_{a1+a2}
    inner = cpg_laplace_exponent(CpgParams.tilde(a2), u)
    outer = cpg_laplace_exponent(CpgParams.tilde(a1), inner)
    assert outer == pytest.approx(cpg_laplace_exponent(CpgParams.tilde(a1 + a2), u), rel=1e-12, abs=1e-300)


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0, 20), st.floats(0.01, 3))
def test_laplace_exponent_bernstein_shape(lam, alpha, beta, u, du):
    p = CpgParams(lam, alpha, beta)
    f0, f1 = cpg_laplace_exponent(p, u), cpg_laplace_exponent(p, u + du)
    assert 0 <= f0 <= f1 <= lam * (1 + 1e-15)


def test_log_mgf_domain_and_continuation():
    p = CpgParams(1.5, 2.0, 3.0)
    assert cpg_log_mgf(p, -0.7, 2.0) == pytest.approx(-2.0 * cpg_laplace_exponent(p, 0.7), rel=1e-14)
    with pytest.raises(DomainError):
        cpg_log_mgf(p, 3.0, 1.0)


# -- Levy density -----------------------------------------------------------------------------

def test_levy_density_example():
    assert cpg_levy_density(UNIT, 1.0) == pytest.approx(math.exp(-1.0), rel=1e-15)
    p = CpgParams(2.0, 3.0, 0.5)
    assert cpg_levy_density(p, 2.0) == pytest.approx(2.0 * 0.125 * 4.0 * math.exp(-1.0) / 2.0, rel=1e-14)
    with pytest.raises(DomainError):
        cpg_levy_density(UNIT, 0.0)


@pytest.mark.parametrize("lam,alpha,beta", [(1.0, 1.0, 1.0), (2.0, 0.5, 3.0), (0.3, 4.0, 0.7)])
def test_levy_density_total_is_jump_rate(lam, alpha, beta):
    p = CpgParams(lam, alpha, beta)
    assert oracles.quad_inf(lambda u: cpg_levy_density(p, u) if u > 0 else 0.0) == pytest.approx(lam, rel=1e-9)


@pytest.mark.parametrize("lam,alpha,beta", [(1.0, 1.0, 1.0), (2.0, 0.5, 3.0)])
def test_levy_khintchine(lam, alpha, beta):
    p = CpgParams(lam, alpha, beta)
    for u in (0.5, 2.0):
        integral = oracles.quad_inf(lambda x: (-math.expm1(-u * x)) * cpg_levy_density(p, x) if x > 0 else 0.0)
        assert integral == pytest.approx(cpg_laplace_exponent(p, u), rel=1e-9)


# -- transition law -----------------------------------------------------------------------------

def test_transition_at_zero_time():
    law = cpg_transition_law(UNIT, 0.0)
    assert law.atom0 == 1.0 and law.density(1.0) == 0.0
    with pytest.raises(DomainError):
        cpg_transition_law(UNIT, -1.0)


def test_transition_density_example():
    law = cpg_transition_law(UNIT, 1.0)
    assert law.atom0 == pytest.approx(math.exp(-1.0), rel=1e-15)
    expected = math.exp(-2.0) * oracles.bessel_i(1, 2.0)
    assert law.density(1.0) == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(0.215269, abs=1e-6)


def test_bessel_form_agrees():
    p = CpgParams(1.7, 1.0, 0.6)
    law = cpg_transition_law(p, 2.3)
    for s in (0.01, 0.5, 3.0, 20.0):
        assert law.density(s) == pytest.approx(en_bessel_density(p, 2.3, s), rel=1e-12)
    with pytest.raises(DomainError):
        en_bessel_density(CpgParams(1.0, 2.0, 1.0), 1.0, 1.0)


@pytest.mark.parametrize("lam,alpha,beta,t", [(1.0, 2.5, 0.8, 1.3), (3.0, 0.4, 2.0, 2.0),
                                              (0.5, 1.0, 1.0, 0.2), (2.0, 6.0, 5.0, 4.0)])
def test_transition_mass_and_oracle(lam, alpha, beta, t):
    p = CpgParams(lam, alpha, beta)
    law = cpg_transition_law(p, t)
    assert law.total_mass() == pytest.approx(1.0, abs=1e-9)
    for s in (0.05, 1.0, 4.0):
        assert law.density(s) == pytest.approx(oracles.cpg_density(lam, alpha, beta, t, s), rel=1e-11)


@pytest.mark.parametrize("params", [(1.0, 1.0, 1.0), (2.0, 0.5, 3.0), (0.7, 3.0, 1.5)])
def test_transition_laplace_matches_exponent(params):
    p = CpgParams(*params)
    for t in (0.5, 1.0, 3.0):
        law = cpg_transition_law(p, t)
        for u in (0.2, 1.0, 4.0):
            assert law.laplace(u) == pytest.approx(math.exp(-t * cpg_laplace_exponent(p, u)), rel=1e-9)


def test_cdf_grid_monotone_to_one():
    law = cpg_transition_law(CpgParams(1.0, 2.0, 1.0), 2.0)
    cdf = law.cdf_grid([0.5, 1.0, 5.0, 60.0])
    assert cdf[0] > law.atom0
    assert np.all(np.diff(cdf) > 0)
    assert cdf[-1] == pytest.approx(1.0, abs=1e-10)


def test_mixed_law_validates_atom():
    with pytest.raises(DomainError):
        MixedLaw(1.5, lambda s: 0.0)


# -- Skellam ---------------------------------------------------------------------------------------

def test_skellam_examples():
    p = SkellamParams(1.0, 1.0)
    assert skellam_pmf(p, 0, 1.0) == pytest.approx(math.exp(-2.0) * 2.2795853023360673, rel=1e-14)
    assert skellam_pmf(p, 3, 0.0) == 0.0
    assert skellam_pmf(p, 0, 0.0) == 1.0


@pytest.mark.parametrize("l1,l2,t", [(1.0, 2.0, 1.0), (0.3, 4.0, 2.5), (5.0, 5.0, 10.0)])
def test_skellam_vs_scipy(l1, l2, t):
    p = SkellamParams(l1, l2)
    for k in range(-15, 16):
        ref = stats.skellam.pmf(k, l1 * t, l2 * t)
        assert skellam_pmf(p, k, t) == pytest.approx(ref, rel=1e-10, abs=1e-300)


@given(st.floats(0.05, 5), st.floats(0.05, 5), st.floats(0.01, 5), st.integers(-20, 20))
def test_skellam_reflection(l1, l2, t, k):
    p = SkellamParams(l1, l2)
    assert skellam_pmf(p, k, t) == pytest.approx(skellam_pmf(p.reflected(), -k, t), rel=1e-13)


def test_skellam_exponents_mgf():
    p = SkellamParams(1.0, 1.0)
    f, mgf = skellam_exponents(p, 1.0)
    assert mgf(1.0) == pytest.approx(math.exp(math.e + 1 / math.e - 2), rel=1e-15)
    assert mgf(1.0) == pytest.approx(2.9628785, abs=1e-6)
    assert f == pytest.approx(-math.log(mgf(1.0)), rel=1e-14)


def test_skellam_mean_by_finite_difference():
    p = SkellamParams(2.5, 1.0)
    h = 1e-5
    d = (skellam_exponents(p, h)[1](2.0) - skellam_exponents(p, -h)[1](2.0)) / (2 * h)
    assert d == pytest.approx(2.0 * p.mean1, rel=1e-8)


@given(st.floats(0.05, 8), st.floats(0.05, 8), st.floats(0.05, 5))
def test_skellam_law_normalized_and_moments(l1, l2, t):
    p = SkellamParams(l1, l2)
    law = skellam_law(p, t)
    assert abs(law.total - 1.0) <= 1e-10
    assert law.tail_bound <= 1e-12
    assert law.mean() == pytest.approx(t * p.mean1, abs=1e-8)
    assert law.var() == pytest.approx(t * p.var1, rel=1e-8)


# -- tail rule and tables --------------------------------------------------------------------------

def test_tail_rule_clips_to_half_domain():
    rule = TailRule.for_domain(lambda th: 0.0, theta_sup=0.4, theta_inf=-3.0, two_sided=True)
    assert rule.theta_up == pytest.approx(0.2)
    assert rule.theta_down == -1.0
    one_sided = TailRule.for_domain(lambda th: 0.0)
    assert one_sided.theta_up == 1.0 and one_sided.theta_down is None
    assert one_sided.lower(-1) == 0.0


@given(st.floats(0.1, 30))
def test_poisson_tail_covers_mass(rate):
    law = poisson_law(rate)
    assert law.tail_bound <= 1e-12
    missing = 1.0 - law.total
    assert missing <= law.tail_bound + 1e-14


def test_tabulate_explicit_range_and_table_route():
    rule = TailRule.for_domain(lambda th: 2.0 * math.expm1(th))
    a = tabulate(lambda k: stats.poisson.pmf(k, 2.0), rule, k_min=0, k_max=5)
    b = tabulate(None, rule, k_min=0, k_max=5, table=lambda lo, hi: stats.poisson.pmf(np.arange(lo, hi + 1), 2.0))
    assert a.k_max == 5 and np.allclose(a.probs, b.probs, rtol=0, atol=0)
    assert a.tail_bound > 0
    with pytest.raises(DomainError):
        tabulate(lambda k: 0.0, rule, k_min=3, k_max=2)


def test_pmf_container():
    p = Pmf(-1, [0.25, 0.5, 0.25])
    assert p[0] == 0.5 and p[5] == 0.0 and p.k_max == 1
    assert p.mean() == 0.0 and p.var() == 0.5
    assert p.mgf(0.0) == 1.0
    with pytest.raises(DomainError):
        Pmf(0, [0.5, -0.2])
    with pytest.raises(DomainError):
        Pmf(0, [])
