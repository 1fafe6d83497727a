import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from pgtime import inverse as inv
from pgtime import specfun as sf
from pgtime.errors import DomainError
from pgtime.levy import CpgParams

ONE = inv.InvParams(1.0, 1.0, 1)
GRID3 = [(l, b, l1) for l in (0.5, 1.0, 2.0) for b in (0.5, 1.0, 2.0) for l1 in (0.3, 1.0, 2.5)]


def pois(p, l1):
    return inv.InvTcParams(p, l1)


def ski(p, l1, l2):
    return inv.InvTcParams(p, l1, l2, "skellam-i")


def skii(p, l1, l2):
    return inv.InvTcParams(p, l1, l2, "skellam-ii")


# -- parameters ----------------------------------------------------------------------------------

def test_params_validation():
    for bad in [dict(lambda_=0, beta=1), dict(lambda_=1, beta=-1), dict(lambda_=1, beta=1, n=0),
                dict(lambda_=1, beta=1, n=1.5), dict(lambda_=1, beta=1, n=True)]:
        with pytest.raises(DomainError):
            inv.InvParams(**bad)
    with pytest.raises(DomainError):
        inv.InvTcParams(ONE, 1.0, 1.0)
    with pytest.raises(DomainError):
        inv.InvTcParams(ONE, 1.0, None, "skellam-i")
    with pytest.raises(DomainError):
        inv.InvTcParams(ONE, 1.0, variant="other")
    assert inv.InvParams.of(CpgParams(2.0, 3.0, 0.5)) == inv.InvParams(2.0, 0.5, 3)
    with pytest.raises(DomainError):
        inv.InvParams.of(CpgParams(2.0, 2.5, 0.5))
    assert inv.InvParams(2.0, 0.5, 1).swapped() == inv.InvParams(0.5, 2.0, 1)


# -- Y(t), exponential jumps ----------------------------------------------------------------------

def test_y_density_examples():
    assert inv.y_density(inv.InvParams(2.0, 3.0), 0.7, 0.0) == pytest.approx(2 * math.exp(-1.4), rel=1e-15)
    assert inv.y_density(ONE, 1.0, 1.0) == pytest.approx(math.exp(-2) * 2.2795853023360673, rel=1e-14)
    assert inv.y_density(ONE, 1.0, 1.0) == pytest.approx(0.3085083, abs=1e-7)
    with pytest.raises(DomainError):
        inv.y_density(inv.InvParams(1, 1, 2), 1.0, 1.0)


def test_y_density_integrates_to_one():
    p = inv.InvParams(2.0, 0.5)
    assert oracles.quad_inf(lambda s: inv.y_density(p, s, 1.7)) == pytest.approx(1.0, abs=1e-8)


def test_y_laplace_examples():
    assert inv.y_laplace(ONE, 0.0, 3.0) == 1.0
    assert inv.y_laplace(ONE, 1.0, 1.0) == pytest.approx(0.5 * math.exp(-0.5), rel=1e-15)
    p = inv.InvParams(1.3, 0.6)
    q = oracles.quad_inf(lambda s: math.exp(-0.8 * s) * inv.y_density(p, s, 2.0))
    assert inv.y_laplace(p, 0.8, 2.0) == pytest.approx(q, rel=1e-7)
    with pytest.raises(DomainError):
        inv.y_laplace(ONE, -1.0, 1.0)


def test_y_moments_examples():
    mean, second, var, cov, renewal = inv.y_moments_cov(ONE, 1.0, 2.0)
    assert (mean, second, var, cov, renewal) == (2.0, 7.0, 3.0, 3.0, 2.0)
    p = inv.InvParams(2.5, 1.0)
    m0 = inv.y_moments_cov(p, 0.0)
    assert m0[0] == pytest.approx(1 / 2.5) and m0[2] == pytest.approx(1 / 2.5 ** 2)
    assert inv.y_moments_cov(ONE, 1.0, 2.0)[3] == inv.y_moments_cov(ONE, 2.0, 1.0)[3]


@pytest.mark.parametrize("lam,beta,t", [(1.0, 1.0, 1.0), (2.0, 0.5, 3.0), (0.4, 2.0, 0.3)])
def test_y_moments_vs_oracle(lam, beta, t):
    p = inv.InvParams(lam, beta)
    mean, second, var, _, _ = inv.y_moments_cov(p, t)
    assert mean == pytest.approx(oracles.yn_moment(lam, beta, 1, 1, t), rel=1e-12)
    assert second == pytest.approx(oracles.yn_moment(lam, beta, 1, 2, t), rel=1e-12)


# -- N1(Y(t)) ------------------------------------------------------------------------------------------

def test_ny_pmf_examples():
    p = pois(ONE, 1.0)
    assert inv.ny_pmf(p, 0, 1.0) == pytest.approx(0.5 * math.exp(-0.5), rel=1e-14)
    assert inv.ny_pmf(p, 0, 1.0) == pytest.approx(inv.y_laplace(ONE, 1.0, 1.0), rel=1e-12)
    assert inv.nyn_law(p, 1.0).total == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        inv.ny_pmf(p, -1, 1.0)


def test_ny_pmf_at_zero_time_is_geometric():
    lam, l1 = 2.0, 1.5
    p = pois(inv.InvParams(lam, 0.7), l1)
    for k in range(10):
        geo = lam * l1 ** k / (l1 + lam) ** (k + 1)
        assert inv.ny_pmf(p, k, 0.0) == pytest.approx(geo, rel=1e-14)
    assert inv.nyn_law(p, 0.0).total == pytest.approx(1.0, abs=1e-12)


@given(st.floats(0.1, 4), st.floats(0.1, 4), st.floats(0.1, 4), st.floats(0, 5))
def test_p0_duality(lam, beta, l1, t):
    p = inv.InvParams(lam, beta)
    assert inv.ny_pmf(pois(p, l1), 0, t) == pytest.approx(inv.y_laplace(p, l1, t), rel=1e-12)


def test_ny_laplace_moments_examples():
    p = pois(ONE, 1.0)
    lap, mean, var, cov = inv.ny_laplace_moments(p, 0.0, 1.0, 2.0)
    assert lap == 1.0 and mean == 2.0 and var == 5.0 and cov == 5.0
    with pytest.raises(DomainError):
        inv.ny_laplace_moments(p, -0.5, 1.0)


def test_ny_law_moments_match():
    p = pois(inv.InvParams(1.4, 0.8), 2.2)
    law = inv.nyn_law(p, 1.6)
    lap, mean, var, _ = inv.ny_laplace_moments(p, 0.4, 1.6)
    assert law.mean() == pytest.approx(mean, rel=1e-9)
    assert law.var() == pytest.approx(var, rel=1e-8)
    assert law.mgf(-0.4) == pytest.approx(lap, rel=1e-10)


# -- forward/inverse relations ---------------------------------------------------------------------------

def test_relation_examples():
    assert inv.forward_inverse_residual("eq3", 1, 1, 1, 0, 1) < 1e-8
    assert inv.forward_inverse_residual("eq1", 1, 2, 0.7, 2, 0.5) < 1e-6
    assert inv.forward_inverse_residual("eq2", 2, 1, 1, 1, 1) < 1e-6
    with pytest.raises(DomainError):
        inv.forward_inverse_residual("eq3", 1, 2, 1, 0, 1)
    with pytest.raises(DomainError):
        inv.forward_inverse_residual("eq4", 1, 1, 1, 0, 1)
    with pytest.raises(DomainError):
        inv.forward_inverse_residual("eq1", 1, 1, 1, 0, 0.0)


@pytest.mark.parametrize("lam,beta,l1", GRID3)
def test_relation_grid(lam, beta, l1):
    for t in (0.3, 1.0, 3.0):
        for k in (0, 3, 10):
            assert inv.forward_inverse_residual("eq1", lam, beta, l1, k, t) < 1e-6
            assert inv.forward_inverse_residual("eq2", lam, beta, l1, k, t) < 1e-6


def test_pki_recursion():
    assert inv.pki_from_pke(1.0, 1.0, 0, 1.0) == pytest.approx(0.5 * math.exp(-0.5), rel=1e-14)
    assert inv.pki_from_pke(1.3, 0.6, 0, 0.0) == pytest.approx(1.3 / 1.9, rel=1e-15)
    b, l1, t = 0.8, 1.7, 2.4
    assert inv.pki_from_pke(b, l1, 5, t) == pytest.approx(inv.ny_pmf(pois(inv.InvParams(b, b), l1), 5, t), abs=1e-10)
    with pytest.raises(DomainError):
        inv.pki_from_pke(1.0, 1.0, -1, 1.0)


# -- Skellam over Y ---------------------------------------------------------------------------------------

def test_sy_i_examples():
    p = ski(ONE, 2.0, 1.0)
    pk, mgf, mean, var, cov = inv.sy_i_pmf_mgf(p, 0, 1.0, 0.0)
    assert mgf == 1.0 and mean == 2.0
    assert var == pytest.approx(1 * 3 + 3 * 2) and cov == var
    sym = ski(inv.InvParams(1.2, 0.7), 0.9, 0.9)
    for k in range(1, 5):
        assert inv.syn_i_pk(sym, k, 1.3) == pytest.approx(inv.syn_i_pk(sym, -k, 1.3), rel=1e-12)
    with pytest.raises(DomainError):
        inv.sy_i_pmf_mgf(p, 0, 1.0, 5.0)


def test_sy_ii_examples():
    p = skii(ONE, 1.0, 1.0)
    assert inv.sy_ii_pmf_mgf_cov(p, 0, 1.0, 0.0, 1.0)[2] == pytest.approx(10.0)
    q = skii(inv.InvParams(1.1, 0.6), 1.5, 0.5)
    for k in range(-3, 4):
        assert inv.syn_ii_pk(q, k, 0.9) == pytest.approx(inv.syn_ii_pk(q.reflected(), -k, 0.9), rel=1e-14)
    assert inv.syn_ii_law(q, 0.9).total == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(DomainError):
        inv.syn_ii_pmf_mgf(p, 0, 1.0, 2.0)


# -- Y^(n), Erlang jumps ----------------------------------------------------------------------------------

def test_yn_density_reduces():
    p = inv.InvParams(1.3, 0.9, 1)
    for s in (0.1, 1.0, 4.0):
        assert inv.yn_density(p, s, 1.2) == pytest.approx(inv.y_density(p, s, 1.2), rel=1e-13)
    p3 = inv.InvParams(2.0, 1.0, 3)
    assert inv.yn_density(p3, 0.6, 0.0) == pytest.approx(2.0 * math.exp(-1.2), rel=1e-14)


@pytest.mark.parametrize("n,lam,beta,t", [(2, 1.0, 1.0, 1.0), (3, 1.0, 2.0, 1.0), (4, 0.6, 1.5, 2.5)])
def test_yn_density_vs_oracle(n, lam, beta, t):
    p = inv.InvParams(lam, beta, n)
    for s in (0.05, 0.7, 2.0, 6.0):
        assert inv.yn_density(p, s, t) == pytest.approx(oracles.yn_density(lam, beta, n, s, t), rel=1e-11)
    assert oracles.quad_inf(lambda s: inv.yn_density(p, s, t)) == pytest.approx(1.0, abs=1e-8)


def test_yn_laplace_examples():
    for n in (1, 2, 3):
        assert inv.yn_laplace(inv.InvParams(1.0, 0.8, n), 0.0, 1.7) == pytest.approx(1.0, rel=1e-14)
    p1 = inv.InvParams(1.4, 0.6, 1)
    assert inv.yn_laplace(p1, 0.9, 2.0) == pytest.approx(inv.y_laplace(p1, 0.9, 2.0), rel=1e-13)
    p2 = inv.InvParams(1.0, 1.0, 2)
    ref = math.exp(-1) * 0.5 * (sf.ml2(2, 1, 0.5) + sf.ml2(2, 2, 0.5))
    assert inv.yn_laplace(p2, 1.0, 1.0) == pytest.approx(ref, rel=1e-14)
    q = oracles.quad_inf(lambda s: math.exp(-s) * inv.yn_density(p2, s, 1.0))
    assert inv.yn_laplace(p2, 1.0, 1.0) == pytest.approx(q, rel=1e-8)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_yn_laplace_vs_oracle(n):
    p = inv.InvParams(1.2, 0.8, n)
    for th in (0.2, 1.0, 3.0):
        assert inv.yn_laplace(p, th, 2.2) == pytest.approx(oracles.yn_laplace(1.2, 0.8, n, th, 2.2), rel=1e-12)


def test_yn_moments_examples():
    p = inv.InvParams(2.0, 1.0, 3)
    assert inv.yn_moments(p, 1, 0.0) == pytest.approx(0.5, rel=1e-15)
    assert inv.yn_moments(ONE, 1, 1.0) == pytest.approx(2.0, rel=1e-14)
    assert inv.yn_moments(ONE, 2, 1.0) == pytest.approx(7.0, rel=1e-14)
    m = inv.yn_moments(inv.InvParams(1.0, 1.0, 2), 1, 100.0)
    assert m == pytest.approx(50.75, rel=1e-2)
    with pytest.raises(DomainError):
        inv.yn_moments(ONE, 0, 1.0)


@pytest.mark.parametrize("n,lam,beta", [(1, 1.0, 1.0), (2, 0.5, 2.0), (3, 1.7, 0.4), (4, 1.0, 1.0)])
def test_yn_moments_forms(n, lam, beta):
    p = inv.InvParams(lam, beta, n)
    for t in (0.0, 0.4, 2.0, 15.0):
        m1 = inv.yn_moments(p, 1, t)
        assert m1 == pytest.approx(oracles.yn_moment(lam, beta, n, 1, t), rel=1e-12)
        assert inv.yn_moments(p, 2, t) == pytest.approx(oracles.yn_moment(lam, beta, n, 2, t), rel=1e-12)
        assert inv.yn_mean_alt(p, t) == pytest.approx(m1, rel=1e-9)
    # the mean approaches its line from one side, with gap decaying
    far = inv.yn_moments(p, 1, 60.0)
    assert far == pytest.approx(inv.yn_mean_asymptote(p, 60.0), rel=1e-9)


def test_yn_mean_alt_other_coefficient_differs():
    p = inv.InvParams(1.0, 1.0, 2)
    good = inv.yn_moments(p, 1, 1.0)
    assert abs(inv.yn_mean_alt(p, 1.0, coef="n+k-1") / good - 1) > 0.1
    with pytest.raises(DomainError):
        inv.yn_mean_alt(p, 1.0, coef="bogus")


@given(st.integers(1, 4), st.floats(0.2, 3), st.floats(0.2, 3), st.floats(0, 20), st.floats(0.01, 5))
def test_yn_mean_monotone(n, lam, beta, t, dt):
    p = inv.InvParams(lam, beta, n)
    assert inv.yn_moments(p, 1, t + dt) > inv.yn_moments(p, 1, t)


# -- N1(Y^(n)) and Skellam over Y^(n) ---------------------------------------------------------------------

@pytest.mark.parametrize("n,lam,beta,l1,t", [(1, 1.0, 1.0, 1.0, 1.0), (2, 1.0, 1.0, 1.0, 1.0),
                                              (3, 0.7, 1.8, 2.0, 2.0), (2, 2.0, 0.5, 0.4, 0.3)])
def test_nyn_vs_oracle(n, lam, beta, l1, t):
    p = pois(inv.InvParams(lam, beta, n), l1)
    for k in range(0, 20):
        assert inv.nyn_pk(p, k, t) == pytest.approx(oracles.nyn_pk(lam, beta, n, l1, k, t), rel=1e-11)


def test_nyn_examples():
    p2 = pois(inv.InvParams(1.0, 1.0, 2), 1.0)
    assert inv.nyn_law(p2, 1.0).total == pytest.approx(1.0, abs=1e-8)
    pk, lap, mean, second = inv.nyn_pmf_laplace(pois(inv.InvParams(1.0, 1.0, 2), 1.0), 0, 100.0)
    assert mean == pytest.approx(50.75, rel=1e-2)
    assert lap == 1.0
    p1 = pois(inv.InvParams(1.3, 0.5, 1), 0.8)
    for k in range(6):
        assert inv.nyn_pk(p1, k, 2.0) == inv.ny_pmf(p1, k, 2.0)


def test_nyn_second_moment_matches_table():
    p = pois(inv.InvParams(1.2, 0.9, 3), 1.4)
    law = inv.nyn_law(p, 1.5)
    _, lap, mean, second = inv.nyn_pmf_laplace(p, 0, 1.5, 0.3)
    assert law.mean() == pytest.approx(mean, rel=1e-9)
    assert float(np.dot(law.ks ** 2, law.probs)) == pytest.approx(second, rel=1e-9)
    assert law.mgf(-0.3) == pytest.approx(lap, rel=1e-10)


@pytest.mark.parametrize("n,lam,beta,l1,l2,t", [(1, 1.0, 1.0, 1.0, 1.0, 1.0), (2, 1.0, 1.0, 1.0, 1.0, 1.0),
                                                 (3, 0.8, 1.5, 2.0, 0.5, 1.3)])
def test_syn_i_vs_oracle(n, lam, beta, l1, l2, t):
    p = ski(inv.InvParams(lam, beta, n), l1, l2)
    table = inv.syn_i_table(p, t, -6, 6)
    for i, k in enumerate(range(-6, 7)):
        ref = oracles.syn_i_pk(lam, beta, n, l1, l2, k, t)
        assert inv.syn_i_pk(p, k, t) == pytest.approx(ref, rel=1e-8)
        assert table[i] == pytest.approx(ref, rel=1e-8, abs=1e-14)


def test_syn_i_examples():
    p1 = ski(inv.InvParams(1.2, 0.7, 1), 1.5, 0.4)
    pk, mgf = inv.syn_i_pmf_mgf(p1, 1, 0.8, 0.3)
    ref = inv.sy_i_pmf_mgf(p1, 1, 0.8, 0.3)
    assert pk == ref[0] and mgf == pytest.approx(ref[1], rel=1e-13)
    assert inv.syn_i_pmf_mgf(ski(inv.InvParams(1, 1, 2), 1, 1), 0, 1.0, 0.0)[1] == pytest.approx(1.0, rel=1e-14)


def test_syn_ii_examples():
    p = skii(inv.InvParams(1.0, 1.0, 2), 1.5, 0.5)
    law = inv.syn_ii_law(p, 0.8)
    assert law.total == pytest.approx(1.0, abs=1e-6)
    mean, var = inv.syn_ii_moments(p, 0.8)
    assert law.mean() == pytest.approx(mean, rel=1e-8)
    assert law.var() == pytest.approx(var, rel=1e-8)
    q = skii(inv.InvParams(0.9, 1.4, 1), 0.6, 1.1)
    assert inv.syn_ii_pmf_mgf(q, 2, 1.0, 0.2) == pytest.approx(inv.sy_ii_pmf_mgf_cov(q, 2, 1.0, 0.2)[:2], rel=1e-15)
    for k in range(-3, 4):
        assert inv.syn_ii_pk(p, k, 0.8) == pytest.approx(inv.syn_ii_pk(p.reflected(), -k, 0.8), rel=1e-14)


@settings(max_examples=10)
@given(st.integers(1, 3), st.floats(0.3, 3), st.floats(0.3, 3), st.floats(0.3, 3), st.floats(0.05, 3))
def test_nyn_normalization(n, lam, beta, l1, t):
    law = inv.nyn_law(pois(inv.InvParams(lam, beta, n), l1), t)
    assert 1 - 1e-8 <= law.total + law.tail_bound and law.total <= 1 + 1e-12


# -- double Laplace ------------------------------------------------------------------------------------

def test_double_laplace_examples():
    lhs, rhs, gap = inv.yn_double_laplace_check(ONE, 1.0, 1.0)
    assert rhs == pytest.approx(1 / 3, rel=1e-15) and gap < 1e-6
    assert inv.yn_double_laplace_check(inv.InvParams(1.0, 0.5, 2), 2.0, 1.0)[2] < 1e-6
    lhs, rhs, gap = inv.yn_double_laplace_check(inv.InvParams(1.0, 0.5, 2), 1e-9, 2.0)
    assert rhs == pytest.approx(0.5, rel=1e-6) and gap < 1e-6
    with pytest.raises(DomainError):
        inv.yn_double_laplace_check(ONE, 0.0, 1.0)


@pytest.mark.parametrize("n,lam,beta", [(1, 2.0, 0.7), (2, 0.8, 1.5), (3, 1.0, 1.0)])
def test_double_laplace_grid(n, lam, beta):
    p = inv.InvParams(lam, beta, n)
    for v, u in [(0.3, 0.5), (1.0, 2.0), (4.0, 1.0)]:
        assert inv.yn_double_laplace_check(p, v, u)[2] < 1e-6
