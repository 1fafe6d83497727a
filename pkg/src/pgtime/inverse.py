"""
First-passage (inverse) processes of compound Poisson-exponential and
Poisson-Erlang subordinators, and Poisson / Skellam processes run on them.

``Y(t) = inf{u : G_N(u) > t}``.  With jump shape ``n`` (Erlang jumps, n = 1 is
exponential) Y(t) has a density and no atom:

    q(s, t) = lam e^{-beta t - lam s} sum_{k=1..n} (beta t)^{k-1} Phi(n, k, lam s (beta t)^n)

Everything below is built from that density, its Laplace transform
(Mittag-Leffler sums) and the Poisson mixture identity
int e^{-(l1+lam) s} s^k ... ds, which turns Wright series into
three-parameter Mittag-Leffler series.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special

from .errors import ConvergenceFailure, DomainError
from .integrate import integrate_to_infinity, integrate_vec_to_infinity
from .levy import CpgParams, Pmf, SkellamParams, TailRule, skellam_bernstein, tabulate, TAIL_EPS
from .specfun import DEFAULT_CONTROL, SeriesControl, log_bessel_i, log_ml2, log_ml3, log_wright_phi
from .timechange import QUAD_REL_TOL, TcPoissonParams, ngn_pk, skellam_theta_domain, _fd_step

VARIANTS = ("poisson", "skellam-i", "skellam-ii")


@dataclass(frozen=True)
class InvParams:
    """Inverse of the compound Poisson process with rate ``lambda_`` and
    Erlang(n, beta) jumps."""

    lambda_: float
    beta: float
    n: int = 1

    def __post_init__(self):
        for name in ("lambda_", "beta"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be positive and finite, got {v}")
            object.__setattr__(self, name, float(v))
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @classmethod
    def of(cls, sub: CpgParams) -> "InvParams":
        """Inverse of an Erlang-jump subordinator."""
        if not sub.is_erlang():
            raise DomainError("analytic inverse needs an integer jump shape alpha")
        return cls(sub.lambda_, sub.beta, int(sub.alpha))

    def forward(self) -> CpgParams:
        return CpgParams(self.lambda_, float(self.n), self.beta)

    def swapped(self) -> "InvParams":
        """Exchange the Poisson rate and the jump rate (exponential jumps only)."""
        if self.n != 1:
            raise DomainError("parameter swap is defined for exponential jumps")
        return InvParams(self.beta, self.lambda_, 1)


@dataclass(frozen=True)
class InvTcParams:
    inv: InvParams
    lambda1: float
    lambda2: Optional[float] = None
    variant: str = "poisson"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DomainError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if not (math.isfinite(self.lambda1) and self.lambda1 > 0):
            raise DomainError(f"lambda1 must be positive, got {self.lambda1}")
        skellam = self.variant != "poisson"
        if skellam != (self.lambda2 is not None):
            raise DomainError("lambda2 is required for Skellam variants and only for them")
        if skellam and not (math.isfinite(self.lambda2) and self.lambda2 > 0):
            raise DomainError(f"lambda2 must be positive, got {self.lambda2}")

    @property
    def sk(self) -> SkellamParams:
        return SkellamParams(self.lambda1, self.lambda2)

    def reflected(self) -> "InvTcParams":
        return InvTcParams(self.inv, self.lambda2, self.lambda1, self.variant)

    def one_sided(self, which: int = 1) -> "InvTcParams":
        return InvTcParams(self.inv, self.lambda1 if which == 1 else self.lambda2)


def _need(p: InvTcParams, variant: str):
    if p.variant != variant:
        raise DomainError(f"expected a {variant!r} model, got {p.variant!r}")


def _check_time(t):
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")


def _logsumexp(xs) -> float:
    xs = [x for x in xs if x != -math.inf]
    if not xs:
        return -math.inf
    m = max(xs)
    return m + math.log(math.fsum(math.exp(x - m) for x in xs))


def _log_ml_sum(gamma: float, n: int, bt: float, z: float, ctl: SeriesControl) -> float:
    """log sum_{m=1..n} bt^{m-1} E^gamma_{n,m}(z)."""
    if bt == 0:
        return 0.0   # only m = 1 survives and E^gamma_{n,1}(0) = 1
    log_bt = math.log(bt)
    if gamma == 1:
        return _logsumexp((m - 1) * log_bt + log_ml2(n, m, z, ctl) for m in range(1, n + 1))
    return _logsumexp((m - 1) * log_bt + log_ml3(gamma, n, m, z, ctl) for m in range(1, n + 1))


# ---------------------------------------------------------------------------
# Y(t), Y^(n)(t)
# ---------------------------------------------------------------------------

def yn_log_density(p: InvParams, s: float, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    if s < 0 or t < 0:
        raise DomainError("density needs s >= 0 and t >= 0")
    lam, bt, n = p.lambda_, p.beta * t, p.n
    head = math.log(lam) - bt - lam * s
    if bt == 0:
        return head
    if s == 0:
        # Phi(n, m, 0) = 1/Gamma(m)
        return head + _logsumexp((m - 1) * math.log(bt) - math.lgamma(m) for m in range(1, n + 1))
    x = lam * s * bt ** n
    log_bt = math.log(bt)
    return head + _logsumexp((m - 1) * log_bt + log_wright_phi(n, m, x, ctl) for m in range(1, n + 1))


def yn_density(p: InvParams, s: float, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Density of Y^(n)(t) at s."""
    return math.exp(yn_log_density(p, s, t, ctl))


def y_density(p: InvParams, s: float, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """lam e^{-lam s - beta t} I_0(2 sqrt(lam beta s t)), the exponential-jump case."""
    if p.n != 1:
        raise DomainError("y_density is the n = 1 case; use yn_density")
    if s < 0 or t < 0:
        raise DomainError("density needs s >= 0 and t >= 0")
    lam = p.lambda_
    arg = 2.0 * math.sqrt(lam * p.beta * s * t)
    return math.exp(math.log(lam) - lam * s - p.beta * t + log_bessel_i(0, arg, ctl))


def _yn_log_laplace(p: InvParams, v: float, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """log E e^{-v Y^(n)(t)} for any v > -lambda (v < 0 gives the MGF)."""
    lam = p.lambda_
    if not lam + v > 0:
        raise DomainError(f"transform diverges: lambda + v = {lam + v:.6g} <= 0")
    bt = p.beta * t
    w = lam * bt ** p.n / (lam + v)
    return -bt + math.log(lam / (lam + v)) + _log_ml_sum(1, p.n, bt, w, ctl)


def yn_laplace(p: InvParams, theta: float, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """E exp(-theta Y^(n)(t)) = e^{-bt} lam/(lam+theta) sum_k (bt)^{k-1} E_{n,k}(lam (bt)^n/(lam+theta))."""
    if not theta >= 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    _check_time(t)
    return math.exp(_yn_log_laplace(p, theta, t, ctl))


def y_laplace(p: InvParams, theta: float, t: float) -> float:
    """(lam/(theta+lam)) exp(-beta theta t/(theta+lam))."""
    if p.n != 1:
        raise DomainError("y_laplace is the n = 1 case; use yn_laplace")
    if not theta >= 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    _check_time(t)
    lam = p.lambda_
    return lam / (theta + lam) * math.exp(-p.beta * theta * t / (theta + lam))


def y_moments_cov(p: InvParams, t: float, s: Optional[float] = None):
    """(mean, second moment, variance, Cov(Y(t), Y(s)), renewal function U(t)).

    ``s`` defaults to ``t`` so that the covariance is the variance.
    """
    if p.n != 1:
        raise DomainError("closed-form moments are for n = 1; use yn_moments")
    _check_time(t)
    if s is None:
        s = t
    lam, bt = p.lambda_, p.beta * t
    mean = (bt + 1) / lam
    second = (bt * bt + 4 * bt + 2) / lam ** 2
    var = (2 * bt + 1) / lam ** 2
    cov = (2 * p.beta * min(t, s) + 1) / lam ** 2
    return mean, second, var, cov, mean


def yn_moments(p: InvParams, order: int, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """E[Y^(n)(t)^order] = e^{-bt} order!/lam^order sum_k (bt)^{k-1} E^{order+1}_{n,k}((bt)^n)."""
    if int(order) != order or order < 1:
        raise DomainError(f"order must be an integer >= 1, got {order}")
    _check_time(t)
    order = int(order)
    bt = p.beta * t
    log_val = (-bt + math.lgamma(order + 1) - order * math.log(p.lambda_)
               + _log_ml_sum(order + 1, p.n, bt, bt ** p.n, ctl))
    return math.exp(log_val)


def yn_mean_alt(p: InvParams, t: float, coef: str = "n-k+1",
                ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """Mean of Y^(n)(t) as a linear term plus a Mittag-Leffler correction:

        bt/(n lam) + e^{-bt}/(n lam) sum_k c_k (bt)^{k-1} E_{n,k}((bt)^n)

    with c_k = n - k + 1.  ``coef="n+k-1"`` gives the other coefficient that
    circulates for this identity; it is kept only so the two can be compared
    (it does not reproduce the mean for n >= 2).
    """
    _check_time(t)
    n, lam, bt = p.n, p.lambda_, p.beta * t
    if coef == "n-k+1":
        c = [n - k + 1 for k in range(1, n + 1)]
    elif coef == "n+k-1":
        c = [n + k - 1 for k in range(1, n + 1)]
    else:
        raise DomainError(f"unknown coefficient variant {coef!r}")
    if bt == 0:
        return c[0] / (n * lam)
    z = bt ** n
    log_bt = math.log(bt)
    log_corr = _logsumexp(math.log(c[k - 1]) + (k - 1) * log_bt + log_ml2(n, k, z, ctl) - bt
                          for k in range(1, n + 1))
    return bt / (n * lam) + math.exp(log_corr) / (n * lam)


def yn_mean_asymptote(p: InvParams, t: float) -> float:
    """Large-t line of the mean: bt/(n lam) + (n+1)/(2 n lam)."""
    n, lam = p.n, p.lambda_
    return p.beta * t / (n * lam) + (n + 1) / (2 * n * lam)


def yn_double_laplace_check(p: InvParams, v: float, u: float, rel_tol: float = 1e-10):
    """Compare int_0^inf e^{-ut} E e^{-v Y^(n)(t)} dt (quadrature) with the
    rational closed form lam((b+u)^n - b^n) / (u ((lam+v)(b+u)^n - lam b^n)).

    Returns (lhs, rhs, rel_gap).
    """
    if not (v > 0 and u > 0):
        raise DomainError("v and u must be positive")
    lam, b, n = p.lambda_, p.beta, p.n
    lhs = integrate_to_infinity(lambda t: math.exp(-u * t + _yn_log_laplace(p, v, t)),
                                scale=max(1.0 / u, n / b), rel_tol=rel_tol)
    bu = (b + u) ** n
    rhs = lam * (bu - b ** n) / (u * ((lam + v) * bu - lam * b ** n))
    return lhs, rhs, abs(lhs - rhs) / abs(rhs)


# ---------------------------------------------------------------------------
# N1(Y^(n)(t))
# ---------------------------------------------------------------------------

def nyn_log_pk(p: InvTcParams, k: int, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """log of e^{-bt} lam l1^k/(l1+lam)^{k+1} sum_m (bt)^{m-1} E^{k+1}_{n,m}(lam (bt)^n/(l1+lam)).

    Integrating the Poisson(l1 s) pmf against the Wright-series density
    turns (k+l)!/(k! l!) into the Pochhammer symbol (k+1)_l / l!, so there
    is no extra (k+1) factor: at t = 0 this is the geometric law of N1
    stopped at an Exp(lam) time.
    """
    _check_time(t)
    if k < 0:
        return -math.inf
    inv, l1 = p.inv, p.lambda1
    lam, bt, n = inv.lambda_, inv.beta * t, inv.n
    z = lam * bt ** n / (l1 + lam)
    return (-bt + math.log(lam) + k * math.log(l1)
            - (k + 1) * math.log(l1 + lam) + _log_ml_sum(k + 1, n, bt, z, ctl))


def nyn_pk(p: InvTcParams, k: int, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    return math.exp(nyn_log_pk(p, k, t, ctl))


def ny_pmf(p: InvTcParams, k: int, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P(N1(Y(t)) = k), exponential jumps."""
    _need(p, "poisson")
    if p.inv.n != 1:
        raise DomainError("ny_pmf is the n = 1 case; use nyn_pmf_laplace")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return nyn_pk(p, k, t, ctl)


def _nyn_log_mgf(p: InvTcParams, theta: float, t: float) -> float:
    """log E e^{theta N1(Y(t))} = log E e^{-l1 (1 - e^theta) Y(t)}."""
    return _yn_log_laplace(p.inv, -p.lambda1 * math.expm1(theta), t)


def nyn_tail_rule(p: InvTcParams, t: float) -> TailRule:
    return TailRule.for_domain(lambda th: _nyn_log_mgf(p, th, t),
                               math.log1p(p.inv.lambda_ / p.lambda1))


def nyn_law(p: InvTcParams, t: float, k_max: Optional[int] = None, eps: float = TAIL_EPS) -> Pmf:
    _need(p, "poisson")
    return tabulate(lambda k: nyn_pk(p, k, t), nyn_tail_rule(p, t), 0, k_max, eps,
                    model="ny" if p.inv.n == 1 else "nyn", t=t)


def ny_laplace_moments(p: InvTcParams, theta: float, t: float, s: Optional[float] = None):
    """(E e^{-theta Z(t)}, mean, variance, Cov(Z(t), Z(s))) for Z = N1(Y)."""
    _need(p, "poisson")
    if not theta >= 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    if s is None:
        s = t
    inv, l1 = p.inv, p.lambda1
    lam = inv.lambda_
    a = -l1 * math.expm1(-theta)          # l1 (1 - e^-theta)
    lap = lam / (lam + a) * math.exp(-inv.beta * t * a / (lam + a))
    mean_y, _, var_y, cov_y, _ = y_moments_cov(inv, t, s)
    mean_min = y_moments_cov(inv, min(t, s))[0]
    mean = l1 * mean_y
    var = l1 ** 2 * var_y + l1 * mean_y
    cov = l1 ** 2 * cov_y + l1 * mean_min
    return lap, mean, var, cov


def nyn_pmf_laplace(p: InvTcParams, k: int, t: float, theta: float = 0.0):
    """(P(Z(t) = k), E e^{-theta Z(t)}, E Z(t), E Z(t)^2) for Z = N1(Y^(n)).

    The second moment is l1 E Y + l1^2 E Y^2 (Poisson(l1) given Y).
    """
    _need(p, "poisson")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if not theta >= 0:
        raise DomainError(f"theta must be >= 0, got {theta}")
    l1 = p.lambda1
    lap = math.exp(_yn_log_laplace(p.inv, -l1 * math.expm1(-theta), t))
    m1 = yn_moments(p.inv, 1, t)
    m2 = yn_moments(p.inv, 2, t)
    return nyn_pk(p, k, t), lap, l1 * m1, l1 * m1 + l1 ** 2 * m2


# ---------------------------------------------------------------------------
# differential relations between forward and inverse time changes
# ---------------------------------------------------------------------------

def _pk_forward(lam, beta, l1, k, t):
    """P(N1(E^beta(N^lam(t))) = k)."""
    return ngn_pk(TcPoissonParams(CpgParams(lam, 1.0, beta), l1), k, t)


def _pk_inverse(lam, beta, l1, k, t):
    """P(N1(Y(t)) = k) for the inverse of E^beta(N^lam(t))."""
    return nyn_pk(InvTcParams(InvParams(lam, beta, 1), l1), k, t)


def forward_inverse_residual(which: str, lambda_: float, beta: float, lambda1: float,
                      k: int, t: float) -> float:
    """Residual, relative to rate (p^E + p^I), of the first-order relations linking the forward
    pmf p^E, its parameter-swapped version, and the inverse pmf p^I:

    eq1:  d/dt p^E_k(t; beta, lam) = -beta p^E_k(t; beta, lam) + beta p^I_k(t; lam, beta)
    eq2:  d/dt p^E_k(t; lam, beta) = -lam p^E_k(t; lam, beta) + lam p^I_k(t; beta, lam)
    eq3:  eq2 with lam = beta, so the swap is the identity

    (first argument after t is the Poisson rate, second the jump rate).
    """
    if not t > 0:
        raise DomainError(f"residual needs t > 0, got {t}")
    if which == "eq1":
        rate, fwd = beta, (beta, lambda_)
        inv = (lambda_, beta)
    elif which in ("eq2", "eq3"):
        if which == "eq3" and not math.isclose(lambda_, beta, rel_tol=1e-12):
            raise DomainError("eq3 needs lambda = beta")
        rate, fwd = lambda_, (lambda_, beta)
        inv = (beta, lambda_)
    else:
        raise DomainError(f"unknown relation {which!r}")
    h = _fd_step(t)
    deriv = (_pk_forward(*fwd, lambda1, k, t + h) - _pk_forward(*fwd, lambda1, k, t - h)) / (2 * h)
    pe, pi = _pk_forward(*fwd, lambda1, k, t), _pk_inverse(*inv, lambda1, k, t)
    rhs = rate * (pi - pe)
    # scale by the size of the two terms: rhs itself can cancel to zero
    return abs(deriv - rhs) / max(rate * (pe + pi), 1e-300)


def pki_from_pke(lambda_eq_beta: float, lambda1: float, k: int, t: float) -> float:
    """Inverse-clock pmf from forward-clock pmfs when lam = beta:
    p^I_k = b/(l1+b) [p^E_k + sum_{m=1..k} (l1/(l1+b))^m p^E_{k-m}]."""
    b = lambda_eq_beta
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    _check_time(t)
    r = lambda1 / (lambda1 + b)
    acc = _pk_forward(b, b, lambda1, k, t)
    for m in range(1, k + 1):
        acc += r ** m * _pk_forward(b, b, lambda1, k - m, t)
    return b / (lambda1 + b) * acc


# ---------------------------------------------------------------------------
# Skellam over Y^(n): type I (shared clock)
# ---------------------------------------------------------------------------

def syn_i_pk(p: InvTcParams, k: int, t: float, ctl: SeriesControl = DEFAULT_CONTROL,
             rel_tol: float = QUAD_REL_TOL) -> float:
    """P(S(Y^(n)(t)) = k) = int_0^inf P(S(u) = k) q(u, t) du."""
    _need(p, "skellam-i")
    _check_time(t)
    k = int(k)
    inv = p.inv
    l1, l2 = p.lambda1, p.lambda2
    lam, bt, n = inv.lambda_, inv.beta * t, inv.n
    lead = math.log(lam) - bt + 0.5 * k * math.log(l1 / l2)
    decay = l1 + l2 + lam
    two_root = 2.0 * math.sqrt(l1 * l2)
    kk = abs(k)
    log_bt = math.log(bt) if bt > 0 else None

    def integrand(u):
        lb = log_bessel_i(kk, two_root * u, ctl)
        if lb == -math.inf:
            return 0.0
        if log_bt is None:
            lw = 0.0
        else:
            x = lam * u * bt ** n
            lw = _logsumexp((m - 1) * log_bt + log_wright_phi(n, m, x, ctl) for m in range(1, n + 1))
        return math.exp(lead - decay * u + lb + lw)

    mean = yn_moments(inv, 1, t)
    return integrate_to_infinity(integrand, max(4.0 * mean, 1.0), rel_tol=rel_tol,
                                 abs_tol=1e-300, points=[mean])


def _syn_i_log_mgf(p: InvTcParams, theta: float, t: float) -> float:
    return _yn_log_laplace(p.inv, skellam_bernstein(p.sk, -theta), t)


def syn_i_tail_rule(p: InvTcParams, t: float) -> TailRule:
    lo, hi = skellam_theta_domain(p.sk, p.inv.lambda_)
    return TailRule.for_domain(lambda th: _syn_i_log_mgf(p, th, t), hi, lo, two_sided=True)


def syn_i_table(p: InvTcParams, t: float, k_lo: int, k_hi: int,
                ctl: SeriesControl = DEFAULT_CONTROL, rel_tol: float = QUAD_REL_TOL) -> np.ndarray:
    """P(S(Y^(n)(t)) = k) for k_lo..k_hi from one vector-valued quadrature
    (absolute accuracy relative to the largest probability)."""
    _need(p, "skellam-i")
    _check_time(t)
    inv = p.inv
    l1, l2 = p.lambda1, p.lambda2
    lam, bt, n = inv.lambda_, inv.beta * t, inv.n
    ks = np.arange(k_lo, k_hi + 1)
    two_root = 2.0 * math.sqrt(l1 * l2)
    lead = math.log(lam) - bt + 0.5 * ks * math.log(l1 / l2)
    shift = l1 + l2 + lam - two_root
    orders = np.abs(ks)
    log_bt = math.log(bt) if bt > 0 else None

    def integrand(u):
        if log_bt is None:
            lw = 0.0
        else:
            x = lam * u * bt ** n
            lw = _logsumexp((m - 1) * log_bt + log_wright_phi(n, m, x, ctl) for m in range(1, n + 1))
        with np.errstate(divide="ignore"):
            return np.exp(lead + lw - shift * u + np.log(special.ive(orders, two_root * u)))

    mean = yn_moments(inv, 1, t)
    return integrate_vec_to_infinity(integrand, max(4.0 * mean, 1.0), rel_tol=rel_tol, points=[mean])


def syn_i_law(p: InvTcParams, t: float, eps: float = TAIL_EPS, route: str = "table", **kw) -> Pmf:
    """Tabulated law; ``route="pointwise"`` integrates each k separately."""
    _need(p, "skellam-i")
    table = (lambda lo, hi: syn_i_table(p, t, lo, hi)) if route == "table" else None
    return tabulate(lambda k: syn_i_pk(p, k, t), syn_i_tail_rule(p, t), eps=eps, table=table,
                    model="sy-i" if p.inv.n == 1 else "syn-i", t=t, **kw)


def syn_i_pmf_mgf(p: InvTcParams, k: int, t: float, theta: float = 0.0):
    """(P(S_I(t) = k), E e^{theta S_I(t)}) over Y^(n)."""
    _need(p, "skellam-i")
    return syn_i_pk(p, k, t), math.exp(_syn_i_log_mgf(p, theta, t))


def sy_i_pmf_mgf(p: InvTcParams, k: int, t: float, theta: float = 0.0, s: Optional[float] = None):
    """(pmf_k, MGF, mean, variance, Cov(S_I(t), S_I(s))) over Y (exponential jumps)."""
    _need(p, "skellam-i")
    if p.inv.n != 1:
        raise DomainError("sy_i_pmf_mgf is the n = 1 case; use syn_i_pmf_mgf")
    if s is None:
        s = t
    lam = p.inv.lambda_
    fs = skellam_bernstein(p.sk, -theta)
    if not lam + fs > 0:
        raise DomainError(f"MGF diverges: lambda + f_S(-theta) = {lam + fs:.6g} <= 0")
    mgf = lam / (lam + fs) * math.exp(-p.inv.beta * t * fs / (lam + fs))
    return (syn_i_pk(p, k, t), mgf) + sy_i_moments_cov(p, t, s)


def sy_i_moments_cov(p: InvTcParams, t: float, s: Optional[float] = None):
    """(mean, variance, Cov(S_I(t), S_I(s))) for a shared clock Y."""
    if s is None:
        s = t
    mean_y, _, var_y, cov_y, _ = y_moments_cov(p.inv, t, s)
    mean_min = y_moments_cov(p.inv, min(t, s))[0]
    d, v1 = p.sk.mean1, p.sk.var1
    return d * mean_y, d * d * var_y + v1 * mean_y, d * d * cov_y + v1 * mean_min


# ---------------------------------------------------------------------------
# Skellam over Y^(n): type II (independent clocks)
# ---------------------------------------------------------------------------

def syn_ii_pk(p: InvTcParams, k: int, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P(N1(Y_1(t)) - N2(Y_2(t)) = k) = sum_j P(N1(Y) = j + k) P(N2(Y) = j) (k >= 0).

    Each factor is the Mittag-Leffler closed form, so this is the double
    series over j and the inner (m1, m2) sums; the j-loop stops after three
    consecutive terms below ``ctl.rel_tol`` of the running sum.
    """
    _need(p, "skellam-ii")
    _check_time(t)
    k = int(k)
    if k < 0:
        return syn_ii_pk(p.reflected(), -k, t, ctl)
    a, b = p.one_sided(1), p.one_sided(2)
    scale = -math.inf
    total = 0.0
    quiet = 0
    log_rel = math.log(ctl.rel_tol)
    for j in range(ctl.max_terms):
        lt = nyn_log_pk(a, j + k, t, ctl) + nyn_log_pk(b, j, t, ctl)
        if lt > scale:
            total = total * math.exp(scale - lt) + 1.0 if scale > -math.inf else 1.0
            scale = lt
        else:
            total += math.exp(lt - scale)
        if lt < log_rel + scale + math.log(total):
            quiet += 1
            if quiet == 3:
                return math.exp(scale) * total
        else:
            quiet = 0
    raise ConvergenceFailure("syn_ii_pk: outer series did not converge")


def _syn_ii_log_mgf(p: InvTcParams, theta: float, t: float) -> float:
    """log E e^{theta N1(Y_1)} + log E e^{-theta N2(Y_2)}."""
    a1 = -p.lambda1 * math.expm1(theta)     # l1 (1 - e^theta)
    a2 = -p.lambda2 * math.expm1(-theta)    # l2 (1 - e^-theta)
    lam = p.inv.lambda_
    if not (lam + a1 > 0 and lam + a2 > 0):
        raise DomainError(f"Type II MGF diverges at theta={theta}")
    return _yn_log_laplace(p.inv, a1, t) + _yn_log_laplace(p.inv, a2, t)


def syn_ii_theta_domain(p: InvTcParams) -> tuple[float, float]:
    lam = p.inv.lambda_
    return -math.log1p(lam / p.lambda2), math.log1p(lam / p.lambda1)


def syn_ii_tail_rule(p: InvTcParams, t: float) -> TailRule:
    lo, hi = syn_ii_theta_domain(p)
    return TailRule.for_domain(lambda th: _syn_ii_log_mgf(p, th, t), hi, lo, two_sided=True)


def syn_ii_law(p: InvTcParams, t: float, eps: float = TAIL_EPS, **kw) -> Pmf:
    _need(p, "skellam-ii")
    return tabulate(lambda k: syn_ii_pk(p, k, t), syn_ii_tail_rule(p, t), eps=eps,
                    model="sy-ii" if p.inv.n == 1 else "syn-ii", t=t, **kw)


def syn_ii_pmf_mgf(p: InvTcParams, k: int, t: float, theta: float = 0.0):
    """(P(S_II(t) = k), E e^{theta S_II(t)}) over independent copies of Y^(n)."""
    _need(p, "skellam-ii")
    return syn_ii_pk(p, k, t), math.exp(_syn_ii_log_mgf(p, theta, t))


def sy_ii_pmf_mgf_cov(p: InvTcParams, k: int, t: float, theta: float = 0.0,
                      s: Optional[float] = None):
    """(pmf_k, MGF, Cov(S_II(t), S_II(s))) over independent copies of Y."""
    _need(p, "skellam-ii")
    if p.inv.n != 1:
        raise DomainError("sy_ii_pmf_mgf_cov is the n = 1 case; use syn_ii_pmf_mgf")
    pk, mgf = syn_ii_pmf_mgf(p, k, t, theta)
    return pk, mgf, sy_ii_cov(p, t, t if s is None else s)


def sy_ii_cov(p: InvTcParams, t: float, s: float) -> float:
    """Cov(S_II(t), S_II(s)): sum of the two one-sided N_i(Y_i) covariances."""
    lam, m = p.inv.lambda_, p.inv.beta * min(t, s)
    l1, l2 = p.lambda1, p.lambda2
    return (l1 + l2) / lam * (m + 1) + (l1 ** 2 + l2 ** 2) / lam ** 2 * (2 * m + 1)


def syn_ii_moments(p: InvTcParams, t: float) -> tuple[float, float]:
    """(mean, variance) of S_II(t) over Y^(n) from the one-sided moments."""
    _need(p, "skellam-ii")
    m1 = yn_moments(p.inv, 1, t)
    m2 = yn_moments(p.inv, 2, t)
    vy = m2 - m1 * m1
    l1, l2 = p.lambda1, p.lambda2
    return (l1 - l2) * m1, (l1 ** 2 + l2 ** 2) * vy + (l1 + l2) * m1
