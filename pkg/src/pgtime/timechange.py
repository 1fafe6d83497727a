"""
Poisson and Skellam processes run on the clock of a compound Poisson-Gamma
subordinator G_N(t) (exponential jumps: E_N(t)).

Models
------
X(t)     = N1(G_N(t))                         ``ngn_*``
S_I(t)   = N1(G_N(t)) - N2(G_N(t))            ``skellam_i_gn_*``
S_II(t)  = N1(E_N1(t)) - N2(E_N2(t))          ``skellam_ii_en_*``  (independent clocks)

Two points where the code does not transcribe the textbook displays:

* G_N(t) has an atom exp(-lambda t) at zero.  The Type I Skellam integral and
  the Type II n-series are completed with the atom's contribution, otherwise
  the laws do not sum to one.
* The second moment of a subordinated Levy process is
  E Z^2 = Var X(1) U(t) + (E X(1))^2 E Y(t)^2 (plus sign), which is the only
  sign consistent with Var Z = (E X(1))^2 Var Y + Var X(1) U(t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from scipy import special

from .errors import ConvergenceFailure, DomainError
from .integrate import integrate_to_infinity, integrate_vec_to_infinity
from .levy import (CpgParams, Pmf, SkellamParams, TailRule, cpg_transition_law,
                   skellam_bernstein, skellam_log_pmf, tabulate, TAIL_EPS)
from .specfun import (DEFAULT_CONTROL, SeriesControl, _sum_logterms, _sum_recursive,
                      log_bessel_i, log_ml3, log_wright_phi)

QUAD_REL_TOL = 1e-12


@dataclass(frozen=True)
class TcPoissonParams:
    """N1(G_N(t)): outer Poisson intensity ``lambda1`` on the clock ``sub``."""

    sub: CpgParams
    lambda1: float

    def __post_init__(self):
        if not (math.isfinite(self.lambda1) and self.lambda1 > 0):
            raise DomainError(f"lambda1 must be positive, got {self.lambda1}")
        object.__setattr__(self, "lambda1", float(self.lambda1))


@dataclass(frozen=True)
class TcSkellamParams:
    sub: CpgParams
    sk: SkellamParams
    variant: str = "I"

    def __post_init__(self):
        if self.variant not in ("I", "II"):
            raise DomainError(f"variant must be 'I' or 'II', got {self.variant!r}")
        if self.variant == "II" and not self.sub.is_exponential:
            raise DomainError("Type II time change is available for exponential jumps (alpha = 1)")

    def reflected(self) -> "TcSkellamParams":
        return TcSkellamParams(self.sub, self.sk.reflected(), self.variant)


class ComposedMoments(NamedTuple):
    mean: float
    second: float
    var: float
    cov: float


# ---------------------------------------------------------------------------
# N1(G_N(t))
# ---------------------------------------------------------------------------

def _ngn_log_p0(p: TcPoissonParams, t: float) -> float:
    sub = p.sub
    # -lambda t (1 - (beta/(lambda1+beta))^alpha)
    return sub.lambda_ * t * math.expm1(sub.alpha * math.log(sub.beta / (p.lambda1 + sub.beta)))


def _ngn_log_pk_series(p: TcPoissonParams, k: int, t: float, ctl: SeriesControl) -> float:
    """log p_k, k >= 1, from the n-series with Gamma(alpha n + k) / Gamma(alpha n)."""
    sub = p.sub
    a = sub.alpha
    lam_t = sub.lambda_ * t
    log_r = math.log(p.lambda1 / (p.lambda1 + sub.beta))
    log_w = math.log(lam_t) + a * math.log(sub.beta / (p.lambda1 + sub.beta))
    w = math.exp(log_w)
    if a.is_integer() and a <= 64:
        m = int(a)

        def rising(x, j):
            out = 1.0
            for i in range(j):
                out *= x + i
            return out

        # t_1 = w Gamma(a + k) / Gamma(a)
        log_t1 = log_w + math.lgamma(a + k) - math.lgamma(a)
        log_sum = _sum_recursive(
            log_t1,
            lambda n: w / (n + 1) * rising(a * n + k, m) / rising(a * n, m),
            1, ctl, "ngn_pmf")
    else:
        log_sum = _sum_logterms(
            lambda n: (n * log_w + math.lgamma(a * n + k) - math.lgamma(n + 1)
                       - math.lgamma(a * n)) if n >= 1 else -math.inf,
            1, ctl, "ngn_pmf")
    return -lam_t - math.lgamma(k + 1) + k * log_r + log_sum


def _nen_log_pk_ml(p: TcPoissonParams, k: int, t: float, ctl: SeriesControl) -> float:
    """log p_k, k >= 1, exponential jumps: e^{-lt} r^k z E^{k+1}_{1,2}(z), z = l b t/(l1+b)."""
    sub = p.sub
    z = sub.lambda_ * sub.beta * t / (p.lambda1 + sub.beta)
    log_r = math.log(p.lambda1 / (p.lambda1 + sub.beta))
    return -sub.lambda_ * t + k * log_r + math.log(z) + log_ml3(k + 1, 1.0, 2.0, z, ctl)


def ngn_log_pk(p: TcPoissonParams, k: int, t: float, route: str = "auto",
               ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if k < 0:
        return -math.inf
    if t == 0:
        return 0.0 if k == 0 else -math.inf
    if k == 0:
        return _ngn_log_p0(p, t)
    if route == "auto":
        route = "ml" if p.sub.is_exponential else "series"
    if route == "ml":
        if not p.sub.is_exponential:
            raise DomainError("Mittag-Leffler route needs alpha = 1")
        return _nen_log_pk_ml(p, k, t, ctl)
    if route == "series":
        return _ngn_log_pk_series(p, k, t, ctl)
    raise DomainError(f"unknown route {route!r}")


def ngn_pk(p: TcPoissonParams, k: int, t: float, route: str = "auto",
           ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P(N1(G_N(t)) = k)."""
    return math.exp(ngn_log_pk(p, k, t, route, ctl))


def ngn_theta_sup(p: TcPoissonParams) -> float:
    """Upper end of the MGF domain: beta + lambda1 (1 - e^theta) > 0."""
    return math.log1p(p.sub.beta / p.lambda1)


def ngn_log_mgf(p: TcPoissonParams, theta: float, t: float) -> float:
    sub = p.sub
    d = sub.beta - p.lambda1 * math.expm1(theta)
    if not d > 0:
        raise DomainError(
            f"MGF diverges: beta + lambda1 (1 - e^theta) = {d:.6g} <= 0 at theta={theta}")
    # -t lambda (1 - (beta/d)^alpha)
    return t * sub.lambda_ * math.expm1(sub.alpha * math.log(sub.beta / d))


def ngn_mgf(p: TcPoissonParams, theta: float, t: float) -> float:
    """E exp(theta N1(G_N(t))) = exp(-t lambda (1 - beta^alpha (beta + lambda1(1-e^theta))^-alpha))."""
    return math.exp(ngn_log_mgf(p, theta, t))


def ngn_tail_rule(p: TcPoissonParams, t: float) -> TailRule:
    return TailRule.for_domain(lambda th: ngn_log_mgf(p, th, t), ngn_theta_sup(p))


def ngn_pmf(p: TcPoissonParams, t: float, k_max: Optional[int] = None,
            ctl: SeriesControl = DEFAULT_CONTROL, eps: float = TAIL_EPS) -> Pmf:
    """Law of N1(G_N(t)) on {0..k_max}; k_max defaults to the Chernoff tail rule."""
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if k_max is not None and k_max < 0:
        raise DomainError(f"k_max must be >= 0, got {k_max}")
    rule = ngn_tail_rule(p, t)
    return tabulate(lambda k: ngn_pk(p, k, t, ctl=ctl), rule, 0, k_max, eps,
                    model="nen" if p.sub.is_exponential else "ngn", t=t)


def _fd_step(t: float) -> float:
    return max(1.0, t) * (2.220446049250313e-16) ** (1.0 / 3.0)


def ngn_master_rhs(p: TcPoissonParams, k: int, t: float) -> float:
    """Right-hand side of the difference-differential system for p_k(t)."""
    sub = p.sub
    c = sub.lambda_ * (sub.beta / (p.lambda1 + sub.beta)) ** sub.alpha
    r = p.lambda1 / (p.lambda1 + sub.beta)
    acc = (c - sub.lambda_) * ngn_pk(p, k, t)
    coef = 1.0
    conv = 0.0
    for m in range(1, k + 1):
        coef *= r * (m - 1 + sub.alpha) / m
        conv += coef * ngn_pk(p, k - m, t)
    return acc + c * conv


def ngn_master_residual(p: TcPoissonParams, k: int, t: float) -> float:
    """|d/dt p_k - RHS| / max(|RHS|, 1e-30) with a central finite difference."""
    if not t > 0:
        raise DomainError(f"residual needs t > 0, got {t}")
    h = _fd_step(t)
    deriv = (ngn_pk(p, k, t + h) - ngn_pk(p, k, t - h)) / (2 * h)
    rhs = ngn_master_rhs(p, k, t)
    return abs(deriv - rhs) / max(abs(rhs), 1e-30)


def ngn_moments(p: TcPoissonParams, t: float) -> tuple[float, float]:
    """(mean, variance) of N1(G_N(t))."""
    sub = p.sub
    mean = p.lambda1 * sub.lambda_ * sub.alpha * t / sub.beta
    var = p.lambda1 * sub.lambda_ * sub.alpha / sub.beta ** 2 * (
        (1 + sub.alpha) * p.lambda1 + sub.beta) * t
    return mean, var


def ngn_cov(p: TcPoissonParams, t: float, s: float) -> float:
    """Cov(N1(G_N(t)), N1(G_N(s))) = l1 l a b^-2 ((1+a) l1 + b) min(t, s)."""
    if t < 0 or s < 0:
        raise DomainError("times must be nonnegative")
    sub = p.sub
    return p.lambda1 * sub.lambda_ * sub.alpha / sub.beta ** 2 * (
        (1 + sub.alpha) * p.lambda1 + sub.beta) * min(t, s)


# ---------------------------------------------------------------------------
# moments of X(Y(t)) for a Levy process X and an independent nondecreasing Y
# ---------------------------------------------------------------------------

def compose_moments(mean_x1: float, var_x1: float, mean_y: float, second_y: float,
                    cov_y: float = 0.0, mean_y_min: Optional[float] = None) -> ComposedMoments:
    """First two moments of Z(t) = X(Y(t)) from those of X(1) and Y.

    ``cov_y`` is Cov(Y(t), Y(s)) and ``mean_y_min`` is U(min(t, s)); the
    returned ``cov`` is Cov(Z(t), Z(s)).  With the defaults (``cov_y = 0``,
    ``mean_y_min = mean_y``) it reduces to Var X(1) U(t).
    """
    tol = 1e-12 * max(1.0, second_y)
    if var_x1 < 0 or second_y < mean_y ** 2 - tol or mean_y < 0:
        raise DomainError("inconsistent moments: need var_x1 >= 0 and E Y^2 >= (E Y)^2")
    if mean_y_min is None:
        mean_y_min = mean_y
    mean_z = mean_x1 * mean_y
    second_z = var_x1 * mean_y + mean_x1 ** 2 * second_y
    var_z = mean_x1 ** 2 * (second_y - mean_y ** 2) + var_x1 * mean_y
    cov_z = mean_x1 ** 2 * cov_y + var_x1 * mean_y_min
    return ComposedMoments(mean_z, second_z, var_z, cov_z)


# ---------------------------------------------------------------------------
# Skellam, type I:  S(G_N(t))
# ---------------------------------------------------------------------------

def skellam_theta_domain(sk: SkellamParams, c: float) -> tuple[float, float]:
    """Open interval of theta with c + f_S(-theta) > 0, i.e.
    l1 e^theta + l2 e^-theta < c + l1 + l2."""
    b = c + sk.lambda1 + sk.lambda2
    disc = math.sqrt(b * b - 4 * sk.lambda1 * sk.lambda2)
    hi = (b + disc) / (2 * sk.lambda1)
    lo = 2 * sk.lambda2 / (b + disc)   # smaller root, cancellation-free
    return math.log(lo), math.log(hi)


def _check_sk_i(p: TcSkellamParams):
    if p.variant != "I":
        raise DomainError("expected a Type I Skellam model")


def skellam_i_gn_pmf(p: TcSkellamParams, k: int, t: float,
                     ctl: SeriesControl = DEFAULT_CONTROL,
                     rel_tol: float = QUAD_REL_TOL) -> float:
    """P(S(G_N(t)) = k): atom term plus the integral of the Skellam pmf against
    the continuous part of the G_N(t) law (Bessel x Wright integrand;
    Bessel x Bessel for exponential jumps)."""
    _check_sk_i(p)
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    k = int(k)
    sub, sk = p.sub, p.sk
    lam_t = sub.lambda_ * t
    atom = math.exp(-lam_t) if k == 0 else 0.0
    if t == 0:
        return atom
    log_lam_t = math.log(lam_t)
    lead = -lam_t + 0.5 * k * math.log(sk.lambda1 / sk.lambda2)
    decay = sk.lambda1 + sk.lambda2 + sub.beta
    two_root = 2.0 * math.sqrt(sk.lambda1 * sk.lambda2)
    kk = abs(k)
    exp_jumps = sub.is_exponential

    def integrand(u):
        if u <= 0:
            return 0.0
        log_u = math.log(u)
        if exp_jumps:
            x = lam_t * sub.beta * u
            log_w = 0.5 * (math.log(x)) - log_u + log_bessel_i(1, 2.0 * math.sqrt(x), ctl)
        else:
            arg = math.exp(log_lam_t + sub.alpha * (math.log(sub.beta) + log_u))
            log_w = log_wright_phi(sub.alpha, 0.0, arg, ctl) - log_u
        lb = log_bessel_i(kk, two_root * u, ctl)
        if lb == -math.inf:
            return 0.0
        return math.exp(lead - decay * u + lb + log_w)

    hint = cpg_transition_law(sub, t).support_hint
    mean = sub.mean(t)
    val = integrate_to_infinity(integrand, hint, rel_tol=rel_tol, abs_tol=1e-300,
                                points=[mean] if 0 < mean < hint else None)
    return atom + val


def _sk_i_gn_log_mgf(p: TcSkellamParams, theta: float, t: float) -> float:
    sub = p.sub
    d = sub.beta + skellam_bernstein(p.sk, -theta)
    if not d > 0:
        raise DomainError(f"MGF diverges: beta + f_S(-theta) = {d:.6g} <= 0 at theta={theta}")
    return t * sub.lambda_ * math.expm1(sub.alpha * math.log(sub.beta / d))


def skellam_i_gn_tail_rule(p: TcSkellamParams, t: float) -> TailRule:
    lo, hi = skellam_theta_domain(p.sk, p.sub.beta)
    return TailRule.for_domain(lambda th: _sk_i_gn_log_mgf(p, th, t), hi, lo, two_sided=True)


def skellam_i_gn_table(p: TcSkellamParams, t: float, k_lo: int, k_hi: int,
                       ctl: SeriesControl = DEFAULT_CONTROL,
                       rel_tol: float = QUAD_REL_TOL) -> np.ndarray:
    """P(S(G_N(t)) = k) for k_lo..k_hi from one vector-valued quadrature.

    Same integrand as :func:`skellam_i_gn_pmf`, but the subordinator factor is
    shared across k and the Bessel factors come from ``scipy.special.ive``.
    Accuracy is absolute, relative to the largest probability.
    """
    _check_sk_i(p)
    sub, sk = p.sub, p.sk
    ks = np.arange(k_lo, k_hi + 1)
    out = np.zeros(len(ks))
    lam_t = sub.lambda_ * t
    if t == 0:
        out[ks == 0] = 1.0
        return out
    log_lam_t = math.log(lam_t)
    two_root = 2.0 * math.sqrt(sk.lambda1 * sk.lambda2)
    lead = -lam_t + 0.5 * ks * math.log(sk.lambda1 / sk.lambda2)
    # ive carries exp(-two_root u); the rest of the Skellam decay goes here
    shift = sk.lambda1 + sk.lambda2 + sub.beta - two_root
    orders = np.abs(ks)

    def integrand(u):
        if u <= 0:
            return np.zeros(len(ks))
        log_u = math.log(u)
        if sub.is_exponential:
            x = lam_t * sub.beta * u
            log_w = 0.5 * math.log(x) - log_u + log_bessel_i(1, 2.0 * math.sqrt(x), ctl)
        else:
            arg = math.exp(log_lam_t + sub.alpha * (math.log(sub.beta) + log_u))
            log_w = log_wright_phi(sub.alpha, 0.0, arg, ctl) - log_u
        with np.errstate(divide="ignore"):
            return np.exp(lead + log_w - shift * u + np.log(special.ive(orders, two_root * u)))

    hint = cpg_transition_law(sub, t).support_hint
    mean = sub.mean(t)
    out += integrate_vec_to_infinity(integrand, hint, rel_tol=rel_tol,
                                     points=[mean] if 0 < mean < hint else None)
    out[ks == 0] += math.exp(-lam_t)
    return out


def skellam_i_gn_law(p: TcSkellamParams, t: float, eps: float = TAIL_EPS,
                     route: str = "table", **kw) -> Pmf:
    """Tabulated law; ``route="pointwise"`` integrates each k separately."""
    table = (lambda lo, hi: skellam_i_gn_table(p, t, lo, hi)) if route == "table" else None
    return tabulate(lambda k: skellam_i_gn_pmf(p, k, t), skellam_i_gn_tail_rule(p, t),
                    eps=eps, table=table, model="sk-i-gn", t=t, **kw)


def skellam_i_gn_mgf_moments(p: TcSkellamParams, theta: float, t: float, s: float):
    """(MGF at theta, mean, variance, Cov(S_I(t), S_I(s)))."""
    _check_sk_i(p)
    mgf = math.exp(_sk_i_gn_log_mgf(p, theta, t))
    sub, sk = p.sub, p.sk
    u_t = sub.mean(t)
    m = compose_moments(sk.mean1, sk.var1, u_t, sub.var(t) + u_t ** 2,
                        cov_y=sub.var(min(t, s)), mean_y_min=sub.mean(min(t, s)))
    return mgf, m.mean, m.var, m.cov


# ---------------------------------------------------------------------------
# Skellam, type II:  N1(E_N1(t)) - N2(E_N2(t))
# ---------------------------------------------------------------------------

def _check_sk_ii(p: TcSkellamParams):
    if p.variant != "II":
        raise DomainError("expected a Type II Skellam model")
    if not p.sub.is_exponential:
        raise DomainError("Type II law is available for alpha = 1 only")


def _nen_log_formula(lam, beta, lam_i, j, t, ctl):
    """log of e^{-lt} (l_i/(l_i+b))^j z E^{j+1}_{1,2}(z), valid for j >= 0
    (equals p_j for j >= 1; misses the atom e^{-lt} at j = 0)."""
    z = lam * beta * t / (lam_i + beta)
    return -lam * t + j * math.log(lam_i / (lam_i + beta)) + math.log(z) + log_ml3(j + 1, 1.0, 2.0, z, ctl)


def skellam_ii_en_pmf(p: TcSkellamParams, k: int, t: float,
                      ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P(S_II(t) = k) by the n-series over Mittag-Leffler products.

    Sum_n P(N1 = n + k) P(N2 = n) written with the Mittag-Leffler form of
    each factor, plus the terms coming from the atom of each clock at zero.
    """
    _check_sk_ii(p)
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    k = int(k)
    if k < 0:
        return skellam_ii_en_pmf(p.reflected(), -k, t, ctl)
    if t == 0:
        return 1.0 if k == 0 else 0.0
    lam, beta = p.sub.lambda_, p.sub.beta
    l1, l2 = p.sk.lambda1, p.sk.lambda2
    z1 = lam * beta * t / (l1 + beta)
    z2 = lam * beta * t / (l2 + beta)
    log_rho = math.log(l1 * l2 / ((l1 + beta) * (l2 + beta)))
    lead = (-2 * lam * t + 2 * math.log(lam * t * beta) + k * math.log(l1)
            - (k + 1) * math.log(l1 + beta) - math.log(l2 + beta))

    # outer n-loop: stop after three consecutive terms below tolerance
    terms = []
    scale = None
    total = 0.0
    quiet = 0
    for n in range(ctl.max_terms):
        lt = n * log_rho + log_ml3(n + k + 1, 1.0, 2.0, z1, ctl) + log_ml3(n + 1, 1.0, 2.0, z2, ctl)
        if scale is None:
            scale = lt
        if lt > scale:
            total *= math.exp(scale - lt)
            scale = lt
        total += math.exp(lt - scale)
        if lt < math.log(ctl.rel_tol) + scale + math.log(total):
            quiet += 1
            if quiet == 3:
                break
        else:
            quiet = 0
    else:
        raise ConvergenceFailure("skellam_ii_en_pmf: outer series did not converge")
    series = math.exp(lead + scale + math.log(total))

    atom = math.exp(-lam * t)
    corr = atom * math.exp(_nen_log_formula(lam, beta, l1, k, t, ctl))
    if k == 0:
        corr += atom * math.exp(_nen_log_formula(lam, beta, l2, 0, t, ctl)) + atom * atom
    return series + corr


def _sk_ii_log_mgf_factors(p: TcSkellamParams, theta: float, t: float) -> float:
    lam, beta = p.sub.lambda_, p.sub.beta
    l1, l2 = p.sk.lambda1, p.sk.lambda2
    a1 = -l1 * math.expm1(theta)       # l1 (1 - e^theta)
    a2 = -l2 * math.expm1(-theta)      # l2 (1 - e^-theta)
    if not (beta + a1 > 0 and beta + a2 > 0):
        raise DomainError(f"Type II MGF diverges at theta={theta}")
    return -t * lam * a1 / (beta + a1) - t * lam * a2 / (beta + a2)


def skellam_ii_theta_domain(p: TcSkellamParams) -> tuple[float, float]:
    beta = p.sub.beta
    return -math.log1p(beta / p.sk.lambda2), math.log1p(beta / p.sk.lambda1)


def skellam_ii_en_tail_rule(p: TcSkellamParams, t: float) -> TailRule:
    lo, hi = skellam_ii_theta_domain(p)
    return TailRule.for_domain(lambda th: _sk_ii_log_mgf_factors(p, th, t), hi, lo, two_sided=True)


def skellam_ii_en_law(p: TcSkellamParams, t: float, eps: float = TAIL_EPS, **kw) -> Pmf:
    return tabulate(lambda k: skellam_ii_en_pmf(p, k, t), skellam_ii_en_tail_rule(p, t),
                    eps=eps, model="sk-ii-en", t=t, **kw)


def skellam_ii_en_mgf_cov(p: TcSkellamParams, theta: float, t: float, s: float):
    """(MGF at theta, Cov(S_II(t), S_II(s)))."""
    _check_sk_ii(p)
    mgf = math.exp(_sk_ii_log_mgf_factors(p, theta, t))
    lam, beta = p.sub.lambda_, p.sub.beta
    l1, l2 = p.sk.lambda1, p.sk.lambda2
    cov = lam / beta ** 2 * (beta * (l1 + l2) + 2 * (l1 ** 2 + l2 ** 2)) * min(t, s)
    return mgf, cov


def skellam_ii_en_moments(p: TcSkellamParams, t: float) -> tuple[float, float]:
    """(mean, variance) of S_II(t): difference of two independent N_i(E_N(t))."""
    _check_sk_ii(p)
    m1, v1 = ngn_moments(TcPoissonParams(p.sub, p.sk.lambda1), t)
    m2, v2 = ngn_moments(TcPoissonParams(p.sub, p.sk.lambda2), t)
    return m1 - m2, v1 + v2
