"""
Base processes: Poisson, Skellam and the compound Poisson-Gamma subordinator
G_N(t) = G(N(t)) with jump intensity ``lambda_``, Gamma shape ``alpha`` and
Gamma rate ``beta``.

Also home of the two carriers used by every law in the package: ``MixedLaw``
(atom at zero plus a density) and ``Pmf`` (truncated integer law with a
certified bound on the mass left outside the table).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .integrate import integrate_to_infinity
from .specfun import DEFAULT_CONTROL, SeriesControl, log_bessel_i, log_wright_phi

# Levy measures of the lattice processes, kept as documented constants:
#   Poisson(lam):          nu = lam * delta_{+1}
#   Skellam(lam1, lam2):   nu = lam1 * delta_{+1} + lam2 * delta_{-1}

TAIL_EPS = 1e-12


def _positive(name, value):
    if not (isinstance(value, (int, float, np.floating, np.integer))
            and math.isfinite(value) and value > 0):
        raise DomainError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class CpgParams:
    """Compound Poisson-Gamma subordinator (lambda_, alpha, beta)."""

    lambda_: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("lambda_", "alpha", "beta"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))

    @classmethod
    def tilde(cls, a: float) -> "CpgParams":
        """Exponential-jump member with lambda = beta = 1/a (Laplace exponent u/(1+au))."""
        a = _positive("a", a)
        return cls(1.0 / a, 1.0, 1.0 / a)

    @property
    def is_exponential(self) -> bool:
        return self.alpha == 1.0

    def is_erlang(self, n: Optional[int] = None) -> bool:
        if not float(self.alpha).is_integer():
            return False
        return n is None or self.alpha == n

    def swapped(self) -> "CpgParams":
        """Exchange the roles of lambda and beta (exponential jumps only)."""
        if not self.is_exponential:
            raise DomainError("parameter swap is defined for alpha = 1 only")
        return CpgParams(self.beta, 1.0, self.lambda_)

    def mean(self, t: float) -> float:
        return self.lambda_ * self.alpha * t / self.beta

    def var(self, t: float) -> float:
        return self.lambda_ * self.alpha * (self.alpha + 1) * t / self.beta ** 2


@dataclass(frozen=True)
class SkellamParams:
    lambda1: float
    lambda2: float

    def __post_init__(self):
        object.__setattr__(self, "lambda1", _positive("lambda1", self.lambda1))
        object.__setattr__(self, "lambda2", _positive("lambda2", self.lambda2))

    def reflected(self) -> "SkellamParams":
        return SkellamParams(self.lambda2, self.lambda1)

    # unit-time moments of S(1) = N1(1) - N2(1)
    @property
    def mean1(self) -> float:
        return self.lambda1 - self.lambda2

    @property
    def var1(self) -> float:
        return self.lambda1 + self.lambda2


@dataclass(frozen=True)
class MixedLaw:
    """Law on [0, inf) with an atom at zero and an absolutely continuous part."""

    atom0: float
    density: Callable[[float], float]
    support_hint: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.atom0 <= 1.0:
            raise DomainError(f"atom0 must lie in [0, 1], got {self.atom0}")
        if not self.support_hint > 0:
            object.__setattr__(self, "support_hint", 1.0)

    def continuous_mass(self, rel_tol: float = 1e-10) -> float:
        return integrate_to_infinity(self.density, self.support_hint, rel_tol=rel_tol,
                                     abs_tol=1e-15)

    def total_mass(self, rel_tol: float = 1e-10) -> float:
        return self.atom0 + self.continuous_mass(rel_tol)

    def laplace(self, u: float, rel_tol: float = 1e-10) -> float:
        """E exp(-u X) by quadrature."""
        part = integrate_to_infinity(lambda s: math.exp(-u * s) * self.density(s),
                                     self.support_hint, rel_tol=rel_tol, abs_tol=1e-15)
        return self.atom0 + part

    def cdf_grid(self, edges) -> np.ndarray:
        """P(X <= e) for increasing edges e > 0 (cumulative quadrature)."""
        from scipy import integrate
        out = []
        acc = self.atom0
        prev = 0.0
        for e in edges:
            if e > prev:
                acc += integrate.quad(self.density, prev, e, epsabs=1e-14,
                                      epsrel=1e-11, limit=200)[0]
                prev = e
            out.append(acc)
        return np.asarray(out)


@dataclass
class Pmf:
    """Probabilities ``probs[i] = P(X = k_min + i)`` plus a bound on the mass outside."""

    k_min: int
    probs: np.ndarray
    tail_bound: float = 0.0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        self.k_min = int(self.k_min)
        self.probs = np.asarray(self.probs, dtype=float)
        if self.probs.ndim != 1 or not len(self.probs):
            raise DomainError("Pmf needs a nonempty 1-d probability vector")
        if np.any(self.probs < 0) or not np.all(np.isfinite(self.probs)):
            bad = self.probs[(self.probs < 0) | ~np.isfinite(self.probs)]
            if np.all(np.isfinite(bad)) and bad.min() > -1e-15:
                self.probs = np.clip(self.probs, 0.0, None)
            else:
                raise DomainError(f"Pmf has invalid entries: {bad[:5]}")
        self.tail_bound = float(min(max(self.tail_bound, 0.0), 1.0))

    @property
    def k_max(self) -> int:
        return self.k_min + len(self.probs) - 1

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def total(self) -> float:
        return float(math.fsum(self.probs))

    def __getitem__(self, k: int) -> float:
        i = int(k) - self.k_min
        if 0 <= i < len(self.probs):
            return float(self.probs[i])
        return 0.0

    def mean(self) -> float:
        return float(np.dot(self.ks, self.probs))

    def var(self) -> float:
        m = self.mean()
        return float(np.dot((self.ks - m) ** 2, self.probs))

    def mgf(self, theta: float) -> float:
        return float(math.fsum(np.exp(theta * self.ks) * self.probs))


# ---------------------------------------------------------------------------
# tail rule
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TailRule:
    """Chernoff bounds P(X >= K) <= M(th_up) e^{-th_up K} and the mirror image.

    ``theta_up`` / ``theta_down`` are the exponents used; by default they are
    1 and -1, pulled inside the MGF's domain when it is narrower.
    """

    log_mgf: Callable[[float], float]
    theta_up: float
    theta_down: Optional[float] = None  # None: support bounded below by 0

    @classmethod
    def for_domain(cls, log_mgf, theta_sup: float = math.inf,
                   theta_inf: Optional[float] = -math.inf, two_sided: bool = False):
        up = min(1.0, 0.5 * theta_sup)
        down = max(-1.0, 0.5 * theta_inf) if two_sided else None
        return cls(log_mgf, up, down)

    def upper(self, k: int) -> float:
        """Bound on P(X >= k)."""
        return min(1.0, math.exp(self.log_mgf(self.theta_up) - self.theta_up * k))

    def lower(self, k: int) -> float:
        """Bound on P(X <= k)."""
        if self.theta_down is None:
            return 0.0 if k < 0 else 1.0
        return min(1.0, math.exp(self.log_mgf(self.theta_down) - self.theta_down * k))

    def bound(self, k_lo: int, k_hi: int) -> float:
        return min(1.0, self.upper(k_hi + 1) + self.lower(k_lo - 1))

    def k_range(self, eps: float = TAIL_EPS) -> tuple[int, int]:
        half = 0.5 * eps if self.theta_down is not None else eps
        k_hi = math.ceil((self.log_mgf(self.theta_up) - math.log(half)) / self.theta_up)
        k_hi = max(k_hi, 0)
        if self.theta_down is None:
            return 0, k_hi
        k_lo = math.floor((self.log_mgf(self.theta_down) - math.log(half)) / self.theta_down)
        return min(k_lo, 0), k_hi


def tabulate(prob: Optional[Callable[[int], float]], rule: TailRule, k_min: Optional[int] = None,
             k_max: Optional[int] = None, eps: float = TAIL_EPS, table=None, **meta) -> Pmf:
    """Evaluate ``prob`` on a k-range chosen by ``rule`` (or the one given).

    ``table(lo, hi)``, when given, replaces the pointwise ``prob`` and returns
    all probabilities for lo..hi at once.
    """
    lo, hi = rule.k_range(eps)
    if k_min is not None:
        lo = k_min
    if k_max is not None:
        hi = k_max
    if hi < lo:
        raise DomainError(f"empty k-range [{lo}, {hi}]")
    if table is not None:
        probs = table(lo, hi)
    else:
        probs = [prob(k) for k in range(lo, hi + 1)]
    return Pmf(lo, probs, rule.bound(lo, hi), meta)


# ---------------------------------------------------------------------------
# compound Poisson-Gamma subordinator
# ---------------------------------------------------------------------------

def cpg_laplace_exponent(p: CpgParams, u: float) -> float:
    """f(u) = lambda (1 - (beta/(beta+u))^alpha), so that E e^{-u G_N(t)} = e^{-t f(u)}."""
    if not u >= 0:
        raise DomainError(f"Laplace exponent needs u >= 0, got {u}")
    if math.isinf(u):
        return p.lambda_
    return -p.lambda_ * math.expm1(-p.alpha * math.log1p(u / p.beta))


def cpg_log_mgf(p: CpgParams, theta: float, t: float) -> float:
    """log E e^{theta G_N(t)} for theta < beta (the Laplace exponent continued to u = -theta)."""
    if not theta < p.beta:
        raise DomainError(f"MGF of G_N(t) diverges for theta >= beta={p.beta}")
    return t * p.lambda_ * math.expm1(-p.alpha * math.log1p(-theta / p.beta))


def cpg_levy_density(p: CpgParams, u: float) -> float:
    """lambda beta^alpha u^(alpha-1) e^(-beta u) / Gamma(alpha): Gamma-shaped jump rate."""
    if not u > 0:
        raise DomainError(f"Levy density is defined for u > 0, got {u}")
    log_v = (math.log(p.lambda_) + p.alpha * math.log(p.beta) + (p.alpha - 1) * math.log(u)
             - p.beta * u - math.lgamma(p.alpha))
    return math.exp(log_v)


def cpg_transition_law(p: CpgParams, t: float, ctl: SeriesControl = DEFAULT_CONTROL) -> MixedLaw:
    """Law of G_N(t): atom exp(-lambda t) at 0, density
    exp(-lambda t - beta s) Phi(alpha, 0, lambda t (beta s)^alpha) / s on (0, inf).
    """
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    lam_t = p.lambda_ * t
    atom = math.exp(-lam_t)
    if t == 0:
        return MixedLaw(1.0, lambda s: 0.0, 1.0)

    log_lam_t = math.log(lam_t)

    def density(s: float) -> float:
        if s <= 0:
            return 0.0
        log_bs = math.log(p.beta * s)
        arg_log = log_lam_t + p.alpha * log_bs
        log_phi = log_wright_phi(p.alpha, 0.0, math.exp(arg_log), ctl)
        return math.exp(log_phi - lam_t - p.beta * s - math.log(s))

    hint = (lam_t * p.alpha + 10.0 * math.sqrt(lam_t) * p.alpha) / p.beta
    return MixedLaw(atom, density, hint)


def en_bessel_density(p: CpgParams, t: float, s: float) -> float:
    """Exponential-jump density in Bessel form, exp(-lt-bs) sqrt(l t b / s) I_1(2 sqrt(l t b s))."""
    if not p.is_exponential:
        raise DomainError("Bessel form of the transition density needs alpha = 1")
    if s <= 0 or t <= 0:
        return 0.0
    x = p.lambda_ * t * p.beta * s
    return math.exp(-p.lambda_ * t - p.beta * s + 0.5 * math.log(x) - math.log(s)
                    + log_bessel_i(1, 2.0 * math.sqrt(x)))


# ---------------------------------------------------------------------------
# Skellam
# ---------------------------------------------------------------------------

def skellam_log_pmf(p: SkellamParams, k: int, t: float,
                    ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        return 0.0 if k == 0 else -math.inf
    z = 2.0 * t * math.sqrt(p.lambda1 * p.lambda2)
    return (-t * (p.lambda1 + p.lambda2) + 0.5 * k * math.log(p.lambda1 / p.lambda2)
            + log_bessel_i(abs(int(k)), z, ctl))


def skellam_pmf(p: SkellamParams, k: int, t: float,
                ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """P(S(t) = k) = e^{-t(l1+l2)} (l1/l2)^{k/2} I_|k|(2t sqrt(l1 l2))."""
    return math.exp(skellam_log_pmf(p, k, t, ctl))


def skellam_bernstein(p: SkellamParams, theta: float) -> float:
    """f_S(theta) = l1 (1 - e^{-theta}) + l2 (1 - e^{theta}); E e^{-theta S(t)} = e^{-t f_S(theta)}."""
    return -p.lambda1 * math.expm1(-theta) - p.lambda2 * math.expm1(theta)


def skellam_exponents(p: SkellamParams, theta: float):
    """Return (f_S(theta), t -> E e^{theta S(t)})."""
    f = skellam_bernstein(p, theta)
    g = skellam_bernstein(p, -theta)
    return f, (lambda t: math.exp(-t * g))


def skellam_law(p: SkellamParams, t: float, eps: float = TAIL_EPS) -> Pmf:
    g = lambda th: -t * skellam_bernstein(p, -th)
    rule = TailRule.for_domain(g, two_sided=True)
    return tabulate(lambda k: skellam_pmf(p, k, t), rule, eps=eps, model="sk", t=t)


def poisson_law(rate: float, eps: float = TAIL_EPS) -> Pmf:
    rule = TailRule.for_domain(lambda th: rate * math.expm1(th))
    lo, hi = rule.k_range(eps)
    ks = np.arange(lo, hi + 1)
    from scipy.stats import poisson
    return Pmf(lo, poisson.pmf(ks, rate), rule.bound(lo, hi))
