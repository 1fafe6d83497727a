"""
Truncated-series evaluation of the special functions behind every closed form
in the package:

    I_k(z)            = sum_n (z/2)^(2n+k) / (n! (n+k)!)
    Phi(rho, delta, z) = sum_k z^k / (k! Gamma(rho k + delta))        (Wright)
    E_{rho,delta}(z)   = sum_k z^k / Gamma(rho k + delta)
    E^g_{rho,delta}(z) = sum_k (g)_k / k! * z^k / Gamma(rho k + delta)

All series with nonnegative terms are accumulated in a rescaled linear domain,
so the functions are also available as logarithms (``log_*``) and in the
``scaled`` form ``exp(-z) * f(z)``.  Callers combine these with the
compensating exponentials of the probability formulas instead of multiplying
huge and tiny floats.

When ``rho`` is a positive integer the Gamma ratio between consecutive terms
is a finite product and the recursion is exact up to rounding.  Otherwise each
term's Gamma factor comes from ``math.lgamma`` (CPython's Lanczos kernel,
g = 6.0246800407767296, 13 coefficients, ~15 significant digits).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConvergenceFailure, DomainError

__all__ = [
    "SeriesControl",
    "DEFAULT_CONTROL",
    "bessel_i",
    "log_bessel_i",
    "wright_phi",
    "log_wright_phi",
    "ml2",
    "log_ml2",
    "ml3",
    "log_ml3",
]

_RESCALE = 1e250
_MAX_EXACT_RHO = 64


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for every series in the package.

    A series stops once two consecutive terms satisfy
    ``|term| < rel_tol * |partial_sum| + abs_tol``.
    """

    rel_tol: float = 1e-14
    abs_tol: float = 1e-300
    max_terms: int = 10_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and math.isfinite(self.rel_tol)):
            raise DomainError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol >= 0:
            raise DomainError(f"abs_tol must be nonnegative, got {self.abs_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms}")


DEFAULT_CONTROL = SeriesControl()


# ---------------------------------------------------------------------------
# summation engines
# ---------------------------------------------------------------------------

def _sum_recursive(log_t0: float, ratio: Callable[[int], float], k0: int,
                   ctl: SeriesControl, name: str) -> float:
    """Log of sum_{k>=k0} t_k with t_{k0} = exp(log_t0), t_{k+1} = t_k * ratio(k).

    Terms must be nonnegative.  The running sum is kept in units of
    ``exp(scale)`` and renormalised before it can overflow.
    """
    if log_t0 == -math.inf:
        return -math.inf
    scale = log_t0
    term = 1.0
    total = 1.0
    log_abs = math.log(ctl.abs_tol) if ctl.abs_tol > 0 else -math.inf
    quiet = 0
    k = k0
    for _ in range(ctl.max_terms):
        term *= ratio(k)
        k += 1
        total += term
        if total > _RESCALE:
            scale += math.log(total)
            term /= total
            total = 1.0
        gap = log_abs - scale
        floor = math.exp(gap) if gap < 700.0 else math.inf
        if term < ctl.rel_tol * total + floor:
            quiet += 1
            if quiet == 2:
                return scale + math.log(total)
        else:
            quiet = 0
    raise ConvergenceFailure(
        f"{name}: no convergence within max_terms={ctl.max_terms}")


def _sum_logterms(log_term: Callable[[int], float], k0: int,
                  ctl: SeriesControl, name: str) -> float:
    """Log of sum_{k>=k0} exp(log_term(k)) for unimodal nonnegative terms."""
    first = log_term(k0)
    if first == -math.inf:
        # only a leading zero is tolerated (e.g. Phi(rho, 0, z) at k=0)
        k0 += 1
        first = log_term(k0)
        if first == -math.inf:
            return -math.inf
    scale = first
    total = 1.0
    log_rel = math.log(ctl.rel_tol)
    log_abs = math.log(ctl.abs_tol) if ctl.abs_tol > 0 else -math.inf
    quiet = 0
    k = k0 + 1
    for _ in range(ctl.max_terms):
        lt = log_term(k)
        k += 1
        if lt > scale + 1.0:
            total = total * math.exp(scale - lt) + 1.0
            scale = lt
        else:
            total += math.exp(lt - scale)
        log_partial = scale + math.log(total)
        if lt < max(log_rel + log_partial, log_abs):
            quiet += 1
            if quiet == 2:
                return log_partial
        else:
            quiet = 0
    raise ConvergenceFailure(
        f"{name}: no convergence within max_terms={ctl.max_terms}")


def _is_small_int(x: float) -> bool:
    return float(x).is_integer() and 0 < x <= _MAX_EXACT_RHO


def _rising(a: float, m: int) -> float:
    """a (a+1) ... (a+m-1) for integer m >= 1."""
    out = a
    for j in range(1, m):
        out *= a + j
    return out


def _rgamma(x: float) -> float:
    """1/Gamma(x) on the whole real line (zero at the poles)."""
    if x <= 0 and float(x).is_integer():
        return 0.0
    if x < 171.0:
        return 1.0 / math.gamma(x)
    return math.exp(-math.lgamma(x))


def _check_finite(**kw):
    for key, val in kw.items():
        if not math.isfinite(val):
            raise DomainError(f"{key} must be finite, got {val}")


def _finish(log_val: float, scale_by: float, scaled: bool) -> float:
    if scaled:
        log_val -= scale_by
    return math.exp(log_val) if log_val > -math.inf else 0.0


# ---------------------------------------------------------------------------
# modified Bessel function of the first kind
# ---------------------------------------------------------------------------

def log_bessel_i(k: int, z: float, ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """log I_k(z) for integer k >= 0 and z >= 0 (``-inf`` when I_k(z) = 0)."""
    if int(k) != k or k < 0:
        raise DomainError(f"Bessel order must be a nonnegative integer, got {k}")
    _check_finite(z=z)
    if z < 0:
        raise DomainError(f"bessel_i needs z >= 0, got {z}")
    k = int(k)
    if z == 0:
        return 0.0 if k == 0 else -math.inf
    h = 0.5 * z
    q = h * h
    # log(z) - log(2) survives subnormal z where 0.5 * z underflows
    log_t0 = k * (math.log(z) - math.log(2.0)) - math.lgamma(k + 1)
    return _sum_recursive(log_t0, lambda n: q / ((n + 1) * (n + 1 + k)), 0, ctl, "bessel_i")


def bessel_i(k: int, z: float, scaled: bool = False,
             ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """I_k(z), or exp(-z) I_k(z) when ``scaled``.

    >>> bessel_i(0, 0.0)
    1.0
    """
    return _finish(log_bessel_i(k, z, ctl), z, scaled)


# ---------------------------------------------------------------------------
# Wright function
# ---------------------------------------------------------------------------

def _wright_negative_rho(rho, delta, z, ctl):
    total = 0.0
    quiet = 0
    log_fact = 0.0
    for k in range(ctl.max_terms):
        if k:
            log_fact += math.log(k)
        rg = _rgamma(rho * k + delta)
        if z == 0:
            term = rg if k == 0 else 0.0
        else:
            sign = -1.0 if (z < 0 and k % 2) else 1.0
            term = sign * math.exp(k * math.log(abs(z)) - log_fact) * rg
        total += term
        if k > 2 and abs(term) < ctl.rel_tol * abs(total) + ctl.abs_tol:
            quiet += 1
            if quiet == 2:
                return total
        else:
            quiet = 0
    raise ConvergenceFailure(f"wright_phi: no convergence within max_terms={ctl.max_terms}")


def log_wright_phi(rho: float, delta: float, z: float,
                   ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """log Phi(rho, delta, z) for rho > 0, delta >= 0, z >= 0."""
    _check_finite(rho=rho, delta=delta, z=z)
    if not rho > 0:
        raise DomainError(f"log_wright_phi needs rho > 0, got {rho}")
    if delta < 0:
        raise DomainError(f"log_wright_phi needs delta >= 0, got {delta}")
    if z < 0:
        raise DomainError(f"log_wright_phi needs z >= 0, got {z}")
    if z == 0:
        return -math.lgamma(delta) if delta > 0 else -math.inf
    log_z = math.log(z)
    k0 = 0 if delta > 0 else 1
    if _is_small_int(rho):
        m = int(rho)
        log_t0 = k0 * log_z - math.lgamma(k0 + 1) - math.lgamma(rho * k0 + delta)
        return _sum_recursive(
            log_t0, lambda k: z / ((k + 1) * _rising(rho * k + delta, m)), k0, ctl, "wright_phi")

    def log_term(k):
        return k * log_z - math.lgamma(k + 1) - math.lgamma(rho * k + delta)

    return _sum_logterms(log_term, k0, ctl, "wright_phi")


def wright_phi(rho: float, delta: float, z: float,
               ctl: SeriesControl = DEFAULT_CONTROL, scaled: bool = False) -> float:
    """Wright function Phi(rho, delta, z).

    ``rho`` may lie in (-1, 0) or (0, inf).  For ``delta = 0`` the k = 0 term
    vanishes and the sum effectively starts at k = 1.  ``scaled`` multiplies
    by exp(-z) (positive ``rho`` and ``z >= 0`` only).
    """
    _check_finite(rho=rho, delta=delta, z=z)
    if rho == 0 or rho <= -1:
        raise DomainError(f"wright_phi needs rho in (-1,0) U (0,inf), got {rho}")
    if rho < 0:
        if scaled:
            raise DomainError("scaled wright_phi is only available for rho > 0")
        return _wright_negative_rho(rho, delta, z, ctl)
    if delta < 0 or z < 0:
        raise DomainError("wright_phi with rho > 0 is implemented for delta >= 0, z >= 0")
    return _finish(log_wright_phi(rho, delta, z, ctl), z, scaled)


# ---------------------------------------------------------------------------
# generalized Mittag-Leffler functions
# ---------------------------------------------------------------------------

def _check_ml(rho, delta, gamma=1.0):
    if not (rho > 0 and delta > 0 and gamma > 0):
        raise DomainError(
            f"Mittag-Leffler parameters must be positive (gamma={gamma}, rho={rho}, delta={delta})")


def log_ml3(gamma: float, rho: float, delta: float, z: float,
            ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """log E^gamma_{rho,delta}(z) for z >= 0."""
    _check_finite(gamma=gamma, rho=rho, delta=delta, z=z)
    _check_ml(rho, delta, gamma)
    if z < 0:
        raise DomainError(f"log_ml3 needs z >= 0, got {z}")
    if z == 0:
        return -math.lgamma(delta)
    log_t0 = -math.lgamma(delta)
    if _is_small_int(rho):
        m = int(rho)
        return _sum_recursive(
            log_t0,
            lambda k: (gamma + k) / (k + 1) * z / _rising(rho * k + delta, m),
            0, ctl, "ml3")

    log_z = math.log(z)
    # Pochhammer prefactor (gamma)_k / k! accumulated term by term
    pre = [0.0]

    def log_term(k):
        while len(pre) <= k:
            j = len(pre) - 1
            pre.append(pre[j] + math.log((gamma + j) / (j + 1)))
        return pre[k] + k * log_z - math.lgamma(rho * k + delta)

    return _sum_logterms(log_term, 0, ctl, "ml3")


def log_ml2(rho: float, delta: float, z: float,
            ctl: SeriesControl = DEFAULT_CONTROL) -> float:
    """log E_{rho,delta}(z) for z >= 0."""
    _check_finite(rho=rho, delta=delta, z=z)
    _check_ml(rho, delta)
    if z < 0:
        raise DomainError(f"log_ml2 needs z >= 0, got {z}")
    if z == 0:
        return -math.lgamma(delta)
    if _is_small_int(rho):
        m = int(rho)
        return _sum_recursive(
            -math.lgamma(delta), lambda k: z / _rising(rho * k + delta, m), 0, ctl, "ml2")
    log_z = math.log(z)
    return _sum_logterms(lambda k: k * log_z - math.lgamma(rho * k + delta), 0, ctl, "ml2")


def _signed_ml(gamma, rho, delta, z, ctl, name):
    # alternating series for z < 0; accuracy degrades once |z| is large
    total = 0.0
    pre = 1.0
    prev = math.inf
    quiet = 0
    for k in range(ctl.max_terms):
        if k:
            pre *= (gamma + k - 1) / k * z
        term = pre * _rgamma(rho * k + delta)
        total += term
        past_peak = abs(term) <= prev
        prev = abs(term)
        if past_peak and abs(term) < ctl.rel_tol * abs(total) + ctl.abs_tol:
            quiet += 1
            if quiet == 2:
                return total
        else:
            quiet = 0
    raise ConvergenceFailure(f"{name}: no convergence within max_terms={ctl.max_terms}")


def ml2(rho: float, delta: float, z: float,
        ctl: SeriesControl = DEFAULT_CONTROL, scaled: bool = False) -> float:
    """Two-parameter Mittag-Leffler function E_{rho,delta}(z).

    ``scaled`` returns exp(-z) E_{rho,delta}(z) (z >= 0 only).
    """
    _check_finite(rho=rho, delta=delta, z=z)
    _check_ml(rho, delta)
    if z < 0:
        if scaled:
            raise DomainError("scaled ml2 is only available for z >= 0")
        return _signed_ml(1.0, rho, delta, z, ctl, "ml2")
    return _finish(log_ml2(rho, delta, z, ctl), z, scaled)


def ml3(gamma: float, rho: float, delta: float, z: float,
        ctl: SeriesControl = DEFAULT_CONTROL, scaled: bool = False) -> float:
    """Three-parameter (Prabhakar) Mittag-Leffler function E^gamma_{rho,delta}(z)."""
    _check_finite(gamma=gamma, rho=rho, delta=delta, z=z)
    _check_ml(rho, delta, gamma)
    if z < 0:
        if scaled:
            raise DomainError("scaled ml3 is only available for z >= 0")
        return _signed_ml(gamma, rho, delta, z, ctl, "ml3")
    return _finish(log_ml3(gamma, rho, delta, z, ctl), z, scaled)
