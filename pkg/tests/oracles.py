"""Reference implementations sharing no code with the package.

Special functions come from mpmath at 40 digits.  Laws come from
mixture identities:

* Poisson(l1) observed at a Gamma(a, b) time is negative binomial, and a pair
  of Poisson counts observed at one Gamma time is negative multinomial;
  conditioning on the number of clock jumps turns every forward-clock law
  into a Poisson-weighted sum of these.
* For the Erlang(n) jump clock, P(Y(t) > s) = P(G(s) <= t) gives the density
  of the first passage as lam * sum_m pois(m; lam s) * P(Pois(beta t) in
  [m n, m n + n - 1]); integrals of Poisson kernels against it are then
  finite beta-type sums.
"""

from __future__ import annotations

import math

import mpmath as mp
import numpy as np
from scipy import integrate, stats

mp.mp.dps = 40


# -- special functions ------------------------------------------------------------

def bessel_i(k, z):
    return float(mp.besseli(k, z))


def wright_phi(rho, delta, z):
    def term(k):
        k = int(k)
        return mp.mpf(z) ** k * mp.rgamma(rho * k + delta) / mp.factorial(k)
    return float(mp.nsum(term, [0, mp.inf]))


def ml3(gamma, rho, delta, z):
    return float(mp.nsum(lambda k: mp.rf(gamma, k) * mp.mpf(z) ** k
                         * mp.rgamma(rho * k + delta) / mp.factorial(k), [0, mp.inf]))


def ml2(rho, delta, z):
    return ml3(1, rho, delta, z)


# -- forward clock --------------------------------------------------------------------

def _clock_counts(lam_t, tol=1e-18):
    hi = int(lam_t + 12 * math.sqrt(lam_t) + 40)
    ns = np.arange(0, hi + 1)
    return ns, stats.poisson.pmf(ns, lam_t)


def cpg_density(lam, alpha, beta, t, s):
    """Density of the continuous part: sum_n pois(n) Gamma(n alpha, beta) pdf."""
    ns, w = _clock_counts(lam * t)
    return float(sum(wi * stats.gamma.pdf(s, n * alpha, scale=1 / beta) for n, wi in zip(ns[1:], w[1:])))


def ngn_pk(lam, alpha, beta, l1, k, t):
    ns, w = _clock_counts(lam * t)
    q = beta / (beta + l1)
    val = w[0] * (1.0 if k == 0 else 0.0)
    val += sum(wi * stats.nbinom.pmf(k, n * alpha, q) for n, wi in zip(ns[1:], w[1:]))
    return float(val)


def _neg_multinomial_diff(a, b, l1, l2, k):
    """P(N1 - N2 = k) for Poisson(l1), Poisson(l2) counts at one Gamma(a, b) time."""
    c = b + l1 + l2
    lp0, lq1, lq2 = math.log(b / c), math.log(l1 / c), math.log(l2 / c)
    total = 0.0
    j = max(0, -k)
    quiet = 0
    while quiet < 5:
        i = j + k
        lt = (math.lgamma(a + i + j) - math.lgamma(a) - math.lgamma(i + 1) - math.lgamma(j + 1)
              + a * lp0 + i * lq1 + j * lq2)
        term = math.exp(lt)
        total += term
        quiet = quiet + 1 if term < 1e-18 * max(total, 1e-300) else 0
        j += 1
    return total


def skellam_i_gn_pk(lam, alpha, beta, l1, l2, k, t):
    ns, w = _clock_counts(lam * t)
    val = w[0] * (1.0 if k == 0 else 0.0)
    val += sum(wi * _neg_multinomial_diff(n * alpha, beta, l1, l2, k)
               for n, wi in zip(ns[1:], w[1:]) if wi > 1e-20)
    return float(val)


def convolve_difference(pa, pb):
    """Law of A - B for independent nonnegative A, B given as arrays from 0."""
    n = len(pa)
    out = {}
    for k in range(-(len(pb) - 1), n):
        out[k] = float(sum(pa[j + k] * pb[j] for j in range(len(pb)) if 0 <= j + k < n))
    return out


# -- inverse clock with Erlang(n) jumps --------------------------------------------------

def _blocks(n, bt, tol=1e-20):
    """P(Pois(bt) in [m n, m n + n - 1]) for m = 0, 1, ..."""
    top = int(bt + 14 * math.sqrt(bt + 1) + 40)
    cdf = stats.poisson.cdf(np.arange(-1, top + n + 1), bt)
    out = []
    m = 0
    while m * n <= top:
        out.append(cdf[m * n + n] - cdf[m * n])
        m += 1
    return np.array(out)


def yn_density(lam, beta, n, s, t):
    blocks = _blocks(n, beta * t)
    ms = np.arange(len(blocks))
    return float(lam * np.sum(stats.poisson.pmf(ms, lam * s) * blocks))


def yn_moment(lam, beta, n, order, t):
    blocks = _blocks(n, beta * t)
    return float(sum(b * math.exp(math.lgamma(m + order + 1) - math.lgamma(m + 1)) / lam ** order
                     for m, b in enumerate(blocks)))


def yn_laplace(lam, beta, n, theta, t):
    blocks = _blocks(n, beta * t)
    r = lam / (lam + theta)
    return float(sum(b * r ** (m + 1) for m, b in enumerate(blocks)))


def nyn_pk(lam, beta, n, l1, k, t):
    """P(N1(Y^(n)(t)) = k) = lam sum_m block_m C(k+m, k) l1^k lam^m / (l1+lam)^(k+m+1)."""
    blocks = _blocks(n, beta * t)
    c = l1 + lam
    total = 0.0
    for m, b in enumerate(blocks):
        if b == 0:
            continue
        lt = (math.lgamma(k + m + 1) - math.lgamma(k + 1) - math.lgamma(m + 1)
              + k * math.log(l1) + (m + 1) * math.log(lam) - (k + m + 1) * math.log(c))
        total += b * math.exp(lt)
    return total


def syn_i_pk(lam, beta, n, l1, l2, k, t):
    """Shared first-passage clock: multinomial-type beta integrals."""
    blocks = _blocks(n, beta * t)
    c = l1 + l2 + lam
    total = 0.0
    for m, b in enumerate(blocks):
        if b == 0:
            continue
        j = max(0, -k)
        quiet = 0
        acc = 0.0
        while quiet < 5:
            i = j + k
            lt = (math.lgamma(i + j + m + 1) - math.lgamma(i + 1) - math.lgamma(j + 1) - math.lgamma(m + 1)
                  + i * math.log(l1) + j * math.log(l2) + (m + 1) * math.log(lam)
                  - (i + j + m + 1) * math.log(c))
            term = math.exp(lt)
            acc += term
            quiet = quiet + 1 if term < 1e-18 * max(acc, 1e-300) else 0
            j += 1
        total += b * acc
    return total


def quad_inf(f, rel=1e-11):
    return integrate.quad(f, 0, np.inf, epsrel=rel, epsabs=0, limit=400)[0]
