"""
Verification harness: every closed form is paired with an independent check
(Monte Carlo, quadrature, finite differences or a special-function identity).

Statistical conventions
-----------------------
* chi-square: Pearson statistic, neighbouring bins merged left to right
  until each expected count is at least 5 (Cochran), p-value from the
  chi-square survival function with ``bins - 1`` degrees of freedom.
  Continuous laws are binned on approximately equal-probability intervals,
  with exact bin probabilities from quadrature; an atom at zero gets its
  own bin.
* moments: CLT z-scores, ``(empirical - analytic) / std_error``.
* transforms: grouped bootstrap (1000 contiguous groups) of the empirical
  mean of exp(+-theta X); accept when the analytic value lies in the 99.9%
  percentile interval at every grid point.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import stats

from . import inverse as inv
from . import models
from . import specfun as sf
from . import timechange as tc
from .errors import DegenerateBinning, DomainError, InsufficientSamples, UnknownSuite
from .levy import CpgParams, MixedLaw, Pmf, SkellamParams, TailRule, cpg_transition_law, tabulate
from .mc import SampleBatch, TildeComposition, draw_blocks, rng_stream, tilde_clock_values

DEFAULT_LEVEL = 1e-3
DEFAULT_ZMAX = 4.0
MIN_SAMPLES = 1000
MIN_EXPECTED = 5.0
BOOT_GROUPS = 1000
BOOT_REPS = 4000
# stream ids reserved for harness-internal randomness (bootstrap); far from batch blocks
_BOOT_STREAM = 1 << 62


def _values(batch) -> np.ndarray:
    return np.asarray(batch.values if isinstance(batch, SampleBatch) else batch)


# ---------------------------------------------------------------------------
# chi-square goodness of fit
# ---------------------------------------------------------------------------

@dataclass
class GofReport:
    statistic: float
    dof: int
    p_value: float
    n_samples: int
    bins: str
    decision: str
    level: float = DEFAULT_LEVEL

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"


def merge_bins(observed: np.ndarray, expected: np.ndarray, min_expected: float = MIN_EXPECTED):
    """Merge adjacent bins left to right until every expected count >= min_expected;
    a short remainder at the right end joins the last full bin."""
    obs_out, exp_out = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= min_expected:
            obs_out.append(o_acc)
            exp_out.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if exp_out:
            obs_out[-1] += o_acc
            exp_out[-1] += e_acc
        else:
            obs_out.append(o_acc)
            exp_out.append(e_acc)
    return np.asarray(obs_out), np.asarray(exp_out)


def _pmf_bins(x: np.ndarray, law: Pmf):
    xi = np.rint(x).astype(np.int64)
    probs = law.probs.copy()
    idx = np.clip(xi - law.k_min, 0, len(probs) - 1)
    observed = np.bincount(idx, minlength=len(probs)).astype(float)
    return observed, probs, f"integers {law.k_min}..{law.k_max} (ends absorb tails)"


def _continuous_upper(law: MixedLaw, tail: float = 1e-10) -> float:
    hi = law.support_hint
    for _ in range(60):
        if law.atom0 + law.cdf_grid([hi])[0] >= 1.0 - tail:
            return hi
        hi *= 2.0
    return hi


def _mixed_bins(x: np.ndarray, law: MixedLaw, n_bins: int):
    upper = _continuous_upper(law)
    grid = np.linspace(0.0, upper, 801)[1:]
    cdf = law.cdf_grid(grid)
    cont = 1.0 - law.atom0
    levels = law.atom0 + cont * np.arange(1, n_bins) / n_bins
    edges = np.unique(np.interp(levels, cdf, grid))
    edges = edges[edges > 0]
    cdf_edges = law.cdf_grid(edges)
    probs = np.diff(np.concatenate([[law.atom0], cdf_edges, [1.0]]))
    bins_desc = f"{len(probs)} quantile bins on (0, inf)"
    if law.atom0 > 0:
        probs = np.concatenate([[law.atom0], probs])
        atom = x == 0
        pos = x[~atom]
        observed = np.concatenate([[atom.sum()],
                                   np.bincount(np.searchsorted(edges, pos, side="left"),
                                               minlength=len(edges) + 1)])
        bins_desc = "atom at 0 + " + bins_desc
    else:
        observed = np.bincount(np.searchsorted(edges, x, side="left"), minlength=len(edges) + 1)
    return observed.astype(float), probs, bins_desc


def gof_chisq(batch, law, level: float = DEFAULT_LEVEL, n_bins: Optional[int] = None) -> GofReport:
    """Pearson chi-square of a sample against a Pmf or a MixedLaw."""
    x = _values(batch)
    n = len(x)
    if n < MIN_SAMPLES:
        raise InsufficientSamples(f"chi-square needs at least {MIN_SAMPLES} samples, got {n}")
    if isinstance(law, Pmf):
        observed, probs, desc = _pmf_bins(x, law)
    elif isinstance(law, MixedLaw):
        if n_bins is None:
            n_bins = int(min(200, max(10, n // 1000)))
        observed, probs, desc = _mixed_bins(np.asarray(x, dtype=float), law, n_bins)
    else:
        raise DomainError(f"unsupported law type {type(law).__name__}")
    probs = np.clip(probs, 0.0, None)
    probs = probs / probs.sum()
    obs, exp = merge_bins(observed, n * probs)
    if len(obs) < 2:
        raise DegenerateBinning("fewer than two bins remain after merging")
    stat = float(((obs - exp) ** 2 / exp).sum())
    dof = len(obs) - 1
    p = float(stats.chi2.sf(stat, dof))
    return GofReport(stat, dof, p, n, f"{desc}; {len(obs)} after merge",
                     "accept" if p > level else "reject", level)


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

@dataclass
class MomentReport:
    label: str
    analytic: float
    empirical: float
    std_error: float
    z_score: float
    decision: str
    z_max: float = DEFAULT_ZMAX

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"


def _report(label, analytic, empirical, se, z_max):
    if se > 0:
        z = (empirical - analytic) / se
    else:
        z = 0.0 if empirical == analytic else math.inf
    return MomentReport(label, float(analytic), float(empirical), float(se), float(z),
                        "accept" if abs(z) <= z_max else "reject", z_max)


def moment_check(batch, analytic_mean: float, analytic_var: Optional[float] = None,
                 z_max: float = DEFAULT_ZMAX) -> list:
    """z-tests of the sample mean (and sample variance when ``analytic_var`` is given)."""
    x = np.asarray(_values(batch), dtype=float)
    n = len(x)
    if n < MIN_SAMPLES:
        raise InsufficientSamples(f"moment check needs at least {MIN_SAMPLES} samples, got {n}")
    mean = x.mean()
    d = x - mean
    var = float(np.mean(d * d)) * n / (n - 1)
    out = [_report("mean", analytic_mean, mean, math.sqrt(var / n), z_max)]
    if analytic_var is not None:
        m4 = float(np.mean(d ** 4))
        out.append(_report("var", analytic_var, var, math.sqrt(max(m4 - var * var, 0.0) / n), z_max))
    return out


def covariance_check(pairs, analytic_cov: float, z_max: float = DEFAULT_ZMAX) -> MomentReport:
    """z-test of the sample covariance of jointly drawn (X(t), X(s)) pairs."""
    xy = np.asarray(_values(pairs), dtype=float)
    n = len(xy)
    if n < MIN_SAMPLES:
        raise InsufficientSamples(f"covariance check needs at least {MIN_SAMPLES} pairs, got {n}")
    prod = (xy[:, 0] - xy[:, 0].mean()) * (xy[:, 1] - xy[:, 1].mean())
    cov = prod.sum() / (n - 1)
    se = prod.std(ddof=1) / math.sqrt(n)
    return _report("cov", analytic_cov, cov, se, z_max)


# ---------------------------------------------------------------------------
# transforms
# ---------------------------------------------------------------------------

@dataclass
class TransformReport:
    theta: list
    analytic: list
    empirical: list
    ci_low: list
    ci_high: list
    decision: str

    @property
    def accepted(self) -> bool:
        return self.decision == "accept"


def transform_check(batch, analytic: Callable[[float], float], theta_grid: Sequence[float],
                    sign: int = -1, seed: int = 0, level: float = DEFAULT_LEVEL) -> TransformReport:
    """Empirical E exp(sign * theta * X) with a grouped bootstrap CI at each theta."""
    x = np.asarray(_values(batch), dtype=float)
    n = len(x)
    if n < MIN_SAMPLES:
        raise InsufficientSamples(f"transform check needs at least {MIN_SAMPLES} samples, got {n}")
    groups = min(BOOT_GROUPS, n // 10)
    usable = (n // groups) * groups
    gen = rng_stream(seed, _BOOT_STREAM).gen
    idx = gen.integers(0, groups, size=(BOOT_REPS, groups))
    out = dict(theta=[], analytic=[], empirical=[], ci_low=[], ci_high=[])
    ok = True
    for th in theta_grid:
        a = float(analytic(th))
        if th == 0:
            lo = hi = emp = 1.0
            ok &= a == 1.0
        else:
            w = np.exp(sign * th * x[:usable])
            gm = w.reshape(groups, -1).mean(axis=1)
            emp = float(w.mean())
            boots = gm[idx].mean(axis=1)
            lo, hi = np.quantile(boots, [level / 2, 1 - level / 2])
            ok &= bool(lo <= a <= hi)
        for key, v in zip(("theta", "analytic", "empirical", "ci_low", "ci_high"),
                          (th, a, emp, lo, hi)):
            out[key].append(float(v))
    return TransformReport(**out, decision="accept" if ok else "reject")


# ---------------------------------------------------------------------------
# composition (semigroup) check
# ---------------------------------------------------------------------------

def _binomial_report(label, hits, n, p, z_max):
    return _report(label, p, hits / n, math.sqrt(p * (1 - p) / n), z_max)


def semigroup_check(a, t: float = 1.0, n: int = 10 ** 6, seed: int = 0, lambda1: float = 1.0,
                    theta_grid=(0.5, 1.0, 2.0), level: float = DEFAULT_LEVEL,
                    z_max: float = DEFAULT_ZMAX, workers: Optional[int] = None) -> dict:
    """Check that E^{a_1}(E^{a_2}(...(t))) behaves like E^{sum a}(t).

    (i) atom P(clock = 0) = exp(-t / sum a); (ii) Laplace transform
    exp(-t u/(1 + (sum a) u)); (iii) law of the Poisson(lambda1) count on the
    composed clock against the single-clock pmf.
    """
    comp = TildeComposition(tuple(a), lambda1)
    total = comp.total
    clock = draw_blocks(lambda m, g: tilde_clock_values(comp, t, m, g), n, seed, workers)
    counts = draw_blocks(lambda m, g: g.poisson(lambda1 * tilde_clock_values(comp, t, m, g)),
                         n, seed + 1, workers)
    atom = _binomial_report("atom", int((clock == 0).sum()), n, math.exp(-t / total), z_max)
    equiv = CpgParams.tilde(total)
    trans = transform_check(clock, lambda u: math.exp(-t * u / (1 + total * u)),
                            theta_grid, -1, seed, level)
    gof = gof_chisq(counts, tc.ngn_pmf(tc.TcPoissonParams(equiv, lambda1), t), level)
    passed = atom.accepted and trans.accepted and gof.accepted
    return dict(a=list(comp.a), t=t, n=n, atom=asdict(atom), transform=asdict(trans),
                pmf=asdict(gof), passed=passed)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

SUITES = ("normalization", "consistency", "mc-gof", "moments", "covariance", "ode",
          "laplace-identity", "semigroup", "asymptotics")


@dataclass
class SuiteConfig:
    seed: int = 42
    n_samples: int = 10 ** 6
    n_joint: int = 10 ** 5
    level: float = DEFAULT_LEVEL
    z_max: float = DEFAULT_ZMAX
    workers: Optional[int] = None


@dataclass
class SuiteReport:
    suite: str
    seed: int
    cases: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.cases)

    def add(self, name: str, passed: bool, **details):
        self.cases.append(dict(name=name, passed=bool(passed), details=_plain(details)))

    def to_dict(self) -> dict:
        return dict(suite=self.suite, seed=self.seed, passed=self.passed, cases=self.cases)


def _plain(obj):
    """Make a JSON-friendly copy (numpy scalars and tuples converted)."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# -- normalization ------------------------------------------------------------

def _pmf_grid():
    """Twelve parameter points per closed-form pmf."""
    pts = [
        dict(lam=1.0, beta=1.0, l1=1.0, l2=1.0, t=1.0),
        dict(lam=0.5, beta=2.0, l1=0.7, l2=0.3, t=0.4),
        dict(lam=2.0, beta=0.8, l1=0.4, l2=0.9, t=1.3),
        dict(lam=1.5, beta=1.5, l1=1.2, l2=0.5, t=0.7),
        dict(lam=0.8, beta=0.5, l1=0.3, l2=0.3, t=2.0),
        dict(lam=3.0, beta=2.5, l1=0.9, l2=1.4, t=0.3),
        dict(lam=1.2, beta=0.9, l1=1.5, l2=0.5, t=1.0),
        dict(lam=0.6, beta=1.8, l1=0.5, l2=1.1, t=1.6),
        dict(lam=2.5, beta=1.2, l1=0.6, l2=0.8, t=0.5),
        dict(lam=1.0, beta=3.0, l1=1.0, l2=0.4, t=2.5),
        dict(lam=0.4, beta=0.7, l1=0.2, l2=0.6, t=3.0),
        dict(lam=1.8, beta=1.1, l1=0.8, l2=0.8, t=0.9),
    ]
    alphas = [1.0, 0.5, 2.5, 1.7, 3.0, 0.8, 2.0, 1.3, 0.6, 2.2, 1.0, 4.0]
    ns = [1, 2, 3, 2, 1, 2, 3, 2, 2, 3, 1, 2]
    return [dict(pt, alpha=a, n=n) for pt, a, n in zip(pts, alphas, ns)]


def pmf_families():
    """name -> builder(point) -> Pmf, for the ten closed-form pmfs."""
    def sub(q, alpha=None):
        return CpgParams(q["lam"], q["alpha"] if alpha is None else alpha, q["beta"])

    def ip(q, n=None):
        return inv.InvParams(q["lam"], q["beta"], q["n"] if n is None else n)

    return {
        "ngn": lambda q: tc.ngn_pmf(tc.TcPoissonParams(sub(q), q["l1"]), q["t"]),
        "nen": lambda q: tc.ngn_pmf(tc.TcPoissonParams(sub(q, 1.0), q["l1"]), q["t"]),
        "sk-i-gn": lambda q: tc.skellam_i_gn_law(
            tc.TcSkellamParams(sub(q), SkellamParams(q["l1"], q["l2"]), "I"), q["t"]),
        "sk-ii-en": lambda q: tc.skellam_ii_en_law(
            tc.TcSkellamParams(sub(q, 1.0), SkellamParams(q["l1"], q["l2"]), "II"), q["t"]),
        "ny": lambda q: inv.nyn_law(inv.InvTcParams(ip(q, 1), q["l1"]), q["t"]),
        "sy-i": lambda q: inv.syn_i_law(inv.InvTcParams(ip(q, 1), q["l1"], q["l2"], "skellam-i"), q["t"]),
        "sy-ii": lambda q: inv.syn_ii_law(inv.InvTcParams(ip(q, 1), q["l1"], q["l2"], "skellam-ii"), q["t"]),
        "nyn": lambda q: inv.nyn_law(inv.InvTcParams(ip(q), q["l1"]), q["t"]),
        "syn-i": lambda q: inv.syn_i_law(inv.InvTcParams(ip(q), q["l1"], q["l2"], "skellam-i"), q["t"]),
        "syn-ii": lambda q: inv.syn_ii_law(inv.InvTcParams(ip(q), q["l1"], q["l2"], "skellam-ii"), q["t"]),
    }


def _suite_normalization(cfg: SuiteConfig, rep: SuiteReport):
    for q in _pmf_grid()[:6]:
        law = cpg_transition_law(CpgParams(q["lam"], q["alpha"], q["beta"]), q["t"])
        mass = law.total_mass(rel_tol=1e-12)
        rep.add(f"cpg_transition_law {q['lam']},{q['alpha']},{q['beta']},t={q['t']}",
                abs(mass - 1) <= 1e-8, mass=mass)
    for n, lam, beta, t in [(1, 2.0, 0.5, 1.7), (1, 1.0, 1.0, 1.0), (2, 1.0, 1.0, 1.0),
                            (2, 0.7, 2.0, 0.6), (3, 1.0, 2.0, 1.0), (3, 2.0, 0.5, 3.0)]:
        law = models._y_law(inv.InvParams(lam, beta, n), t)
        mass = law.total_mass(rel_tol=1e-12)
        rep.add(f"yn_density n={n} lam={lam} beta={beta} t={t}", abs(mass - 1) <= 1e-8, mass=mass)
    for name, make in pmf_families().items():
        for i, q in enumerate(_pmf_grid()):
            pmf = make(q)
            s = pmf.total + pmf.tail_bound
            rep.add(f"{name} grid[{i}]", 1 - 1e-8 <= s <= 1 + 1e-12, sum=pmf.total,
                    tail_bound=pmf.tail_bound, k_range=[pmf.k_min, pmf.k_max])


# -- consistency ----------------------------------------------------------------

def _suite_consistency(cfg: SuiteConfig, rep: SuiteReport):
    zs = np.linspace(0.0, 600.0, 20)
    for name, f, g in [
        ("ml2(1,1,z) = e^z", lambda z: sf.ml2(1, 1, z, scaled=True), lambda z: 1.0),
        ("ml2(1,2,z) = (e^z-1)/z", lambda z: sf.ml2(1, 2, z, scaled=True),
         lambda z: -math.expm1(-z) / z if z > 0 else 1.0),
        ("ml3(1,2,1.5,z) = ml2(2,1.5,z)", lambda z: sf.ml3(1, 2, 1.5, z, scaled=True),
         lambda z: sf.ml2(2, 1.5, z, scaled=True)),
        ("ml3(2,1,2,z) = e^z", lambda z: sf.ml3(2, 1, 2, z, scaled=True), lambda z: 1.0),
        ("wright_phi(1,1,z) = I0(2 sqrt z)", lambda z: sf.wright_phi(1, 1, z),
         lambda z: sf.bessel_i(0, 2 * math.sqrt(z))),
        ("wright_phi(1,0,z) = sqrt(z) I1(2 sqrt z)", lambda z: sf.wright_phi(1, 0, z),
         lambda z: math.sqrt(z) * sf.bessel_i(1, 2 * math.sqrt(z))),
    ]:
        errs = [_rel(f(z), g(z)) if g(z) != 0 else abs(f(z)) for z in zs]
        rep.add(name, max(errs) <= 1e-12, max_rel_err=max(errs))

    for q in _pmf_grid()[:6]:
        p = tc.TcPoissonParams(CpgParams(q["lam"], 1.0, q["beta"]), q["l1"])
        err = max(abs(tc.ngn_pk(p, k, q["t"], "series") - tc.ngn_pk(p, k, q["t"], "ml"))
                  for k in range(41))
        rep.add(f"general vs exponential-jump pmf {q['lam']},{q['beta']},{q['l1']}", err <= 1e-10,
                max_abs_err=err)

    for lam, beta, t in [(1.0, 1.0, 1.0), (2.0, 0.5, 1.7), (0.6, 1.4, 0.3)]:
        p1 = inv.InvParams(lam, beta, 1)
        errs = [_rel(inv.yn_density(p1, s, t), inv.y_density(p1, s, t)) for s in np.linspace(0, 8, 17)]
        errs += [_rel(inv.yn_laplace(p1, th, t), inv.y_laplace(p1, th, t)) for th in (0.0, 0.5, 1.0, 3.0)]
        mean, second = inv.y_moments_cov(p1, t)[:2]
        errs += [_rel(inv.yn_moments(p1, 1, t), mean), _rel(inv.yn_moments(p1, 2, t), second)]
        rep.add(f"yn at n=1 vs y lam={lam} beta={beta} t={t}", max(errs) <= 1e-10, max_rel_err=max(errs))

    for b, l1, t in [(1.0, 1.0, 1.0), (1.3, 0.6, 2.2), (0.5, 2.0, 0.4)]:
        pp = inv.InvTcParams(inv.InvParams(b, b), l1)
        err = max(abs(inv.pki_from_pke(b, l1, k, t) - inv.ny_pmf(pp, k, t)) for k in range(11))
        rep.add(f"forward-to-inverse recursion beta={b} l1={l1} t={t}", err <= 1e-10, max_abs_err=err)

    for lam, beta, l1, t in [(1.0, 1.0, 1.0, 1.0), (2.0, 0.5, 0.7, 1.7), (0.6, 1.4, 3.0, 0.3)]:
        p1 = inv.InvParams(lam, beta)
        a = inv.ny_pmf(inv.InvTcParams(p1, l1), 0, t)
        b_ = inv.y_laplace(p1, l1, t)
        rep.add(f"P(N1(Y)=0) = E e^(-l1 Y) lam={lam} beta={beta} l1={l1}", _rel(a, b_) <= 1e-12,
                pmf0=a, laplace=b_)


# -- Monte Carlo goodness of fit ---------------------------------------------------

MC_CASES = [
    ("nen", dict(**{"lambda": 1.0, "beta": 1.0, "lambda1": 1.0})),
    ("ngn", dict(**{"lambda": 1.0, "alpha": 2.5, "beta": 1.0, "lambda1": 1.0})),
    ("sk-i-gn", dict(**{"lambda": 1.0, "alpha": 1.5, "beta": 1.0, "lambda1": 1.0, "lambda2": 0.7})),
    ("sk-ii-en", dict(**{"lambda": 1.0, "beta": 1.0, "lambda1": 1.5, "lambda2": 0.5})),
    ("ny", dict(**{"lambda": 1.0, "beta": 1.0, "lambda1": 1.0})),
    ("sy-i", dict(**{"lambda": 1.0, "beta": 1.0, "lambda1": 1.0, "lambda2": 1.0})),
    ("sy-ii", dict(**{"lambda": 1.0, "beta": 1.0, "lambda1": 1.5, "lambda2": 0.5})),
    ("nyn", dict(**{"lambda": 1.0, "beta": 1.0, "n": 2, "lambda1": 1.0})),
    ("syn-i", dict(**{"lambda": 1.0, "beta": 1.0, "n": 2, "lambda1": 1.0, "lambda2": 1.0})),
    ("syn-ii", dict(**{"lambda": 1.0, "beta": 1.0, "n": 2, "lambda1": 1.5, "lambda2": 0.5})),
    ("y", dict(**{"lambda": 1.0, "beta": 1.0})),
    ("gn", dict(**{"lambda": 1.0, "alpha": 2.5, "beta": 1.0})),
]


def _suite_mc_gof(cfg: SuiteConfig, rep: SuiteReport):
    for i, (tag, params) in enumerate(MC_CASES):
        m = models.build(tag, params)
        batch = m.sample(1.0, cfg.n_samples, cfg.seed + i, cfg.workers)
        r = gof_chisq(batch, m.law(1.0), cfg.level)
        rep.add(f"{tag} t=1 {params}", r.accepted, **asdict(r))


# -- moments ---------------------------------------------------------------------

MOMENT_CASES = [
    ("y", {"lambda": 1.0, "beta": 1.0}, 1.0),
    ("y", {"lambda": 2.0, "beta": 0.5}, 3.0),
    ("gn", {"lambda": 2.0, "alpha": 3.0, "beta": 1.5}, 1.0),
    ("ngn", {"lambda": 1.0, "alpha": 2.5, "beta": 1.0, "lambda1": 1.0}, 1.0),
    ("nen", {"lambda": 1.0, "beta": 1.0, "lambda1": 1.0}, 2.0),
    ("sk-i-gn", {"lambda": 1.0, "alpha": 1.0, "beta": 1.0, "lambda1": 2.0, "lambda2": 1.0}, 1.0),
    ("sk-ii-en", {"lambda": 1.0, "beta": 1.0, "lambda1": 1.0, "lambda2": 1.0}, 1.0),
    ("ny", {"lambda": 1.0, "beta": 1.0, "lambda1": 1.0}, 1.0),
    ("sy-i", {"lambda": 1.0, "beta": 1.0, "lambda1": 2.0, "lambda2": 1.0}, 1.0),
    ("sy-ii", {"lambda": 1.0, "beta": 1.0, "lambda1": 1.0, "lambda2": 1.0}, 1.0),
    ("yn", {"lambda": 1.0, "beta": 1.0, "n": 2}, 1.0),
    ("nyn", {"lambda": 1.0, "beta": 1.0, "n": 2, "lambda1": 1.0}, 1.0),
]


def _suite_moments(cfg: SuiteConfig, rep: SuiteReport):
    for i, (tag, params, t) in enumerate(MOMENT_CASES):
        m = models.build(tag, params)
        mean, var = m.moments(t)
        batch = m.sample(t, cfg.n_samples, cfg.seed + 100 + i, cfg.workers)
        reps = moment_check(batch, mean, var, cfg.z_max)
        rep.add(f"{tag} t={t} {params}", all(r.accepted for r in reps),
                reports=[asdict(r) for r in reps])
    p = inv.InvParams(1.0, 1.0, 2)
    exact = inv.yn_moments(p, 1, 100.0)
    rep.add("E Y^(2)(100) within 1% of 50.75", abs(exact - 50.75) <= 0.01 * 50.75, exact=exact)


COV_CASES = [
    ("y", {"lambda": 1.0, "beta": 1.0}, 1.0, 2.0),
    ("gn", {"lambda": 1.0, "alpha": 2.0, "beta": 1.0}, 1.0, 2.0),
    ("ngn", {"lambda": 1.0, "alpha": 1.0, "beta": 1.0, "lambda1": 1.0}, 2.0, 3.0),
    ("ny", {"lambda": 1.0, "beta": 1.0, "lambda1": 1.0}, 1.0, 2.0),
    ("sk-i-gn", {"lambda": 1.0, "alpha": 1.0, "beta": 1.0, "lambda1": 2.0, "lambda2": 1.0}, 1.0, 1.5),
    ("sk-ii-en", {"lambda": 1.0, "beta": 1.0, "lambda1": 1.0, "lambda2": 1.0}, 1.0, 2.0),
    ("sy-i", {"lambda": 1.0, "beta": 1.0, "lambda1": 2.0, "lambda2": 1.0}, 1.0, 2.0),
    ("sy-ii", {"lambda": 1.0, "beta": 1.0, "lambda1": 1.0, "lambda2": 1.0}, 1.0, 1.0),
]


def _suite_covariance(cfg: SuiteConfig, rep: SuiteReport):
    for i, (tag, params, t, s) in enumerate(COV_CASES):
        m = models.build(tag, params)
        batch = m.sample_pairs(t, s, cfg.n_joint, cfg.seed + 200 + i, cfg.workers)
        r = covariance_check(batch, m.cov(t, s), cfg.z_max)
        monotone = True
        if m.kind != "pmf" or tag in ("ngn", "ny"):
            lo, hi = (0, 1) if t <= s else (1, 0)
            monotone = bool(np.all(batch.values[:, lo] <= batch.values[:, hi]))
        rep.add(f"{tag} cov({t},{s}) {params}", r.accepted and monotone, monotone=monotone, **asdict(r))


# -- governing equations -------------------------------------------------------------

def _suite_ode(cfg: SuiteConfig, rep: SuiteReport):
    worst = 0.0
    for lam, alpha, beta, l1 in [(1, 1, 1, 1), (2, 1.5, 0.5, 1), (0.7, 2.5, 1.3, 0.4),
                                 (1.5, 0.6, 2.0, 1.2), (1.0, 1.0, 0.5, 2.0)]:
        p = tc.TcPoissonParams(CpgParams(lam, alpha, beta), l1)
        for t in (0.3, 0.7, 1.0, 3.0):
            for k in range(11):
                worst = max(worst, tc.ngn_master_residual(p, k, t))
    rep.add("forward difference-differential system", worst < 1e-6, max_residual=worst)
    grid = (0.5, 1.0, 2.0)
    worst = {"eq1": 0.0, "eq2": 0.0, "eq3": 0.0}
    for lam in grid:
        for beta in grid:
            for l1 in (0.4, 1.0, 2.5):
                for t in (0.3, 1.0, 3.0):
                    for k in range(11):
                        for w in ("eq1", "eq2"):
                            worst[w] = max(worst[w], inv.forward_inverse_residual(w, lam, beta, l1, k, t))
                        if lam == beta:
                            worst["eq3"] = max(worst["eq3"], inv.forward_inverse_residual("eq3", lam, beta, l1, k, t))
    for w, v in worst.items():
        rep.add(f"forward/inverse relation {w}", v < 1e-6, max_residual=v)


# -- transform identities --------------------------------------------------------------

def _dual_table(prob, log_mgf, th_lo, th_hi, margin=0.3, rel=1e-10):
    """Pmf table wide enough that sum e^{theta k} p_k over it is accurate to ``rel``
    for theta in [th_lo, th_hi]; tails bounded by Chernoff at theta +- margin."""
    up, down = th_hi + margin, th_lo - margin
    k_hi = math.ceil((log_mgf(up) - log_mgf(th_hi) - math.log(rel * (1 - math.exp(-margin)))) / margin)
    k_lo = math.floor(-(log_mgf(down) - log_mgf(th_lo) - math.log(rel * (1 - math.exp(-margin)))) / margin)
    rule = TailRule(log_mgf, up, down if th_lo < 0 else None)
    lo = min(k_lo, 0) if rule.theta_down is not None else 0
    return tabulate(prob, rule, lo, max(k_hi, 0))


def _suite_laplace(cfg: SuiteConfig, rep: SuiteReport):
    from scipy import integrate
    for n, lam, beta, t in [(1, 1.0, 1.0, 1.0), (1, 2.0, 0.5, 1.7), (2, 1.0, 1.0, 1.0),
                            (2, 0.7, 2.0, 0.6), (3, 1.0, 2.0, 1.0)]:
        p = inv.InvParams(lam, beta, n)
        law = models._y_law(p, t)
        errs = []
        for th in (0.0, 0.3, 1.0, 2.5):
            q = law.laplace(th, rel_tol=1e-11)
            errs.append(_rel(q, inv.yn_laplace(p, th, t)))
        rep.add(f"density/Laplace duality n={n} lam={lam} beta={beta} t={t}", max(errs) <= 1e-7,
                max_rel_err=max(errs))
    for n, lam, beta, v, u in [(1, 1.0, 1.0, 1.0, 1.0), (2, 1.0, 0.5, 2.0, 1.0),
                               (1, 2.0, 0.7, 0.5, 2.0), (2, 0.8, 1.5, 1.0, 0.5)]:
        lhs, rhs, gap = inv.yn_double_laplace_check(inv.InvParams(lam, beta, n), v, u)
        rep.add(f"double Laplace identity n={n} lam={lam} beta={beta} v={v} u={u}", gap < 1e-6,
                lhs=lhs, rhs=rhs, rel_gap=gap)

    thetas = [-1.0, -0.6, -0.2, 0.1, 0.2]
    sub = CpgParams(1.0, 1.5, 3.0)
    sk = SkellamParams(0.8, 0.4)
    p_ngn = tc.TcPoissonParams(sub, 0.8)
    p_i = tc.TcSkellamParams(sub, sk, "I")
    p_ii = tc.TcSkellamParams(CpgParams(1.0, 1.0, 3.0), sk, "II")
    ip = inv.InvParams(3.0, 1.0, 1)
    ip2 = inv.InvParams(3.0, 1.0, 2)
    cases = [
        ("N1(G_N)", lambda k: tc.ngn_pk(p_ngn, k, 1.0), lambda th: tc.ngn_log_mgf(p_ngn, th, 1.0)),
        ("Skellam I over G_N", lambda k: tc.skellam_i_gn_pmf(p_i, k, 1.0),
         lambda th: tc._sk_i_gn_log_mgf(p_i, th, 1.0)),
        ("Skellam II over E_N", lambda k: tc.skellam_ii_en_pmf(p_ii, k, 1.0),
         lambda th: tc._sk_ii_log_mgf_factors(p_ii, th, 1.0)),
    ]
    for label, pp in [("Y", ip), ("Y^(2)", ip2)]:
        a = inv.InvTcParams(pp, 0.8, 0.4, "skellam-i")
        b = inv.InvTcParams(pp, 0.8, 0.4, "skellam-ii")
        cases.append((f"Skellam I over {label}", (lambda a_: lambda k: inv.syn_i_pk(a_, k, 1.0))(a),
                      (lambda a_: lambda th: inv._syn_i_log_mgf(a_, th, 1.0))(a)))
        cases.append((f"Skellam II over {label}", (lambda b_: lambda k: inv.syn_ii_pk(b_, k, 1.0))(b),
                      (lambda b_: lambda th: inv._syn_ii_log_mgf(b_, th, 1.0))(b)))
    for label, prob, log_mgf in cases:
        table = _dual_table(prob, log_mgf, min(thetas), max(thetas))
        errs = [_rel(table.mgf(th), math.exp(log_mgf(th))) for th in thetas]
        rep.add(f"MGF/pmf duality {label}", max(errs) <= 1e-6, max_rel_err=max(errs),
                k_range=[table.k_min, table.k_max])


# -- composition ------------------------------------------------------------------------

def _suite_semigroup(cfg: SuiteConfig, rep: SuiteReport):
    for i, a in enumerate([(0.5, 0.5), (0.25, 0.75), (0.25, 0.25, 0.5)]):
        r = semigroup_check(a, 1.0, cfg.n_samples, cfg.seed + 300 + 2 * i, level=cfg.level,
                            z_max=cfg.z_max, workers=cfg.workers)
        passed = r.pop("passed")
        rep.add(f"composition a={list(a)}", passed, **r)


# -- asymptotics ---------------------------------------------------------------------------

def _suite_asymptotics(cfg: SuiteConfig, rep: SuiteReport):
    worst = 0.0
    for n in (1, 2, 3, 4):
        for lam, beta in [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)]:
            for t in (0.1, 1.0, 5.0, 30.0):
                p = inv.InvParams(lam, beta, n)
                worst = max(worst, _rel(inv.yn_mean_alt(p, t), inv.yn_moments(p, 1, t)))
    rep.add("mean: Mittag-Leffler correction form vs series form", worst <= 1e-9, max_rel_err=worst)
    worst = 0.0
    for n in (1, 2, 3):
        for lam, beta in [(1.0, 1.0), (2.0, 0.5)]:
            for bt in (50.0, 100.0, 200.0):
                p = inv.InvParams(lam, beta, n)
                t = bt / beta
                worst = max(worst, _rel(inv.yn_moments(p, 1, t), inv.yn_mean_asymptote(p, t)))
    rep.add("mean within 1% of linear asymptote for beta t >= 50", worst <= 0.01, max_rel_err=worst)
    p = inv.InvParams(1.0, 1.0, 2)
    exact = inv.yn_moments(p, 1, 100.0)
    rep.add("E Y^(2)(100) vs 50.75", _rel(exact, 50.75) <= 0.01, exact=exact)
    ts = np.linspace(0.0, 20.0, 81)
    for n in (1, 2, 3):
        means = [inv.yn_moments(inv.InvParams(1.0, 1.0, n), 1, t) for t in ts]
        rep.add(f"mean strictly increasing n={n}", bool(np.all(np.diff(means) > 0)))
    pz = inv.InvTcParams(inv.InvParams(1.0, 1.0, 2), 1.0)
    mean_z = inv.nyn_pmf_laplace(pz, 0, 100.0)[2]
    rep.add("E N1(Y^(2)(100)) within 1% of 50.75", _rel(mean_z, 50.75) <= 0.01, mean=mean_z)


_SUITE_FN = {
    "normalization": _suite_normalization,
    "consistency": _suite_consistency,
    "mc-gof": _suite_mc_gof,
    "moments": _suite_moments,
    "covariance": _suite_covariance,
    "ode": _suite_ode,
    "laplace-identity": _suite_laplace,
    "semigroup": _suite_semigroup,
    "asymptotics": _suite_asymptotics,
}


def suite_run(name: str, config: Optional[SuiteConfig] = None) -> SuiteReport:
    if name not in _SUITE_FN:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    cfg = config or SuiteConfig()
    rep = SuiteReport(name, cfg.seed)
    _SUITE_FN[name](cfg, rep)
    return rep


def batch_report(batch: SampleBatch, level: float = DEFAULT_LEVEL, z_max: float = DEFAULT_ZMAX) -> SuiteReport:
    """Checks of a stored sample against its model: chi-square plus mean/variance,
    and for (X(t), X(s)) pairs the same at both times plus the covariance."""
    m = models.build(batch.model, batch.params)
    rep = SuiteReport(f"batch:{batch.model}", batch.seed)
    vals = np.asarray(batch.values)
    columns = [(batch.t, vals)] if batch.s is None else [(batch.t, vals[:, 0]), (batch.s, vals[:, 1])]
    for t, x in columns:
        tag = "" if batch.s is None else f" at t={t:g}"
        gof = gof_chisq(x, m.law(t), level)
        rep.add("chi-square" + tag, gof.accepted, **asdict(gof))
        mean, var = m.moments(t)
        for r in moment_check(x, mean, var, z_max):
            rep.add(r.label + tag, r.accepted, **asdict(r))
    if batch.s is not None:
        cov = m.cov(batch.t, batch.s)
        if cov is not None:
            r = covariance_check(vals, cov, z_max)
            rep.add("cov", r.accepted, **asdict(r))
    return rep
