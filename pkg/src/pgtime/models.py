"""Registry mapping model tags to parameters, analytic laws, samplers and moments.

Used by the verification harness and the command line so that every model is
described in exactly one place.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import inverse as inv
from . import mc
from . import timechange as tc
from .errors import DomainError
from .levy import (CpgParams, MixedLaw, Pmf, SkellamParams, cpg_laplace_exponent,
                   cpg_transition_law, skellam_bernstein, skellam_law, skellam_pmf)

# parameters each tag needs (CLI flag names without dashes)
REQUIRED = {
    "gn": ("lambda", "alpha", "beta"),
    "en": ("lambda", "beta"),
    "y": ("lambda", "beta"),
    "yn": ("lambda", "beta", "n"),
    "ngn": ("lambda", "alpha", "beta", "lambda1"),
    "nen": ("lambda", "beta", "lambda1"),
    "ny": ("lambda", "beta", "lambda1"),
    "nyn": ("lambda", "beta", "n", "lambda1"),
    "sk": ("lambda1", "lambda2"),
    "sk-i-gn": ("lambda", "alpha", "beta", "lambda1", "lambda2"),
    "sk-ii-en": ("lambda", "beta", "lambda1", "lambda2"),
    "sy-i": ("lambda", "beta", "lambda1", "lambda2"),
    "sy-ii": ("lambda", "beta", "lambda1", "lambda2"),
    "syn-i": ("lambda", "beta", "n", "lambda1", "lambda2"),
    "syn-ii": ("lambda", "beta", "n", "lambda1", "lambda2"),
    "tilde-compose": ("a", "lambda1"),
}
TAGS = tuple(REQUIRED)


@dataclass(frozen=True)
class Model:
    """A fully parameterized model.

    ``kind`` is "pmf" (integer valued), "density" (law with a density) or
    "mixed" (atom at zero plus a density).  ``transform_sign`` is -1 when
    ``transform`` is the Laplace transform E e^{-theta X} and +1 for the
    MGF E e^{theta X}.
    """

    tag: str
    params: dict
    obj: object
    kind: str
    transform_sign: int

    # -- analytic side -------------------------------------------------
    def law(self, t: float):
        return _LAW[self.tag](self.obj, t)

    def transform(self, theta: float, t: float) -> float:
        return _TRANSFORM[self.tag](self.obj, theta, t)

    def moments(self, t: float) -> tuple[float, float]:
        return _MOMENTS[self.tag](self.obj, t)

    def cov(self, t: float, s: float) -> Optional[float]:
        f = _COV.get(self.tag)
        return None if f is None else f(self.obj, t, s)

    def pmf(self, k: int, t: float) -> float:
        """Pointwise P(X(t) = k), independent of any tabulated range."""
        if self.kind != "pmf":
            raise DomainError(f"model {self.tag} has a density; use density")
        return _PK[self.tag](self.obj, int(k), t)

    def density(self, s: float, t: float) -> float:
        if self.kind == "pmf":
            raise DomainError(f"model {self.tag} is integer valued; use its pmf")
        return self.law(t).density(s)

    # -- sampling side -------------------------------------------------
    def block_sampler(self, t: float) -> Callable[[int, np.random.Generator], np.ndarray]:
        obj, tag = self.obj, self.tag
        if tag in ("gn", "en"):
            return lambda m, g: mc.cpg_values(obj, t, m, g)
        if tag in ("y", "yn"):
            fwd = obj.forward()
            return lambda m, g: mc.inverse_values(fwd, t, m, g)
        if tag == "sk":
            return lambda m, g: g.poisson(obj.lambda1 * t, m) - g.poisson(obj.lambda2 * t, m)
        return lambda m, g: mc.timechanged_values(obj, [t], m, g)[:, 0]

    def pair_sampler(self, t: float, s: float):
        obj, tag = self.obj, self.tag
        if tag in ("gn", "en"):
            return lambda m, g: mc.cpg_pair(obj, t, s, m, g)
        if tag in ("y", "yn"):
            fwd = obj.forward()
            return lambda m, g: mc.inverse_pair(fwd, t, s, m, g)
        if tag in ("sk", "tilde-compose"):
            raise DomainError(f"joint sampling not provided for {tag}")
        return lambda m, g: mc.timechanged_values(obj, [t, s], m, g)

    def sample(self, t: float, n: int, seed: int, workers: Optional[int] = None) -> mc.SampleBatch:
        vals = mc.draw_blocks(self.block_sampler(t), n, seed, workers)
        return mc.SampleBatch(vals, self.tag, float(t), n, seed, mc.n_streams(n), dict(self.params))

    def sample_pairs(self, t: float, s: float, n: int, seed: int,
                     workers: Optional[int] = None) -> mc.SampleBatch:
        vals = mc.draw_blocks(self.pair_sampler(t, s), n, seed, workers)
        return mc.SampleBatch(vals, self.tag, float(t), n, seed, mc.n_streams(n),
                              dict(self.params), s=float(s))


def _num(params, key):
    if key not in params or params[key] is None:
        raise DomainError(f"missing parameter --{key}")
    return params[key]


def build(tag: str, params: dict) -> Model:
    """Construct a Model from a tag and named parameters (CLI spelling)."""
    if tag not in REQUIRED:
        raise DomainError(f"unknown model tag {tag!r}; choose from {', '.join(TAGS)}")
    p = {k: _num(params, k) for k in REQUIRED[tag]}
    lam = p.get("lambda")
    beta = p.get("beta")
    if "n" in p:
        n = p["n"]
        if int(n) != n:
            raise DomainError(f"n must be an integer, got {n}")
        p["n"] = int(n)
    if tag == "gn":
        return Model(tag, p, CpgParams(lam, p["alpha"], beta), "mixed", -1)
    if tag == "en":
        return Model(tag, p, CpgParams(lam, 1.0, beta), "mixed", -1)
    if tag in ("y", "yn"):
        return Model(tag, p, inv.InvParams(lam, beta, p.get("n", 1)), "density", -1)
    if tag in ("ngn", "nen"):
        sub = CpgParams(lam, p.get("alpha", 1.0), beta)
        return Model(tag, p, tc.TcPoissonParams(sub, p["lambda1"]), "pmf", 1)
    if tag in ("ny", "nyn"):
        ip = inv.InvParams(lam, beta, p.get("n", 1))
        return Model(tag, p, inv.InvTcParams(ip, p["lambda1"]), "pmf", 1)
    if tag == "sk":
        return Model(tag, p, SkellamParams(p["lambda1"], p["lambda2"]), "pmf", 1)
    if tag in ("sk-i-gn", "sk-ii-en"):
        sub = CpgParams(lam, p.get("alpha", 1.0), beta)
        sk = SkellamParams(p["lambda1"], p["lambda2"])
        return Model(tag, p, tc.TcSkellamParams(sub, sk, "I" if tag == "sk-i-gn" else "II"), "pmf", 1)
    if tag in ("sy-i", "sy-ii", "syn-i", "syn-ii"):
        ip = inv.InvParams(lam, beta, p.get("n", 1))
        variant = "skellam-i" if tag.endswith("-i") else "skellam-ii"
        return Model(tag, p, inv.InvTcParams(ip, p["lambda1"], p["lambda2"], variant), "pmf", 1)
    # tilde-compose
    a = p["a"]
    a = tuple(a) if isinstance(a, (list, tuple)) else (float(a),)
    p["a"] = list(a)
    return Model(tag, p, mc.TildeComposition(a, p["lambda1"]), "pmf", 1)


def _tilde_equivalent(obj: mc.TildeComposition) -> tc.TcPoissonParams:
    return tc.TcPoissonParams(CpgParams.tilde(obj.total), obj.lambda1)


def _y_law(obj, t):
    dens = (lambda s: inv.y_density(obj, s, t)) if obj.n == 1 else (lambda s: inv.yn_density(obj, s, t))
    mean = inv.yn_moments(obj, 1, t)
    return MixedLaw(0.0, dens, 2.0 * mean + 1.0 / obj.lambda_)


_LAW = {
    "gn": cpg_transition_law,
    "en": cpg_transition_law,
    "y": _y_law,
    "yn": _y_law,
    "ngn": lambda o, t: tc.ngn_pmf(o, t),
    "nen": lambda o, t: tc.ngn_pmf(o, t),
    "ny": lambda o, t: inv.nyn_law(o, t),
    "nyn": lambda o, t: inv.nyn_law(o, t),
    "sk": lambda o, t: skellam_law(o, t),
    "sk-i-gn": tc.skellam_i_gn_law,
    "sk-ii-en": tc.skellam_ii_en_law,
    "sy-i": inv.syn_i_law,
    "syn-i": inv.syn_i_law,
    "sy-ii": inv.syn_ii_law,
    "syn-ii": inv.syn_ii_law,
    "tilde-compose": lambda o, t: tc.ngn_pmf(_tilde_equivalent(o), t),
}


_PK = {
    "ngn": tc.ngn_pk,
    "nen": tc.ngn_pk,
    "ny": inv.nyn_pk,
    "nyn": inv.nyn_pk,
    "sk": skellam_pmf,
    "sk-i-gn": tc.skellam_i_gn_pmf,
    "sk-ii-en": tc.skellam_ii_en_pmf,
    "sy-i": inv.syn_i_pk,
    "syn-i": inv.syn_i_pk,
    "sy-ii": inv.syn_ii_pk,
    "syn-ii": inv.syn_ii_pk,
    "tilde-compose": lambda o, k, t: tc.ngn_pk(_tilde_equivalent(o), k, t),
}


def _sk_mgf(o, th, t):
    return math.exp(-t * skellam_bernstein(o, -th))


_TRANSFORM = {
    "gn": lambda o, th, t: math.exp(-t * cpg_laplace_exponent(o, th)),
    "en": lambda o, th, t: math.exp(-t * cpg_laplace_exponent(o, th)),
    "y": lambda o, th, t: inv.y_laplace(o, th, t),
    "yn": lambda o, th, t: inv.yn_laplace(o, th, t),
    "ngn": lambda o, th, t: tc.ngn_mgf(o, th, t),
    "nen": lambda o, th, t: tc.ngn_mgf(o, th, t),
    "ny": lambda o, th, t: math.exp(inv._nyn_log_mgf(o, th, t)),
    "nyn": lambda o, th, t: math.exp(inv._nyn_log_mgf(o, th, t)),
    "sk": _sk_mgf,
    "sk-i-gn": lambda o, th, t: tc.skellam_i_gn_mgf_moments(o, th, t, t)[0],
    "sk-ii-en": lambda o, th, t: tc.skellam_ii_en_mgf_cov(o, th, t, t)[0],
    "sy-i": lambda o, th, t: math.exp(inv._syn_i_log_mgf(o, th, t)),
    "syn-i": lambda o, th, t: math.exp(inv._syn_i_log_mgf(o, th, t)),
    "sy-ii": lambda o, th, t: math.exp(inv._syn_ii_log_mgf(o, th, t)),
    "syn-ii": lambda o, th, t: math.exp(inv._syn_ii_log_mgf(o, th, t)),
    "tilde-compose": lambda o, th, t: tc.ngn_mgf(_tilde_equivalent(o), th, t),
}


def _y_mom(o, t):
    if o.n == 1:
        return tuple(inv.y_moments_cov(o, t)[i] for i in (0, 2))
    m1 = inv.yn_moments(o, 1, t)
    return m1, inv.yn_moments(o, 2, t) - m1 * m1


def _nyn_mom(o, t):
    if o.inv.n == 1:
        return inv.ny_laplace_moments(o, 0.0, t)[1:3]
    _, _, mean, second = inv.nyn_pmf_laplace(o, 0, t)
    return mean, second - mean * mean


def _syn_i_mom(o, t):
    if o.inv.n == 1:
        return inv.sy_i_moments_cov(o, t)[:2]
    m1, v = _y_mom(o.inv, t)
    d, w = o.sk.mean1, o.sk.var1
    return d * m1, d * d * v + w * m1


_MOMENTS = {
    "gn": lambda o, t: (o.mean(t), o.var(t)),
    "en": lambda o, t: (o.mean(t), o.var(t)),
    "y": _y_mom,
    "yn": _y_mom,
    "ngn": tc.ngn_moments,
    "nen": tc.ngn_moments,
    "ny": _nyn_mom,
    "nyn": _nyn_mom,
    "sk": lambda o, t: (o.mean1 * t, o.var1 * t),
    "sk-i-gn": lambda o, t: tuple(tc.skellam_i_gn_mgf_moments(o, 0.0, t, t)[1:3]),
    "sk-ii-en": tc.skellam_ii_en_moments,
    "sy-i": _syn_i_mom,
    "syn-i": _syn_i_mom,
    "sy-ii": inv.syn_ii_moments,
    "syn-ii": inv.syn_ii_moments,
    "tilde-compose": lambda o, t: tc.ngn_moments(_tilde_equivalent(o), t),
}

_COV = {
    "gn": lambda o, t, s: o.var(min(t, s)),
    "en": lambda o, t, s: o.var(min(t, s)),
    "y": lambda o, t, s: inv.y_moments_cov(o, t, s)[3],
    "ngn": tc.ngn_cov,
    "nen": tc.ngn_cov,
    "ny": lambda o, t, s: inv.ny_laplace_moments(o, 0.0, t, s)[3],
    "sk-i-gn": lambda o, t, s: tc.skellam_i_gn_mgf_moments(o, 0.0, t, s)[3],
    "sk-ii-en": lambda o, t, s: tc.skellam_ii_en_mgf_cov(o, 0.0, t, s)[1],
    "sy-i": lambda o, t, s: inv.sy_i_moments_cov(o, t, s)[2],
    "sy-ii": inv.sy_ii_cov,
}

