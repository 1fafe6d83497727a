"""
Exact samplers for the subordinators, their first-passage inverses and the
Poisson / Skellam processes run on them.

Random streams
--------------
Each stream is a numpy ``Philox`` (4x64, 10 rounds) generator keyed by two
64-bit words derived from ``(seed, stream_id)`` with the SplitMix64 finalizer:

    key = (splitmix64(seed), splitmix64(stream_id XOR splitmix64(seed)))

Philox is counter based and its output is bit-identical across platforms.
Batches are cut into blocks of ``BLOCK`` samples; block ``b`` always uses
stream ``b`` and is always generated in full, so a batch depends only on
(model, t, n, seed) and never on the number of workers.

Variates come from numpy: Gamma by Marsaglia-Tsang (shape >= 1) and its
boosted form for shape < 1, Poisson by inversion below mean 10 and PTRS
above.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, RuntimeFault
from .inverse import InvParams, InvTcParams
from .levy import CpgParams, SkellamParams
from .timechange import TcPoissonParams, TcSkellamParams

BLOCK = 1 << 16
JUMP_CAP = 10 ** 9
_MASK = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


@dataclass
class RngState:
    """One independent random stream.  Single owner: do not share across threads."""

    seed: int
    stream_id: int = 0
    gen: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.seed = int(self.seed) & _MASK
        self.stream_id = int(self.stream_id) & _MASK
        k0 = splitmix64(self.seed)
        k1 = splitmix64(self.stream_id ^ k0)
        self.gen = np.random.Generator(np.random.Philox(key=np.array([k0, k1], dtype=np.uint64)))


def rng_stream(seed: int, stream_id: int = 0) -> RngState:
    return RngState(seed, stream_id)


def _gen(rng) -> np.random.Generator:
    if isinstance(rng, RngState):
        return rng.gen
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected RngState or numpy Generator, got {type(rng).__name__}")


def _check_time(t):
    if not t >= 0:
        raise DomainError(f"t must be >= 0, got {t}")


def _scalar(x, size):
    return x[0].item() if size is None else x


# ---------------------------------------------------------------------------
# clocks
# ---------------------------------------------------------------------------

def cpg_values(p: CpgParams, t, m: int, gen: np.random.Generator) -> np.ndarray:
    """m draws of G_N(t); ``t`` may be an array of length m (random times)."""
    counts = gen.poisson(p.lambda_ * np.asarray(t, dtype=float), size=m)
    return gen.standard_gamma(counts * p.alpha) / p.beta


def sample_cpg(p: CpgParams, t: float, rng, size: Optional[int] = None):
    """G_N(t): Poisson(lambda t) many Gamma(alpha, beta) jumps, summed."""
    _check_time(t)
    return _scalar(cpg_values(p, t, 1 if size is None else size, _gen(rng)), size)


@dataclass
class SamplePath:
    jump_times: np.ndarray
    jump_sizes: np.ndarray
    horizon: float

    def __post_init__(self):
        self.jump_times = np.asarray(self.jump_times, dtype=float)
        self.jump_sizes = np.asarray(self.jump_sizes, dtype=float)
        if self.jump_times.shape != self.jump_sizes.shape:
            raise DomainError("jump_times and jump_sizes differ in length")
        if len(self.jump_times) and (np.any(np.diff(self.jump_times) <= 0)
                                     or self.jump_times[0] < 0 or self.jump_times[-1] > self.horizon):
            raise DomainError("jump times must be strictly increasing inside [0, horizon]")

    def value_at(self, time: float) -> float:
        k = np.searchsorted(self.jump_times, time, side="right")
        return float(self.jump_sizes[:k].sum())


def sample_cpg_path(p: CpgParams, horizon: float, rng) -> SamplePath:
    """Jump epochs (sorted uniforms given a Poisson count) and Gamma jump sizes."""
    _check_time(horizon)
    gen = _gen(rng)
    count = int(gen.poisson(p.lambda_ * horizon))
    times = np.sort(gen.uniform(0.0, horizon, size=count))
    sizes = gen.standard_gamma(p.alpha, size=count) / p.beta
    return SamplePath(times, sizes, float(horizon))


def path_first_passage(path: SamplePath, level: float) -> Optional[float]:
    """Epoch of the first jump taking the path above ``level``; None if it
    stays at or below ``level`` up to the horizon."""
    k = int(np.searchsorted(np.cumsum(path.jump_sizes), level, side="right"))
    return float(path.jump_times[k]) if k < len(path.jump_times) else None


def first_passage_counts(p: CpgParams, levels: Sequence[float], m: int,
                         gen: np.random.Generator) -> np.ndarray:
    """Index of the first jump taking the cumulative jump sum above each level.

    Returns an (m, L) integer array for nondecreasing ``levels``; all levels
    are read off one jump sequence per sample.
    """
    levels = np.asarray(levels, dtype=float)
    if np.any(levels < 0) or np.any(np.diff(levels) < 0):
        raise DomainError("levels must be nonnegative and sorted")
    n_lv = len(levels)
    out = np.zeros((m, n_lv), dtype=np.int64)
    total = np.zeros(m)
    nxt = np.zeros(m, dtype=np.int64)
    active = np.arange(m)
    jumps = 0
    while active.size:
        jumps += 1
        if jumps > JUMP_CAP:
            raise RuntimeFault("first-passage sampler exceeded the jump cap")
        total[active] += gen.standard_gamma(p.alpha, size=active.size) / p.beta
        for j in range(n_lv):
            idx = active[(nxt[active] == j) & (total[active] > levels[j])]
            out[idx, j] = jumps
            nxt[idx] = j + 1
        active = active[nxt[active] < n_lv]
    return out


def inverse_values(p: CpgParams, t: float, m: int, gen: np.random.Generator) -> np.ndarray:
    """m draws of Y(t): the arrival epoch of the first jump taking G above t."""
    n_star = first_passage_counts(p, [t], m, gen)[:, 0]
    return gen.standard_gamma(n_star) / p.lambda_


def inverse_pair(p: CpgParams, t: float, s: float, m: int, gen: np.random.Generator) -> np.ndarray:
    """(Y(t), Y(s)) from one path; returns an (m, 2) array in the order (t, s)."""
    lo, hi = sorted((t, s))
    n_star = first_passage_counts(p, [lo, hi], m, gen)
    y_lo = gen.standard_gamma(n_star[:, 0]) / p.lambda_
    y_hi = y_lo + gen.standard_gamma(n_star[:, 1] - n_star[:, 0]) / p.lambda_
    pair = np.column_stack([y_lo, y_hi])
    return pair if t <= s else pair[:, ::-1]


def cpg_pair(p: CpgParams, t: float, s: float, m: int, gen: np.random.Generator) -> np.ndarray:
    """(G(t), G(s)) from one path via an independent increment."""
    lo, hi = sorted((t, s))
    g_lo = cpg_values(p, lo, m, gen)
    g_hi = g_lo + cpg_values(p, hi - lo, m, gen)
    pair = np.column_stack([g_lo, g_hi])
    return pair if t <= s else pair[:, ::-1]


def sample_inverse(p: CpgParams, t: float, rng, size: Optional[int] = None):
    """Exact first-passage draw of Y(t) = inf{u : G_N(u) > t}; any alpha > 0."""
    _check_time(t)
    return _scalar(inverse_values(p, t, 1 if size is None else size, _gen(rng)), size)


def sample_inverse_joint(p: CpgParams, t: float, s: float, rng, size: int) -> np.ndarray:
    _check_time(t)
    _check_time(s)
    return inverse_pair(p, t, s, size, _gen(rng))


# ---------------------------------------------------------------------------
# tilde class compositions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TildeComposition:
    """E^{a_1}(E^{a_2}(...E^{a_k}(t))) with lambda = beta = 1/a_i, optionally
    observed through a Poisson process of rate ``lambda1``."""

    a: tuple
    lambda1: Optional[float] = 1.0

    def __post_init__(self):
        a = tuple(float(x) for x in self.a)
        if not a or any(not (x > 0 and math.isfinite(x)) for x in a):
            raise DomainError("composition parameters must be positive")
        object.__setattr__(self, "a", a)

    @property
    def total(self) -> float:
        return math.fsum(self.a)


def tilde_clock_values(comp: TildeComposition, t: float, m: int, gen) -> np.ndarray:
    clock = np.full(m, float(t))
    for a in reversed(comp.a):
        clock = cpg_values(CpgParams.tilde(a), clock, m, gen)
    return clock


# ---------------------------------------------------------------------------
# time-changed counting processes
# ---------------------------------------------------------------------------

Model = Union[TcPoissonParams, TcSkellamParams, InvTcParams, TildeComposition]


def _clock_and_rates(model: Model):
    """(clock sampler (times, m, gen) -> (m, len(times)), outer rates, shared clock?)."""
    if isinstance(model, TcPoissonParams):
        sub = model.sub
        return ("cpg", sub), (model.lambda1,), True
    if isinstance(model, TcSkellamParams):
        return ("cpg", model.sub), (model.sk.lambda1, model.sk.lambda2), model.variant == "I"
    if isinstance(model, InvTcParams):
        sub = model.inv.forward()
        if model.variant == "poisson":
            return ("inv", sub), (model.lambda1,), True
        return ("inv", sub), (model.lambda1, model.lambda2), model.variant == "skellam-i"
    if isinstance(model, TildeComposition):
        return ("tilde", model), (model.lambda1,), True
    raise TypeError(f"unsupported model {type(model).__name__}")


def _clock(spec, times, m, gen) -> np.ndarray:
    kind, p = spec
    if len(times) == 1:
        t = times[0]
        if kind == "cpg":
            return cpg_values(p, t, m, gen)[:, None]
        if kind == "inv":
            return inverse_values(p, t, m, gen)[:, None]
        return tilde_clock_values(p, t, m, gen)[:, None]
    t, s = times
    if kind == "cpg":
        return cpg_pair(p, t, s, m, gen)
    if kind == "inv":
        return inverse_pair(p, t, s, m, gen)
    raise DomainError("joint sampling is not available for compositions")


def _count(rate, clock, gen) -> np.ndarray:
    """Poisson counts at the clock values of each row, one path per row."""
    order = np.argsort(clock, axis=1, kind="stable")
    srt = np.take_along_axis(clock, order, axis=1)
    inc = np.diff(srt, axis=1, prepend=0.0)
    counts = np.cumsum(gen.poisson(rate * inc), axis=1)
    out = np.empty_like(counts)
    np.put_along_axis(out, order, counts, axis=1)
    return out


def timechanged_values(model: Model, times: Sequence[float], m: int, gen) -> np.ndarray:
    """(m, len(times)) integer draws of the time-changed process."""
    spec, rates, shared = _clock_and_rates(model)
    if model.__class__ is TildeComposition and model.lambda1 is None:
        raise DomainError("composition without lambda1 has no counting process")
    clock = _clock(spec, times, m, gen)
    out = _count(rates[0], clock, gen)
    if len(rates) == 2:
        other = clock if shared else _clock(spec, times, m, gen)
        out = out - _count(rates[1], other, gen)
    return out


def sample_timechanged(model: Model, t: float, rng, size: Optional[int] = None):
    """Draw X(t) for a Poisson / Skellam process on a random clock.

    Type II Skellam models use two independent clocks; compositions chain
    tilde subordinators before the Poisson draw.
    """
    _check_time(t)
    vals = timechanged_values(model, [t], 1 if size is None else size, _gen(rng))[:, 0]
    return _scalar(vals, size)


def sample_timechanged_joint(model: Model, t: float, s: float, rng, size: int) -> np.ndarray:
    _check_time(t)
    _check_time(s)
    return timechanged_values(model, [t, s], size, _gen(rng))


# ---------------------------------------------------------------------------
# reproducible batches
# ---------------------------------------------------------------------------

def worker_count(requested: Optional[int] = None) -> int:
    cap = os.environ.get("PGTIME_THREADS")
    n = requested if requested is not None else (os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise DomainError(f"PGTIME_THREADS must be an integer, got {cap!r}") from None
    return max(1, n)


@dataclass
class SampleBatch:
    values: np.ndarray
    model: str
    t: float
    n_samples: int
    seed: int
    streams: int
    params: dict = field(default_factory=dict)
    s: Optional[float] = None

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if len(self.values) != self.n_samples:
            raise DomainError("batch length differs from n_samples")

    def to_bytes(self) -> bytes:
        return self.values.tobytes()


def draw_blocks(block_sampler: Callable[[int, np.random.Generator], np.ndarray], n: int,
                seed: int, workers: Optional[int] = None) -> np.ndarray:
    """Concatenate ``block_sampler(BLOCK, stream b)`` over blocks and truncate to n."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    n_blocks = max(1, -(-n // BLOCK))

    def one(b):
        return block_sampler(BLOCK, rng_stream(seed, b).gen)

    workers = min(worker_count(workers), n_blocks)
    if workers == 1:
        parts = [one(b) for b in range(n_blocks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(one, range(n_blocks)))
    return np.concatenate(parts)[:n]


def n_streams(n: int) -> int:
    return max(1, -(-n // BLOCK))
