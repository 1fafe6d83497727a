"""Adaptive quadrature on [0, inf) for integrands with exponential decay."""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy import integrate

from .errors import QuadratureFailure

DEFAULT_REL_TOL = 1e-10


def _panel(f, a, b, rel_tol, abs_tol):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            f, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=200, full_output=True)[:3]
    if not math.isfinite(val):
        raise QuadratureFailure(f"non-finite integral on [{a}, {b}]")
    return val, err


def integrate_to_infinity(f, scale: float, rel_tol: float = DEFAULT_REL_TOL,
                          abs_tol: float = 0.0, max_doublings: int = 60,
                          points=None) -> float:
    """Integral of ``f`` over (0, inf).

    The range is cut into panels [0, U], [U, 2U], [2U, 4U], ... starting from
    ``U = scale``; panels are added until the last one contributes less than
    1e-3 * rel_tol of the running total (or less than ``abs_tol``).
    Each panel is integrated by QUADPACK's adaptive Gauss-Kronrod rule.
    ``points`` are optional interior break points for the first panel.

    Raises QuadratureFailure when the error estimate stays above tolerance or
    the doubling budget runs out.
    """
    if not (scale > 0 and math.isfinite(scale)):
        raise QuadratureFailure(f"bad integration scale {scale}")
    total = 0.0
    err_total = 0.0
    lo, hi = 0.0, scale
    inner = max(rel_tol * 1e-2, 2e-14)
    first = True
    for _ in range(max_doublings):
        if first and points:
            pts = sorted(p for p in points if 0 < p < hi)
            edges = [0.0, *pts, hi]
            val = err = 0.0
            for a, b in zip(edges[:-1], edges[1:]):
                v, e = _panel(f, a, b, inner, abs_tol * 1e-2)
                val += v
                err += e
        else:
            val, err = _panel(f, lo, hi, inner, abs_tol * 1e-2)
        first = False
        total += val
        err_total += err
        if abs(val) <= max(1e-3 * rel_tol * abs(total), abs_tol) and f(hi) <= max(
                1e-3 * rel_tol * abs(total) / max(hi, 1.0), abs_tol):
            if err_total > max(rel_tol * abs(total), abs_tol) * 10:
                raise QuadratureFailure(
                    f"error estimate {err_total:.3g} above tolerance for total {total:.6g}")
            return total
        lo, hi = hi, 2.0 * hi
    raise QuadratureFailure(f"integrand not negligible after {max_doublings} doublings")


def integrate_vec_to_infinity(f, scale: float, rel_tol: float = DEFAULT_REL_TOL,
                              max_doublings: int = 60, points=None):
    """Vector-valued version of :func:`integrate_to_infinity`.

    ``f(x)`` returns a 1-d array; tolerances apply to its max-norm, so small
    components are accurate in absolute rather than relative terms.
    Panels use ``scipy.integrate.quad_vec``.
    """
    if not (scale > 0 and math.isfinite(scale)):
        raise QuadratureFailure(f"bad integration scale {scale}")
    inner = max(rel_tol * 1e-2, 2e-14)
    # geometric grading toward 0 resolves power-law endpoint behaviour
    graded = [scale * 0.5 ** j for j in range(1, 41)]
    edges = [0.0, *sorted({p for p in (*graded, *(points or ())) if 0 < p < scale}), scale]
    total = None
    for i in range(max_doublings + len(edges)):
        if i < len(edges) - 1:
            a, b = edges[i], edges[i + 1]
        else:
            a, b = b, 2.0 * b
        val, err = integrate.quad_vec(f, a, b, epsrel=inner, epsabs=0.0, norm="max", limit=400)
        if not np.all(np.isfinite(val)):
            raise QuadratureFailure(f"non-finite integral on [{a}, {b}]")
        total = val if total is None else total + val
        if b >= scale:
            size = np.max(np.abs(total))
            if np.max(np.abs(val)) <= 1e-3 * rel_tol * size and np.max(np.abs(f(b))) <= \
                    1e-3 * rel_tol * size / max(b, 1.0):
                return total
    raise QuadratureFailure(f"integrand not negligible after {max_doublings} doublings")
