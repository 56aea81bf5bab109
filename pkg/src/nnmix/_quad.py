"""Adaptive quadrature over (possibly infinite) intervals.

Infinite ranges are mapped onto (-1, 1) with ``w = t / (1 - t**2)`` rather
than truncated, and integrated with QUADPACK's adaptive Gauss-Kronrod rule.
"""

from __future__ import annotations

import math
from typing import Callable, Iterable

from scipy import integrate


def _to_t(w: float) -> float:
    if w == 0.0:
        return 0.0
    if math.isinf(w):
        return math.copysign(1.0, w)
    return (math.sqrt(1.0 + 4.0 * w * w) - 1.0) / (2.0 * w)


def _from_t(t: float) -> tuple[float, float]:
    d = 1.0 - t * t
    return t / d, (1.0 + t * t) / (d * d)


def integrate_line(
    f: Callable[[float], float],
    points: Iterable[float] = (),
    lo: float = -math.inf,
    hi: float = math.inf,
    epsabs: float = 1e-13,
    epsrel: float = 1e-12,
    limit: int = 400,
) -> tuple[float, float]:
    """Integrate a scalar function over ``[lo, hi]``; returns ``(value, abserr)``.

    ``points`` are interior breakpoints (kinks or jumps of ``f``) where the
    adaptive rule should split.
    """
    inner = sorted(p for p in set(points) if lo < p < hi)
    if math.isfinite(lo) and math.isfinite(hi):
        return integrate.quad(f, lo, hi, points=inner or None, epsabs=epsabs, epsrel=epsrel, limit=limit)

    def g(t: float) -> float:
        if abs(t) >= 1.0:
            return 0.0
        w, jac = _from_t(t)
        if math.isinf(jac):
            return 0.0
        return f(w) * jac

    a, b = _to_t(lo), _to_t(hi)
    tpts = [_to_t(p) for p in inner]
    return integrate.quad(g, a, b, points=tpts or None, epsabs=epsabs, epsrel=epsrel, limit=limit)
