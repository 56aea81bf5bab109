"""Deterministic quadrature oracles for the closed forms.

These integrate the original definitions directly and never reuse the
algebra that produced the closed forms.
"""

from __future__ import annotations

import math
import warnings

from scipy import integrate

from .._quad import integrate_line
from ..distributions import Density, Scenario, Source
from ..special import norm_cdf, norm_pdf
from .montecarlo import Estimate, Method

__all__ = [
    "QuadratureError",
    "quad_success_probability",
    "pairwise_success_quad",
    "owen_t_quad",
    "product_phi_integral_quad",
    "phi_convolution_quad",
]


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


def _quad(f, a, b, points, epsabs, epsrel=1e-12, limit=400):
    pts = sorted(p for p in set(points) if a < p < b)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info = integrate.quad(
            f, a, b, points=pts or None, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1
        )[:3]
    return val, err


def _tail_mass(d: Density, lo: float, hi: float) -> float:
    return float(d.cdf(lo)) + float(d.sf(hi))


def pairwise_success_quad(
    fx: Density, fz: Density, condition: Source, epsabs: float = 1e-10
) -> tuple[float, float]:
    """P(nearest neighbor correct | y from ``condition``) by 2-D quadrature in (x, z).

    Uses f(x, z) = F((x+z)/2) on {x < z} and 1 - F((x+z)/2) on {x > z} for
    y ~ f_X (mirrored for y ~ f_Z), integrated against f_X(x) f_Z(z).
    Returns ``(value, error_bound)``.
    """
    fy = fx if condition == Source.FROM_X else fz
    lx, ux = fx.effective_interval()
    lz, uz = fz.effective_interval()
    trunc = _tail_mass(fx, lx, ux) + _tail_mass(fz, lz, uz)
    kx, kz, ky = fx.kinks, fz.kinks, fy.kinks
    inner_err = [0.0]
    # y closer to x: below the midpoint when x < z, above it when x > z
    own_low = condition == Source.FROM_X

    def outer(x: float) -> float:
        px = float(fx.pdf(x))
        if px == 0.0:
            return 0.0
        zpts = list(kz) + [2.0 * k - x for k in ky]

        def upper(z):  # z > x
            m = 0.5 * (x + z)
            g = float(fy.cdf(m)) if own_low else float(fy.sf(m))
            return g * float(fz.pdf(z))

        def lower(z):  # z < x
            m = 0.5 * (x + z)
            g = float(fy.sf(m)) if own_low else float(fy.cdf(m))
            return g * float(fz.pdf(z))

        total = 0.0
        if x < uz:
            v, e = _quad(upper, max(x, lz), uz, zpts, epsabs * 0.1)
            total += v
            inner_err[0] = max(inner_err[0], e)
        if x > lz:
            v, e = _quad(lower, lz, min(x, uz), zpts, epsabs * 0.1)
            total += v
            inner_err[0] = max(inner_err[0], e)
        return px * total

    xpts = list(kx) + list(kz)
    val, err = _quad(outer, lx, ux, xpts, epsabs)
    return val, err + inner_err[0] + trunc


def quad_success_probability(s: Scenario, condition: Source, epsabs: float = 1e-10) -> Estimate:
    """Conditional nearest-neighbor success for a Gaussian pair, by 2-D quadrature.

    Raises
    ------
    ValueError
        If either density is not Gaussian.
    """
    if not s.is_gaussian:
        raise ValueError("quad_success_probability needs a Gaussian scenario")
    val, err = pairwise_success_quad(s.fx, s.fz, Source(condition), epsabs)
    if err > 100 * epsabs:
        raise QuadratureError(f"2-D quadrature error bound {err:.3g} exceeds tolerance {epsabs:.3g}")
    return Estimate(val, 0.0, 0, Method.QUADRATURE, 0, err)


def owen_t_quad(h: float, a: float) -> float:
    """Owen's T straight from its definition on [0, a], with no range folding."""
    val, _ = integrate.quad(
        lambda t: math.exp(-0.5 * h * h * (1.0 + t * t)) / (1.0 + t * t),
        0.0,
        a,
        epsabs=1e-15,
        epsrel=1e-13,
        limit=400,
    )
    return val / (2.0 * math.pi)


def product_phi_integral_quad(a: float, b: float, c: float, d: float) -> float:
    """``int Phi(a + b m) Phi(c + d m) phi(m) dm`` by 1-D quadrature over the real line."""
    val, _ = integrate_line(lambda m: norm_cdf(a + b * m) * norm_cdf(c + d * m) * norm_pdf(m), epsabs=1e-14)
    return val


def phi_convolution_quad(c: float, tau1: float, b: float, tau2: float) -> float:
    """``int Phi((u - c)/tau1) phi((u - b)/tau2) du`` by 1-D quadrature."""
    val, _ = integrate_line(
        lambda u: norm_cdf((u - c) / tau1) * norm_pdf((u - b) / tau2), points=(b,), epsabs=1e-14
    )
    return val
