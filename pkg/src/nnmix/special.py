"""Scalar special functions: the standard normal, Owen's T, and two normal-cdf integrals."""

from __future__ import annotations

import math

from scipy import integrate, special

__all__ = [
    "norm_pdf",
    "norm_cdf",
    "owen_t",
    "gaussian_product_phi_integral",
    "phi_cdf_gaussian_convolution",
]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_INV_2PI = 1.0 / (2.0 * math.pi)


def norm_pdf(w: float) -> float:
    return _INV_SQRT_2PI * math.exp(-0.5 * w * w)


def norm_cdf(w: float) -> float:
    """Standard normal cdf via the complementary error function."""
    return float(special.ndtr(w))


def _owen_t_core(h: float, a: float) -> float:
    # h >= 0, 0 < a <= 1; exp(-h^2/2) is factored out so a relative
    # tolerance on the remaining integral survives large h
    scale = math.exp(-0.5 * h * h)
    if scale == 0.0:
        return 0.0
    hh = 0.5 * h * h
    val, _ = integrate.quad(
        lambda t: math.exp(-hh * t * t) / (1.0 + t * t), 0.0, a, epsabs=0.0, epsrel=1e-13, limit=200
    )
    return scale * val * _INV_2PI


def owen_t(h: float, a: float) -> float:
    """Owen's T function by adaptive quadrature of its defining integral.

    T(h, a) = 1/(2 pi) * int_0^a exp(-h^2 (1 + t^2) / 2) / (1 + t^2) dt

    For ``|a| > 1`` the range is folded back onto ``[0, 1/|a|]`` with the
    reflection identity, so the quadrature never sees a long flat tail.
    """
    h = abs(float(h))
    a = float(a)
    if not (math.isfinite(h) and math.isfinite(a)):
        raise ValueError(f"owen_t needs finite arguments, got h={h}, a={a}")
    if a == 0.0:
        return 0.0
    sign = 1.0 if a > 0 else -1.0
    a = abs(a)
    if a <= 1.0:
        return sign * _owen_t_core(h, a)
    ah = a * h
    q = norm_cdf(-h)
    p = norm_cdf(-ah)
    return sign * (0.5 * (q + p) - q * p - _owen_t_core(ah, 1.0 / a))


def gaussian_product_phi_integral(a: float, b: float, c: float, d: float) -> float:
    """Closed form of ``int Phi(a + b m) Phi(c + d m) phi(m) dm`` over the real line.

    Only the ``a * c > 0`` branch is provided; outside it the identity picks
    up an additional constant that this function does not model.

    Raises
    ------
    ValueError
        If ``a * c <= 0``.
    """
    if not a * c > 0:
        raise ValueError(f"product integral closed form requires a*c > 0, got a={a}, c={c}")
    rb = math.sqrt(1.0 + b * b)
    rd = math.sqrt(1.0 + d * d)
    rbd = math.sqrt(1.0 + b * b + d * d)
    h = a / rb
    k = c / rd
    return (
        0.5 * norm_cdf(h)
        + 0.5 * norm_cdf(k)
        - owen_t(h, (c + c * b * b - a * b * d) / (a * rbd))
        - owen_t(k, (a + a * d * d - b * c * d) / (c * rbd))
    )


def phi_cdf_gaussian_convolution(c: float, tau1: float, b: float, tau2: float) -> float:
    """``int Phi((u - c)/tau1) phi((u - b)/tau2) du = tau2 Phi((b - c)/sqrt(tau1^2 + tau2^2))``."""
    if not (tau1 > 0 and tau2 > 0):
        raise ValueError("tau1 and tau2 must be positive")
    return tau2 * norm_cdf((b - c) / math.hypot(tau1, tau2))
