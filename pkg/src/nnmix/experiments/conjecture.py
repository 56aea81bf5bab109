"""Numerical evaluation of the (r, alpha) double integral for a density pair.

    I = int_r int_{alpha >= 0} (F_X(r) - F_Z(r))
            * (f_X(r - alpha) f_Z(r + alpha) - f_X(r + alpha) f_Z(r - alpha)) dalpha dr

Substituting x = r -/+ alpha, z = r +/- alpha shows I equals the nearest
neighbor success probability minus 1/2, which the tests use as a
cross-check against the Monte Carlo engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..distributions import Density, Scenario
from .oracles import QuadratureError, _quad

__all__ = ["ConjectureResult", "conjecture_integral", "integration_window"]

# every density is integrated over at least this many standard deviations
# either side of its mean, widened further where the tails demand it
_SD_SPAN = 12.0
_TAIL = 1e-16


@dataclass(frozen=True)
class ConjectureResult:
    scenario: Scenario
    integral_value: float
    abs_error_bound: float
    sign_violation: bool

    @property
    def resolved(self) -> bool:
        return abs(self.integral_value) > self.abs_error_bound

    def to_dict(self) -> dict:
        return {
            "fx": self.scenario.fx.to_text(),
            "fz": self.scenario.fz.to_text(),
            "integral_value": self.integral_value,
            "abs_error_bound": self.abs_error_bound,
            "sign_violation": self.sign_violation,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ConjectureResult":
        from ..scenario_io import parse_density

        return cls(
            Scenario(parse_density(d["fx"]), parse_density(d["fz"])),
            float(d["integral_value"]),
            float(d["abs_error_bound"]),
            bool(d["sign_violation"]),
        )


def _window(d: Density) -> tuple[float, float]:
    lo, hi = d.effective_interval(_TAIL)
    s_lo, s_hi = d.support
    lo = min(lo, d.mean - _SD_SPAN * d.std)
    hi = max(hi, d.mean + _SD_SPAN * d.std)
    return max(lo, s_lo), min(hi, s_hi)


def integration_window(s: Scenario) -> tuple[float, float, float]:
    """``(L, U, truncation_bound)`` for the r-range [L, U] and alpha-range [0, (U - L)/2].

    If both x and z fall in [L, U] then so do r and alpha is at most
    (U - L)/2, so everything dropped lies outside that square; the mass of
    the dropped part is at most half the tail mass of X and Z outside it.
    """
    ax, bx = _window(s.fx)
    az, bz = _window(s.fz)
    lo, hi = min(ax, az), max(bx, bz)
    tails = float(s.fx.cdf(lo) + s.fx.sf(hi) + s.fz.cdf(lo) + s.fz.sf(hi))
    return lo, hi, 0.5 * tails


def conjecture_integral(s: Scenario, epsabs: float = 1e-10) -> ConjectureResult:
    """Evaluate the double integral with an explicit error bound.

    The bound adds the outer quadrature error, the worst inner error times
    the r-range, and the truncation mass from :func:`integration_window`.

    Raises
    ------
    QuadratureError
        If the bound ends up above ``100 * epsabs``.
    """
    fx, fz = s.fx, s.fz
    if fx == fz:
        return ConjectureResult(s, 0.0, 0.0, False)
    lo, hi, trunc = integration_window(s)
    amax = 0.5 * (hi - lo)
    kinks = sorted(set(fx.kinks) | set(fz.kinks))
    inner_eps = epsabs / max(hi - lo, 1.0) * 0.1
    inner_err = [0.0]

    def outer(r: float) -> float:
        gap = float(fx.cdf(r)) - float(fz.cdf(r))
        if gap == 0.0:
            return 0.0

        def g(a: float) -> float:
            return float(fx.pdf(r - a)) * float(fz.pdf(r + a)) - float(fx.pdf(r + a)) * float(fz.pdf(r - a))

        val, err = _quad(g, 0.0, amax, [abs(r - k) for k in kinks], inner_eps)
        inner_err[0] = max(inner_err[0], err)
        return gap * val

    rpts = set(kinks) | {0.5 * (a + b) for a in kinks for b in kinks}
    val, err = _quad(outer, lo, hi, rpts, epsabs * 0.5)
    bound = err + inner_err[0] * (hi - lo) + trunc
    if not math.isfinite(val) or bound > 100 * epsabs:
        raise QuadratureError(
            f"conjecture integral for {fx.to_text()} vs {fz.to_text()}: error bound {bound:.3g} "
            f"above tolerance {epsabs:.3g}"
        )
    return ConjectureResult(s, val, bound, val < -bound)
