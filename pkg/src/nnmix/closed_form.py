"""Exact success probabilities of the nearest-neighbor rule for Gaussian pairs.

All formulas fix the mean of f_X at 0; only the gap ``epsilon`` between the
two means matters.  ``beta`` is the variance ratio var(Z) / var(X).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import special

from .distributions import Gaussian, Scenario
from .special import norm_cdf, owen_t

__all__ = [
    "GaussianScenarioParams",
    "theorem1_success",
    "theorem2_p_star",
    "theorem2_p_star_star",
    "theorem2_success",
    "t_script",
    "t_script_at_zero",
    "bayes_success",
]


@dataclass(frozen=True)
class GaussianScenarioParams:
    epsilon: float
    sigma_x: float = 1.0
    beta: float = 1.0

    def __post_init__(self) -> None:
        if not self.sigma_x > 0:
            raise ValueError(f"sigma_x must be positive, got {self.sigma_x}")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not math.isfinite(self.epsilon):
            raise ValueError("epsilon must be finite")

    @property
    def sigma_z(self) -> float:
        return math.sqrt(self.beta) * self.sigma_x

    @property
    def identical(self) -> bool:
        return self.epsilon == 0.0 and self.beta == 1.0

    def to_scenario(self, mu_x: float = 0.0) -> Scenario:
        return Scenario(
            Gaussian(mu_x, self.sigma_x**2),
            Gaussian(mu_x + self.epsilon, self.beta * self.sigma_x**2),
        )

    @classmethod
    def from_scenario(cls, s: Scenario) -> "GaussianScenarioParams":
        if not s.is_gaussian:
            raise ValueError("scenario is not a Gaussian pair")
        return cls(s.fz.mean - s.fx.mean, s.fx.std, s.fz.variance / s.fx.variance)


def theorem1_success(epsilon: float, sigma: float) -> float:
    """Success probability of the nearest-neighbor rule with equal variances.

    Phi(e/(sqrt2 s)) Phi(e/(sqrt6 s)) + (1 - Phi(e/(sqrt2 s))) (1 - Phi(e/(sqrt6 s)))

    evaluated as 1/2 + 2 (Phi(u) - 1/2)(Phi(v) - 1/2), where Phi(u) - 1/2 is
    erf(u / sqrt2) / 2; this keeps full relative precision of the excess
    over 1/2 as epsilon -> 0.
    """
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    a = float(special.erf(epsilon / (2.0 * sigma)))
    b = float(special.erf(epsilon / (2.0 * math.sqrt(3.0) * sigma)))
    return 0.5 + 0.5 * a * b


def _four_t(params: GaussianScenarioParams) -> tuple[float, float, float, float]:
    e, s, b = params.epsilon, params.sigma_x, params.beta
    return (
        owen_t(e / (math.sqrt(5.0 + b) * s), 3.0 / math.sqrt(1.0 + 2.0 * b)),
        owen_t(e / (math.sqrt(1.0 + b) * s), 1.0 / math.sqrt(1.0 + 2.0 * b)),
        owen_t(e / (math.sqrt(1.0 + 5.0 * b) * s), 3.0 / math.sqrt(1.0 + 2.0 / b)),
        owen_t(e / (math.sqrt(1.0 + b) * s), 1.0 / math.sqrt(1.0 + 2.0 / b)),
    )


def theorem2_p_star(params: GaussianScenarioParams) -> float:
    """P(nearest neighbor is correct | y drawn from f_X)."""
    t1, t2, _, _ = _four_t(params)
    return 1.0 - 2.0 * t1 - 2.0 * t2


def theorem2_p_star_star(params: GaussianScenarioParams) -> float:
    """P(nearest neighbor is correct | y drawn from f_Z)."""
    _, _, t3, t4 = _four_t(params)
    return 1.0 - 2.0 * t3 - 2.0 * t4


def theorem2_success(params: GaussianScenarioParams) -> float:
    """Unconditional success probability, the average of P* and P**."""
    if params.identical:
        return 0.5
    return 1.0 - math.fsum(_four_t(params))


def t_script(beta: float, epsilon: float = 0.0, sigma_x: float = 1.0) -> float:
    """Sum of the four Owen T integrals without their 1/(2 pi) factors.

    The unconditional success probability equals ``1 - t_script / (2 pi)``.
    """
    return 2.0 * math.pi * math.fsum(_four_t(GaussianScenarioParams(epsilon, sigma_x, beta)))


def t_script_at_zero(beta: float) -> float:
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    r1 = math.sqrt(1.0 + 2.0 * beta)
    r2 = math.sqrt(1.0 + 2.0 / beta)
    return math.atan(3.0 / r1) + math.atan(1.0 / r1) + math.atan(3.0 / r2) + math.atan(1.0 / r2)


def bayes_success(epsilon: float, sigma: float) -> float:
    """Accuracy of the Bayes classifier when both means and the variance are known."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return norm_cdf(abs(epsilon) / (2.0 * sigma))
