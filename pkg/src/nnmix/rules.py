"""Decision rules that attribute the middle point of ``(x, y, z)`` to one side.

Each rule reduces to a decision statistic whose sign is the verdict:
positive means "y came from f_X", negative "from f_Z", zero is a tie.
The statistics are written with numpy so the same code scores a single
triple or a batch of millions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .distributions import Density, Scenario, Source, Triple, TripleBatch

__all__ = [
    "Prediction",
    "Kernel",
    "nearest_neighbor_rule",
    "bayes_rule",
    "mean_distance_rule",
    "cusum_rule",
    "max_likelihood_rule",
    "kernel_changepoint_rule",
    "kernel_criterion",
    "RuleSpec",
    "resolve_rule",
    "verdicts",
    "RULE_NAMES",
]


class Prediction(enum.IntEnum):
    FROM_X = 1
    FROM_Z = -1
    TIE = 0

    @classmethod
    def from_statistic(cls, d: float) -> "Prediction":
        return cls(int(np.sign(d)))

    def is_correct(self, source: Source) -> bool:
        return int(self) == int(source)


class KernelKind(enum.Enum):
    LINEAR = "linear"
    GAUSSIAN = "gaussian"
    POLYNOMIAL = "polynomial"


@dataclass(frozen=True)
class Kernel:
    """Scalar kernel ``k(u, v)``.

    Linear is ``u v``, Gaussian is ``exp(-(u - v)^2 / (2 bandwidth^2))`` and
    Polynomial is the homogeneous ``(u v)^degree``.
    """

    kind: KernelKind
    bandwidth: float = 1.0
    degree: int = 2

    def __post_init__(self) -> None:
        if self.kind is KernelKind.GAUSSIAN and not self.bandwidth > 0:
            raise ValueError("Gaussian kernel bandwidth must be positive")
        if self.kind is KernelKind.POLYNOMIAL and (int(self.degree) != self.degree or self.degree < 1):
            raise ValueError("polynomial degree must be a positive integer")

    @classmethod
    def linear(cls) -> "Kernel":
        return cls(KernelKind.LINEAR)

    @classmethod
    def gaussian(cls, bandwidth: float = 1.0) -> "Kernel":
        return cls(KernelKind.GAUSSIAN, bandwidth=float(bandwidth))

    @classmethod
    def polynomial(cls, degree: int = 2) -> "Kernel":
        return cls(KernelKind.POLYNOMIAL, degree=int(degree))

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        if self.kind is KernelKind.LINEAR:
            return u * v
        if self.kind is KernelKind.GAUSSIAN:
            return np.exp(-((u - v) ** 2) / (2.0 * self.bandwidth**2))
        return (u * v) ** self.degree


def _as_xyz(t):
    if isinstance(t, (Triple, TripleBatch)):
        return np.asarray(t.x, dtype=float), np.asarray(t.y, dtype=float), np.asarray(t.z, dtype=float)
    x, y, z = t[:3]
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float), np.asarray(z, dtype=float)


# -- decision statistics ---------------------------------------------------


def nearest_neighbor_stat(x, y, z):
    return np.abs(z - y) - np.abs(x - y)


def cusum_stat(x, y, z):
    # S_k = sum_{i<=k} (w_i - mean) for k = 1, 2; the change goes after the argmax of |S_k|
    m = (x + y + z) / 3.0
    s1 = x - m
    s2 = (x - m) + (y - m)
    return np.abs(s2) - np.abs(s1)


def max_likelihood_stat(x, y, z):
    # With shared variance, the profile likelihood ranks splits by residual
    # sum of squares: RSS({x,y}|{z}) = (x-y)^2/2, RSS({x}|{y,z}) = (y-z)^2/2.
    return 0.5 * (y - z) ** 2 - 0.5 * (x - y) ** 2


def _segment_cost(kernel: Kernel, seg: list) -> np.ndarray:
    diag = sum(kernel(w, w) for w in seg)
    gram = sum(kernel(a, b) for a in seg for b in seg)
    return diag - gram / len(seg)


def kernel_criterion(x, y, z, kernel: Kernel, split: int):
    """Kernel least-squares cost of cutting ``(x, y, z)`` after position ``split``."""
    seq = [x, y, z]
    return _segment_cost(kernel, seq[:split]) + _segment_cost(kernel, seq[split:])


def kernel_stat(x, y, z, kernel: Kernel):
    if kernel.kind is KernelKind.GAUSSIAN:
        # k(w, w) = 1, so the cost difference collapses to k(x, y) - k(y, z);
        # its sign is taken on the log scale so distant points do not
        # underflow both kernel values to 0 and fake a tie
        return ((z - y) ** 2 - (x - y) ** 2) / (2.0 * kernel.bandwidth**2)
    return kernel_criterion(x, y, z, kernel, 1) - kernel_criterion(x, y, z, kernel, 2)


def mean_distance_stat(y, mu_x: float, mu_z: float):
    return np.abs(y - mu_z) - np.abs(y - mu_x)


def bayes_stat(y, fx: Density, fz: Density):
    lx = np.asarray(fx.logpdf(y), dtype=float)
    lz = np.asarray(fz.logpdf(y), dtype=float)
    with np.errstate(invalid="ignore"):
        d = lx - lz
    # both outside the support: no evidence either way
    return np.where(np.isnan(d), 0.0, d)


# -- single-triple API -----------------------------------------------------


def nearest_neighbor_rule(t: Triple) -> Prediction:
    """FromX if ``|x - y| < |z - y|``, FromZ if greater, Tie otherwise."""
    return Prediction.from_statistic(nearest_neighbor_stat(*_as_xyz(t)))


def bayes_rule(y: float, fx: Density, fz: Density) -> Prediction:
    """Pick the component with the larger density at ``y``."""
    return Prediction.from_statistic(bayes_stat(y, fx, fz))


def mean_distance_rule(y: float, mu_x: float, mu_z: float) -> Prediction:
    return Prediction.from_statistic(mean_distance_stat(y, mu_x, mu_z))


def cusum_rule(t: Triple) -> Prediction:
    """CUSUM of deviations from the sequence mean over ``(x, y, z)``.

    A change after position 1 groups y with z (FromZ); after position 2
    groups it with x (FromX).
    """
    return Prediction.from_statistic(cusum_stat(*_as_xyz(t)))


def max_likelihood_rule(t: Triple) -> Prediction:
    return Prediction.from_statistic(max_likelihood_stat(*_as_xyz(t)))


def kernel_changepoint_rule(t: Triple, k: Kernel) -> Prediction:
    """Single change-point by minimum within-segment kernel scatter."""
    return Prediction.from_statistic(kernel_stat(*_as_xyz(t), k))


# -- identifiers for the experiment harness -------------------------------


@dataclass(frozen=True)
class RuleSpec:
    """A named rule resolved to a vectorised statistic ``(x, y, z, scenario) -> d``."""

    name: str
    statistic: Callable[[np.ndarray, np.ndarray, np.ndarray, Scenario], np.ndarray]
    needs_scenario: bool = False


RULE_NAMES = (
    "nearest_neighbor",
    "cusum",
    "max_likelihood",
    "kernel_linear",
    "kernel_gaussian[:bandwidth]",
    "kernel_poly[:degree]",
    "bayes",
    "mean_distance",
)


def _mean_distance_for(x, y, z, s: Scenario):
    return mean_distance_stat(y, s.fx.mean, s.fz.mean)


def resolve_rule(identifier: str) -> RuleSpec:
    """Turn a rule identifier such as ``"kernel_gaussian:0.1"`` into a RuleSpec.

    Raises
    ------
    ValueError
        For an unknown identifier or a malformed parameter.
    """
    name, _, arg = identifier.strip().partition(":")
    try:
        if name == "nearest_neighbor" and not arg:
            return RuleSpec(identifier, lambda x, y, z, s: nearest_neighbor_stat(x, y, z))
        if name == "cusum" and not arg:
            return RuleSpec(identifier, lambda x, y, z, s: cusum_stat(x, y, z))
        if name == "max_likelihood" and not arg:
            return RuleSpec(identifier, lambda x, y, z, s: max_likelihood_stat(x, y, z))
        if name == "kernel_linear" and not arg:
            k = Kernel.linear()
            return RuleSpec(identifier, lambda x, y, z, s: kernel_stat(x, y, z, k))
        if name == "kernel_gaussian":
            k = Kernel.gaussian(float(arg) if arg else 1.0)
            return RuleSpec(identifier, lambda x, y, z, s: kernel_stat(x, y, z, k))
        if name == "kernel_poly":
            k = Kernel.polynomial(int(arg) if arg else 2)
            return RuleSpec(identifier, lambda x, y, z, s: kernel_stat(x, y, z, k))
        if name == "bayes" and not arg:
            return RuleSpec(identifier, lambda x, y, z, s: bayes_stat(y, s.fx, s.fz), needs_scenario=True)
        if name == "mean_distance" and not arg:
            return RuleSpec(identifier, _mean_distance_for, needs_scenario=True)
    except ValueError as exc:
        raise ValueError(f"bad parameter in rule {identifier!r}: {exc}") from None
    raise ValueError(f"unknown rule {identifier!r}; known: {', '.join(RULE_NAMES)}")


def verdicts(rule: RuleSpec | str, batch: TripleBatch, scenario: Scenario) -> np.ndarray:
    """Verdict codes (+1 FromX, -1 FromZ, 0 tie) for every triple in the batch."""
    if isinstance(rule, str):
        rule = resolve_rule(rule)
    d = rule.statistic(np.asarray(batch.x), np.asarray(batch.y), np.asarray(batch.z), scenario)
    return np.sign(d).astype(np.int8)
