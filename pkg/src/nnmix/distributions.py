"""One-dimensional densities with exact pdf/cdf, and the three-point mixture draw.

Every density is an immutable value object.  Methods accept scalars or
arrays and follow numpy broadcasting; sampling always goes through an
explicitly seeded ``numpy.random.Generator``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize, special

__all__ = [
    "Density",
    "Gaussian",
    "Uniform",
    "Exponential",
    "Laplace",
    "GaussianMixture",
    "Source",
    "Scenario",
    "Triple",
    "TripleBatch",
    "pdf",
    "cdf",
    "sample",
    "sample_triple",
    "sample_triples",
]

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _fmt(v: float) -> str:
    # repr() of a float round-trips exactly
    return repr(float(v))


class Density:
    """Base class for the catalog densities."""

    def pdf(self, w):
        raise NotImplementedError

    def logpdf(self, w):
        raise NotImplementedError

    def cdf(self, w):
        raise NotImplementedError

    def sf(self, w):
        return 1.0 - self.cdf(w)

    def quantile(self, q):
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    @property
    def kinks(self) -> tuple[float, ...]:
        """Points where the pdf is not smooth (jumps or corners)."""
        return ()

    @property
    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def to_text(self) -> str:
        raise NotImplementedError

    def upper_quantile(self, tail: float) -> float:
        """Point with upper-tail mass ``tail``, accurate for tiny tails."""
        return float(self.quantile(1.0 - tail))

    def effective_interval(self, tail: float = 1e-15) -> tuple[float, float]:
        """Interval outside of which each tail holds at most ``tail`` mass."""
        lo, hi = self.support
        if not math.isfinite(lo):
            lo = float(self.quantile(tail))
        if not math.isfinite(hi):
            hi = self.upper_quantile(tail)
        return lo, hi


@dataclass(frozen=True)
class Gaussian(Density):
    mean: float
    variance: float

    def __post_init__(self) -> None:
        if not self.variance > 0:
            raise ValueError(f"Gaussian variance must be positive, got {self.variance}")
        object.__setattr__(self, "mean", float(self.mean))
        object.__setattr__(self, "variance", float(self.variance))

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def pdf(self, w):
        u = (np.asarray(w, dtype=float) - self.mean) / self.std
        return np.exp(-0.5 * u * u) / (self.std * math.sqrt(2.0 * math.pi))

    def logpdf(self, w):
        u = (np.asarray(w, dtype=float) - self.mean) / self.std
        return -0.5 * u * u - math.log(self.std) - _LOG_SQRT_2PI

    def cdf(self, w):
        # ndtr is erfc-based on the lower tail, so relative accuracy holds out there
        return special.ndtr((np.asarray(w, dtype=float) - self.mean) / self.std)

    def sf(self, w):
        return special.ndtr((self.mean - np.asarray(w, dtype=float)) / self.std)

    def quantile(self, q):
        return self.mean + self.std * special.ndtri(q)

    def upper_quantile(self, tail: float) -> float:
        return self.mean - self.std * float(special.ndtri(tail))

    def sample(self, rng, size=None):
        return rng.normal(self.mean, self.std, size)

    def to_text(self) -> str:
        return f"gaussian(mean={_fmt(self.mean)}, var={_fmt(self.variance)})"


@dataclass(frozen=True)
class Uniform(Density):
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.hi > self.lo:
            raise ValueError(f"Uniform needs hi > lo, got lo={self.lo}, hi={self.hi}")
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def std(self) -> float:
        return (self.hi - self.lo) / math.sqrt(12.0)

    @property
    def kinks(self):
        return (self.lo, self.hi)

    @property
    def support(self):
        return (self.lo, self.hi)

    def pdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where((w >= self.lo) & (w <= self.hi), 1.0 / (self.hi - self.lo), 0.0)

    def logpdf(self, w):
        w = np.asarray(w, dtype=float)
        return np.where((w >= self.lo) & (w <= self.hi), -math.log(self.hi - self.lo), -np.inf)

    def cdf(self, w):
        return np.clip((np.asarray(w, dtype=float) - self.lo) / (self.hi - self.lo), 0.0, 1.0)

    def sf(self, w):
        return np.clip((self.hi - np.asarray(w, dtype=float)) / (self.hi - self.lo), 0.0, 1.0)

    def quantile(self, q):
        return self.lo + np.asarray(q, dtype=float) * (self.hi - self.lo)

    def upper_quantile(self, tail: float) -> float:
        return self.hi - tail * (self.hi - self.lo)

    def sample(self, rng, size=None):
        return rng.uniform(self.lo, self.hi, size)

    def to_text(self) -> str:
        return f"uniform(lo={_fmt(self.lo)}, hi={_fmt(self.hi)})"


@dataclass(frozen=True)
class Exponential(Density):
    """Exponential with the given rate, translated to start at ``shift``."""

    rate: float
    shift: float = 0.0

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise ValueError(f"Exponential rate must be positive, got {self.rate}")
        object.__setattr__(self, "rate", float(self.rate))
        object.__setattr__(self, "shift", float(self.shift))

    @property
    def mean(self) -> float:
        return self.shift + 1.0 / self.rate

    @property
    def std(self) -> float:
        return 1.0 / self.rate

    @property
    def kinks(self):
        return (self.shift,)

    @property
    def support(self):
        return (self.shift, math.inf)

    def pdf(self, w):
        t = np.asarray(w, dtype=float) - self.shift
        return np.where(t >= 0, self.rate * np.exp(-self.rate * np.maximum(t, 0.0)), 0.0)

    def logpdf(self, w):
        t = np.asarray(w, dtype=float) - self.shift
        return np.where(t >= 0, math.log(self.rate) - self.rate * t, -np.inf)

    def cdf(self, w):
        t = np.maximum(np.asarray(w, dtype=float) - self.shift, 0.0)
        return -np.expm1(-self.rate * t)

    def sf(self, w):
        t = np.maximum(np.asarray(w, dtype=float) - self.shift, 0.0)
        return np.exp(-self.rate * t)

    def quantile(self, q):
        return self.shift - np.log1p(-np.asarray(q, dtype=float)) / self.rate

    def upper_quantile(self, tail: float) -> float:
        return self.shift - math.log(tail) / self.rate

    def sample(self, rng, size=None):
        return self.shift + rng.exponential(1.0 / self.rate, size)

    def to_text(self) -> str:
        return f"exponential(rate={_fmt(self.rate)}, shift={_fmt(self.shift)})"


@dataclass(frozen=True)
class Laplace(Density):
    location: float
    scale: float

    def __post_init__(self) -> None:
        if not self.scale > 0:
            raise ValueError(f"Laplace scale must be positive, got {self.scale}")
        object.__setattr__(self, "location", float(self.location))
        object.__setattr__(self, "scale", float(self.scale))

    @property
    def mean(self) -> float:
        return self.location

    @property
    def std(self) -> float:
        return math.sqrt(2.0) * self.scale

    @property
    def kinks(self):
        return (self.location,)

    def pdf(self, w):
        return np.exp(-np.abs(np.asarray(w, dtype=float) - self.location) / self.scale) / (2.0 * self.scale)

    def logpdf(self, w):
        return -np.abs(np.asarray(w, dtype=float) - self.location) / self.scale - math.log(2.0 * self.scale)

    def cdf(self, w):
        u = (np.asarray(w, dtype=float) - self.location) / self.scale
        return np.where(u < 0, 0.5 * np.exp(np.minimum(u, 0.0)), 1.0 - 0.5 * np.exp(-np.maximum(u, 0.0)))

    def sf(self, w):
        u = (np.asarray(w, dtype=float) - self.location) / self.scale
        return np.where(u > 0, 0.5 * np.exp(-np.maximum(u, 0.0)), 1.0 - 0.5 * np.exp(np.minimum(u, 0.0)))

    def quantile(self, q):
        q = np.asarray(q, dtype=float)
        lower = self.location + self.scale * np.log(2.0 * np.minimum(q, 0.5))
        upper = self.location - self.scale * np.log(2.0 * (1.0 - np.maximum(q, 0.5)))
        return np.where(q < 0.5, lower, upper)

    def upper_quantile(self, tail: float) -> float:
        if tail >= 0.5:
            return float(self.quantile(1.0 - tail))
        return self.location - self.scale * math.log(2.0 * tail)

    def sample(self, rng, size=None):
        return rng.laplace(self.location, self.scale, size)

    def to_text(self) -> str:
        return f"laplace(loc={_fmt(self.location)}, scale={_fmt(self.scale)})"


@dataclass(frozen=True)
class GaussianMixture(Density):
    """Finite mixture of Gaussians given as ``(weight, mean, variance)`` rows."""

    components: tuple[tuple[float, float, float], ...]

    def __init__(self, components: Sequence[Sequence[float]]) -> None:
        rows = tuple((float(w), float(m), float(v)) for w, m, v in components)
        if not rows:
            raise ValueError("mixture needs at least one component")
        if any(w < 0 for w, _, _ in rows):
            raise ValueError("mixture weights must be non-negative")
        if any(not v > 0 for _, _, v in rows):
            raise ValueError("mixture variances must be positive")
        total = math.fsum(w for w, _, _ in rows)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"mixture weights sum to {total!r}, expected 1")
        object.__setattr__(self, "components", rows)

    @property
    def _parts(self) -> list[tuple[float, Gaussian]]:
        return [(w, Gaussian(m, v)) for w, m, v in self.components]

    @property
    def mean(self) -> float:
        return math.fsum(w * m for w, m, _ in self.components)

    @property
    def std(self) -> float:
        mu = self.mean
        second = math.fsum(w * (v + (m - mu) ** 2) for w, m, v in self.components)
        return math.sqrt(second)

    def pdf(self, w):
        return sum(wt * g.pdf(w) for wt, g in self._parts)

    def logpdf(self, w):
        parts = self._parts
        logs = np.stack([g.logpdf(w) for _, g in parts])
        weights = np.array([wt for wt, _ in parts]).reshape((-1,) + (1,) * (logs.ndim - 1))
        return special.logsumexp(logs, axis=0, b=weights)

    def cdf(self, w):
        return sum(wt * g.cdf(w) for wt, g in self._parts)

    def sf(self, w):
        return sum(wt * g.sf(w) for wt, g in self._parts)

    def _quantile_scalar(self, q: float) -> float:
        if q <= 0.0:
            return -math.inf
        if q >= 1.0:
            return math.inf
        gs = [g for wt, g in self._parts if wt > 0]
        lo = min(float(g.quantile(q)) for g in gs)
        hi = max(float(g.quantile(q)) for g in gs)
        if lo == hi:
            return lo
        return optimize.brentq(lambda t: float(self.cdf(t)) - q, lo, hi, xtol=1e-14, rtol=1e-15)

    def quantile(self, q):
        out = np.vectorize(self._quantile_scalar, otypes=[float])(q)
        return out if out.ndim else float(out)

    def upper_quantile(self, tail: float) -> float:
        # conservative: the mixture tail is a weighted average of component tails
        return max(g.upper_quantile(tail) for wt, g in self._parts if wt > 0)

    def effective_interval(self, tail: float = 1e-15) -> tuple[float, float]:
        live = [g for wt, g in self._parts if wt > 0]
        return (min(float(g.quantile(tail)) for g in live), self.upper_quantile(tail))

    def sample(self, rng, size=None):
        weights = np.array([w for w, _, _ in self.components])
        means = np.array([m for _, m, _ in self.components])
        stds = np.sqrt([v for _, _, v in self.components])
        idx = rng.choice(len(weights), size=size, p=weights)
        return means[idx] + stds[idx] * rng.standard_normal(size)

    def to_text(self) -> str:
        terms = "+".join(
            f"{_fmt(w)}*gaussian(mean={_fmt(m)}, var={_fmt(v)})" for w, m, v in self.components
        )
        return f"mixture({terms})"


def pdf(d: Density, w):
    return d.pdf(w)


def cdf(d: Density, w):
    return d.cdf(w)


def sample(d: Density, rng: np.random.Generator, size=None):
    return d.sample(rng, size)


class Source(enum.IntEnum):
    """Which component actually generated the middle point."""

    FROM_X = 1
    FROM_Z = -1


@dataclass(frozen=True)
class Scenario:
    """The pair (f_X, f_Z); the middle point is a fair mixture of the two."""

    fx: Density
    fz: Density

    @property
    def is_gaussian(self) -> bool:
        return isinstance(self.fx, Gaussian) and isinstance(self.fz, Gaussian)

    def l1_distance(self) -> float:
        """Numerical integral of |f_X - f_Z| over the real line."""
        if self.fx == self.fz:
            return 0.0
        from ._quad import integrate_line

        points = sorted(set(self.fx.kinks) | set(self.fz.kinks))
        value, _ = integrate_line(lambda w: abs(float(self.fx.pdf(w)) - float(self.fz.pdf(w))), points)
        return value

    @property
    def degenerate(self) -> bool:
        """True when the two components are numerically indistinguishable."""
        return self.l1_distance() <= 1e-6

    def to_text(self) -> str:
        return f"fx = {self.fx.to_text()}\nfz = {self.fz.to_text()}\n"


@dataclass(frozen=True)
class Triple:
    x: float
    y: float
    z: float
    true_source: Source


@dataclass(frozen=True)
class TripleBatch:
    """Column-wise batch of triples; ``from_x`` is the hidden label of ``y``."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    from_x: np.ndarray

    def __len__(self) -> int:
        return len(self.x)

    def __getitem__(self, i: int) -> Triple:
        src = Source.FROM_X if self.from_x[i] else Source.FROM_Z
        return Triple(float(self.x[i]), float(self.y[i]), float(self.z[i]), src)


def sample_triples(
    s: Scenario, n: int, rng: np.random.Generator, condition: Source | None = None
) -> TripleBatch:
    """Draw ``n`` independent triples.

    The source label and each coordinate come from their own spawned
    substreams, so fixing the label (``condition``) leaves x and z
    bit-identical to the unconditioned draw.
    """
    rx, rz, rlabel, ryx, ryz = rng.spawn(5)
    x = np.asarray(s.fx.sample(rx, n), dtype=float)
    z = np.asarray(s.fz.sample(rz, n), dtype=float)
    if condition is None:
        from_x = rlabel.random(n) < 0.5
    else:
        from_x = np.full(n, condition == Source.FROM_X)
    y = np.empty(n)
    k = int(np.count_nonzero(from_x))
    y[from_x] = s.fx.sample(ryx, k)
    y[~from_x] = s.fz.sample(ryz, n - k)
    return TripleBatch(x, y, z, from_x)


def sample_triple(s: Scenario, rng: np.random.Generator) -> Triple:
    return sample_triples(s, 1, rng)[0]
