"""Named scenario sweeps used by the CLI and the acceptance suite."""

from __future__ import annotations

import itertools

import numpy as np

from ..distributions import (
    Density,
    Exponential,
    Gaussian,
    GaussianMixture,
    Laplace,
    Scenario,
    Uniform,
)

__all__ = ["SWEEPS", "catalog_densities", "get_sweep", "random_gaussian_scenarios"]


def catalog_densities() -> list[Density]:
    """Ten densities covering every catalog kind, with different shapes and offsets."""
    return [
        Gaussian(0.0, 1.0),
        Gaussian(1.0, 2.0),
        Gaussian(3.0, 0.25),
        Uniform(0.0, 1.0),
        Uniform(-1.0, 2.0),
        Exponential(1.0, 0.0),
        Exponential(2.0, -0.5),
        Laplace(0.0, 1.0),
        Laplace(0.5, 0.5),
        GaussianMixture([(0.5, -1.0, 0.5), (0.5, 1.5, 0.5)]),
    ]


def _catalog_pairs() -> list[Scenario]:
    # the rule is symmetric in (x, z) so unordered pairs suffice; identical
    # pairs are kept as the zero-information control
    ds = catalog_densities()
    return [Scenario(a, b) for a, b in itertools.combinations_with_replacement(ds, 2)]


def _gaussian_laplace_grid() -> list[Scenario]:
    out = []
    for fx in (Gaussian(0.0, 1.0), Laplace(0.0, 1.0)):
        for loc in (0.0, 0.5, 2.0):
            for spread in (0.5, 1.0, 2.0):
                out.append(Scenario(fx, Gaussian(loc, spread)))
                out.append(Scenario(fx, Laplace(loc, spread)))
    return out


def _gaussian_grid() -> list[Scenario]:
    return [
        Scenario(Gaussian(0.0, 1.0), Gaussian(eps, beta))
        for eps in (-1.0, -0.1, 0.1, 0.5, 1.0, 2.0, 5.0)
        for beta in (0.25, 0.5, 1.0, 2.0, 4.0)
    ]


def random_gaussian_scenarios(count: int, seed: int) -> list[Scenario]:
    """Gaussian pairs with means in [-3, 3] and variances log-uniform in [0.1, 10]."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        mx, mz = rng.uniform(-3.0, 3.0, 2)
        vx, vz = 10.0 ** rng.uniform(-1.0, 1.0, 2)
        out.append(Scenario(Gaussian(mx, vx), Gaussian(mz, vz)))
    return out


SWEEPS = {
    "catalog": _catalog_pairs,
    "gaussian-laplace-grid": _gaussian_laplace_grid,
    "gaussian-grid": _gaussian_grid,
}


def get_sweep(name: str) -> list[Scenario]:
    try:
        return SWEEPS[name]()
    except KeyError:
        raise ValueError(f"unknown sweep {name!r}; choose from {', '.join(SWEEPS)}") from None
