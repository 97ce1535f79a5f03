"""Shared fixtures: the default grid, Gaussian endpoint marginals, and a
memoised pool of solved marginal systems reused across test modules."""

from __future__ import annotations

import pytest

from bridgekit import (
    GaussianMeasure,
    default_grid,
    gaussian_grid_density,
    heat_model,
    ou_model,
    solve_schrodinger_system,
)


@pytest.fixture(scope="session")
def grid33():
    return default_grid(-3.0, 3.0)


@pytest.fixture(scope="session")
def marginals33(grid33):
    mu0 = gaussian_grid_density(GaussianMeasure(-3.0, 1.0), grid33)
    mu1 = gaussian_grid_density(GaussianMeasure(3.0, 1.0), grid33)
    return mu0, mu1


@pytest.fixture(scope="session")
def solved():
    """get(kernel, epsilon, x0, x1) -> (model, grid, mu0, mu1, solution).

    Solves are the expensive part of the suite; memoising them lets the
    acceptance module and the unit modules share the same fitted systems.
    """
    cache = {}

    def get(kernel: str, epsilon: float, x0: float = -3.0, x1: float = 3.0):
        key = (kernel, float(epsilon), float(x0), float(x1))
        if key not in cache:
            model = heat_model(epsilon) if kernel == "heat" else ou_model(epsilon)
            grid = default_grid(x0, x1)
            mu0 = gaussian_grid_density(GaussianMeasure(x0, 1.0), grid)
            mu1 = gaussian_grid_density(GaussianMeasure(x1, 1.0), grid)
            cache[key] = (model, grid, mu0, mu1, solve_schrodinger_system(model, mu0, mu1))
        return cache[key]

    return get
