"""Dual bounds: weak duality for arbitrary bounded potentials, strong
duality at the fitted optimizer."""

from __future__ import annotations

import dataclasses

import numpy as np
import pytest

from bridgekit import (
    ConvergenceError,
    Grid,
    GridFunction,
    bridge_params,
    dual_functional,
    dual_gap,
    dual_potential,
    relative_entropy,
)


def test_gap_vanishes_at_the_fitted_optimizer(solved):
    for kernel in ("heat", "ou"):
        model, _, mu0, mu1, sol = solved(kernel, 1.0)
        report = dual_gap(model, mu0, mu1, sol)
        assert report.primal == sol.cost_scaled
        assert abs(report.gap) <= 1e-6 * abs(report.primal)


def test_weak_duality_over_randomized_bounded_potentials(solved):
    model, grid, mu0, mu1, sol = solved("heat", 1.0)
    rng = np.random.default_rng(7)
    x = grid.points
    gaps = []
    for _ in range(50):
        a, b, omega = rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(0.2, 2.0)
        cap = rng.uniform(0.5, 4.0)
        values = a * np.sin(omega * x) + b * np.cos(omega * x)
        values += np.minimum(cap, 0.3 * (x - rng.uniform(-2.0, 2.0)) ** 2)
        psi = GridFunction(grid, values)
        gaps.append(sol.cost_scaled - dual_functional(model, mu0, mu1, psi))
    scale = max(1.0, abs(sol.cost_scaled))
    assert min(gaps) >= -1e-6 * scale
    # none of these ad-hoc potentials comes anywhere near the optimum
    assert min(gaps) > 1.0


def test_dual_functional_is_shift_invariant(solved):
    model, grid, mu0, mu1, _ = solved("heat", 1.0)
    psi = GridFunction(grid, np.sin(grid.points))
    base = dual_functional(model, mu0, mu1, psi)
    shifted = dual_functional(model, mu0, mu1, psi + 17.0)
    assert shifted == pytest.approx(base, abs=1e-9 * (1.0 + abs(base)))


def test_zero_potential_leaves_only_the_entropy_term(solved):
    model, grid, mu0, mu1, _ = solved("ou", 1.0)
    zero = GridFunction(grid, np.zeros(grid.n))
    value = dual_functional(model, mu0, mu1, zero)
    expected = model.epsilon * relative_entropy(mu0, model.reference(grid))
    assert value == pytest.approx(expected, abs=1e-12 * (1.0 + abs(expected)))


def test_closed_form_terminal_potential_is_optimal(solved):
    model, grid, mu0, mu1, sol = solved("heat", 1.0)
    psi1 = dual_potential(model, bridge_params(model, -3.0, 3.0), 1.0, grid)
    value = dual_functional(model, mu0, mu1, psi1)
    assert value == pytest.approx(sol.cost_scaled, rel=1e-8)


def test_perturbing_the_optimizer_strictly_lowers_the_bound(solved):
    model, grid, mu0, mu1, sol = solved("heat", 1.0)
    optimizer = GridFunction(grid, model.epsilon * np.asarray(sol.log_g1))
    perturbed = GridFunction(grid, optimizer.values + 0.1 * np.sin(grid.points))
    at_opt = dual_functional(model, mu0, mu1, optimizer)
    off_opt = dual_functional(model, mu0, mu1, perturbed)
    assert off_opt < at_opt - 1e-4


def test_candidates_never_hurt_the_reported_bound(solved):
    model, grid, mu0, mu1, sol = solved("heat", 1.0)
    bad = GridFunction(grid, np.tanh(grid.points))
    report = dual_gap(model, mu0, mu1, sol, psi_candidates=(bad,))
    assert abs(report.gap) <= 1e-6 * abs(report.primal)


def test_dual_gap_refuses_nonconverged_solutions(solved):
    model, _, mu0, mu1, sol = solved("heat", 1.0)
    broken = dataclasses.replace(sol, converged=False)
    with pytest.raises(ConvergenceError):
        dual_gap(model, mu0, mu1, broken)


def test_dual_functional_rejects_foreign_grids(solved):
    model, grid, mu0, mu1, _ = solved("heat", 1.0)
    other = Grid(grid.lo, grid.hi, grid.n + 1)
    psi = GridFunction(other, np.zeros(other.n))
    with pytest.raises(ValueError):
        dual_functional(model, mu0, mu1, psi)