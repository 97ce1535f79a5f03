"""Closed-form bridge oracles: parameters, moments, potentials, velocities,
and the entropic cost formulas."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bridgekit import (
    HeatBridgeParams,
    OUBridgeParams,
    bridge_density,
    bridge_moments,
    bridge_params,
    current_velocity,
    default_grid,
    dual_potential,
    entropic_cost_closed_form,
    heat_model,
    osmotic_velocity,
    ou_model,
    pushforward_map,
)
from bridgekit.gaussian_bridge import BridgeMoment

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0  # δ at ε = 1

epsilons = st.floats(min_value=1e-3, max_value=10.0)
points = st.floats(min_value=-4.0, max_value=4.0)


def test_bridge_params_dispatch():
    assert isinstance(bridge_params(heat_model(1.0), -3.0, 3.0), HeatBridgeParams)
    assert isinstance(bridge_params(ou_model(1.0), -3.0, 3.0), OUBridgeParams)


def test_heat_params_at_unit_epsilon():
    p = bridge_params(heat_model(1.0), -3.0, 3.0)
    assert p.delta == pytest.approx(GOLDEN, abs=1e-14)
    assert p.alpha == pytest.approx(np.sqrt(5.0) - 2.0, abs=1e-14)
    assert p.tilt1 == pytest.approx(3.0 * GOLDEN + 6.0, abs=1e-12)
    assert p.tilt0 == pytest.approx(-p.tilt1)  # swap symmetry of the pair
    assert p.gamma == pytest.approx(-15.70820393, abs=1e-7)
    assert p.gamma == pytest.approx(2.0 * p.epsilon * p.tilt0, rel=1e-12)


@given(eps=epsilons)
def test_heat_delta_solves_its_quadratic(eps):
    p = HeatBridgeParams(eps, 0.0, 1.0)
    d = p.delta
    assert d > 0.0
    assert d * d + 2.0 * d == pytest.approx(eps * (1.0 + d), rel=1e-12)


def test_heat_midpoint_variance_value():
    mom = bridge_moments(heat_model(1.0), -3.0, 3.0, 0.5)
    assert mom.variance == pytest.approx(1.0 + (np.sqrt(5.0) - 2.0) / 4.0, abs=1e-12)
    assert mom.mean == pytest.approx(0.0, abs=1e-12)


def test_endpoint_moments_pin_the_marginals():
    for model in (heat_model(1.0), ou_model(1.0)):
        for t, x in ((0.0, -3.0), (1.0, 3.0)):
            mom = bridge_moments(model, -3.0, 3.0, t)
            assert mom.mean == pytest.approx(x, abs=1e-12)
            assert mom.variance == pytest.approx(1.0, abs=1e-12)


def test_ou_bridge_variance_is_identically_one():
    for t in (0.1, 0.3, 0.5, 0.9):
        mom = bridge_moments(ou_model(1.0), -3.0, 3.0, t)
        assert mom.variance == 1.0
        assert mom.variance_rate == 0.0


def test_ou_asymmetric_midpoint_mean_value():
    mom = bridge_moments(ou_model(1.0), 1.0, 7.0, 0.5)
    assert mom.mean == pytest.approx(3.878174516561, abs=1e-9)
    # the straight-line midpoint is 4: the stationary pull drags it down
    assert mom.mean < 4.0


def test_rates_analytic_vs_finite_difference():
    for model in (heat_model(1.0), ou_model(1.0)):
        for t in (0.1, 0.5, 0.9):
            a = bridge_moments(model, -3.0, 3.0, t, rates="analytic")
            f = bridge_moments(model, -3.0, 3.0, t, rates="finite_difference")
            assert a.mean_rate == pytest.approx(f.mean_rate, abs=1e-8)
            assert a.variance_rate == pytest.approx(f.variance_rate, abs=1e-8)


def test_bridge_moments_validation():
    with pytest.raises(ValueError):
        bridge_moments(heat_model(1.0), 0.0, 1.0, 1.5)
    with pytest.raises(ValueError):
        bridge_moments(heat_model(1.0), 0.0, 1.0, 0.5, rates="spectral")
    with pytest.raises(ValueError):
        BridgeMoment(t=0.0, mean=0.0, variance=1.2, mean_rate=0.0, variance_rate=0.0)
    with pytest.raises(ValueError):
        BridgeMoment(t=0.5, mean=0.0, variance=-1.0, mean_rate=0.0, variance_rate=0.0)


def test_bridge_density_matches_the_moments():
    grid = default_grid(-3.0, 3.0)
    mom = bridge_moments(heat_model(1.0), -3.0, 3.0, 0.5)
    mu = bridge_density(mom, grid)
    assert mu.mass == pytest.approx(1.0, abs=1e-12)
    assert mu.mean() == pytest.approx(mom.mean, abs=1e-9)
    assert mu.variance() == pytest.approx(mom.variance, abs=1e-9)


def test_dual_potential_coefficients_at_terminal_time():
    grid = default_grid(-3.0, 3.0)
    heat = heat_model(1.0)
    p = bridge_params(heat, -3.0, 3.0)
    psi = dual_potential(heat, p, 1.0, grid)
    coeffs = np.polyfit(grid.points, psi.values, 2)
    assert coeffs[0] == pytest.approx(-GOLDEN / 2.0, abs=1e-10)
    assert coeffs[1] == pytest.approx(7.854101966, abs=1e-8)
    assert coeffs[2] == pytest.approx(0.0, abs=1e-9)

    ou = ou_model(1.0)
    q = bridge_params(ou, -3.0, 3.0)
    psi_ou = dual_potential(ou, q, 1.0, grid)
    slope = np.polyfit(grid.points, psi_ou.values, 1)[0]
    assert slope == pytest.approx(3.0 / (1.0 - np.exp(-0.5)), abs=1e-8)


def test_drift_is_gradient_of_dual_potential():
    # v_cu + v_os = ∂ψ_t: both fields are affine, and a second-order stencil
    # differentiates quadratics exactly, so the match is at float precision
    grid = default_grid(-3.0, 3.0)
    for model in (heat_model(1.0), ou_model(1.0)):
        p = bridge_params(model, -3.0, 3.0)
        for t in (0.25, 0.75):
            mom = bridge_moments(model, -3.0, 3.0, t)
            beta = current_velocity(mom, grid).values + osmotic_velocity(model, mom, grid).values
            grad_psi = np.gradient(dual_potential(model, p, t, grid).values, grid.h, edge_order=2)
            scale = 1.0 + np.max(np.abs(grad_psi))
            assert np.max(np.abs(beta - grad_psi)) < 1e-8 * scale


def test_pushforward_map_is_the_affine_rescaling():
    mom = bridge_moments(heat_model(1.0), -3.0, 3.0, 0.5)
    assert pushforward_map(mom, -2.0, -3.0) == pytest.approx(1.02908551, abs=1e-7)
    mom0 = bridge_moments(heat_model(1.0), -3.0, 3.0, 0.0)
    assert pushforward_map(mom0, 0.7, -3.0) == pytest.approx(0.7, abs=1e-12)


def test_entropic_cost_closed_form_values():
    assert entropic_cost_closed_form(heat_model(1.0), -3.0, 3.0) == pytest.approx(
        16.703633390575, abs=1e-9
    )
    assert entropic_cost_closed_form(ou_model(1.0), -3.0, 3.0) == pytest.approx(
        22.873446742831, abs=1e-9
    )


@given(x0=points, x1=points, eps=st.sampled_from([0.3, 1.0, 2.0]))
def test_entropic_cost_is_symmetric_in_the_endpoints(x0, x1, eps):
    for factory in (heat_model, ou_model):
        model = factory(eps)
        forward = entropic_cost_closed_form(model, x0, x1)
        backward = entropic_cost_closed_form(model, x1, x0)
        assert forward == pytest.approx(backward, abs=1e-10 * (1.0 + abs(forward)))
