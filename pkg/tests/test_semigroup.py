"""Transition kernels: exact row mass, reversibility, semigroup laws, and
the entropic Hopf-Lax operator."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bridgekit import (
    Grid,
    GridFunction,
    KernelTruncationError,
    KolmogorovModel,
    build_kernel,
    default_grid,
    entropic_hopf_lax,
    heat_model,
    ou_model,
    semigroup_apply,
)
from bridgekit.semigroup import POTENTIAL_QUADRATIC, POTENTIAL_ZERO, apply_semigroup

MODELS = (heat_model(1.0), ou_model(1.0))

# shared small instances so hypothesis examples hit the kernel cache
_SMALL_GRID = Grid(-6.0, 6.0, 64)
_SMALL_HEAT = heat_model(1.0)


def _bump(grid):
    return GridFunction(grid, np.exp(-0.5 * (grid.points - 1.0) ** 2))


def test_model_validation():
    with pytest.raises(ValueError):
        KolmogorovModel("cubic", 0.0, 1.0)
    with pytest.raises(ValueError):
        KolmogorovModel(POTENTIAL_ZERO, 1.0, 1.0)  # curvature mismatch
    with pytest.raises(ValueError):
        KolmogorovModel(POTENTIAL_QUADRATIC, 1.0, -0.5)


def test_model_flavors_and_reference():
    grid = default_grid(0.0, 0.0)
    heat = heat_model(2.0)
    ou = ou_model(0.3)
    assert (heat.potential, heat.lam, heat.epsilon) == (POTENTIAL_ZERO, 0.0, 2.0)
    assert (ou.potential, ou.lam, ou.epsilon) == (POTENTIAL_QUADRATIC, 1.0, 0.3)
    assert np.all(heat.reference(grid).weights == 1.0)
    assert grid.integrate(ou.reference(grid).weights) == pytest.approx(1.0, abs=1e-9)
    assert np.all(heat.potential_gradient(grid.points) == 0.0)
    assert np.allclose(ou.potential_gradient(grid.points), grid.points)


def test_undilated_returns_unit_epsilon_twin():
    assert heat_model(0.25).undilated().epsilon == 1.0
    model = ou_model(1.0)
    assert model.undilated() is model


def test_models_compare_by_parameters_not_cache():
    a, b = heat_model(1.0), heat_model(1.0)
    a.kernel(0.5, _SMALL_GRID)  # populate one cache only
    assert a == b
    assert hash(a) == hash(b)


def test_kernel_rows_have_exactly_unit_mass():
    grid = default_grid(-3.0, 3.0)
    for model in MODELS:
        for t in (0.1, 0.5, 1.0):
            kernel = model.kernel(t, grid)
            row_mass = kernel.matrix @ grid.trapezoid_weights
            assert np.max(np.abs(row_mass - 1.0)) < 1e-12
            assert np.min(kernel.matrix) >= 0.0


def test_kernel_cache_returns_same_object():
    model = heat_model(1.0)
    grid = default_grid(0.0, 0.0)
    assert model.kernel(0.5, grid) is model.kernel(0.5, grid)


def test_kernel_rejects_nonpositive_time():
    with pytest.raises(ValueError):
        build_kernel(heat_model(1.0), 0.0, _SMALL_GRID)


def test_semigroup_is_self_adjoint_in_reference_inner_product():
    # ⟨T_t f, g⟩_m = ⟨f, T_t g⟩_m is the discrete form of reversibility
    grid = default_grid(-3.0, 3.0)
    for model in MODELS:
        m = model.reference(grid).weights
        f = _bump(grid)
        g = GridFunction(grid, 1.0 / (1.0 + grid.points**2))
        for t in (0.1, 1.0):
            lhs = grid.integrate(semigroup_apply(model, t, f).values * g.values * m)
            rhs = grid.integrate(f.values * semigroup_apply(model, t, g).values * m)
            assert abs(lhs - rhs) < 1e-12 * abs(lhs)


def test_semigroup_conserves_reference_mass():
    grid = default_grid(-3.0, 3.0)
    for model in MODELS:
        m = model.reference(grid).weights
        f = _bump(grid)
        before = grid.integrate(f.values * m)
        for t in (0.3, 1.0):
            after = grid.integrate(semigroup_apply(model, t, f).values * m)
            assert abs(after - before) < 1e-12


def test_semigroup_preserves_constants_and_sup_bound():
    grid = default_grid(-3.0, 3.0)
    one = GridFunction(grid, np.ones(grid.n))
    f = _bump(grid)
    for model in MODELS:
        Tone = semigroup_apply(model, 0.7, one)
        assert np.max(np.abs(Tone.values - 1.0)) < 1e-12
        Tf = semigroup_apply(model, 0.7, f)
        assert np.max(Tf.values) <= np.max(f.values) * (1.0 + 1e-12)
        assert np.min(Tf.values) >= 0.0


def test_semigroup_composition_law():
    # edge rows are renormalized after truncation, so Chapman-Kolmogorov is
    # checked where every intermediate transition keeps its full support
    grid = default_grid(-3.0, 3.0)
    f = _bump(grid)
    interior = np.abs(grid.points) <= 3.0
    for model in MODELS:
        two_step = semigroup_apply(model, 0.3, semigroup_apply(model, 0.7, f))
        one_step = semigroup_apply(model, 1.0, f)
        assert np.max(np.abs(two_step.values - one_step.values)[interior]) < 1e-9


def test_semigroup_time_zero_is_identity():
    grid = default_grid(0.0, 0.0)
    f = _bump(grid)
    assert np.array_equal(semigroup_apply(heat_model(1.0), 0.0, f).values, f.values)
    with pytest.raises(ValueError):
        semigroup_apply(heat_model(1.0), -0.1, f)


def test_apply_semigroup_rejects_foreign_grid():
    kernel = heat_model(1.0).kernel(0.5, _SMALL_GRID)
    other = GridFunction(Grid(-6.0, 6.0, 65), np.zeros(65))
    with pytest.raises(ValueError):
        apply_semigroup(kernel, other)


def test_strict_capture_check_rejects_narrow_grid():
    narrow = Grid(-2.0, 2.0, 64)
    with pytest.raises(KernelTruncationError) as info:
        build_kernel(ou_model(1.0), 1.0, narrow, strict=True)
    assert info.value.captured_mass == pytest.approx(0.8387, abs=1e-3)
    # without strict the same grid has no interior rows, so it builds
    kernel = build_kernel(ou_model(1.0), 1.0, narrow, strict=False)
    assert np.max(np.abs(kernel.matrix @ narrow.trapezoid_weights - 1.0)) < 1e-12


def test_ou_row_parameters_match_the_transition_law():
    grid = default_grid(-3.0, 3.0)
    model = ou_model(1.0)
    t = 0.8
    kernel = model.kernel(t, grid)
    w = grid.trapezoid_weights
    row_mean = kernel.matrix @ (w * grid.points)
    row_var = kernel.matrix @ (w * grid.points**2) - row_mean**2
    # rows started well inside the grid keep their full ±8σ support
    interior = np.abs(grid.points) < 3.0
    expected_mean = grid.points[interior] * np.exp(-t / 2.0)
    assert np.max(np.abs(row_mean[interior] - expected_mean)) < 1e-9
    assert np.max(np.abs(row_var[interior] - (1.0 - np.exp(-t)))) < 1e-9


@settings(max_examples=25, deadline=None)
@given(c=st.floats(min_value=-50.0, max_value=50.0))
def test_hopf_lax_cash_invariance(c):
    psi = GridFunction(_SMALL_GRID, np.sin(_SMALL_GRID.points))
    q_psi = entropic_hopf_lax(_SMALL_HEAT, 0.5, psi)
    q_shifted = entropic_hopf_lax(_SMALL_HEAT, 0.5, psi + c)
    assert np.max(np.abs(q_shifted.values - q_psi.values - c)) < 1e-10 * (1.0 + abs(c))


def test_hopf_lax_preserves_constants():
    psi = GridFunction(_SMALL_GRID, np.full(_SMALL_GRID.n, 3.25))
    q_psi = entropic_hopf_lax(_SMALL_HEAT, 1.0, psi)
    assert np.max(np.abs(q_psi.values - 3.25)) < 1e-12


@settings(max_examples=25, deadline=None)
@given(
    scale=st.floats(min_value=0.1, max_value=2.0),
    shift=st.floats(min_value=-1.0, max_value=1.0),
)
def test_hopf_lax_is_monotone(scale, shift):
    x = _SMALL_GRID.points
    lower = GridFunction(_SMALL_GRID, np.sin(x))
    upper = GridFunction(_SMALL_GRID, np.sin(x) + scale * np.cos(x) ** 2 + abs(shift))
    q_lower = entropic_hopf_lax(_SMALL_HEAT, 0.5, lower)
    q_upper = entropic_hopf_lax(_SMALL_HEAT, 0.5, upper)
    assert np.all(q_upper.values >= q_lower.values - 1e-12)


def test_hopf_lax_requires_positive_horizon():
    psi = GridFunction(_SMALL_GRID, np.zeros(_SMALL_GRID.n))
    with pytest.raises(ValueError):
        entropic_hopf_lax(_SMALL_HEAT, 0.0, psi)
