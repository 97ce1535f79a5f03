"""Closed-form entropic bridges between unit-variance Gaussian marginals.

For μ₀ = N(x₀, 1), μ₁ = N(x₁, 1) and either built-in kernel family, the
marginal-matching system

    dμ₀/dm = f₀ · T₁ g₁,      dμ₁/dm = g₁ · T₁ f₀

is solvable inside the family of log-quadratic potentials, and every object
this package computes numerically (interpolation slices, optimal dual
potential, current/osmotic velocities, entropic cost) then has an explicit
formula.  This module is the analytic oracle the numerical modules are
tested against.

Heat kernel (rows N(x, εt), m = Lebesgue)
-----------------------------------------
With δ = (ε - 2 + √(4 + ε²))/2  (so δ² + 2δ = ε(1 + δ), δ > 0) and
α = δ²/(1 + δ):

    log f₀(x) = a x² + b_f x + const,   a   = -δ/(2ε),
    log g₁(x) = a x² + b_g x + const,   b_f = ((1+δ)x₀ - x₁)/ε,
                                        b_g = ((1+δ)x₁ - x₀)/ε,

    μ_t = N(x_t, D_t),   x_t = (1-t)x₀ + t x₁,   D_t = α t(1-t) + 1.

The ε-scaled dual potential ψ_t(x) = ε log T_{ε(1-t)} g₁ (additive constant
fixed to 0) is quadratic:

    ψ_t(x) = -½ · δ/(1 + δ(1-t)) · x²  +  ε b_g/(1 + δ(1-t)) · x.

Ornstein–Uhlenbeck kernel (rows N(x e^{-εt/2}, 1 - e^{-εt}), m = N(0,1))
------------------------------------------------------------------------
Write c = e^{-ε/2}, q = c².  Both optimal potentials are log-LINEAR:

    log f₀(x) = b_f x + const,   b_f = (x₀ - c x₁)/(1 - q),
    log g₁(x) = b_g x + const,   b_g = (x₁ - c x₀)/(1 - q),

because exponential tilting of a stationary Gaussian process by log-linear
endpoint weights shifts conditional means but leaves every conditional
variance untouched.  Consequently

    μ_t = N(m_t, 1),   m_t = e^{-εt/2} b_f + e^{-ε(1-t)/2} b_g,

with m₀ = x₀, m₁ = x₁ (the tilts solve exactly that 2×2 system), and the
bridge variance is identically 1 — the interpolation translates without
breathing.  The dual potential is linear:

    ψ_t(x) = ε b_g e^{-ε(1-t)/2} x.

A quadratic ansatz for the OU potentials is self-inconsistent: matching the
x² coefficient of dμ₀/dm forces the quadratic part to vanish.  The
``delta``/``gamma`` parameters of the quadratic family are still exposed on
``OUBridgeParams`` for reference, but every moment, velocity and potential
below comes from the linear-tilt solution, which is the one the Sinkhorn
fixed point reproduces to quadrature accuracy.

Entropic costs (H of the optimal coupling w.r.t. the reference R₀₁)
-------------------------------------------------------------------
Integrating log f₀ dμ₀ + log g₁ dμ₁ with constants fixed by the system:

    heat: 2a + a(x₀² + x₁²) + b_f x₀ + b_g x₁ - x₀²/2 - ½log 2π
          - ε b_g²/(2(1+δ)) + ½ log(1+δ),
    OU:   b_f x₀ + b_g x₁ - x₀²/2 - b_g²(1 - q)/2.

Both expressions are symmetric in (x₀, x₁) (swap exchanges b_f and b_g).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .measures import GaussianMeasure, Grid, GridDensity, GridFunction, gaussian_grid_density
from .semigroup import POTENTIAL_ZERO, KolmogorovModel
from .validation import require_unit_interval

_LOG_2PI = float(np.log(2.0 * np.pi))

_FD_STEP = 1e-5


@dataclass(frozen=True)
class HeatBridgeParams:
    """Derived constants of the heat bridge between N(x0,1) and N(x1,1)."""

    epsilon: float
    x0: float
    x1: float

    @cached_property
    def delta(self) -> float:
        eps = self.epsilon
        return (eps - 2.0 + np.sqrt(4.0 + eps * eps)) / 2.0

    @cached_property
    def alpha(self) -> float:
        return self.delta**2 / (1.0 + self.delta)

    @cached_property
    def gamma(self) -> float:
        # parameter of the quadratic potential family, = 2 ε b_f
        return 2.0 * (self.x0 * (1.0 + self.delta) - self.x1)

    @cached_property
    def tilt0(self) -> float:
        return ((1.0 + self.delta) * self.x0 - self.x1) / self.epsilon

    @cached_property
    def tilt1(self) -> float:
        return ((1.0 + self.delta) * self.x1 - self.x0) / self.epsilon


@dataclass(frozen=True)
class OUBridgeParams:
    """Derived constants of the Ornstein–Uhlenbeck bridge."""

    epsilon: float
    x0: float
    x1: float

    @cached_property
    def decay(self) -> float:
        return float(np.exp(-self.epsilon / 2.0))

    @cached_property
    def delta(self) -> float:
        # root parameter of the quadratic potential family (kept for
        # reference; the bridge itself is realized by linear tilts)
        q = np.exp(-self.epsilon)
        return float((q - np.sqrt(q * q - q + 1.0)) / (q - 1.0))

    @cached_property
    def gamma(self) -> float:
        q = np.exp(-self.epsilon)
        d = self.delta
        return float(
            (self.x0 * self.decay - self.x1 * (1.0 + d - d * q)) / (1.0 - q)
        )

    @cached_property
    def tilt0(self) -> float:
        c = self.decay
        return (self.x0 - c * self.x1) / (1.0 - c * c)

    @cached_property
    def tilt1(self) -> float:
        c = self.decay
        return (self.x1 - c * self.x0) / (1.0 - c * c)


def bridge_params(model: KolmogorovModel, x0: float, x1: float):
    if model.potential == POTENTIAL_ZERO:
        return HeatBridgeParams(model.epsilon, float(x0), float(x1))
    return OUBridgeParams(model.epsilon, float(x0), float(x1))


@dataclass(frozen=True)
class BridgeMoment:
    """Mean/variance of a bridge slice plus their time derivatives."""

    t: float
    mean: float
    variance: float
    mean_rate: float
    variance_rate: float

    def __post_init__(self):
        if not self.variance > 0.0:
            raise ValueError(f"bridge variance must be positive, got {self.variance!r}")
        if self.t in (0.0, 1.0) and abs(self.variance - 1.0) > 1e-10:
            raise ValueError(
                f"endpoint variance {self.variance!r} deviates from 1 at t={self.t}"
            )


def _heat_mean_var(p: HeatBridgeParams, t: float) -> tuple[float, float]:
    return (1.0 - t) * p.x0 + t * p.x1, p.alpha * t * (1.0 - t) + 1.0


def _ou_mean_var(p: OUBridgeParams, t: float) -> tuple[float, float]:
    eps = p.epsilon
    mean = np.exp(-eps * t / 2.0) * p.tilt0 + np.exp(-eps * (1.0 - t) / 2.0) * p.tilt1
    return float(mean), 1.0


def bridge_moments(
    model: KolmogorovModel, x0: float, x1: float, t: float, rates: str = "analytic"
) -> BridgeMoment:
    """Closed-form moment pair (and rates) of the bridge slice at time t.

    ``rates`` selects analytic differentiation (default) or a central
    finite difference of the same closed forms, kept as a cross-check; the
    formulas are entire in t so the difference stencil may step outside
    [0, 1].
    """
    require_unit_interval(t)
    if rates not in ("analytic", "finite_difference"):
        raise ValueError(f"unknown rates mode {rates!r}")
    params = bridge_params(model, x0, x1)
    mv = _heat_mean_var if model.potential == POTENTIAL_ZERO else _ou_mean_var
    mean, var = mv(params, t)

    if rates == "analytic":
        if model.potential == POTENTIAL_ZERO:
            mean_rate = params.x1 - params.x0
            var_rate = params.alpha * (1.0 - 2.0 * t)
        else:
            eps = model.epsilon
            mean_rate = (eps / 2.0) * (
                -np.exp(-eps * t / 2.0) * params.tilt0
                + np.exp(-eps * (1.0 - t) / 2.0) * params.tilt1
            )
            var_rate = 0.0
    else:
        h = _FD_STEP
        m_plus, v_plus = mv(params, t + h)
        m_minus, v_minus = mv(params, t - h)
        mean_rate = (m_plus - m_minus) / (2.0 * h)
        var_rate = (v_plus - v_minus) / (2.0 * h)

    return BridgeMoment(
        t=float(t),
        mean=float(mean),
        variance=float(var),
        mean_rate=float(mean_rate),
        variance_rate=float(var_rate),
    )


def bridge_density(mom: BridgeMoment, grid: Grid) -> GridDensity:
    return gaussian_grid_density(GaussianMeasure(mom.mean, mom.variance), grid)


def dual_potential(model: KolmogorovModel, params, t: float, grid: Grid) -> GridFunction:
    """ε-scaled optimal dual potential ψ_t on the grid, additive constant 0."""
    require_unit_interval(t)
    x = grid.points
    eps = model.epsilon
    if model.potential == POTENTIAL_ZERO:
        denom = 1.0 + params.delta * (1.0 - t)
        quad = -0.5 * params.delta / denom
        lin = eps * params.tilt1 / denom
        values = quad * x * x + lin * x
    else:
        lin = eps * params.tilt1 * np.exp(-eps * (1.0 - t) / 2.0)
        values = lin * x
    return GridFunction(grid, values)


def current_velocity(mom: BridgeMoment, grid: Grid) -> GridFunction:
    """Drift of the continuity equation for the slice, as a field in z:

    v(z) = (D'_t / 2 D_t)(z - m_t) + m'_t  (affine in z).
    """
    z = grid.points
    values = (mom.variance_rate / (2.0 * mom.variance)) * (z - mom.mean) + mom.mean_rate
    return GridFunction(grid, values)


def osmotic_velocity(model: KolmogorovModel, mom: BridgeMoment, grid: Grid) -> GridFunction:
    """(ε/2) ∇log(dμ_t/dm) for the Gaussian slice: affine, exact.

    ∇log μ_t = -(z - m_t)/D_t and ∇log m = -V', so the field is
    (ε/2)(V'(z) - (z - m_t)/D_t).
    """
    z = grid.points
    values = (model.epsilon / 2.0) * (
        model.potential_gradient(z) - (z - mom.mean) / mom.variance
    )
    return GridFunction(grid, values)


def pushforward_map(mom: BridgeMoment, x: float, x0: float) -> float:
    """Monotone affine map sending N(x0, 1) to the slice N(m_t, D_t)."""
    return float(np.sqrt(mom.variance) * (x - x0) + mom.mean)


def entropic_cost_closed_form(model: KolmogorovModel, x0: float, x1: float) -> float:
    """Unscaled entropic cost between N(x0,1) and N(x1,1) for the model."""
    params = bridge_params(model, x0, x1)
    eps = model.epsilon
    if model.potential == POTENTIAL_ZERO:
        a = -params.delta / (2.0 * eps)
        return float(
            2.0 * a
            + a * (x0 * x0 + x1 * x1)
            + params.tilt0 * x0
            + params.tilt1 * x1
            - x0 * x0 / 2.0
            - 0.5 * _LOG_2PI
            - eps * params.tilt1**2 / (2.0 * (1.0 + params.delta))
            + 0.5 * np.log(1.0 + params.delta)
        )
    one_minus_q = -float(np.expm1(-eps))
    return float(
        params.tilt0 * x0
        + params.tilt1 * x1
        - x0 * x0 / 2.0
        - params.tilt1**2 * one_minus_q / 2.0
    )
