"""Horizon schedules and contraction inequalities along the semigroup.

For curvature parameter λ ≥ 0 and dilation ε, the admissible horizon window
at time t > 0 is b ∈ (0, b_max), b_max = -(1/λε) log(1 - e^{-λt}), and the
rescheduled horizons are

    u_t(b) = t + (1/λ) log( e^{-ελb} / (1 + e^{λt}(e^{-ελb} - 1)) ),
    v_t(b) = -(1/λε) log( 1 + e^{λt}(e^{-ελb} - 1) ),

with the analytic λ=0 limit u = t, v = b.  As ε → 0, v_t(b) → b e^{λt} and
u_t(b) → t.

Three families of checks, all returning a signed slack (violation ≈ ≤ 0 for
commutation, slack ≥ 0 for contraction) rather than booleans:

* commutation of the entropic Hopf-Lax operator with the semigroup,
      Q_{v_t(b)}(T_t f) ≤ T_{u_t(b)}(Q_b f),
  and its dimensional (zero-potential) variant
      Q_1(T_t f) ≤ T_s(Q_1 f) + (1/2)(√t - √s)²,
  whose additive constant is dimension-carried and ε-free;

* contraction of the entropic cost between evolved marginals,
      A_b(T_{u_t(b)} f·m, T_t g·m) ≤ A_v(f·m, g·m) + ε[H(T_{u_t(b)} f·m | m) - H(f·m | m)],
  where A_w is the scaled cost at horizon w (kernel at time-parameter w),
  plus the zero-potential variant at fixed horizon 1 with the same
  (1/2)(√t - √s)² constant;

* Wasserstein contraction of evolved Gaussians,
      W₂(T_t μ, T_t ν) ≤ e^{-λεt/2} W₂(μ, ν),
  with the dimensional squared form
      W₂²(T_t μ, T_s ν) ≤ W₂²(μ, ν) + (√(εt) - √(εs))².

Clock conventions: the evolution semigroups T_t, T_u, T_s in the first two
families run in the undilated clock (the ε = 1 twin of the model), while the
Hopf-Lax operator and the horizon costs A_b, A_v use the model's own ε; this
is the unique reading under which the dimensional constant above is exactly
free of ε.  The Gaussian Wasserstein checks are stated for the model clock,
where the kernel at time-parameter t moves moments by physical time εt and
the contraction rate is e^{-λεt/2}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import ModelMismatchError, ScheduleDomainError
from .measures import (
    GaussianMeasure,
    GridDensity,
    GridFunction,
    relative_entropy,
    wasserstein2_gaussian,
)
from .semigroup import (
    POTENTIAL_ZERO,
    KolmogorovModel,
    entropic_hopf_lax,
    semigroup_apply,
)
from .sinkhorn import solve_schrodinger_system


@dataclass(frozen=True)
class ContractionSchedule:
    """Resolved (u, v) horizons; ``lam`` is the curvature λ."""

    lam: float
    epsilon: float
    t: float
    b: float
    u: float
    v: float
    b_max: float


def contraction_schedule(
    lam: float, epsilon: float, t: float, b: float
) -> ContractionSchedule:
    """Evaluate u_t(b), v_t(b) with the λ=0 branch taken analytically."""
    if lam < 0.0:
        raise ValueError("negative curvature schedules are out of scope")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if b <= 0.0:
        raise ValueError("b must be positive")

    if lam == 0.0 or t == 0.0:
        return ContractionSchedule(
            lam=lam, epsilon=epsilon, t=t, b=b, u=t, v=b, b_max=math.inf
        )

    # 1 - e^{-λt} in (0,1), so b_max is finite and positive.
    b_max = -math.log(-math.expm1(-lam * t)) / (lam * epsilon)
    denom = 1.0 + math.exp(lam * t) * math.expm1(-epsilon * lam * b)
    if b >= b_max or denom <= 0.0:
        raise ScheduleDomainError(
            f"b={b} outside the admissible window (0, {b_max:.6g}) "
            f"at lam={lam}, epsilon={epsilon}, t={t}",
            b_max=b_max,
        )
    log_denom = math.log(denom)
    u = t + (-epsilon * lam * b - log_denom) / lam
    v = -log_denom / (lam * epsilon)
    return ContractionSchedule(
        lam=lam, epsilon=epsilon, t=t, b=b, u=u, v=v, b_max=b_max
    )


def _interior_max(values: np.ndarray) -> float:
    """Largest entry away from the two boundary nodes."""
    return float(np.max(values[1:-1]))


def check_commutation(
    model: KolmogorovModel, f: GridFunction, t: float, b: float
) -> float:
    """Max interior violation of Q_{v}(T_t f) ≤ T_{u}(Q_b f); ≤ 0 is a pass."""
    sched = contraction_schedule(model.lam, model.epsilon, t, b)
    twin = model.undilated()
    lhs = entropic_hopf_lax(model, sched.v, semigroup_apply(twin, t, f))
    rhs = semigroup_apply(twin, sched.u, entropic_hopf_lax(model, b, f))
    return _interior_max(lhs.values - rhs.values)


def check_commutation_dimensional(
    model: KolmogorovModel, f: GridFunction, t: float, s: float
) -> float:
    """Max interior violation of Q_1(T_t f) ≤ T_s(Q_1 f) + (1/2)(√t-√s)²."""
    if model.potential != POTENTIAL_ZERO:
        raise ModelMismatchError(
            "the dimensional commutation bound holds for the zero potential only"
        )
    if t < 0.0 or s < 0.0:
        raise ValueError("t and s must be nonnegative")
    twin = model.undilated()
    lhs = entropic_hopf_lax(model, 1.0, semigroup_apply(twin, t, f))
    rhs = semigroup_apply(twin, s, entropic_hopf_lax(model, 1.0, f))
    constant = 0.5 * (math.sqrt(t) - math.sqrt(s)) ** 2
    return _interior_max(lhs.values - rhs.values) - constant


def _density_from_ratio(model: KolmogorovModel, ratio: GridFunction) -> GridDensity:
    """Turn a strictly positive density-vs-m into a unit-mass grid density."""
    values = np.asarray(ratio.values, dtype=float)
    if np.min(values) <= 0.0:
        raise ValueError("density w.r.t. m must be strictly positive")
    grid = ratio.grid
    mu = values * model.reference(grid).weights
    return GridDensity(grid, mu / grid.integrate(mu))


def _evolved_density(
    model: KolmogorovModel, ratio: GridFunction, time: float
) -> GridDensity:
    """Evolve a density-vs-m by the undilated semigroup, return μ = (T f)·m."""
    twin = model.undilated()
    evolved = semigroup_apply(twin, time, ratio)
    return _density_from_ratio(model, evolved)


def check_entropic_contraction(
    model: KolmogorovModel,
    f: GridFunction,
    g: GridFunction,
    t: float,
    b: float,
    tol: float = 1e-9,
    maxiter: int = 100_000,
) -> float:
    """Slack of the scheduled cost contraction; ≥ 0 up to solver noise.

    ``f`` and ``g`` are strictly positive densities w.r.t. m.  The left side
    solves at horizon b between the u- and t-evolved marginals; the right
    side solves at horizon v between the originals and adds the ε-weighted
    entropy decrease of the first marginal.
    """
    sched = contraction_schedule(model.lam, model.epsilon, t, b)
    mu0 = _density_from_ratio(model, f)
    nu0 = _density_from_ratio(model, g)
    mu_u = _evolved_density(model, f, sched.u)
    nu_t = _evolved_density(model, g, t)

    lhs = solve_schrodinger_system(
        model, mu_u, nu_t, tol=tol, maxiter=maxiter, horizon=b
    ).cost_scaled
    base = solve_schrodinger_system(
        model, mu0, nu0, tol=tol, maxiter=maxiter, horizon=sched.v
    ).cost_scaled
    reference = model.reference(f.grid)
    entropy_drop = relative_entropy(mu_u, reference) - relative_entropy(mu0, reference)
    rhs = base + model.epsilon * entropy_drop
    return rhs - lhs


def check_entropic_contraction_dimensional(
    model: KolmogorovModel,
    f: GridFunction,
    g: GridFunction,
    t: float,
    s: float,
    tol: float = 1e-9,
    maxiter: int = 100_000,
) -> float:
    """Zero-potential variant at fixed horizon 1 with the (√t-√s)² constant."""
    if model.potential != POTENTIAL_ZERO:
        raise ModelMismatchError(
            "the dimensional contraction bound holds for the zero potential only"
        )
    if t < 0.0 or s < 0.0:
        raise ValueError("t and s must be nonnegative")
    mu0 = _density_from_ratio(model, f)
    nu0 = _density_from_ratio(model, g)
    mu_t = _evolved_density(model, f, t)
    nu_s = _evolved_density(model, g, s)

    lhs = solve_schrodinger_system(
        model, mu_t, nu_s, tol=tol, maxiter=maxiter, horizon=1.0
    ).cost_scaled
    base = solve_schrodinger_system(
        model, mu0, nu0, tol=tol, maxiter=maxiter, horizon=1.0
    ).cost_scaled
    reference = model.reference(f.grid)
    entropy_drop = relative_entropy(mu_t, reference) - relative_entropy(mu0, reference)
    constant = 0.5 * (math.sqrt(t) - math.sqrt(s)) ** 2
    rhs = base + constant + model.epsilon * entropy_drop
    return rhs - lhs


def evolve_gaussian(model: KolmogorovModel, g: GaussianMeasure, t: float) -> GaussianMeasure:
    """Moment map of the model kernel at time-parameter t (physical time εt)."""
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if model.potential == POTENTIAL_ZERO:
        return GaussianMeasure(g.mean, g.variance + model.epsilon * t)
    decay = math.exp(-model.epsilon * t / 2.0)
    return GaussianMeasure(decay * g.mean, g.variance * decay**2 + (1.0 - decay**2))


def check_wasserstein_contraction(
    model: KolmogorovModel, g0: GaussianMeasure, g1: GaussianMeasure, t: float
) -> float:
    """Slack of W₂(T_t μ, T_t ν) ≤ e^{-λεt/2} W₂(μ, ν); ≥ 0, =0 at equality."""
    lhs = math.sqrt(
        wasserstein2_gaussian(evolve_gaussian(model, g0, t), evolve_gaussian(model, g1, t))
    )
    rate = math.exp(-model.lam * model.epsilon * t / 2.0)
    rhs = rate * math.sqrt(wasserstein2_gaussian(g0, g1))
    return rhs - lhs


def check_wasserstein_contraction_dimensional(
    model: KolmogorovModel,
    g0: GaussianMeasure,
    g1: GaussianMeasure,
    t: float,
    s: float,
) -> float:
    """Slack of W₂²(T_t μ, T_s ν) ≤ W₂²(μ, ν) + (√(εt) - √(εs))², heat only."""
    if model.potential != POTENTIAL_ZERO:
        raise ModelMismatchError(
            "the dimensional Wasserstein bound holds for the zero potential only"
        )
    if t < 0.0 or s < 0.0:
        raise ValueError("t and s must be nonnegative")
    lhs = wasserstein2_gaussian(
        evolve_gaussian(model, g0, t), evolve_gaussian(model, g1, s)
    )
    eps = model.epsilon
    constant = (math.sqrt(eps * t) - math.sqrt(eps * s)) ** 2
    rhs = wasserstein2_gaussian(g0, g1) + constant
    return rhs - lhs
