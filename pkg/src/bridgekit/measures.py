"""Gaussian measures, grid densities, relative entropy, and quadratic-cost
closed forms.

All discretization in this package lives on a uniform grid with composite
trapezoid quadrature: for samples v_i at spacing h the integral is
h·(v_0/2 + v_1 + … + v_{n-2} + v_{n-1}/2).  Second-order accuracy is enough
at the default resolution (n = 512 over a ±8σ window makes the truncation
error of Gaussian integrands far smaller than any tolerance used here).

Conventions:

* relative entropy  H(p|r) = ∫ p log(p/r) dx  with 0·log 0 := 0.  When r is
  an unnormalized reference (Lebesgue) the value may be negative; it is
  returned as-is.  H(N(a,1) | N(0,1)) = a²/2 and
  H(N(0,1) | Leb) = -½ log(2πe) are the two calibration identities used in
  the tests.
* squared quadratic transport cost between Gaussians:
  W₂²(N(m₀,σ₀²), N(m₁,σ₁²)) = (m₀-m₁)² + (σ₀-σ₁)².
* displacement interpolation of two equal-variance Gaussians keeps the
  variance and moves the mean linearly: μ_t = N((1-t)m₀ + t m₁, σ²); along
  it W₂(μ_s, μ_t) = |t-s| W₂(μ₀, μ₁) (constant-speed geodesic).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .exceptions import AbsoluteContinuityError, MassDeficitError, UnsupportedCaseError
from .validation import (
    readonly,
    require_finite,
    require_positive,
    require_same_grid,
    require_unit_interval,
)

MASS_TOL = 1e-6

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D grid on [lo, hi] with n points (n ≥ 3)."""

    lo: float
    hi: float
    n: int

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"grid needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.n < 3:
            raise ValueError(f"grid needs at least 3 points, got n={self.n}")

    @property
    def h(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)

    @cached_property
    def points(self) -> np.ndarray:
        return readonly(np.linspace(self.lo, self.hi, self.n))

    @cached_property
    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.h)
        w[0] *= 0.5
        w[-1] *= 0.5
        return readonly(w)

    def integrate(self, values: np.ndarray) -> float:
        return float(self.trapezoid_weights @ np.asarray(values, dtype=float))


def default_grid(x0: float, x1: float, n: int = 512) -> Grid:
    """Grid wide enough for unit-variance marginals centered at x0 and x1.

    ±8σ of padding keeps every Gaussian tail below ~1e-15 at the boundary.
    """
    return Grid(min(x0, x1) - 8.0, max(x0, x1) + 8.0, n)


@dataclass(frozen=True)
class GaussianMeasure:
    """N(mean, variance) on the line."""

    mean: float
    variance: float

    def __post_init__(self):
        require_positive(self.variance, "variance")

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.variance))

    def density(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.exp(-((x - self.mean) ** 2) / (2.0 * self.variance)) / np.sqrt(
            2.0 * np.pi * self.variance
        )

    def log_density(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (
            -((x - self.mean) ** 2) / (2.0 * self.variance)
            - 0.5 * np.log(self.variance)
            - 0.5 * _LOG_2PI
        )


@dataclass(frozen=True)
class GridFunction:
    """Finite real samples on a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = require_finite(self.values, "GridFunction values")
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"values shape {values.shape} does not match grid n={self.grid.n}"
            )
        object.__setattr__(self, "values", readonly(values))

    def __add__(self, other):
        if isinstance(other, GridFunction):
            require_same_grid(self, other)
            return GridFunction(self.grid, self.values + other.values)
        return GridFunction(self.grid, self.values + float(other))

    def __sub__(self, other):
        if isinstance(other, GridFunction):
            require_same_grid(self, other)
            return GridFunction(self.grid, self.values - other.values)
        return GridFunction(self.grid, self.values - float(other))


@dataclass(frozen=True)
class GridDensity:
    """Nonnegative samples (a density w.r.t. Lebesgue) integrating to 1.

    The trapezoid mass must sit within MASS_TOL of one; construction fails
    otherwise so that no downstream quadrature silently works with a lost
    tail.
    """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = require_finite(self.values, "GridDensity values")
        if values.shape != (self.grid.n,):
            raise ValueError(
                f"values shape {values.shape} does not match grid n={self.grid.n}"
            )
        if np.any(values < 0.0):
            raise ValueError("GridDensity values must be nonnegative")
        mass = self.grid.integrate(values)
        if abs(mass - 1.0) > MASS_TOL:
            raise MassDeficitError(
                f"density mass {mass!r} deviates from 1 beyond {MASS_TOL}",
                captured_mass=mass,
            )
        object.__setattr__(self, "values", readonly(values))

    @property
    def mass(self) -> float:
        return self.grid.integrate(self.values)

    def mean(self) -> float:
        return self.grid.integrate(self.grid.points * self.values)

    def variance(self) -> float:
        m = self.mean()
        return self.grid.integrate((self.grid.points - m) ** 2 * self.values)


@dataclass(frozen=True)
class ReferenceMeasure:
    """Reversing measure m, sampled as a Lebesgue density on the grid.

    Two kinds exist: ``lebesgue`` (weight 1 everywhere, unnormalized) and
    ``standard_gaussian`` (N(0,1), which must capture its unit mass on the
    grid it is sampled on).
    """

    kind: str
    grid: Grid
    weights: np.ndarray

    LEBESGUE = "lebesgue"
    STANDARD_GAUSSIAN = "standard_gaussian"

    def __post_init__(self):
        if self.kind not in (self.LEBESGUE, self.STANDARD_GAUSSIAN):
            raise ValueError(f"unknown reference kind {self.kind!r}")
        weights = require_finite(self.weights, "reference weights")
        if weights.shape != (self.grid.n,):
            raise ValueError("reference weights do not match the grid")
        if np.any(weights < 0.0):
            raise ValueError("reference weights must be nonnegative")
        object.__setattr__(self, "weights", readonly(weights))

    @classmethod
    def lebesgue(cls, grid: Grid) -> "ReferenceMeasure":
        return cls(cls.LEBESGUE, grid, np.ones(grid.n))

    @classmethod
    def standard_gaussian(cls, grid: Grid) -> "ReferenceMeasure":
        w = GaussianMeasure(0.0, 1.0).density(grid.points)
        mass = grid.integrate(w)
        if abs(mass - 1.0) > MASS_TOL:
            raise MassDeficitError(
                f"grid [{grid.lo}, {grid.hi}] captures only mass {mass!r} of N(0,1)",
                captured_mass=mass,
            )
        return cls(cls.STANDARD_GAUSSIAN, grid, w)

    @cached_property
    def log_weights(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return readonly(np.log(self.weights))


def gaussian_grid_density(g: GaussianMeasure, grid: Grid) -> GridDensity:
    """Sample N(mean, variance) on the grid; the grid must span ±8σ."""
    span = 8.0 * g.sigma
    # Moment formulas upstream can overshoot an exact endpoint by a few ulp;
    # the span guard must not reject a grid over rounding noise.
    slack = 1e-12 * (1.0 + abs(g.mean) + span)
    if grid.lo > g.mean - span + slack or grid.hi < g.mean + span - slack:
        captured = grid.integrate(g.density(grid.points))
        raise MassDeficitError(
            f"grid [{grid.lo}, {grid.hi}] does not span mean ± 8σ "
            f"= [{g.mean - span}, {g.mean + span}]",
            captured_mass=captured,
        )
    return GridDensity(grid, g.density(grid.points))


def relative_entropy(p: GridDensity, r: ReferenceMeasure) -> float:
    """H(p|r) = ∫ p log(p/r) dx by trapezoid quadrature, 0·log 0 := 0."""
    require_same_grid(p, r, "density and reference")
    pv = p.values
    rv = r.weights
    bad = (pv > 0.0) & (rv == 0.0)
    if np.any(bad):
        idx = int(np.argmax(bad))
        raise AbsoluteContinuityError(
            f"density positive at grid index {idx} where the reference vanishes"
        )
    integrand = np.zeros_like(pv)
    pos = pv > 0.0
    integrand[pos] = pv[pos] * (np.log(pv[pos]) - np.log(rv[pos]))
    return p.grid.integrate(integrand)


def wasserstein2_gaussian(g0: GaussianMeasure, g1: GaussianMeasure) -> float:
    """Squared quadratic transport cost between two Gaussians (1-D closed form)."""
    return (g0.mean - g1.mean) ** 2 + (g0.sigma - g1.sigma) ** 2


def mccann_interpolation(g0: GaussianMeasure, g1: GaussianMeasure, t: float) -> GaussianMeasure:
    """Displacement interpolation of equal-variance Gaussians.

    Only the equal-variance class is supported; it is the one with the
    simple closed form N((1-t)m₀ + t m₁, σ²).
    """
    require_unit_interval(t)
    if abs(g0.variance - g1.variance) > 1e-12 * max(g0.variance, g1.variance):
        raise UnsupportedCaseError(
            f"displacement interpolation implemented for equal variances only, "
            f"got {g0.variance!r} and {g1.variance!r}"
        )
    return GaussianMeasure((1.0 - t) * g0.mean + t * g1.mean, g0.variance)
