"""Kolmogorov transition kernels and the entropic Hopf–Lax operator.

Two reversible diffusion families are built in, both generated by
½(Δ - ∇V·∇) up to the time dilation ε (the ε-model runs the dynamics at
kernel clock εt):

* heat:  V = 0, curvature λ = 0, reversing measure m = Lebesgue,
  transition rows  q_t(x, ·) = N(x, εt);
* Ornstein–Uhlenbeck:  V(x) = x²/2, λ = 1, m = N(0,1),
  rows  q_t(x, ·) = N(x e^{-εt/2}, 1 - e^{-εt}).

Rows are stored as Lebesgue densities in the target variable, so
T_t f(x) = ∫ f(y) q_t(x,y) dy, and reversibility reads
q_t(x,y) m(x) = q_t(y,x) m(y).

Discretization notes.  A Gaussian row truncated to the grid loses mass; two
measures are taken against that:

1. the heat family is realized as the reflected (Neumann) kernel on
   [lo, hi] — the method of images — which conserves mass exactly and is
   itself a curvature-zero reversible semigroup on the interval, so
   semigroup-level inequalities remain theorems for the discrete object
   rather than approximations;
2. every row is renormalized to unit trapezoid mass, making T_t 1 = 1 exact
   in floating point.  Rows whose ±8σ support lies inside the grid must
   already capture their mass up to 1e-6 before renormalization (plus an
   explicit allowance for quadrature aliasing when σ falls below the grid
   spacing); otherwise the grid is genuinely too narrow and construction
   fails rather than papering over the loss.

The entropic Hopf–Lax operator is Q^ε_u ψ = ε log T_{εu} e^{ψ/ε}, evaluated
entirely in the log domain.  By construction it is monotone in ψ and
cash-invariant: Q^ε_u(ψ + c) = Q^ε_u ψ + c exactly, because the rows have
exactly unit mass.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .exceptions import KernelTruncationError
from .measures import Grid, GridFunction, ReferenceMeasure
from .validation import readonly, require_positive

POTENTIAL_ZERO = "zero"
POTENTIAL_QUADRATIC = "quadratic"

_LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class KolmogorovModel:
    """Kernel family: potential flavor, curvature, and time dilation ε."""

    potential: str
    lam: float
    epsilon: float
    _kernel_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        require_positive(self.epsilon, "epsilon")
        expected = {POTENTIAL_ZERO: 0.0, POTENTIAL_QUADRATIC: 1.0}
        if self.potential not in expected:
            raise ValueError(f"unknown potential {self.potential!r}")
        if self.lam != expected[self.potential]:
            raise ValueError(
                f"curvature {self.lam!r} inconsistent with potential "
                f"{self.potential!r} (expected {expected[self.potential]!r})"
            )

    def reference(self, grid: Grid) -> ReferenceMeasure:
        if self.potential == POTENTIAL_ZERO:
            return ReferenceMeasure.lebesgue(grid)
        return ReferenceMeasure.standard_gaussian(grid)

    def potential_gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.potential == POTENTIAL_ZERO:
            return np.zeros_like(x)
        return x

    def undilated(self) -> "KolmogorovModel":
        """The same kernel family at ε = 1 (the plain semigroup clock)."""
        if self.epsilon == 1.0:
            return self
        return KolmogorovModel(self.potential, self.lam, 1.0)

    def kernel(self, t: float, grid: Grid, strict: bool = False) -> "KernelMatrix":
        key = (float(t), grid, bool(strict))
        hit = self._kernel_cache.get(key)
        if hit is None:
            hit = build_kernel(self, t, grid, strict=strict)
            self._kernel_cache[key] = hit
        return hit


def heat_model(epsilon: float = 1.0) -> KolmogorovModel:
    return KolmogorovModel(POTENTIAL_ZERO, 0.0, epsilon)


def ou_model(epsilon: float = 1.0) -> KolmogorovModel:
    return KolmogorovModel(POTENTIAL_QUADRATIC, 1.0, epsilon)


@dataclass(frozen=True)
class KernelMatrix:
    """Transition rows q_t(x_i, y_j) as Lebesgue densities, unit row mass.

    ``raw_row_mass`` keeps the pre-renormalization trapezoid masses for
    diagnostics; after construction every row integrates to exactly 1
    against the grid's trapezoid weights.
    """

    model: KolmogorovModel
    t: float
    grid: Grid
    matrix: np.ndarray
    log_matrix: np.ndarray
    raw_row_mass: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", readonly(self.matrix))
        object.__setattr__(self, "log_matrix", readonly(self.log_matrix))
        object.__setattr__(self, "raw_row_mass", readonly(self.raw_row_mass))


def _row_parameters(model: KolmogorovModel, t: float, grid: Grid):
    """Per-row Gaussian mean/sd of the transition law started at each x_i."""
    x = grid.points
    if model.potential == POTENTIAL_ZERO:
        return x.copy(), float(np.sqrt(model.epsilon * t))
    decay = np.exp(-model.epsilon * t / 2.0)
    return decay * x, float(np.sqrt(-np.expm1(-model.epsilon * t)))


def _log_gaussian(d: np.ndarray, sd: float) -> np.ndarray:
    return -(d * d) / (2.0 * sd * sd) - np.log(sd) - 0.5 * _LOG_2PI


def build_kernel(
    model: KolmogorovModel, t: float, grid: Grid, strict: bool = False
) -> KernelMatrix:
    """Build the n×n transition matrix of the model at kernel time t.

    Heat rows are assembled by the method of images on [lo, hi] (source
    images at x + 2kL and 2·lo - x + 2kL), which realizes the Neumann heat
    semigroup of the interval.  Ornstein–Uhlenbeck rows are the exact
    Gaussians; their truncation loss is controlled by the capture check.
    """
    require_positive(t, "kernel time t")
    x = grid.points
    means, sd = _row_parameters(model, t, grid)

    if model.potential == POTENTIAL_ZERO:
        lo, hi = grid.lo, grid.hi
        length = hi - lo
        kmax = max(1, int(np.ceil(8.0 * sd / (2.0 * length))) + 1)
        log_q = None
        for k in range(-kmax, kmax + 1):
            direct = _log_gaussian(x[None, :] - x[:, None] + 2.0 * k * length, sd)
            mirror = _log_gaussian(x[None, :] + x[:, None] - 2.0 * lo + 2.0 * k * length, sd)
            term = np.logaddexp(direct, mirror)
            log_q = term if log_q is None else np.logaddexp(log_q, term)
    else:
        log_q = _log_gaussian(x[None, :] - means[:, None], sd)

    log_w = np.log(grid.trapezoid_weights)
    log_mass = logsumexp(log_q + log_w[None, :], axis=1)
    raw_mass = np.exp(log_mass)

    # Rows whose ±8σ support fits inside the grid must capture their mass;
    # σ below the grid spacing additionally suffers trapezoid aliasing of
    # magnitude ~exp(-2π²σ²/h²) (Poisson summation), which is a resolution
    # effect, not truncation, and is budgeted for separately.
    aliasing = np.exp(-2.0 * np.pi**2 * sd**2 / grid.h**2)
    capture_tol = 1e-6 + 4.0 * aliasing
    interior = (means - 8.0 * sd >= grid.lo) & (means + 8.0 * sd <= grid.hi)
    checked = np.ones_like(raw_mass, dtype=bool) if strict else interior
    deficient = checked & (raw_mass < 1.0 - capture_tol)
    if np.any(deficient):
        worst = int(np.argmin(np.where(checked, raw_mass, np.inf)))
        raise KernelTruncationError(
            f"kernel row {worst} at x={x[worst]!r} captures mass "
            f"{raw_mass[worst]!r} < 1 - {capture_tol:.3g} "
            f"(t={t}, sd={sd:.6g}); widen the grid",
            row=worst,
            captured_mass=float(raw_mass[worst]),
        )

    log_q = log_q - log_mass[:, None]
    return KernelMatrix(
        model=model,
        t=float(t),
        grid=grid,
        matrix=np.exp(log_q),
        log_matrix=log_q,
        raw_row_mass=raw_mass,
    )


def apply_semigroup(kernel: KernelMatrix, f: GridFunction) -> GridFunction:
    """T_t f by trapezoid quadrature of f against each kernel row."""
    grid = kernel.grid
    if f.grid != grid:
        raise ValueError("function grid does not match kernel grid")
    values = kernel.matrix @ (grid.trapezoid_weights * f.values)
    return GridFunction(grid, values)


def semigroup_apply(
    model: KolmogorovModel, t: float, f: GridFunction, strict: bool = False
) -> GridFunction:
    """T_t f with the degenerate t = 0 case handled as the identity."""
    if t < 0.0:
        raise ValueError(f"semigroup time must be nonnegative, got {t!r}")
    if t == 0.0:
        return GridFunction(f.grid, f.values)
    return apply_semigroup(model.kernel(t, f.grid, strict=strict), f)


def entropic_hopf_lax(model: KolmogorovModel, u: float, psi: GridFunction) -> GridFunction:
    """Q^ε_u ψ = ε log T_{εu} e^{ψ/ε}, evaluated in the log domain.

    The kernel argument u runs on the model clock, so the operator applies
    the transition law at physical time εu.  Log-sum-exp keeps ψ/ε stable
    for ε well below the scale of ψ.
    """
    require_positive(u, "horizon u")
    eps = model.epsilon
    kernel = model.kernel(u, psi.grid)
    shifted = psi.values / eps + np.log(psi.grid.trapezoid_weights)
    values = eps * logsumexp(kernel.log_matrix + shifted[None, :], axis=1)
    return GridFunction(psi.grid, values)
