"""Command-line surface: bridge curve export, verification suites, ε-sweeps.

Three subcommands, all driven by a plain ``key=value`` config file:

* ``bridge``  — closed-form interpolation curves (displacement, heat, OU)
  written as ``moments.csv``, ``density_t{0,0.5,1}.csv`` and a line-plot
  ``bridge.svg``;
* ``verify``  — named check suites (``duality``, ``decomposition``,
  ``contraction``, ``all``) written as ``report.csv``; exit 0 iff every
  check passes;
* ``limits``  — small-ε sweep of the scaled cost against W₂²/2 written as
  ``limits.csv`` and ``limits.svg``; the error column must decrease
  strictly along the sweep.

Exit codes: 0 all checks pass, 1 assertion failure, 2 input/config error,
3 solver non-convergence.  CSV files are always written before any SVG and
are byte-deterministic for a fixed config.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .contraction import (
    check_commutation,
    check_commutation_dimensional,
    check_entropic_contraction,
    check_entropic_contraction_dimensional,
    check_wasserstein_contraction_dimensional,
    contraction_schedule,
    evolve_gaussian,
)
from .dual import dual_functional, dual_gap
from .dynamics import build_closed_form_path, symmetric_decomposition
from .exceptions import BridgekitError, ConfigError, ConvergenceError
from .gaussian_bridge import bridge_density, bridge_moments
from .measures import (
    GaussianMeasure,
    Grid,
    GridFunction,
    gaussian_grid_density,
    mccann_interpolation,
    relative_entropy,
    wasserstein2_gaussian,
)
from .semigroup import POTENTIAL_ZERO, KolmogorovModel, heat_model, ou_model
from .sinkhorn import solve_schrodinger_system

KERNELS = ("heat", "ou")
DEFAULT_EPSILONS = (1.0, 0.5, 0.2, 0.1, 0.05)
SUITES = ("duality", "decomposition", "contraction", "all")


@dataclass(frozen=True)
class ProblemConfig:
    kernel: str = "heat"
    epsilon: float = 1.0
    x0: float = -3.0
    x1: float = 3.0
    grid_lo: float | None = None
    grid_hi: float | None = None
    grid_n: int = 512
    time_samples: int = 41
    tol: float = 1e-9
    maxiter: int = 100_000

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ConfigError(f"kernel must be one of {KERNELS}, got {self.kernel!r}")
        if not (self.epsilon > 0.0 and math.isfinite(self.epsilon)):
            raise ConfigError("epsilon must be a positive finite real")
        if not (math.isfinite(self.x0) and math.isfinite(self.x1)):
            raise ConfigError("x0 and x1 must be finite")
        if self.grid_n < 64:
            raise ConfigError("grid_n must be at least 64")
        if self.time_samples < 3:
            raise ConfigError("time_samples must be at least 3")
        if not (self.tol > 0.0):
            raise ConfigError("tol must be positive")
        if self.maxiter < 1:
            raise ConfigError("maxiter must be at least 1")
        lo, hi = self.bounds()
        if not (lo < hi):
            raise ConfigError("grid_lo must be below grid_hi")

    def bounds(self) -> tuple[float, float]:
        lo = self.grid_lo if self.grid_lo is not None else min(self.x0, self.x1) - 8.0
        hi = self.grid_hi if self.grid_hi is not None else max(self.x0, self.x1) + 8.0
        return lo, hi

    def grid(self) -> Grid:
        lo, hi = self.bounds()
        return Grid(lo, hi, self.grid_n)

    def model(self) -> KolmogorovModel:
        if self.kernel == "heat":
            return heat_model(self.epsilon)
        return ou_model(self.epsilon)

    def marginals(self) -> tuple[GaussianMeasure, GaussianMeasure]:
        return GaussianMeasure(self.x0, 1.0), GaussianMeasure(self.x1, 1.0)

    def times(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.time_samples)


_FIELD_PARSERS = {
    "kernel": str,
    "epsilon": float,
    "x0": float,
    "x1": float,
    "grid_lo": float,
    "grid_hi": float,
    "grid_n": int,
    "time_samples": int,
    "tol": float,
    "maxiter": int,
}


def parse_config(text: str) -> ProblemConfig:
    """Parse ``key=value`` lines; ``#`` starts a comment; errors carry line numbers."""
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw.strip()!r}", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _FIELD_PARSERS:
            raise ConfigError(f"unknown key {key!r}", line=lineno)
        if key in fields:
            raise ConfigError(f"duplicate key {key!r}", line=lineno)
        try:
            fields[key] = _FIELD_PARSERS[key](value)
        except ValueError:
            raise ConfigError(
                f"cannot parse value {value!r} for key {key!r}", line=lineno
            ) from None
    return ProblemConfig(**fields)


def load_config(path: str) -> ProblemConfig:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    return parse_config(text)


def _fmt(x) -> str:
    if isinstance(x, float):
        return "%.12g" % x
    return str(x)


def _write_csv(path: str, header: list, rows: list) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write("\n".join(lines) + "\n")


# --- minimal SVG line plots -------------------------------------------------

_STYLES = {
    "dotted": ' stroke-dasharray="2,5"',
    "dashed": ' stroke-dasharray="9,6"',
    "solid": "",
}


def _svg_panel(x0, y0, width, height, curves, caption):
    """One framed panel with autoscaled polylines; curves = (label, style, xs, ys)."""
    pad = 46.0
    inner_w = width - 2 * pad
    inner_h = height - 2 * pad
    all_x = np.concatenate([np.asarray(c[2], dtype=float) for c in curves])
    all_y = np.concatenate([np.asarray(c[3], dtype=float) for c in curves])
    lo_x, hi_x = float(np.min(all_x)), float(np.max(all_x))
    lo_y, hi_y = float(np.min(all_y)), float(np.max(all_y))
    if hi_x == lo_x:
        hi_x = lo_x + 1.0
    if hi_y == lo_y:
        hi_y = lo_y + 1.0

    def sx(x):
        return x0 + pad + (x - lo_x) / (hi_x - lo_x) * inner_w

    def sy(y):
        return y0 + height - pad - (y - lo_y) / (hi_y - lo_y) * inner_h

    parts = [
        f'<rect x="{_fmt(x0 + pad)}" y="{_fmt(y0 + pad)}" width="{_fmt(inner_w)}"'
        f' height="{_fmt(inner_h)}" fill="none" stroke="black" stroke-width="1"/>'
    ]
    for label, style, xs, ys in curves:
        pts = " ".join(
            f"{_fmt(sx(float(px)))},{_fmt(sy(float(py)))}" for px, py in zip(xs, ys)
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="black"'
            f' stroke-width="1.5"{_STYLES[style]}/>'
        )
    parts.append(
        f'<text x="{_fmt(x0 + pad)}" y="{_fmt(y0 + pad - 10)}" font-size="14">'
        f"{caption}</text>"
    )
    parts.append(
        f'<text x="{_fmt(x0 + pad)}" y="{_fmt(y0 + height - pad + 16)}"'
        f' font-size="11">{_fmt(lo_x)}</text>'
    )
    parts.append(
        f'<text x="{_fmt(x0 + width - pad)}" y="{_fmt(y0 + height - pad + 16)}"'
        f' font-size="11" text-anchor="end">{_fmt(hi_x)}</text>'
    )
    parts.append(
        f'<text x="{_fmt(x0 + pad - 4)}" y="{_fmt(y0 + height - pad)}"'
        f' font-size="11" text-anchor="end">{_fmt(lo_y)}</text>'
    )
    parts.append(
        f'<text x="{_fmt(x0 + pad - 4)}" y="{_fmt(y0 + pad + 10)}"'
        f' font-size="11" text-anchor="end">{_fmt(hi_y)}</text>'
    )
    return parts


def _write_svg(path: str, panels) -> None:
    body = []
    for panel in panels:
        body.extend(panel)
    doc = (
        '<svg xmlns="http://www.w3.org/2000/svg" version="1.1"'
        ' width="800" height="600" viewBox="0 0 800 600">\n'
        + "\n".join(body)
        + "\n</svg>\n"
    )
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(doc)


# --- bridge -----------------------------------------------------------------


def cmd_bridge(config: ProblemConfig, out_dir: str) -> int:
    """Write interpolation moment curves and density slices for both kernels."""
    os.makedirs(out_dir, exist_ok=True)
    grid = config.grid()
    g0, g1 = config.marginals()
    heat = heat_model(config.epsilon)
    ou = ou_model(config.epsilon)
    times = config.times()

    rows = []
    for t in times:
        mcc = mccann_interpolation(g0, g1, float(t))
        mh = bridge_moments(heat, config.x0, config.x1, float(t))
        mo = bridge_moments(ou, config.x0, config.x1, float(t))
        rows.append(
            (float(t), mcc.mean, mh.mean, mo.mean, mcc.variance, mh.variance, mo.variance)
        )
    _write_csv(
        os.path.join(out_dir, "moments.csv"),
        ["t", "mean_mccann", "mean_heat", "mean_ou", "var_mccann", "var_heat", "var_ou"],
        rows,
    )

    for t, tag in ((0.0, "0"), (0.5, "0.5"), (1.0, "1")):
        mcc = mccann_interpolation(g0, g1, t)
        dens_mcc = mcc.density(grid.points)
        dens_heat = bridge_density(bridge_moments(heat, config.x0, config.x1, t), grid)
        dens_ou = bridge_density(bridge_moments(ou, config.x0, config.x1, t), grid)
        _write_csv(
            os.path.join(out_dir, f"density_t{tag}.csv"),
            ["x", "mccann", "heat", "ou"],
            list(
                zip(
                    (float(x) for x in grid.points),
                    dens_mcc,
                    dens_heat.values,
                    dens_ou.values,
                )
            ),
        )

    arr = np.asarray(rows, dtype=float)
    mean_curves = [
        ("mccann", "dotted", arr[:, 0], arr[:, 1]),
        ("heat", "dashed", arr[:, 0], arr[:, 2]),
        ("ou", "solid", arr[:, 0], arr[:, 3]),
    ]
    var_curves = [
        ("mccann", "dotted", arr[:, 0], arr[:, 4]),
        ("heat", "dashed", arr[:, 0], arr[:, 5]),
        ("ou", "solid", arr[:, 0], arr[:, 6]),
    ]
    _write_svg(
        os.path.join(out_dir, "bridge.svg"),
        [
            _svg_panel(0, 0, 800, 300, mean_curves, "mean: dotted mccann, dashed heat, solid ou"),
            _svg_panel(0, 300, 800, 300, var_curves, "variance: dotted mccann, dashed heat, solid ou"),
        ],
    )
    return 0


# --- verify -----------------------------------------------------------------


def _check_row(name, lhs, rhs, slack, tolerance):
    passed = slack >= -tolerance
    return [name, lhs, rhs, slack, tolerance, "pass" if passed else "fail"], passed


def _abs_check_row(name, lhs, rhs, tolerance):
    slack = rhs - lhs
    passed = abs(slack) <= tolerance
    return [name, lhs, rhs, slack, tolerance, "pass" if passed else "fail"], passed


def _duality_rows(config: ProblemConfig):
    model = config.model()
    grid = config.grid()
    g0, g1 = config.marginals()
    mu0 = gaussian_grid_density(g0, grid)
    mu1 = gaussian_grid_density(g1, grid)
    sol = solve_schrodinger_system(model, mu0, mu1, tol=config.tol, maxiter=config.maxiter)
    report = dual_gap(model, mu0, mu1, sol)
    scale = max(1.0, abs(report.primal))
    rows = [
        _abs_check_row("duality_gap_at_optimizer", report.dual_value, report.primal, 1e-6 * scale)
    ]
    zero = dual_functional(model, mu0, mu1, GridFunction(grid, np.zeros(grid.n)))
    rows.append(
        _check_row("weak_duality_zero_potential", zero, report.primal, report.primal - zero, 1e-6 * scale)
    )
    return rows


def _decomposition_rows(config: ProblemConfig):
    model = config.model()
    grid = config.grid()
    g0, g1 = config.marginals()
    mu0 = gaussian_grid_density(g0, grid)
    mu1 = gaussian_grid_density(g1, grid)
    reference = model.reference(grid)
    h0 = relative_entropy(mu0, reference)
    h1 = relative_entropy(mu1, reference)
    sol = solve_schrodinger_system(model, mu0, mu1, tol=config.tol, maxiter=config.maxiter)
    path = build_closed_form_path(model, config.x0, config.x1, config.times(), grid)
    decomp = symmetric_decomposition(path, h0, h1)
    rows = [
        _abs_check_row("decomposition_identity", decomp.total, sol.cost_unscaled, 2e-3)
    ]
    lower = 0.5 * model.epsilon * (h0 + h1) + 0.5 * wasserstein2_gaussian(g0, g1)
    rows.append(
        _check_row(
            "cost_lower_bound",
            sol.cost_scaled,
            lower,
            sol.cost_scaled - lower,
            1e-8,
        )
    )
    return rows


def _contraction_test_function(grid: Grid) -> GridFunction:
    capped = np.minimum(2.0, 0.25 * (grid.points - 0.5) ** 2)
    return GridFunction(grid, capped)


def _contraction_rows(config: ProblemConfig):
    model = config.model()
    grid = config.grid()
    g0, g1 = config.marginals()
    f_test = _contraction_test_function(grid)
    f_scale = 1.0 + float(np.max(np.abs(f_test.values)))
    reference = model.reference(grid)
    ratio0 = GridFunction(grid, gaussian_grid_density(g0, grid).values / reference.weights)
    ratio1 = GridFunction(grid, gaussian_grid_density(g1, grid).values / reference.weights)
    h0 = relative_entropy(gaussian_grid_density(g0, grid), reference)
    cost_scale = max(1.0, 0.5 * wasserstein2_gaussian(g0, g1) + abs(h0))

    rows = []
    for t in (0.25, 0.5, 1.0):
        sched_bound = contraction_schedule(model.lam, model.epsilon, t, 1e-9).b_max
        bs = [0.1, 0.2, min(0.4, sched_bound / 2.0)]
        for b in bs:
            violation = check_commutation(model, f_test, t, b)
            rows.append(
                _check_row(
                    f"commutation_t{_fmt(t)}_b{_fmt(b)}",
                    violation,
                    0.0,
                    -violation,
                    1e-6 * f_scale,
                )
            )
            slack = check_entropic_contraction(
                model, ratio0, ratio1, t, b, tol=config.tol, maxiter=config.maxiter
            )
            rows.append(
                _check_row(
                    f"entropic_t{_fmt(t)}_b{_fmt(b)}",
                    -slack,
                    0.0,
                    slack,
                    1e-4 * cost_scale,
                )
            )
        evolved0 = evolve_gaussian(model, g0, t)
        evolved1 = evolve_gaussian(model, g1, t)
        lhs = math.sqrt(wasserstein2_gaussian(evolved0, evolved1))
        rhs = math.exp(-model.lam * model.epsilon * t / 2.0) * math.sqrt(
            wasserstein2_gaussian(g0, g1)
        )
        rows.append(
            _check_row(
                f"wasserstein_t{_fmt(t)}",
                lhs,
                rhs,
                rhs - lhs,
                1e-10 * max(1.0, rhs),
            )
        )

    if model.potential == POTENTIAL_ZERO:
        for t, s in ((1.0, 0.25), (0.5, 0.2)):
            violation = check_commutation_dimensional(model, f_test, t, s)
            rows.append(
                _check_row(
                    f"commutation_dim_t{_fmt(t)}_s{_fmt(s)}",
                    violation,
                    0.0,
                    -violation,
                    1e-6 * f_scale,
                )
            )
        slack = check_entropic_contraction_dimensional(
            model, ratio0, ratio1, 0.5, 0.2, tol=config.tol, maxiter=config.maxiter
        )
        rows.append(
            _check_row("entropic_dim_t0.5_s0.2", -slack, 0.0, slack, 1e-4 * cost_scale)
        )
        centered = GaussianMeasure(0.0, 1.0)
        wslack = check_wasserstein_contraction_dimensional(model, centered, centered, 1.0, 0.25)
        rows.append(
            _check_row("wasserstein_dim_t1_s0.25", -wslack, 0.0, wslack, 1e-10)
        )
    return rows


def cmd_verify(config: ProblemConfig, suite: str, out_dir: str) -> int:
    """Run a verification suite and write report.csv; exit 0 iff all pass."""
    if suite not in SUITES:
        raise ConfigError(f"unknown suite {suite!r}; pick one of {SUITES}")
    os.makedirs(out_dir, exist_ok=True)
    rows = []
    if suite in ("duality", "all"):
        rows.extend(_duality_rows(config))
    if suite in ("decomposition", "all"):
        rows.extend(_decomposition_rows(config))
    if suite in ("contraction", "all"):
        rows.extend(_contraction_rows(config))

    _write_csv(
        os.path.join(out_dir, "report.csv"),
        ["check", "lhs", "rhs", "slack", "tolerance", "pass"],
        [row for row, _ in rows],
    )
    failures = [row[0] for row, passed in rows if not passed]
    if failures:
        print(f"first failing check: {failures[0]}", file=sys.stderr)
        return 1
    return 0


# --- limits -----------------------------------------------------------------


def cmd_limits(config: ProblemConfig, epsilons, out_dir: str) -> int:
    """Sweep ε, compare scaled cost with W₂²/2, require a strictly shrinking error."""
    eps_list = [float(e) for e in epsilons]
    if not eps_list:
        raise ConfigError("epsilon sweep must be non-empty")
    if any(not (e > 0.0 and math.isfinite(e)) for e in eps_list):
        raise ConfigError("sweep epsilons must be positive finite reals")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])) and len(eps_list) > 1:
        raise ConfigError("sweep epsilons must be strictly descending")

    os.makedirs(out_dir, exist_ok=True)
    grid = config.grid()
    g0, g1 = config.marginals()
    mu0 = gaussian_grid_density(g0, grid)
    mu1 = gaussian_grid_density(g1, grid)
    target = 0.5 * wasserstein2_gaussian(g0, g1)

    rows = []
    diverged = []
    for eps in eps_list:
        model = heat_model(eps) if config.kernel == "heat" else ou_model(eps)
        try:
            sol = solve_schrodinger_system(
                model, mu0, mu1, tol=config.tol, maxiter=config.maxiter
            )
            cost = sol.cost_scaled
            error = abs(cost - target)
        except ConvergenceError as exc:
            print(f"eps={_fmt(eps)}: {exc}", file=sys.stderr)
            cost = math.nan
            error = math.nan
            diverged.append(eps)
        rows.append((eps, cost, target, error))

    _write_csv(
        os.path.join(out_dir, "limits.csv"),
        ["eps", "scaled_cost", "half_w2sq", "abs_error"],
        rows,
    )
    errors = [r[3] for r in rows]
    _write_svg(
        os.path.join(out_dir, "limits.svg"),
        [
            _svg_panel(
                0,
                0,
                800,
                600,
                [
                    (
                        "abs_error",
                        "solid",
                        [r[0] for r in rows],
                        [0.0 if math.isnan(e) else e for e in errors],
                    )
                ],
                "|scaled cost - W2^2/2| along the eps sweep",
            )
        ],
    )
    if diverged:
        return 3
    if len(errors) > 1 and any(b >= a for a, b in zip(errors, errors[1:])):
        print("error column is not strictly decreasing", file=sys.stderr)
        return 1
    return 0


# --- entry point ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bridgekit",
        description="Entropic interpolation bridges over heat and Ornstein-Uhlenbeck kernels",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("bridge", "verify", "limits"):
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="path to key=value config file")
        cmd.add_argument("--out", default=".", help="output directory (default: .)")
        if name == "verify":
            cmd.add_argument("--suite", default="all", choices=SUITES)
        if name == "limits":
            cmd.add_argument(
                "--eps",
                default=None,
                help="comma-separated descending epsilons (default: 1,0.5,0.2,0.1,0.05)",
            )
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        config = load_config(args.config)
        if args.command == "bridge":
            return cmd_bridge(config, args.out)
        if args.command == "verify":
            return cmd_verify(config, args.suite, args.out)
        epsilons = DEFAULT_EPSILONS
        if args.eps is not None:
            try:
                epsilons = [float(tok) for tok in args.eps.split(",") if tok.strip()]
            except ValueError:
                raise ConfigError(f"cannot parse --eps list {args.eps!r}") from None
        return cmd_limits(config, epsilons, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return 3
    except BridgekitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
