"""Small input-validation helpers shared across modules."""

from __future__ import annotations

import numpy as np


def require_finite(values: np.ndarray, name: str) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise ValueError(f"{name} must be finite everywhere")
    return values


def require_positive(value: float, name: str) -> float:
    value = float(value)
    if not value > 0.0:
        raise ValueError(f"{name} must be positive, got {value!r}")
    return value


def require_nonnegative(value: float, name: str) -> float:
    value = float(value)
    if not value >= 0.0:
        raise ValueError(f"{name} must be nonnegative, got {value!r}")
    return value


def require_unit_interval(t: float, name: str = "t") -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {t!r}")
    return t


def require_same_grid(a, b, what: str = "operands") -> None:
    """Grids must be identical objects or equal by value; no resampling here."""
    ga = getattr(a, "grid", a)
    gb = getattr(b, "grid", b)
    if ga != gb:
        raise ValueError(f"{what} live on different grids: {ga} vs {gb}")


def readonly(values: np.ndarray) -> np.ndarray:
    """Return an owned, write-protected float copy of ``values``."""
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    return values
