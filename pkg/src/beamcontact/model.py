"""Continuous problem definition: interval, boundary data, right-hand sides.

The boundary value problem is w'''' = f(x, w) on [a, b] with the deflection
and the curvature prescribed at both ends.  All solvers in this package
assume f is continuous, bounded above, and non-increasing in its second
argument; ``validate_rhs`` spot-checks those assumptions on random samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

__all__ = [
    "BVPSpec",
    "GeneralMonotone",
    "PiecewiseLinearContact",
    "RightHandSide",
    "ValidationReport",
    "as_general_monotone",
    "eval_rhs",
    "rhs_bound",
    "validate_rhs",
    "quartic_coefficients",
    "quartic_solution",
]


@dataclass(frozen=True)
class BVPSpec:
    """Interval and boundary data for the fourth-order problem.

    Parameters
    ----------
    a, b : float
        Endpoints of the interval, ``b > a``.
    alpha1, alpha2 : float
        Prescribed deflections w(a) and w(b).
    beta1, beta2 : float
        Prescribed curvatures w''(a) and w''(b).
    """

    a: float
    b: float
    alpha1: float
    alpha2: float
    beta1: float
    beta2: float

    def __post_init__(self):
        vals = (self.a, self.b, self.alpha1, self.alpha2, self.beta1, self.beta2)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("boundary data must be finite")
        if not self.b > self.a:
            raise ValueError(f"need b > a, got interval [{self.a}, {self.b}]")

    @property
    def length(self) -> float:
        return self.b - self.a

    def boundary_scale(self) -> float:
        """Largest magnitude among the four boundary values."""
        return max(abs(self.alpha1), abs(self.alpha2), abs(self.beta1), abs(self.beta2))


@dataclass(frozen=True)
class GeneralMonotone:
    """Right-hand side f(x, y) that is bounded above and non-increasing in y.

    ``fn`` is called with scalar arguments.  ``bound`` must dominate f
    everywhere on the strip [a, b] x R; it enters the solvers through the
    upper starting iterate, so an invalid bound silently breaks the
    bracketing argument rather than any single evaluation.
    """

    fn: Callable[[float, float], float]
    bound: float

    def __post_init__(self):
        if not math.isfinite(self.bound):
            raise ValueError(f"upper bound must be finite, got {self.bound}")


@dataclass(frozen=True)
class PiecewiseLinearContact:
    """Linear-spring contact force, active only where the beam penetrates.

    The force is ``-stiffness * (y - surface(x))`` when ``y > surface(x)``
    and zero otherwise, so it is bounded above by zero and non-increasing
    in y for any nonnegative stiffness.  ``surface_slope`` must be the exact
    derivative of ``surface``; the truncation diagnostics differentiate the
    force analytically and never approximate this numerically.
    """

    stiffness: float
    surface: Callable[[float], float]
    surface_slope: Callable[[float], float]

    def __post_init__(self):
        if not (math.isfinite(self.stiffness) and self.stiffness >= 0.0):
            raise ValueError(f"stiffness must be finite and >= 0, got {self.stiffness}")


RightHandSide = Union[GeneralMonotone, PiecewiseLinearContact]


def eval_rhs(rhs: RightHandSide, x: float, y: float) -> float:
    """Evaluate the right-hand side at a single point.

    For contact forces the activation uses a strict inequality, so the force
    is exactly zero when the beam just touches the surface.
    """
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"eval_rhs needs finite arguments, got x={x}, y={y}")
    if isinstance(rhs, PiecewiseLinearContact):
        gap = y - rhs.surface(x)
        if gap > 0.0:
            return -rhs.stiffness * gap
        return 0.0
    return float(rhs.fn(x, y))


def rhs_bound(rhs: RightHandSide) -> float:
    """Upper bound on f; contact forces are never positive."""
    if isinstance(rhs, PiecewiseLinearContact):
        return 0.0
    return rhs.bound


def as_general_monotone(contact: PiecewiseLinearContact) -> GeneralMonotone:
    """View a contact force through the general monotone interface."""
    return GeneralMonotone(fn=lambda x, y: eval_rhs(contact, x, y), bound=0.0)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a randomized check of the standing assumptions on f."""

    n_samples: int
    box_halfwidth: float
    monotonicity_violations: int
    bound_violations: int

    @property
    def ok(self) -> bool:
        return self.monotonicity_violations == 0 and self.bound_violations == 0


def validate_rhs(
    rhs: RightHandSide,
    spec: BVPSpec,
    n_samples: int = 1000,
    seed: int = 0,
) -> ValidationReport:
    """Sample f on random (x, y) pairs and count assumption violations.

    Draws ``n_samples`` triples (x, y1, y2) with x uniform on [a, b] and
    y1 >= y2 uniform on a box scaled to the boundary data, then counts
    failures of ``f(x, y1) <= f(x, y2)`` and of ``f <= bound``.  Violations
    are counted, not raised, so callers can decide how to react.
    Deterministic for a fixed seed.
    """
    if n_samples < 1:
        raise ValueError(f"need at least one sample, got {n_samples}")
    half = 10.0 * (1.0 + spec.boundary_scale())
    bound = rhs_bound(rhs)
    rng = np.random.default_rng(seed)
    monotone_bad = 0
    bound_bad = 0
    for _ in range(n_samples):
        x = rng.uniform(spec.a, spec.b)
        ya, yb = rng.uniform(-half, half, size=2)
        y_hi, y_lo = (ya, yb) if ya >= yb else (yb, ya)
        f_hi = eval_rhs(rhs, x, y_hi)
        f_lo = eval_rhs(rhs, x, y_lo)
        # "not <=" rather than ">" so that NaN output counts as a violation
        if not f_hi <= f_lo:
            monotone_bad += 1
        if not f_hi <= bound:
            bound_bad += 1
        if not f_lo <= bound:
            bound_bad += 1
    return ValidationReport(
        n_samples=n_samples,
        box_halfwidth=half,
        monotonicity_violations=monotone_bad,
        bound_violations=bound_bad,
    )


def quartic_coefficients(spec: BVPSpec, load: float) -> tuple[float, float, float, float, float]:
    """Coefficients (c0..c4) in powers of (x - a) of the quartic whose fourth
    derivative is ``load`` and which matches the boundary data of ``spec``."""
    if not math.isfinite(load):
        raise ValueError(f"load must be finite, got {load}")
    ln = spec.length
    c0 = spec.alpha1
    c1 = (
        (spec.alpha2 - spec.alpha1) / ln
        - (spec.beta2 + 2.0 * spec.beta1) * ln / 6.0
        + load * ln**3 / 24.0
    )
    c2 = spec.beta1 / 2.0
    c3 = (spec.beta2 - spec.beta1) / (6.0 * ln) - load * ln / 12.0
    c4 = load / 24.0
    return (c0, c1, c2, c3, c4)


def quartic_solution(spec: BVPSpec, load: float, x):
    """Evaluate the constant-load quartic solution at ``x`` (scalar or array).

    This function dominates every solution of the monotone problem whose
    right-hand side is bounded by ``load``, and is itself the exact solution
    when f is identically ``load`` (for contact problems: wherever the beam
    stays off the surface with load 0).
    """
    c0, c1, c2, c3, c4 = quartic_coefficients(spec, load)
    t = np.asarray(x, dtype=float) - spec.a
    slack = 1e-12 * (1.0 + spec.length)
    if np.any(t < -slack) or np.any(t > spec.length + slack):
        raise ValueError("evaluation point outside [a, b]")
    out = c0 + t * (c1 + t * (c2 + t * (c3 + t * c4)))
    if np.ndim(x) == 0:
        return float(out)
    return out
