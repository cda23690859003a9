"""Integral-equation form of the problem, used as a grid-independent oracle.

The fourth-order problem factors into two second-order two-point problems,
so its kernel is the product integral of the classical tent kernel with
itself.  The fixed-point map evaluated here is

    v  ->  (constant-load quartic)  +  integral of kernel * (f(s, v) - bound)

which preserves the bracket between the quartic and its first image under
the standing assumptions on f.  Quadrature is composite Simpson throughout.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

import numpy as np

from .model import (
    BVPSpec,
    PiecewiseLinearContact,
    RightHandSide,
    eval_rhs,
    quartic_solution,
    rhs_bound,
)

__all__ = [
    "QuadGrid",
    "SampledFunction",
    "PicardReport",
    "simpson_grid",
    "greens_second",
    "greens_fourth",
    "kernel_matrix",
    "apply_operator",
    "picard_reference",
    "contraction_gate",
]

# consecutive non-decreasing sup-norm steps before giving up on contraction
_STALL_LIMIT = 10


@dataclass(eq=False)
class QuadGrid:
    """Composite-Simpson rule on [a, b] with an even number of panels.

    The kernel table for the fourth-order problem is dense and O(m^2), so it
    is built once per grid and cached behind a lock.
    """

    a: float
    b: float
    panels: int
    nodes: np.ndarray
    weights: np.ndarray
    _kernel: np.ndarray | None = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def size(self) -> int:
        return self.nodes.size


def simpson_grid(spec: BVPSpec, panels: int) -> QuadGrid:
    if panels < 4 or panels % 2 != 0:
        raise ValueError(f"need an even panel count >= 4, got {panels}")
    nodes = np.linspace(spec.a, spec.b, panels + 1)
    pattern = np.ones(panels + 1)
    pattern[1:-1:2] = 4.0
    pattern[2:-1:2] = 2.0
    weights = pattern * (spec.b - spec.a) / (3.0 * panels)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return QuadGrid(a=spec.a, b=spec.b, panels=panels, nodes=nodes, weights=weights)


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Function values on the nodes of a quadrature grid."""

    grid: QuadGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.size,):
            raise ValueError(
                f"expected {self.grid.size} values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("sampled values must be finite")
        object.__setattr__(self, "values", values)


def _check_point(spec_a: float, spec_b: float, v: float, name: str) -> None:
    if not (spec_a <= v <= spec_b):
        raise ValueError(f"{name}={v} outside [{spec_a}, {spec_b}]")


def greens_second(spec: BVPSpec, x: float, s: float) -> float:
    """Tent kernel of the second-derivative two-point problem, zero end values.

    Nonpositive, symmetric, bounded in magnitude by b - a, and 1-Lipschitz
    in each argument.
    """
    _check_point(spec.a, spec.b, x, "x")
    _check_point(spec.a, spec.b, s, "s")
    if s <= x:
        return -(spec.b - x) * (s - spec.a) / spec.length
    return -(spec.b - s) * (x - spec.a) / spec.length


def _tent_table(spec: BVPSpec, x: np.ndarray, s: np.ndarray) -> np.ndarray:
    lo = np.minimum.outer(x, s)
    hi = np.maximum.outer(x, s)
    return -(spec.b - hi) * (lo - spec.a) / spec.length


def kernel_matrix(spec: BVPSpec, quad: QuadGrid) -> np.ndarray:
    """Table of the fourth-order kernel at all node pairs (cached on the grid).

    Entry (i, j) approximates the product integral of the tent kernel via the
    grid's own Simpson rule; the result is symmetric and entrywise >= 0.
    """
    if quad._kernel is None:
        with quad._lock:
            if quad._kernel is None:
                tent = _tent_table(spec, quad.nodes, quad.nodes)
                kernel = (tent * quad.weights) @ tent
                kernel.flags.writeable = False
                quad._kernel = kernel
    return quad._kernel


def greens_fourth(spec: BVPSpec, quad: QuadGrid, x: float, s: float) -> float:
    """Fourth-order kernel at one point pair, by Simpson over the middle slot."""
    _check_point(spec.a, spec.b, x, "x")
    _check_point(spec.a, spec.b, s, "s")
    row = _tent_table(spec, np.array([x]), quad.nodes)[0]
    col = _tent_table(spec, quad.nodes, np.array([s]))[:, 0]
    return float(np.sum(quad.weights * row * col))


def _same_grid(g1: QuadGrid, g2: QuadGrid) -> bool:
    return g1 is g2 or (g1.a == g2.a and g1.b == g2.b and g1.panels == g2.panels)


def apply_operator(
    spec: BVPSpec,
    rhs: RightHandSide,
    load: float,
    quad: QuadGrid,
    v: SampledFunction,
) -> SampledFunction:
    """One application of the integral fixed-point map to sampled values.

    ``load`` must dominate f; the integrand f - load is then nonpositive,
    which keeps every image below the constant-load quartic.
    """
    if not _same_grid(v.grid, quad):
        raise ValueError("sampled function lives on a different quadrature grid")
    shifted = np.array(
        [eval_rhs(rhs, t, val) for t, val in zip(quad.nodes, v.values)], dtype=float
    ) - load
    base = quartic_solution(spec, load, quad.nodes)
    out = base + kernel_matrix(spec, quad) @ (quad.weights * shifted)
    return SampledFunction(grid=quad, values=out)


def contraction_gate(spec: BVPSpec, rhs: RightHandSide, quad: QuadGrid) -> float | None:
    """Stiffness times the largest row integral of the kernel (contact only).

    Below one this certifies the integral map is a sup-norm contraction;
    None for general right-hand sides, whose slope is not a single number.
    """
    if not isinstance(rhs, PiecewiseLinearContact):
        return None
    row_integrals = kernel_matrix(spec, quad) @ quad.weights
    return float(rhs.stiffness * np.max(row_integrals))


@dataclass(frozen=True)
class PicardReport:
    iterations: int
    step_norms: np.ndarray
    converged: bool
    bracket_held: bool
    lipschitz_estimate: float
    contraction_bound: float | None


def picard_reference(
    spec: BVPSpec,
    rhs: RightHandSide,
    quad: QuadGrid,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> tuple[SampledFunction, PicardReport]:
    """Iterate the integral map from the constant-load quartic.

    Stops when the sup-norm step drops to ``tol``.  If the steps fail to
    decrease ten times in a row the map is treated as non-contractive: the
    best iterate seen is returned with ``converged=False``.  Every iterate is
    checked against the bracket formed by the quartic and its first image.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    load = rhs_bound(rhs)
    upper = quartic_solution(spec, load, quad.nodes)
    lower = apply_operator(spec, rhs, load, quad, SampledFunction(quad, upper)).values
    slack = 1e-10 * (1.0 + float(np.max(np.abs(upper))) + float(np.max(np.abs(lower))))

    current = lower
    steps = [float(np.max(np.abs(lower - upper)))]
    stall = 0
    best_vals = lower
    best_step = steps[0]
    converged = steps[0] <= tol
    bracket_held = True
    while not converged and len(steps) < max_iter:
        nxt = apply_operator(spec, rhs, load, quad, SampledFunction(quad, current)).values
        step = float(np.max(np.abs(nxt - current)))
        steps.append(step)
        if np.any(nxt > upper + slack) or np.any(nxt < lower - slack):
            bracket_held = False
        if step <= best_step:
            best_step = step
            best_vals = nxt
        if steps[-1] >= steps[-2]:
            stall += 1
        else:
            stall = 0
        current = nxt
        if step <= tol:
            converged = True
            break
        if stall >= _STALL_LIMIT:
            break

    final = current if converged else best_vals
    ratios = [
        steps[i] / steps[i - 1]
        for i in range(1, len(steps))
        if steps[i - 1] > 0.0
    ]
    report = PicardReport(
        iterations=len(steps),
        step_norms=np.array(steps),
        converged=converged,
        bracket_held=bracket_held,
        lipschitz_estimate=max(ratios) if ratios else 0.0,
        contraction_bound=contraction_gate(spec, rhs, quad),
    )
    return SampledFunction(quad, final), report
