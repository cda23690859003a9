"""Fixed-point solvers for the discretized problem.

For the contact force the discrete equations reduce to an absolute value
equation; splitting the force as -K/2 * ((w - g) + |w - g|) turns it into a
fixed-point map whose Lipschitz constant in the 2-norm is certified by
``contraction_constant`` (strictly below one for every stiffness, because
the stencil matrix has 2-norm lower bound 32 / (b - a)^4 in the scaled
variables).  General monotone right-hand sides get a damped iteration that
stays inside the bracket spanned by the constant-load solve and its image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .discretize import Grid, DiscreteSystem, build_system, discrete_residual
from .model import (
    BVPSpec,
    GeneralMonotone,
    PiecewiseLinearContact,
    RightHandSide,
    eval_rhs,
    validate_rhs,
)

__all__ = [
    "IterationReport",
    "NumericalError",
    "apriori_bound",
    "contact_map",
    "contraction_constant",
    "solve_contact",
    "solve_contact_gap",
    "solve_monotone",
]

# iterations per stall-detection window of the damped monotone solver
_WINDOW = 50
_MIN_DAMPING = 2.0**-10


class NumericalError(ArithmeticError):
    """An iterate left the set of finite vectors."""


@dataclass(frozen=True)
class IterationReport:
    """Trace of one fixed-point solve.

    ``step_norms[i]`` is the 2-norm of update i + 1; ``apriori_bounds[i]``
    is the geometric-series bound on the distance of the iterate after
    i + 1 applications to the fixed point, available when a contraction
    constant is (contact solvers only).  ``residual_inf`` is the sup norm
    of the discrete defect at the returned iterate.
    """

    iterations: int
    step_norms: np.ndarray
    residual_inf: float
    converged: bool
    contraction: float | None = None
    apriori_bounds: np.ndarray | None = None
    warnings: tuple[str, ...] = ()
    damping_final: float | None = None


def contraction_constant(spec: BVPSpec, stiffness: float) -> float:
    """Certified 2-norm Lipschitz constant of the contact fixed-point map.

    Equals L^4 K / (L^4 K + 32) with L = b - a; grid independent and < 1
    for every finite stiffness.
    """
    if not (math.isfinite(stiffness) and stiffness >= 0.0):
        raise ValueError(f"stiffness must be finite and >= 0, got {stiffness}")
    scaled = spec.length**4 * stiffness
    return scaled / (scaled + 32.0)


def apriori_bound(contraction: float, w1, w0, j: int) -> float:
    """Distance of iterate j to the fixed point, from the first step alone."""
    if not 0.0 <= contraction < 1.0:
        raise ValueError(f"need a contraction constant in [0, 1), got {contraction}")
    if j < 0:
        raise ValueError(f"iteration index must be >= 0, got {j}")
    first = float(np.linalg.norm(np.asarray(w1, dtype=float) - np.asarray(w0, dtype=float)))
    return contraction**j * first / (1.0 - contraction)


def _default_tol(load: np.ndarray) -> float:
    return 1e-10 * (1.0 + float(np.linalg.norm(load)))


def _check_start(w0, n: int) -> np.ndarray:
    w0 = np.array(w0, dtype=float)
    if w0.shape != (n,):
        raise ValueError(f"starting vector must have length {n}, got shape {w0.shape}")
    if not np.all(np.isfinite(w0)):
        raise ValueError("starting vector must be finite")
    return w0


def contact_map(
    spec: BVPSpec, contact: PiecewiseLinearContact, grid: Grid
) -> tuple[Callable[[np.ndarray], np.ndarray], DiscreteSystem]:
    """Affine-plus-absolute-value map whose fixed point solves the contact problem.

    The shifted matrix A + c I with c = h^4 K / 2 is factored once; each
    application costs a single banded solve.
    """
    system = build_system(spec, contact, grid)
    c = 0.5 * grid.h**4 * contact.stiffness
    shifted = system.matrix.shifted(c)
    base = shifted.solve(system.load + c * system.surface)

    def apply(w: np.ndarray) -> np.ndarray:
        return base - c * shifted.solve(np.abs(w - system.surface))

    return apply, system


def _iterate_contact(
    step_map: Callable[[np.ndarray], np.ndarray],
    start: np.ndarray,
    tol: float,
    max_iter: int,
    callback: Callable[[int, np.ndarray], None] | None,
) -> tuple[np.ndarray, list, bool]:
    current = start
    steps = []
    converged = False
    for j in range(1, max_iter + 1):
        nxt = step_map(current)
        if not np.all(np.isfinite(nxt)):
            raise NumericalError(f"iterate {j} is not finite")
        step = float(np.linalg.norm(nxt - current))
        steps.append(step)
        current = nxt
        if callback is not None:
            callback(j, current.copy())
        if step <= tol:
            converged = True
            break
    return current, steps, converged


def _finish_report(
    system: DiscreteSystem,
    rhs: RightHandSide,
    w: np.ndarray,
    steps: list,
    converged: bool,
    contraction: float,
) -> IterationReport:
    step_norms = np.array(steps)
    if steps:
        powers = contraction ** np.arange(1, len(steps) + 1, dtype=float)
        bounds = powers * (steps[0] / (1.0 - contraction))
    else:
        bounds = np.zeros(0)
    return IterationReport(
        iterations=len(steps),
        step_norms=step_norms,
        residual_inf=float(np.max(np.abs(discrete_residual(system, rhs, w)))),
        converged=converged,
        contraction=contraction,
        apriori_bounds=bounds,
    )


def solve_contact(
    spec: BVPSpec,
    contact: PiecewiseLinearContact,
    grid: Grid,
    tol: float | None = None,
    max_iter: int = 100000,
    w0=None,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> tuple[np.ndarray, IterationReport]:
    """Solve the discretized contact problem by fixed-point iteration.

    Returns interior deflections and a report.  Iterates until the 2-norm
    step drops to ``tol`` (default ``1e-10 * (1 + ||load||_2)``); running out
    of iterations flags the report unconverged instead of raising.  The
    starting vector defaults to zero.  ``callback(j, w_j)`` is invoked after
    every update with a copy of the iterate.
    """
    step_map, system = contact_map(spec, contact, grid)
    if tol is None:
        tol = _default_tol(system.load)
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    w = np.zeros(grid.n) if w0 is None else _check_start(w0, grid.n)
    cc = contraction_constant(spec, contact.stiffness)

    if contact.stiffness == 0.0:
        # the map is constant: one application lands on the exact fixed point
        exact = system.matrix.solve(system.load)
        if callback is not None:
            callback(1, exact.copy())
        return exact, _finish_report(
            system, contact, exact, [float(np.linalg.norm(exact - w))], True, cc
        )

    w, steps, converged = _iterate_contact(step_map, w, tol, max_iter, callback)
    return w, _finish_report(system, contact, w, steps, converged, cc)


def solve_contact_gap(
    spec: BVPSpec,
    contact: PiecewiseLinearContact,
    grid: Grid,
    tol: float | None = None,
    max_iter: int = 100000,
    z0=None,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> tuple[np.ndarray, IterationReport]:
    """Same iteration written in the gap variable z = w - surface.

    Returns the gap at the interior nodes; penetration is where z > 0.  The
    default start is minus the sampled surface, which makes the iterates
    match ``solve_contact`` started from zero exactly, update for update.
    """
    system = build_system(spec, contact, grid)
    if tol is None:
        tol = _default_tol(system.load)
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    c = 0.5 * grid.h**4 * contact.stiffness
    shifted = system.matrix.shifted(c)
    base = shifted.solve(system.load - system.matrix.matvec(system.surface))
    z = -system.surface if z0 is None else _check_start(z0, grid.n)
    cc = contraction_constant(spec, contact.stiffness)

    def gap_residual(gap: np.ndarray) -> np.ndarray:
        return discrete_residual(system, contact, gap + system.surface)

    if contact.stiffness == 0.0:
        exact = system.matrix.solve(system.load) - system.surface
        if callback is not None:
            callback(1, exact.copy())
        steps = [float(np.linalg.norm(exact - z))]
        return exact, IterationReport(
            iterations=1,
            step_norms=np.array(steps),
            residual_inf=float(np.max(np.abs(gap_residual(exact)))),
            converged=True,
            contraction=cc,
            apriori_bounds=np.array([cc * steps[0] / (1.0 - cc)]),
        )

    def apply(gap: np.ndarray) -> np.ndarray:
        return base - c * shifted.solve(np.abs(gap))

    z, steps, converged = _iterate_contact(apply, z, tol, max_iter, callback)
    step_norms = np.array(steps)
    powers = cc ** np.arange(1, len(steps) + 1, dtype=float)
    return z, IterationReport(
        iterations=len(steps),
        step_norms=step_norms,
        residual_inf=float(np.max(np.abs(gap_residual(z)))),
        converged=converged,
        contraction=cc,
        apriori_bounds=powers * (steps[0] / (1.0 - cc)) if steps else np.zeros(0),
    )


def solve_monotone(
    spec: BVPSpec,
    rhs: GeneralMonotone,
    grid: Grid,
    tol: float | None = None,
    max_iter: int = 100000,
    damping: float = 0.5,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> tuple[np.ndarray, IterationReport]:
    """Damped fixed-point iteration for a general monotone right-hand side.

    The start is the constant-load solve (an upper bracket for the discrete
    solution), and every step averages the previous iterate with one sweep of
    A^{-1} applied to the current load, so the iterates stay inside a fixed
    compact bracket.  The right-hand side is sampled for assumption
    violations first: monotonicity failures raise, bound failures are
    recorded as a warning on the report.  When the windowed step norms stop
    improving (bounded oscillation rather than decay) the damping is halved;
    a stall at the floor of 2^-10 ends the run with ``converged=False``.
    """
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must lie in (0, 1], got {damping}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    check = validate_rhs(rhs, spec, n_samples=1000, seed=0)
    if check.monotonicity_violations > 0:
        raise ValueError(
            f"right-hand side increased in y on {check.monotonicity_violations} "
            f"of {check.n_samples} sampled pairs"
        )
    warnings = ()
    if check.bound_violations > 0:
        warnings = (
            f"right-hand side exceeded its stated bound on {check.bound_violations} "
            f"samples; the upper starting iterate may not bracket the solution",
        )

    system = build_system(spec, rhs, grid)
    if tol is None:
        tol = _default_tol(system.load)
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    h4 = grid.h**4
    x = grid.interior

    def sweep(v: np.ndarray) -> np.ndarray:
        fvals = np.array([eval_rhs(rhs, xi, vi) for xi, vi in zip(x, v)], dtype=float)
        return system.matrix.solve(system.load + h4 * fvals)

    v = system.matrix.solve(system.load + h4 * system.bound)
    theta = damping
    steps: list = []
    converged = False
    for j in range(1, max_iter + 1):
        nxt = (1.0 - theta) * v + theta * sweep(v)
        if not np.all(np.isfinite(nxt)):
            raise NumericalError(f"iterate {j} is not finite")
        step = float(np.linalg.norm(nxt - v))
        steps.append(step)
        v = nxt
        if callback is not None:
            callback(j, v.copy())
        if step <= tol:
            converged = True
            break
        if j % _WINDOW == 0 and j >= 2 * _WINDOW:
            recent = min(steps[-_WINDOW:])
            previous = min(steps[-2 * _WINDOW : -_WINDOW])
            # 2% decay per window separates bounded oscillation from slow
            # geometric convergence at small damping (rate (1 - theta)^50)
            if recent > 0.98 * previous:
                if theta <= _MIN_DAMPING:
                    break
                theta *= 0.5

    return v, IterationReport(
        iterations=len(steps),
        step_norms=np.array(steps),
        residual_inf=float(np.max(np.abs(discrete_residual(system, rhs, v)))),
        converged=converged,
        warnings=warnings,
        damping_final=theta,
    )
