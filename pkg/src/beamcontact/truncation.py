"""Finite-difference remainder diagnostics.

The row-wise defect of the five-point scheme applied to the true solution
has an exact integral representation against the solution's fifth
derivative (integrable for contact forces, where the fourth derivative is
Lipschitz but kinked).  ``truncation_vector`` evaluates that representation
with Gauss-Legendre panels; the convergence-study harness reports the
resulting sup norms, which scale like h^5 per row.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .discretize import Grid
from .model import PiecewiseLinearContact

__all__ = ["fifth_derivative_contact", "truncation_vector"]

_GL_POINTS, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def fifth_derivative_contact(contact: PiecewiseLinearContact, x, w, w_prime):
    """Fifth derivative of a solution w of the contact problem, a.e. in x.

    Where the beam penetrates the surface the fourth derivative is
    -stiffness * (w - surface), so differentiating once more gives
    -stiffness * (w' - surface'); off the surface it is zero.  Written with
    the sign function this is -stiffness/2 * (w' - g') * (1 + sign(w - g)),
    which at touching points returns the two-sided average.  Vectorized.
    """
    x = np.asarray(x, dtype=float)
    w = np.asarray(w, dtype=float)
    w_prime = np.asarray(w_prime, dtype=float)
    gap = w - np.vectorize(contact.surface, otypes=[float])(x)
    slope_gap = w_prime - np.vectorize(contact.surface_slope, otypes=[float])(x)
    out = -0.5 * contact.stiffness * slope_gap * (1.0 + np.sign(gap))
    if np.ndim(x) == 0 and np.ndim(w) == 0:
        return float(out)
    return out


def _panel_integral(fn: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> float:
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    return float(half * np.sum(_GL_WEIGHTS * fn(mid + half * _GL_POINTS)))


def _integral(fn, lo: float, hi: float, h: float) -> float:
    # panels no wider than h: the integrands are only piecewise smooth at
    # that scale (the fifth derivative may jump inside a stencil span)
    panels = max(1, int(round((hi - lo) / h)))
    edges = np.linspace(lo, hi, panels + 1)
    return sum(_panel_integral(fn, edges[k], edges[k + 1]) for k in range(panels))


def _kernel_integral(w5, lo: float, hi: float, c: float, h: float) -> float:
    return _integral(lambda s: (c - s) ** 4 / 24.0 * w5(s), lo, hi, h)


def truncation_vector(grid: Grid, w5: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """Exact per-row finite-difference remainders for a given fifth derivative.

    ``w5`` must accept an array of points inside [a, b].  The first and last
    rows use the one-sided forms that account for the folded-in boundary
    conditions; interior rows use the symmetric form.  Quadrature is
    Gauss-Legendre with panels no wider than the grid spacing, exact for
    polynomial fifth derivatives up to degree 11.
    """
    n, h = grid.n, grid.h
    a = grid.nodes[0]
    b = grid.nodes[-1]
    out = np.empty(n)

    out[0] = (
        -(h**4) * _integral(w5, a, a + h, h)
        + 5.0 * _kernel_integral(w5, a, a + h, a + h, h)
        - 4.0 * _kernel_integral(w5, a, a + 2 * h, a + 2 * h, h)
        + _kernel_integral(w5, a, a + 3 * h, a + 3 * h, h)
    )
    for i in range(1, n - 1):
        x = grid.interior[i]
        out[i] = (
            -_kernel_integral(w5, x - 2 * h, x, x - 2 * h, h)
            + 4.0 * _kernel_integral(w5, x - h, x, x - h, h)
            - 4.0 * _kernel_integral(w5, x, x + h, x + h, h)
            + _kernel_integral(w5, x, x + 2 * h, x + 2 * h, h)
        )
    out[n - 1] = (
        h**4 * _integral(w5, b - h, b, h)
        - 5.0 * _kernel_integral(w5, b - h, b, b - h, h)
        + 4.0 * _kernel_integral(w5, b - 2 * h, b, b - 2 * h, h)
        - _kernel_integral(w5, b - 3 * h, b, b - 3 * h, h)
    )
    return out
