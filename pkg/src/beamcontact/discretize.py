"""Finite-difference discretization on a uniform grid.

The fourth derivative is replaced by the standard five-point stencil; the
rows next to the boundary fold the prescribed curvatures in through the
usual second-difference ghost elimination, which yields a symmetric
pentadiagonal matrix with first row (5, -4, 1) and interior rows
(1, -4, 6, -4, 1).  That matrix is the square of the tridiagonal second
difference matrix, hence positive definite with eigenvalues
16 sin^4(i pi / (2 (n + 1))).
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .model import BVPSpec, PiecewiseLinearContact, RightHandSide, eval_rhs, rhs_bound

__all__ = [
    "Grid",
    "BandedSPD",
    "DiscreteSystem",
    "NotPositiveDefiniteError",
    "build_grid",
    "build_system",
    "fourth_diff_matrix",
    "stencil_eigenvalues",
    "load_vector",
    "banded_cholesky_solve",
    "discrete_residual",
]


class NotPositiveDefiniteError(ArithmeticError):
    """Banded Cholesky hit a nonpositive pivot."""

    def __init__(self, pivot: int):
        super().__init__(f"matrix is not positive definite (leading minor {pivot})")
        self.pivot = pivot


@dataclass(frozen=True)
class Grid:
    """Uniform mesh with ``n`` interior nodes; ``nodes`` has length n + 2."""

    n: int
    h: float
    nodes: np.ndarray

    @property
    def interior(self) -> np.ndarray:
        return self.nodes[1:-1]


def build_grid(spec: BVPSpec, n: int) -> Grid:
    # n >= 5 keeps the two boundary-corrected rows on each side disjoint
    if n < 5:
        raise ValueError(f"need at least 5 interior nodes, got {n}")
    nodes = np.linspace(spec.a, spec.b, n + 2)
    nodes.flags.writeable = False
    return Grid(n=n, h=(spec.b - spec.a) / (n + 1), nodes=nodes)


@dataclass(eq=False)
class BandedSPD:
    """Symmetric pentadiagonal matrix stored by diagonals.

    ``diag`` has length n, ``off1`` length n - 1, ``off2`` length n - 2.
    Positive definiteness is established by the banded Cholesky
    factorization, computed on first use and cached; the cache is guarded
    by a lock so a factored instance can be shared across worker threads.
    """

    diag: np.ndarray
    off1: np.ndarray
    off2: np.ndarray
    _factor: np.ndarray | None = field(default=None, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self.diag = np.array(self.diag, dtype=float)
        self.off1 = np.array(self.off1, dtype=float)
        self.off2 = np.array(self.off2, dtype=float)
        n = self.diag.size
        if n < 3:
            raise ValueError(f"need order >= 3, got {n}")
        if self.off1.size != n - 1 or self.off2.size != n - 2:
            raise ValueError("band lengths must be n, n-1, n-2")
        for band in (self.diag, self.off1, self.off2):
            if not np.all(np.isfinite(band)):
                raise ValueError("matrix entries must be finite")
            band.flags.writeable = False

    @property
    def n(self) -> int:
        return self.diag.size

    def matvec(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape != (self.n,):
            raise ValueError(f"expected vector of length {self.n}, got shape {v.shape}")
        out = self.diag * v
        out[:-1] += self.off1 * v[1:]
        out[1:] += self.off1 * v[:-1]
        out[:-2] += self.off2 * v[2:]
        out[2:] += self.off2 * v[:-2]
        return out

    def to_dense(self) -> np.ndarray:
        out = np.diag(self.diag)
        out += np.diag(self.off1, 1) + np.diag(self.off1, -1)
        out += np.diag(self.off2, 2) + np.diag(self.off2, -2)
        return out

    def shifted(self, c: float) -> "BandedSPD":
        """A + c I as a fresh instance (its factorization is independent)."""
        if not (np.isfinite(c) and c >= 0.0):
            raise ValueError(f"shift must be finite and >= 0, got {c}")
        return BandedSPD(diag=self.diag + c, off1=self.off1, off2=self.off2)

    def inf_norm(self) -> float:
        return float(np.max(_abs_row_sums(self)))

    def factorize(self) -> None:
        """Force the Cholesky factorization; raises if not positive definite."""
        self._ensure_factor()

    def _ensure_factor(self) -> np.ndarray:
        if self._factor is None:
            with self._lock:
                if self._factor is None:
                    ab = np.zeros((3, self.n))
                    ab[0, 2:] = self.off2
                    ab[1, 1:] = self.off1
                    ab[2, :] = self.diag
                    try:
                        self._factor = scipy.linalg.cholesky_banded(ab, lower=False)
                    except scipy.linalg.LinAlgError as exc:
                        m = re.search(r"\d+", str(exc))
                        raise NotPositiveDefiniteError(int(m.group()) if m else -1) from exc
        return self._factor

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape != (self.n,):
            raise ValueError(f"expected vector of length {self.n}, got shape {rhs.shape}")
        return scipy.linalg.cho_solve_banded((self._ensure_factor(), False), rhs)


def _abs_row_sums(mat: BandedSPD) -> np.ndarray:
    out = np.abs(mat.diag).copy()
    out[:-1] += np.abs(mat.off1)
    out[1:] += np.abs(mat.off1)
    out[:-2] += np.abs(mat.off2)
    out[2:] += np.abs(mat.off2)
    return out


def fourth_diff_matrix(n: int) -> BandedSPD:
    """Fourth-difference matrix (without the h^-4 scale) of order n >= 5."""
    if n < 5:
        raise ValueError(f"need order >= 5, got {n}")
    diag = np.full(n, 6.0)
    diag[0] = diag[-1] = 5.0
    return BandedSPD(diag=diag, off1=np.full(n - 1, -4.0), off2=np.full(n - 2, 1.0))


def stencil_eigenvalues(n: int) -> np.ndarray:
    """Exact spectrum of ``fourth_diff_matrix(n)``, ascending."""
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    i = np.arange(1, n + 1)
    return 16.0 * np.sin(i * np.pi / (2.0 * (n + 1))) ** 4


def load_vector(spec: BVPSpec, rhs: RightHandSide, grid: Grid) -> np.ndarray:
    """Boundary-corrected load vector; rows away from the ends are zero.

    The first and last rows carry the curvature data together with the
    right-hand side sampled at the known boundary deflections; the second
    and second-to-last rows carry the deflection data alone.
    """
    n, h = grid.n, grid.h
    h2 = h * h
    h4 = h2 * h2
    out = np.zeros(n)
    out[0] = -spec.beta1 * h2 + 2.0 * spec.alpha1 - h4 / 12.0 * eval_rhs(rhs, spec.a, spec.alpha1)
    out[1] += -spec.alpha1
    out[n - 2] += -spec.alpha2
    out[n - 1] = -spec.beta2 * h2 + 2.0 * spec.alpha2 - h4 / 12.0 * eval_rhs(rhs, spec.b, spec.alpha2)
    return out


@dataclass(frozen=True, eq=False)
class DiscreteSystem:
    """Everything fixed by (spec, rhs, grid): matrix, load, nodewise data.

    ``surface`` is the contact surface sampled at the interior nodes and is
    None for a general right-hand side.  ``bound`` is the constant vector of
    the upper bound on f.
    """

    spec: BVPSpec
    grid: Grid
    matrix: BandedSPD
    load: np.ndarray
    bound: np.ndarray
    surface: np.ndarray | None


def build_system(spec: BVPSpec, rhs: RightHandSide, grid: Grid) -> DiscreteSystem:
    surface = None
    if isinstance(rhs, PiecewiseLinearContact):
        surface = np.array([rhs.surface(x) for x in grid.interior], dtype=float)
        if not np.all(np.isfinite(surface)):
            raise ValueError("surface is not finite at every interior node")
        surface.flags.writeable = False
    load = load_vector(spec, rhs, grid)
    load.flags.writeable = False
    bound = np.full(grid.n, rhs_bound(rhs))
    bound.flags.writeable = False
    return DiscreteSystem(
        spec=spec,
        grid=grid,
        matrix=fourth_diff_matrix(grid.n),
        load=load,
        bound=bound,
        surface=surface,
    )


def banded_cholesky_solve(matrix: BandedSPD, rhs: np.ndarray) -> np.ndarray:
    """Solve ``matrix @ x = rhs`` through the cached banded Cholesky factor."""
    return matrix.solve(rhs)


def discrete_residual(system: DiscreteSystem, rhs: RightHandSide, w: np.ndarray) -> np.ndarray:
    """Row-wise defect A w - load - h^4 f(x, w); zero at the discrete solution.

    The split of f into its upper bound plus a nonpositive remainder cancels
    here, so the residual is evaluated with f directly.
    """
    w = np.asarray(w, dtype=float)
    if w.shape != (system.grid.n,):
        raise ValueError(f"expected vector of length {system.grid.n}, got shape {w.shape}")
    fvals = np.array(
        [eval_rhs(rhs, x, wi) for x, wi in zip(system.grid.interior, w)], dtype=float
    )
    return system.matrix.matvec(w) - system.load - system.grid.h**4 * fvals
