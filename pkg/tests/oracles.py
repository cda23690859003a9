"""Independent reference implementations used only by the tests.

Everything here is written from scratch against dense numpy arrays with
textbook algorithms (Gaussian elimination, cyclic Jacobi, explicit-inverse
fixed-point iteration, trapezoid quadrature), so agreement with the package
is evidence rather than a tautology.
"""

import math

import numpy as np


def gaussian_solve(matrix, rhs):
    """Dense Gaussian elimination with partial pivoting."""
    a = np.array(matrix, dtype=float)
    b = np.array(rhs, dtype=float)
    n = a.shape[0]
    for col in range(n - 1):
        pivot = col + int(np.argmax(np.abs(a[col:, col])))
        if a[pivot, col] == 0.0:
            raise ZeroDivisionError("singular matrix")
        if pivot != col:
            a[[col, pivot]] = a[[pivot, col]]
            b[[col, pivot]] = b[[pivot, col]]
        for row in range(col + 1, n):
            factor = a[row, col] / a[col, col]
            a[row, col:] -= factor * a[col, col:]
            b[row] -= factor * b[col]
    x = np.zeros(n)
    for row in range(n - 1, -1, -1):
        x[row] = (b[row] - a[row, row + 1 :] @ x[row + 1 :]) / a[row, row]
    return x


def jacobi_eigenvalues(matrix, tol=1e-13, max_sweeps=100):
    """Cyclic Jacobi rotations for a symmetric matrix; returns sorted values."""
    a = np.array(matrix, dtype=float)
    n = a.shape[0]
    scale = np.max(np.abs(a)) or 1.0
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(a**2) - np.sum(np.diag(a) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if abs(a[p, q]) <= 1e-300:
                    continue
                phi = 0.5 * math.atan2(2.0 * a[p, q], a[q, q] - a[p, p])
                c, s = math.cos(phi), math.sin(phi)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
    return np.sort(np.diag(a))


def dense_stencil(n):
    """Pentadiagonal fourth-difference matrix written out entry by entry."""
    a = np.zeros((n, n))
    for i in range(n):
        a[i, i] = 6.0
        if i + 1 < n:
            a[i, i + 1] = a[i + 1, i] = -4.0
        if i + 2 < n:
            a[i, i + 2] = a[i + 2, i] = 1.0
    a[0, 0] = a[n - 1, n - 1] = 5.0
    return a


def dense_contact_iterate(n, h, stiffness, surface, load, start, iterations):
    """Fixed-point iteration with an explicit dense inverse; returns all iterates."""
    c = 0.5 * h**4 * stiffness
    inv = np.linalg.inv(dense_stencil(n) + c * np.eye(n))
    base = inv @ (load + c * surface)
    w = np.array(start, dtype=float)
    history = []
    for _ in range(iterations):
        w = base - c * (inv @ np.abs(w - surface))
        history.append(w.copy())
    return history


def tent_kernel(a, b, x, s):
    """Second-order two-point kernel, written independently of the package."""
    if s <= x:
        return (x - b) * (s - a) / (b - a)
    return (s - b) * (x - a) / (b - a)


def fourth_kernel_trapezoid(a, b, x, s, m=4000):
    """Product integral of the tent kernel by brute-force trapezoid rule."""
    t = np.linspace(a, b, m + 1)
    vals = np.array([tent_kernel(a, b, x, ti) * tent_kernel(a, b, ti, s) for ti in t])
    return float(np.sum(0.5 * (vals[:-1] + vals[1:]) * np.diff(t)))
