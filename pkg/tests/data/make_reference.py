"""Regenerate vocalfold_n50_dense_reference.csv.

Standalone on purpose: builds the pentadiagonal stencil and the fixed-point
iteration from scratch with dense numpy arrays and runs exactly 200
iterations, so the stored profile is independent of the package internals.
Problem: [0, 1], zero end deflections, end curvature -20, stiffness 1e4,
surface x/2, 50 interior nodes.

Run from this directory:  python3 make_reference.py
"""

import numpy as np

N = 50
H = 1.0 / (N + 1)
STIFFNESS = 1e4
BETA = -20.0
ITERATIONS = 200


def main():
    x = np.linspace(0.0, 1.0, N + 2)[1:-1]
    surface = x / 2.0

    matrix = np.zeros((N, N))
    for i in range(N):
        matrix[i, i] = 6.0
        if i + 1 < N:
            matrix[i, i + 1] = matrix[i + 1, i] = -4.0
        if i + 2 < N:
            matrix[i, i + 2] = matrix[i + 2, i] = 1.0
    matrix[0, 0] = matrix[-1, -1] = 5.0

    load = np.zeros(N)
    # zero end deflections; the boundary force samples vanish (no penetration
    # at either end: w(0) = g(0) = 0 activates nothing under H(0) = 0)
    load[0] = -BETA * H * H
    load[-1] = -BETA * H * H

    c = 0.5 * H**4 * STIFFNESS
    inv = np.linalg.inv(matrix + c * np.eye(N))
    base = inv @ (load + c * surface)
    w = np.zeros(N)
    for _ in range(ITERATIONS):
        w = base - c * (inv @ np.abs(w - surface))

    lines = ["x,w"]
    for xi, wi in zip(x, w):
        lines.append(f"{xi:.17g},{wi:.17g}")
    with open("vocalfold_n50_dense_reference.csv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(x)} rows")


if __name__ == "__main__":
    main()
