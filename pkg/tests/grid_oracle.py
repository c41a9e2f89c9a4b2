"""Brute-force value of a matrix game by scanning the probability simplex.

Completely independent of the LP path: enumerates mixes on a fixed-step
grid and takes the best worst-row payoff.  Only practical for dimension
three or less, which is exactly where it serves as a cross-check.
"""

import numpy as np


def maxmin_value_by_grid(matrix: np.ndarray, step: float = 1e-3) -> float:
    matrix = np.asarray(matrix, dtype=float)
    d = matrix.shape[0]
    n = int(round(1.0 / step))
    if d == 1:
        return float(matrix[0, 0])
    if d == 2:
        a = np.arange(n + 1) / n
        mixes = np.stack([a, 1.0 - a])  # 2 x N
    elif d == 3:
        i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        mask = (i + j) <= n
        a = i[mask] / n
        b = j[mask] / n
        mixes = np.stack([a, b, 1.0 - a - b])  # 3 x N
    else:
        raise ValueError("grid search is for dimensions 1..3 only")
    worst_rows = (matrix @ mixes).min(axis=0)
    return float(worst_rows.max())
