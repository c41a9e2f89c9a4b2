"""Two-phase primal simplex for small dense linear programs.

Entering and leaving variables are chosen with Bland's smallest-index rule,
so the iteration cannot cycle on degenerate vertices.  That costs a few
extra pivots, which is irrelevant at the problem sizes seen here (tens of
variables), and buys guaranteed termination.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LPError",
    "LPInfeasibleError",
    "LPUnboundedError",
    "LPPivotLimitError",
    "LPResult",
    "solve_lp",
]

_TOL = 1e-9


class LPError(Exception):
    """Base class for linear-program solver failures."""


class LPInfeasibleError(LPError):
    pass


class LPUnboundedError(LPError):
    pass


class LPPivotLimitError(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float


def solve_lp(
    c,
    a_ub=None,
    b_ub=None,
    a_eq=None,
    b_eq=None,
    *,
    maximize: bool = False,
    max_pivots: int = 10_000,
) -> LPResult:
    """Optimise c.x subject to a_ub x <= b_ub, a_eq x = b_eq and x >= 0.

    Minimises by default; pass maximize=True to flip the sense.  Returns an
    optimal basic feasible solution.  Raises LPInfeasibleError,
    LPUnboundedError or LPPivotLimitError; never returns an approximate
    answer silently.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    obj = -c if maximize else c.copy()

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    slack_rows: list[int] = []  # row index -> has a +/-1 slack column
    if a_ub is not None:
        a_ub = np.atleast_2d(np.asarray(a_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        for i in range(a_ub.shape[0]):
            rows.append(a_ub[i])
            rhs.append(float(b_ub[i]))
            slack_rows.append(len(rows) - 1)
    n_ub = len(rows)
    if a_eq is not None:
        a_eq = np.atleast_2d(np.asarray(a_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        for i in range(a_eq.shape[0]):
            rows.append(a_eq[i])
            rhs.append(float(b_eq[i]))
    m = len(rows)
    if m == 0:
        # No constraints at all: optimum is 0 iff no profitable direction.
        if np.any(obj < -_TOL):
            raise LPUnboundedError("objective improves without bound")
        x = np.zeros(n)
        return LPResult(x=x, objective=float(c @ x))

    a = np.vstack(rows)
    b = np.asarray(rhs, dtype=float)

    # Columns: n structural, n_ub slacks, then one artificial per row as
    # needed.  Normalise to b >= 0 first.
    slack = np.zeros((m, n_ub))
    for j, row in enumerate(slack_rows):
        slack[row, j] = 1.0
    full = np.hstack([a, slack])
    for i in range(m):
        if b[i] < 0.0:
            full[i] *= -1.0
            b[i] *= -1.0

    # A slack column with coefficient +1 (b now >= 0) can start in the basis.
    basis = np.full(m, -1, dtype=int)
    for j, row in enumerate(slack_rows):
        if full[row, n + j] > 0.5:
            basis[row] = n + j
    need_artificial = [i for i in range(m) if basis[i] < 0]
    n_art = len(need_artificial)
    art = np.zeros((m, n_art))
    for j, row in enumerate(need_artificial):
        art[row, j] = 1.0
        basis[row] = n + n_ub + j
    tableau = np.hstack([full, art, b.reshape(-1, 1)])
    total = n + n_ub + n_art

    pivots_left = [max_pivots]

    def run_simplex(cost: np.ndarray) -> None:
        # cost: length `total` vector to minimise; maintains `tableau`/`basis`.
        red = cost.copy().astype(float)
        z = 0.0
        for i in range(m):
            if abs(cost[basis[i]]) > 0.0:
                red -= cost[basis[i]] * tableau[i, :total]
                z -= cost[basis[i]] * tableau[i, -1]
        while True:
            enter = -1
            for j in range(total):
                if red[j] < -_TOL:
                    enter = j
                    break
            if enter < 0:
                return
            leave = -1
            best = np.inf
            for i in range(m):
                coef = tableau[i, enter]
                if coef > _TOL:
                    ratio = tableau[i, -1] / coef
                    if ratio < best - _TOL or (
                        ratio < best + _TOL
                        and (leave < 0 or basis[i] < basis[leave])
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                raise LPUnboundedError("objective improves without bound")
            if pivots_left[0] <= 0:
                raise LPPivotLimitError(f"pivot limit {max_pivots} exceeded")
            pivots_left[0] -= 1
            piv = tableau[leave, enter]
            tableau[leave] /= piv
            for i in range(m):
                if i != leave and abs(tableau[i, enter]) > 0.0:
                    tableau[i] -= tableau[i, enter] * tableau[leave]
            red -= red[enter] * tableau[leave, :total]
            basis[leave] = enter

    if n_art:
        phase1 = np.zeros(total)
        phase1[n + n_ub :] = 1.0
        run_simplex(phase1)
        infeas = sum(
            tableau[i, -1] for i in range(m) if basis[i] >= n + n_ub
        )
        if infeas > 1e-7:
            raise LPInfeasibleError(f"no feasible point (residual {infeas:.3e})")
        # Drive any zero-valued artificials out of the basis.
        for i in range(m):
            if basis[i] >= n + n_ub:
                pivot_col = -1
                for j in range(n + n_ub):
                    if abs(tableau[i, j]) > _TOL:
                        pivot_col = j
                        break
                if pivot_col < 0:
                    continue  # redundant row; harmless to leave in place
                piv = tableau[i, pivot_col]
                tableau[i] /= piv
                for k in range(m):
                    if k != i and abs(tableau[k, pivot_col]) > 0.0:
                        tableau[k] -= tableau[k, pivot_col] * tableau[i]
                basis[i] = pivot_col
        # Forbid artificials from re-entering.
        tableau[:, n + n_ub : total] = 0.0

    phase2 = np.zeros(total)
    phase2[:n] = obj
    run_simplex(phase2)

    x = np.zeros(total)
    for i in range(m):
        x[basis[i]] = tableau[i, -1]
    solution = x[:n]
    return LPResult(x=solution, objective=float(c @ solution))
