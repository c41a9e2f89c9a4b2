import numpy as np
import pytest
from scipy.optimize import linprog

from sybil_atsc.simplex import (
    LPInfeasibleError,
    LPPivotLimitError,
    LPUnboundedError,
    solve_lp,
)


class TestBasics:
    def test_single_variable_bound(self):
        res = solve_lp([1.0], a_ub=[[1.0]], b_ub=[3.0], maximize=True)
        assert res.objective == pytest.approx(3.0)
        assert res.x[0] == pytest.approx(3.0)

    def test_contradictory_bounds_infeasible(self):
        # x >= 1 and x <= 0
        with pytest.raises(LPInfeasibleError):
            solve_lp([1.0], a_ub=[[-1.0], [1.0]], b_ub=[-1.0, 0.0])

    def test_unbounded(self):
        with pytest.raises(LPUnboundedError):
            solve_lp([1.0], a_ub=[[-1.0]], b_ub=[0.0], maximize=True)

    def test_no_constraints(self):
        res = solve_lp([1.0, 2.0])
        assert res.objective == 0.0
        with pytest.raises(LPUnboundedError):
            solve_lp([-1.0, 0.0])

    def test_equality_constraints(self):
        # min x+y s.t. x+y = 2  -> 2
        res = solve_lp([1.0, 1.0], a_eq=[[1.0, 1.0]], b_eq=[2.0])
        assert res.objective == pytest.approx(2.0)

    def test_negative_rhs_handled(self):
        # -x <= -2  (x >= 2), minimise x
        res = solve_lp([1.0], a_ub=[[-1.0]], b_ub=[-2.0])
        assert res.objective == pytest.approx(2.0)

    def test_pivot_limit_reported(self):
        with pytest.raises(LPPivotLimitError):
            solve_lp(
                [1.0, 1.0, 1.0],
                a_ub=np.eye(3),
                b_ub=[1.0, 1.0, 1.0],
                maximize=True,
                max_pivots=1,
            )


class TestGameEncoding:
    def test_maxmin_lp_for_two_lane_game(self):
        # variables (a1, a2, rho); payoffs diag(1, 3)
        u = np.diag([1.0, 3.0])
        a_ub = np.hstack([-u, np.ones((2, 1))])
        res = solve_lp(
            [0.0, 0.0, 1.0],
            a_ub=a_ub,
            b_ub=[0.0, 0.0],
            a_eq=[[1.0, 1.0, 0.0]],
            b_eq=[1.0],
            maximize=True,
        )
        assert res.objective == pytest.approx(0.75, abs=1e-9)
        assert res.x[:2] == pytest.approx([0.75, 0.25], abs=1e-9)


class TestDegeneracy:
    def test_beale_cycling_example_terminates(self):
        # Classic cycling instance for naive pivoting; Bland must finish.
        c = [-0.75, 150.0, -0.02, 6.0]
        a_ub = [
            [0.25, -60.0, -0.04, 9.0],
            [0.5, -90.0, -0.02, 3.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
        b_ub = [0.0, 0.0, 1.0]
        res = solve_lp(c, a_ub=a_ub, b_ub=b_ub)
        assert res.objective == pytest.approx(-0.05, abs=1e-9)


class TestAgainstScipy:
    def test_random_inequality_programs(self):
        rng = np.random.default_rng(20260808)
        agreed = 0
        for _ in range(60):
            n = int(rng.integers(2, 7))
            m = int(rng.integers(2, 7))
            c = rng.uniform(-2.0, 2.0, n)
            a = rng.uniform(-1.0, 1.0, (m, n))
            b = rng.uniform(0.5, 3.0, m)  # x = 0 always feasible
            ref = linprog(c, A_ub=a, b_ub=b, bounds=(0, None), method="highs")
            if not ref.success:
                try:
                    solve_lp(c, a_ub=a, b_ub=b)
                except LPUnboundedError:
                    continue
                raise AssertionError("scipy failed where our solver succeeded")
            res = solve_lp(c, a_ub=a, b_ub=b)
            assert res.objective == pytest.approx(ref.fun, abs=1e-7)
            agreed += 1
        assert agreed >= 25  # enough bounded instances to mean something

    def test_random_mixed_programs(self):
        rng = np.random.default_rng(7)
        for _ in range(30):
            n = int(rng.integers(2, 6))
            c = rng.uniform(-1.0, 1.0, n)
            a_ub = rng.uniform(-1.0, 1.0, (3, n))
            b_ub = rng.uniform(0.5, 2.0, 3)
            a_eq = np.ones((1, n))
            b_eq = [1.0]
            ref = linprog(
                c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq,
                bounds=(0, None), method="highs",
            )
            if not ref.success:
                with pytest.raises((LPInfeasibleError, LPUnboundedError)):
                    solve_lp(c, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)
                continue
            res = solve_lp(c, a_ub=a_ub, b_ub=b_ub, a_eq=a_eq, b_eq=b_eq)
            assert res.objective == pytest.approx(ref.fun, abs=1e-7)
