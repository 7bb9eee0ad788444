from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from peersel.lp import (
    FeasibilityProblem,
    FeasibleResult,
    InfeasibleResult,
    LinearConstraint,
    solve_feasibility,
    verify_infeasibility,
    verify_point,
)

F = Fraction


def solve(problem):
    res = solve_feasibility(problem)
    if isinstance(res, FeasibleResult):
        assert verify_point(problem, res.point)
    else:
        assert verify_infeasibility(problem, res.multipliers)
    return res


class TestFeasible:
    def test_trivial(self):
        p = FeasibilityProblem(2)
        p.le({0: F(1), 1: F(1)}, 1)
        res = solve(p)
        assert isinstance(res, FeasibleResult)

    def test_equalities(self):
        p = FeasibilityProblem(3)
        p.eq({0: F(1), 1: F(1), 2: F(1)}, 1)
        p.eq({0: F(1), 1: F(-1)}, 0)
        res = solve(p)
        assert isinstance(res, FeasibleResult)
        x = res.point
        assert x[0] + x[1] + x[2] == 1 and x[0] == x[1]

    def test_exact_rationals(self):
        p = FeasibilityProblem(1)
        p.eq({0: F(3)}, F(1, 7))
        res = solve(p)
        assert res.point == (F(1, 21),)

    def test_degenerate_redundant_rows(self):
        p = FeasibilityProblem(2)
        for _ in range(5):
            p.eq({0: F(1), 1: F(1)}, 1)
        p.le({0: F(-1)}, 0)
        assert isinstance(solve(p), FeasibleResult)


class TestInfeasible:
    def test_contradictory_equalities(self):
        p = FeasibilityProblem(1)
        p.eq({0: F(1)}, 1, tag="a")
        p.eq({0: F(1)}, 2, tag="b")
        res = solve(p)
        assert isinstance(res, InfeasibleResult)

    def test_negativity_trap(self):
        # x + y <= -1 with x, y >= 0 is impossible
        p = FeasibilityProblem(2)
        p.le({0: F(1), 1: F(1)}, -1)
        assert isinstance(solve(p), InfeasibleResult)

    def test_sandwich(self):
        # 2 <= x <= 1
        p = FeasibilityProblem(1)
        p.le({0: F(1)}, 1)
        p.le({0: F(-1)}, -2)
        res = solve(p)
        assert isinstance(res, InfeasibleResult)
        assert len(res.multipliers) == len(p.constraints)

    def test_certificate_rejects_tampering(self):
        p = FeasibilityProblem(1)
        p.eq({0: F(1)}, 1)
        p.eq({0: F(1)}, 2)
        res = solve_feasibility(p)
        bad = tuple(F(0) for _ in res.multipliers)
        assert not verify_infeasibility(p, bad)


class TestVerifyPoint:
    def test_rejects_violating_point(self):
        p = FeasibilityProblem(1)
        p.le({0: F(1)}, 1)
        assert verify_point(p, (F(1),))
        assert not verify_point(p, (F(2),))
        assert not verify_point(p, (F(-1),))  # x >= 0 is implicit


class TestConstraint:
    def test_bad_sense(self):
        with pytest.raises(ValueError):
            LinearConstraint({0: F(1)}, ">=", F(0))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_random_systems_self_verify(data):
    """Whatever the verdict, its certificate must re-check from scratch."""
    rat = st.integers(-4, 4).map(F)
    nv = data.draw(st.integers(1, 4))
    rows = data.draw(st.integers(1, 5))
    p = FeasibilityProblem(nv)
    for r in range(rows):
        coeffs = {j: data.draw(rat) for j in range(nv)}
        rhs = data.draw(rat)
        if data.draw(st.booleans()):
            p.le(coeffs, rhs, tag=f"r{r}")
        else:
            p.eq(coeffs, rhs, tag=f"r{r}")
    solve(p)
