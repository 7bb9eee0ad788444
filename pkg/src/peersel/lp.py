"""Exact rational linear feasibility with checkable infeasibility certificates.

Solves systems  {A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0}  over Fractions
using a phase-1 simplex.  Degeneracy is handled by switching to Bland's rule
after a run of non-improving pivots, which guarantees termination.

When the system is infeasible the solver emits one multiplier per constraint:
y_r <= 0 on <=-rows (equivalently, a nonnegative weight on the reversed
inequality) and a free-signed y_r on equality rows, such that

    sum_r y_r * A[r, j] <= 0   for every variable column j, and
    sum_r y_r * b_r      > 0.

Any x >= 0 satisfying the constraints would force the nonpositive left side
above the positive right side — so none exists.  ``verify_infeasibility`` and
``verify_point`` redo these checks from scratch in plain Fraction arithmetic,
independent of the solver's internal state.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

_LE = "<="
_EQ = "=="


@dataclass(frozen=True)
class LinearConstraint:
    coeffs: dict[int, Fraction]  # sparse: variable index -> coefficient
    sense: str  # "<=" or "=="
    rhs: Fraction
    tag: str = ""

    def __post_init__(self) -> None:
        if self.sense not in (_LE, _EQ):
            raise ValueError(f"bad sense {self.sense!r}")


@dataclass
class FeasibilityProblem:
    num_vars: int
    constraints: list[LinearConstraint] = field(default_factory=list)

    def le(self, coeffs: dict[int, Fraction], rhs, tag: str = "") -> None:
        self.constraints.append(LinearConstraint(dict(coeffs), _LE, Fraction(rhs), tag))

    def eq(self, coeffs: dict[int, Fraction], rhs, tag: str = "") -> None:
        self.constraints.append(LinearConstraint(dict(coeffs), _EQ, Fraction(rhs), tag))


@dataclass(frozen=True)
class FeasibleResult:
    point: tuple[Fraction, ...]


@dataclass(frozen=True)
class InfeasibleResult:
    multipliers: tuple[Fraction, ...]  # one per constraint, in problem order


def verify_point(problem: FeasibilityProblem, point: Sequence[Fraction]) -> bool:
    """Exact check that the point satisfies every constraint and x >= 0."""
    if len(point) != problem.num_vars or any(x < 0 for x in point):
        return False
    for c in problem.constraints:
        lhs = sum((coef * point[j] for j, coef in c.coeffs.items()), Fraction(0))
        if c.sense == _LE and lhs > c.rhs:
            return False
        if c.sense == _EQ and lhs != c.rhs:
            return False
    return True


def verify_infeasibility(
    problem: FeasibilityProblem, multipliers: Sequence[Fraction]
) -> bool:
    """Exact check of the certificate conditions described in the module docs."""
    if len(multipliers) != len(problem.constraints):
        return False
    combo: dict[int, Fraction] = {}
    rhs = Fraction(0)
    for y, c in zip(multipliers, problem.constraints):
        if c.sense == _LE and y > 0:
            return False
        if y == 0:
            continue
        for j, coef in c.coeffs.items():
            combo[j] = combo.get(j, Fraction(0)) + y * coef
        rhs += y * c.rhs
    if any(v > 0 for v in combo.values()):
        return False
    return rhs > 0


_BLAND_TRIGGER = 40  # non-improving pivots before switching to Bland's rule


def solve_feasibility(problem: FeasibilityProblem) -> FeasibleResult | InfeasibleResult:
    nv = problem.num_vars
    cons = problem.constraints
    m = len(cons)
    if m == 0:
        return FeasibleResult(tuple(Fraction(0) for _ in range(nv)))

    le_rows = [r for r, c in enumerate(cons) if c.sense == _LE]
    slack_col = {r: nv + i for i, r in enumerate(le_rows)}
    ns = len(le_rows)
    art0 = nv + ns
    total = nv + ns + m  # x vars, slacks, artificials

    zero = Fraction(0)
    one = Fraction(1)

    # rows in equality form with rhs >= 0; remember each row's sign flip
    flip = [one] * m
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for r, c in enumerate(cons):
        row = [zero] * total
        for j, coef in c.coeffs.items():
            row[j] = coef
        if c.sense == _LE:
            row[slack_col[r]] = one
        if c.rhs < 0:
            flip[r] = -one
            row = [-v for v in row]
            row_rhs = -c.rhs
        else:
            row_rhs = c.rhs
        row[art0 + r] = one
        rows.append(row)
        rhs.append(row_rhs)

    basis = [art0 + r for r in range(m)]
    # phase-1 objective: minimize sum of artificials; reduced costs under the
    # artificial basis are -(column sums) for non-artificial columns
    obj = [zero] * total
    for j in range(nv + ns):
        s = zero
        for r in range(m):
            s += rows[r][j]
        obj[j] = -s
    z = -sum(rhs, zero)  # -(current objective value)

    stall = 0
    use_bland = False
    while True:
        entering = -1
        if use_bland:
            for j in range(nv + ns):  # artificials never re-enter
                if obj[j] < 0:
                    entering = j
                    break
        else:
            best = zero
            for j in range(nv + ns):
                if obj[j] < best:
                    best = obj[j]
                    entering = j
        if entering < 0:
            break
        leaving = -1
        best_ratio: Fraction | None = None
        for r in range(m):
            a = rows[r][entering]
            if a > 0:
                ratio = rhs[r] / a
                if best_ratio is None or ratio < best_ratio or (
                    ratio == best_ratio and basis[r] < basis[leaving]
                ):
                    best_ratio = ratio
                    leaving = r
        if leaving < 0:
            # phase-1 objective is bounded below by 0, so an unbounded ray
            # cannot happen with a negative reduced cost; guard anyway
            raise RuntimeError("phase-1 simplex claims unboundedness")
        if best_ratio == 0:
            stall += 1
            if stall >= _BLAND_TRIGGER:
                use_bland = True
        else:
            stall = 0
        # pivot on (leaving, entering)
        prow = rows[leaving]
        piv = prow[entering]
        if piv != 1:
            inv = one / piv
            rows[leaving] = prow = [v * inv for v in prow]
            rhs[leaving] = rhs[leaving] * inv
        for r in range(m):
            if r == leaving:
                continue
            factor = rows[r][entering]
            if factor != 0:
                rr = rows[r]
                rows[r] = [a - factor * b for a, b in zip(rr, prow)]
                rhs[r] = rhs[r] - factor * rhs[leaving]
        factor = obj[entering]
        if factor != 0:
            obj = [a - factor * b for a, b in zip(obj, prow)]
            z = z - factor * rhs[leaving]
        basis[leaving] = entering

    optimum = -z  # = min sum of artificials
    if optimum == 0:
        point = [zero] * nv
        for r, b in enumerate(basis):
            if b < nv:
                point[b] = rhs[r]
        result = FeasibleResult(tuple(point))
        if not verify_point(problem, result.point):
            raise RuntimeError("simplex produced a point that fails verification")
        return result

    # infeasible: dual values from the artificial columns' reduced costs
    # (cost of artificial r is 1, so reduced cost = 1 - y_r)
    mults = []
    for r in range(m):
        y_flipped = one - obj[art0 + r]
        mults.append(flip[r] * y_flipped)
    result = InfeasibleResult(tuple(mults))
    if not verify_infeasibility(problem, result.multipliers):
        raise RuntimeError("simplex produced a certificate that fails verification")
    return result
