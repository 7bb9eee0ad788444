"""Impossibility witnesses: exact LP infeasibility over a two-state lattice.

Each construction fixes two world states and gives every agent exactly two
candidate messages — her truthful report in state one and in state two.  Over
the resulting 2^n message profiles we ask for selection probabilities g_i(m)
that are simultaneously

- nonnegative with per-profile total mass at most 1,
- efficient at both all-truthful profiles (needy mass exactly 1), and
- incentive compatible in both directions for every agent and every
  opponent sub-profile: deviating from truth must not raise the agent's own
  probability (equality, since the argument applies to both directions), and
  with her own probability pinned, must not raise her friends' total or
  lower her enemies' total (her relation sets taken from the state whose
  message is her truth).

If no such g exists, the returned witness carries an exact Farkas-style
certificate that can be re-verified independently; if the system is
feasible, it carries a satisfying point instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .lp import (
    FeasibilityProblem,
    FeasibleResult,
    InfeasibleResult,
    solve_feasibility,
    verify_infeasibility,
    verify_point,
)
from .model import (
    BudgetExceededError,
    Mode,
    PeerselError,
    Relation,
    RelationNetwork,
    WorldState,
    build_network,
    truthful_profile,
)
from .prefs import PreferenceWeights

DEFAULT_VAR_BUDGET = 8192


class WitnessStatus(enum.Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"


@dataclass(frozen=True)
class CertificateEntry:
    tag: str
    multiplier: Fraction


@dataclass(frozen=True)
class LpWitness:
    status: WitnessStatus
    n: int  # agents; variable (mask, i) sits at index mask*n + i
    variables: int
    constraints: int
    certificate: Optional[tuple[CertificateEntry, ...]]
    feasible_point: Optional[dict[tuple[int, int], Fraction]]  # (profile mask, agent) -> prob
    problem: FeasibilityProblem

    def verify(self) -> bool:
        """Re-check the certificate / point by direct rational arithmetic."""
        if self.status is WitnessStatus.INFEASIBLE:
            mults = [Fraction(0)] * len(self.problem.constraints)
            by_tag = {c.tag: idx for idx, c in enumerate(self.problem.constraints)}
            for entry in self.certificate:
                mults[by_tag[entry.tag]] = entry.multiplier
            return verify_infeasibility(self.problem, mults)
        point = [Fraction(0)] * self.problem.num_vars
        for (mask, agent), val in self.feasible_point.items():
            point[mask * self.n + agent] = val
        return verify_point(self.problem, point)


@dataclass(frozen=True)
class Theorem4Construction:
    """Two full-report states: a clique of mutual enemies among all but the
    last two agents with the first agent needy, versus a single enemy pair at
    the end with the last agent needy."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 4:
            raise PeerselError("this construction needs at least 4 agents")

    @property
    def mode(self) -> Mode:
        return Mode.FULL_TYPE

    def states(self) -> tuple[WorldState, WorldState]:
        n = self.n
        s = list(range(n - 2))
        net1 = build_network(
            n, [(i, j, Relation.ENEMY) for i in s for j in s if i < j]
        )
        net2 = build_network(n, [(n - 2, n - 1, Relation.ENEMY)])
        return (
            WorldState(net1, frozenset({0})),
            WorldState(net2, frozenset({n - 1})),
        )


@dataclass(frozen=True)
class Theorem5bConstruction:
    """One fixed network of four friendship cliques (X1-X2 and Y1-Y2 mutually
    hostile, the X side impartial to the Y side); the two states differ only
    in who is needy: the first agent of X1 versus the last agent of Y2."""

    x1: int
    x2: int
    y1: int
    y2: int

    def __post_init__(self) -> None:
        if min(self.x1, self.x2, self.y1, self.y2) < 1:
            raise PeerselError("all four clique sizes must be at least 1")

    @property
    def n(self) -> int:
        return self.x1 + self.x2 + self.y1 + self.y2

    @property
    def mode(self) -> Mode:
        return Mode.NEEDY_ONLY

    def network(self) -> RelationNetwork:
        return theorem5b_network(self.x1, self.x2, self.y1, self.y2)

    def states(self) -> tuple[WorldState, WorldState]:
        net = self.network()
        return (
            WorldState(net, frozenset({0})),
            WorldState(net, frozenset({self.n - 1})),
        )


def theorem5b_network(x1: int, x2: int, y1: int, y2: int) -> RelationNetwork:
    """Four consecutive friendship cliques; enmity inside each X/Y pair."""
    sizes = [x1, x2, y1, y2]
    if min(sizes) < 1:
        raise PeerselError("all four clique sizes must be at least 1")
    blocks = []
    start = 0
    for s in sizes:
        blocks.append(list(range(start, start + s)))
        start += s
    pairs: list[tuple[int, int, Relation]] = []
    for block in blocks:
        pairs.extend(
            (i, j, Relation.FRIEND) for i in block for j in block if i < j
        )
    for a, b in ((0, 1), (2, 3)):
        pairs.extend(
            (min(i, j), max(i, j), Relation.ENEMY)
            for i in blocks[a]
            for j in blocks[b]
        )
    return build_network(start, pairs)


Construction = Theorem4Construction | Theorem5bConstruction


def build_two_state_problem(
    construction: Construction,
    *,
    weights: PreferenceWeights | None = None,
    drop_efficiency_at: int | None = None,
    var_budget: int = DEFAULT_VAR_BUDGET,
) -> FeasibilityProblem:
    """Emit the lattice system; variable (mask, i) sits at index mask*n + i.

    Bit a of the mask says agent a plays her state-two message.  With
    ``weights`` given, the two secondary incentive rows per direction
    collapse into the single weighted row w_f*(friend gain) - w_e*(enemy
    gain) <= 0; otherwise the robust per-sum rows are emitted.
    ``drop_efficiency_at`` (0 or 1) omits that state's efficiency row.
    """
    if drop_efficiency_at not in (None, 0, 1):
        raise PeerselError("drop_efficiency_at indexes a state: 0 or 1")
    state1, state2 = construction.states()
    n = construction.n
    if (1 << n) * n > var_budget:
        raise BudgetExceededError(
            f"lattice needs {(1 << n) * n} variables, budget is {var_budget}"
        )
    mode = construction.mode
    msgs1 = truthful_profile(state1, mode).messages
    msgs2 = truthful_profile(state2, mode).messages
    for a in range(n):
        if msgs1[a] == msgs2[a]:
            raise PeerselError(
                f"agent {a} reports identically in both states; lattice degenerates"
            )
    full = (1 << n) - 1
    prob = FeasibilityProblem(num_vars=(1 << n) * n)
    var = lambda mask, i: mask * n + i

    for mask in range(1 << n):
        prob.le({var(mask, i): Fraction(1) for i in range(n)}, 1, f"validity[m={mask}]")

    for idx, state in ((0, state1), (1, state2)):
        if drop_efficiency_at == idx:
            continue
        mask = 0 if idx == 0 else full
        prob.eq(
            {var(mask, i): Fraction(1) for i in state.needy},
            1,
            f"efficiency[state={idx + 1}]",
        )

    one = Fraction(1)
    for i in range(n):
        bit = 1 << i
        for mask in range(1 << n):
            if mask & bit:
                continue
            lo, hi = mask, mask | bit
            prob.eq(
                {var(lo, i): one, var(hi, i): -one},
                0,
                f"own[i={i},m={lo}]",
            )
            # direction 1: truth = state-1 message (profile lo), deviate to hi
            # direction 2: truth = state-2 message (profile hi), deviate to lo
            for direction, truth, dev, state in (
                (1, lo, hi, state1),
                (2, hi, lo, state2),
            ):
                # the deviator's true relations live in the state whose
                # message is her truth (for the fixed-network construction
                # both states agree)
                fset = state.network.friends_of(i)
                eset = state.network.enemies_of(i)
                if weights is None:
                    if fset:
                        prob.le(
                            _sum_delta(var, fset, dev, truth),
                            0,
                            f"friends[d={direction},i={i},m={lo}]",
                        )
                    if eset:
                        prob.le(
                            _sum_delta(var, eset, truth, dev),
                            0,
                            f"enemies[d={direction},i={i},m={lo}]",
                        )
                elif fset or eset:
                    coeffs: dict[int, Fraction] = {}
                    _accumulate(coeffs, var, fset, dev, weights.w_f)
                    _accumulate(coeffs, var, fset, truth, -weights.w_f)
                    _accumulate(coeffs, var, eset, truth, weights.w_e)
                    _accumulate(coeffs, var, eset, dev, -weights.w_e)
                    prob.le(
                        coeffs, 0, f"weighted[d={direction},i={i},m={lo}]"
                    )
    return prob


def _sum_delta(var, agents, plus_mask, minus_mask) -> dict[int, Fraction]:
    coeffs: dict[int, Fraction] = {}
    _accumulate(coeffs, var, agents, plus_mask, Fraction(1))
    _accumulate(coeffs, var, agents, minus_mask, Fraction(-1))
    return coeffs


def _accumulate(coeffs, var, agents, mask, weight) -> None:
    if weight == 0:
        return
    for j in agents:
        key = var(mask, j)
        coeffs[key] = coeffs.get(key, Fraction(0)) + weight


def impossibility_witness(
    construction: Construction,
    *,
    weights: PreferenceWeights | None = None,
    drop_efficiency_at: int | None = None,
    var_budget: int = DEFAULT_VAR_BUDGET,
) -> LpWitness:
    """Decide whether any valid, efficient, incentive-compatible selection
    rule exists on the construction's two-message lattice."""
    prob = build_two_state_problem(
        construction,
        weights=weights,
        drop_efficiency_at=drop_efficiency_at,
        var_budget=var_budget,
    )
    n = construction.n
    result = solve_feasibility(prob)
    if isinstance(result, InfeasibleResult):
        entries = tuple(
            CertificateEntry(tag=c.tag, multiplier=y)
            for c, y in zip(prob.constraints, result.multipliers)
            if y != 0
        )
        witness = LpWitness(
            status=WitnessStatus.INFEASIBLE,
            n=n,
            variables=prob.num_vars,
            constraints=len(prob.constraints),
            certificate=entries,
            feasible_point=None,
            problem=prob,
        )
    else:
        assert isinstance(result, FeasibleResult)
        point = {
            (idx // n, idx % n): val
            for idx, val in enumerate(result.point)
            if val != 0
        }
        witness = LpWitness(
            status=WitnessStatus.FEASIBLE,
            n=n,
            variables=prob.num_vars,
            constraints=len(prob.constraints),
            certificate=None,
            feasible_point=point,
            problem=prob,
        )
    if not witness.verify():
        raise RuntimeError("witness failed its own exact re-verification")
    return witness
