"""Structural balance: triple rules, clique decomposition, and the n>=4
classification of balanced networks by whether any valid mechanism can be
simultaneously efficient and incentive compatible.

Balance here means three closure rules on triples (impartial pairs carry no
edge and impose nothing):

1. a friend of my friend is my friend,
2. an enemy of my enemy is my friend,
3. a friend of my enemy (equivalently, an enemy of my friend) is my enemy.

On a balanced network every connected component of the friend-or-enemy graph
collapses into one friendship clique, or two friendship cliques with complete
mutual enmity between them.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .mechanisms import MechanismHandle, MechanismKind
from .model import PeerselError, Relation, RelationNetwork, build_network


class UnbalancedNetworkError(PeerselError):
    pass


@dataclass(frozen=True)
class BalanceViolation:
    triple: tuple[int, int, int]
    rule: int  # 1, 2 or 3 as in the module docstring


@dataclass(frozen=True)
class BalanceVerdict:
    balanced: bool
    violation: Optional[BalanceViolation] = None


def check_structural_balance(network: RelationNetwork) -> BalanceVerdict:
    """Scan triples in lexicographic order; report the first broken rule.

    Within a triple {i, j, k}, each member in turn acts as the pivot whose
    two incident edges are the rule's premise; the opposite edge is the
    conclusion.
    """
    n = network.n
    F, E = Relation.FRIEND, Relation.ENEMY
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                for pivot, a, b in ((i, j, k), (j, i, k), (k, i, j)):
                    left = network.relation(pivot, a)
                    right = network.relation(pivot, b)
                    opposite = network.relation(a, b)
                    if left is F and right is F:
                        if opposite is not F:
                            return BalanceVerdict(False, BalanceViolation((i, j, k), 1))
                    elif left is E and right is E:
                        if opposite is not F:
                            return BalanceVerdict(False, BalanceViolation((i, j, k), 2))
                    elif {left, right} == {F, E}:
                        if opposite is not E:
                            return BalanceVerdict(False, BalanceViolation((i, j, k), 3))
    return BalanceVerdict(True)


@dataclass(frozen=True)
class EfComponent:
    """A connected component of the friend-or-enemy graph, as its cliques."""

    cliques: tuple[frozenset[int], ...]  # one or two, ordered by smallest member

    @property
    def members(self) -> frozenset[int]:
        out: frozenset[int] = frozenset()
        for c in self.cliques:
            out |= c
        return out

    @property
    def has_enmity(self) -> bool:
        return len(self.cliques) == 2


@dataclass(frozen=True)
class BalanceDecomposition:
    n: int
    components: tuple[EfComponent, ...]  # ordered by smallest member


def decompose(network: RelationNetwork) -> BalanceDecomposition:
    """Split a balanced network into friendship cliques grouped by enmity."""
    verdict = check_structural_balance(network)
    if not verdict.balanced:
        raise UnbalancedNetworkError(
            f"network is not balanced: triple {verdict.violation.triple} "
            f"breaks rule {verdict.violation.rule}"
        )
    n = network.n
    seen = [False] * n
    comps: list[EfComponent] = []
    for start in range(n):
        if seen[start]:
            continue
        # flood over friend-or-enemy edges
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in network.friends_of(u) | network.enemies_of(u):
                if not seen[v]:
                    seen[v] = True
                    queue.append(v)
        first = frozenset({comp[0]} | (network.friends_of(comp[0]) & set(comp)))
        second = frozenset(set(comp) - first)
        for clique in (first, second):
            for a in clique:
                for b in clique:
                    if a < b and network.relation(a, b) is not Relation.FRIEND:
                        raise UnbalancedNetworkError(
                            f"component of {start} does not split into cliques"
                        )
        for a in first:
            for b in second:
                if network.relation(a, b) is not Relation.ENEMY:
                    raise UnbalancedNetworkError(
                        f"component of {start} lacks complete enmity across cliques"
                    )
        cliques = tuple(
            sorted((c for c in (first, second) if c), key=min)
        )
        comps.append(EfComponent(cliques=cliques))
    comps.sort(key=lambda c: min(c.members))
    return BalanceDecomposition(n=n, components=tuple(comps))


def network_from_decomposition(decomp: BalanceDecomposition) -> RelationNetwork:
    """Inverse of decompose: friendship inside cliques, enmity across a
    component's two cliques, impartiality everywhere else."""
    pairs: list[tuple[int, int, Relation]] = []
    for comp in decomp.components:
        for clique in comp.cliques:
            pairs.extend(
                (a, b, Relation.FRIEND) for a in clique for b in clique if a < b
            )
        if comp.has_enmity:
            x, y = comp.cliques
            pairs.extend(
                (min(a, b), max(a, b), Relation.ENEMY) for a in x for b in y
            )
    return build_network(decomp.n, pairs)


class Theorem5Reason(enum.Enum):
    SINGLE_F_COMPONENT = "SingleFComponent"
    AT_LEAST_3_EF_COMPONENTS = "AtLeast3EFComponents"
    ONE_EF_NOT_F = "OneEFNotF"
    EXACTLY_TWO_EF = "ExactlyTwoEF"


@dataclass(frozen=True)
class Theorem5Verdict:
    admits: bool
    reason: Theorem5Reason
    recommended: Optional[MechanismHandle]
    decomposition: BalanceDecomposition


def classify_theorem5(network: RelationNetwork) -> Theorem5Verdict:
    """For a balanced network on at least four agents, decide whether any
    valid mechanism can be both efficient and incentive compatible, and if
    so recommend one.

    A single all-friends clique admits the friend-vote sink mechanism with
    the lowest-indexed sink; three or more components admit the
    impartial-vote mechanism (any two agents then share an outside
    impartial).  One component containing enmity, or exactly two components,
    admits nothing.
    """
    if network.n < 4:
        raise PeerselError("classification is defined for n >= 4")
    decomp = decompose(network)
    k = len(decomp.components)
    if k == 1:
        comp = decomp.components[0]
        if not comp.has_enmity:
            return Theorem5Verdict(
                admits=True,
                reason=Theorem5Reason.SINGLE_F_COMPONENT,
                recommended=MechanismHandle(MechanismKind.G3K, sink=0),
                decomposition=decomp,
            )
        return Theorem5Verdict(
            admits=False,
            reason=Theorem5Reason.ONE_EF_NOT_F,
            recommended=None,
            decomposition=decomp,
        )
    if k >= 3:
        return Theorem5Verdict(
            admits=True,
            reason=Theorem5Reason.AT_LEAST_3_EF_COMPONENTS,
            recommended=MechanismHandle(MechanismKind.G1),
            decomposition=decomp,
        )
    return Theorem5Verdict(
        admits=False,
        reason=Theorem5Reason.EXACTLY_TWO_EF,
        recommended=None,
        decomposition=decomp,
    )
