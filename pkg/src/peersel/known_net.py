"""Selection mechanisms that know the relation network and collect needy reports.

All three mechanisms here take a known ``RelationNetwork`` plus a profile of
``NeedySetMessage`` reports and award the object based on *positive votes*:
agent j gets a positive vote from voter v when v reports j needy.  A candidate
only needs votes from voters standing in a particular relation to her
(impartial voters for ``mechanism_g1``, shared enemies of the sink for
``mechanism_g2k``, shared friends of the sink for ``mechanism_g3k``); voters
outside that relation cannot block her, and a candidate with no relevant
voters is vacuously approved.

``mechanism_g2k`` / ``mechanism_g3k`` designate a sink agent k who receives
whatever probability is left over, so they always distribute total mass 1.
Their incentive guarantees hold when the corresponding intersection condition
(:func:`check_intersection`) is satisfied; the functions themselves are total
either way.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .model import (
    InvalidMessageError,
    MessageProfile,
    Mode,
    ModeMismatchError,
    NeedySetMessage,
    PeerselError,
    Relation,
    RelationNetwork,
    SelectionDistribution,
)


class RelationSelector(enum.Enum):
    """Which relation of the *candidate* qualifies a voter."""

    IMPARTIAL_OF = "impartial_of"
    ENEMY_OF = "enemy_of"
    FRIEND_OF = "friend_of"


_SELECTOR_SET: dict[RelationSelector, Callable[[RelationNetwork, int], frozenset[int]]] = {
    RelationSelector.IMPARTIAL_OF: lambda net, i: net.impartials_of(i),
    RelationSelector.ENEMY_OF: lambda net, i: net.enemies_of(i),
    RelationSelector.FRIEND_OF: lambda net, i: net.friends_of(i),
}


@dataclass(frozen=True)
class PositiveVoteQuery:
    """Ask which agents are approved by the messages of ``targets``.

    Agent j is approved when every voter in ``targets`` who stands in the
    selector relation to j reports j needy.  No qualifying voters means
    vacuous approval.
    """

    targets: frozenset[int]
    selector: RelationSelector


def _require_needy_profile(profile: MessageProfile) -> None:
    if profile.mode is not Mode.NEEDY_ONLY:
        raise ModeMismatchError("these mechanisms take needy-set reports only")


def positive_vote_set(
    network: RelationNetwork, profile: MessageProfile, query: PositiveVoteQuery
) -> frozenset[int]:
    _require_needy_profile(profile)
    if profile.n != network.n:
        raise InvalidMessageError("profile size does not match network")
    select = _SELECTOR_SET[query.selector]
    approved = []
    for j in range(network.n):
        voters = query.targets & select(network, j)
        if all(j in profile.messages[v].needy for v in voters):
            approved.append(j)
    return frozenset(approved)


def mechanism_g1(network: RelationNetwork, profile: MessageProfile) -> SelectionDistribution:
    """Impartial-vote mechanism: i needs unanimous approval from her impartials.

    i's share is 1/|A_i| where A_i is the set of agents approved by the
    messages of i's impartials; agents without unanimous approval get 0.
    """
    _require_needy_profile(profile)
    ev = g1_evaluator(network)
    return SelectionDistribution(ev.probs(profile.messages))


def mechanism_g2k(
    network: RelationNetwork, k: int, profile: MessageProfile
) -> SelectionDistribution:
    """Enemy-vote mechanism with sink k.

    A non-sink agent i is selected only if every shared enemy of i and k
    reports i needy; her share is then split over the agents approved by the
    messages of those shared enemies (the sink never counts as a rival).
    The sink k collects all remaining probability, so total mass is 1.
    """
    _require_needy_profile(profile)
    ev = g2k_evaluator(network, k)
    return SelectionDistribution(ev.probs(profile.messages))


def mechanism_g3k(
    network: RelationNetwork, k: int, profile: MessageProfile
) -> SelectionDistribution:
    """Friend-vote mechanism with sink k; mirror of mechanism_g2k using friends."""
    _require_needy_profile(profile)
    ev = g3k_evaluator(network, k)
    return SelectionDistribution(ev.probs(profile.messages))


class IntersectionKind(enum.Enum):
    IMPARTIAL = "impartial"
    ENEMY = "enemy"
    FRIEND = "friend"


@dataclass(frozen=True)
class IntersectionVerdict:
    satisfied: bool
    witness: Optional[tuple[int, int]] = None  # lexicographically first violating pair


def check_intersection(
    network: RelationNetwork, which: IntersectionKind, k: int | None = None
) -> IntersectionVerdict:
    """Test the overlap condition a mechanism's efficiency guarantee rests on.

    IMPARTIAL: any two agents share an impartial observer.
    ENEMY(k):  any two non-sink agents share an enemy who is also k's enemy.
    FRIEND(k): any two non-sink agents share a friend who is also k's friend.

    "Any two" includes an agent paired with herself, so each agent's own
    voter pool must be nonempty — an empty pool approves vacuously, which is
    exactly what lets a non-needy candidate slip into the selection.
    """
    n = network.n
    if which is IntersectionKind.IMPARTIAL:
        if k is not None:
            raise PeerselError("the impartial-overlap condition takes no sink")
        sets = [network.impartials_of(i) for i in range(n)]
        candidates = range(n)
        base: frozenset[int] | None = None
    else:
        if k is None or not 0 <= k < n:
            raise PeerselError("this condition needs a sink agent k")
        if which is IntersectionKind.ENEMY:
            sets = [network.enemies_of(i) for i in range(n)]
        else:
            sets = [network.friends_of(i) for i in range(n)]
        candidates = [i for i in range(n) if i != k]
        base = sets[k]
    cand = list(candidates)
    for a in range(len(cand)):
        for b in range(a, len(cand)):
            i, j = cand[a], cand[b]
            common = sets[i] & sets[j]
            if base is not None:
                common &= base
            if not common:
                return IntersectionVerdict(False, (i, j))
    return IntersectionVerdict(True, None)


# --------------------------------------------------------------------------
# evaluator factories (shared by the public ops and the verification engine)
# --------------------------------------------------------------------------


def _lcm_upto(n: int) -> int:
    return math.lcm(*range(1, n + 1))


@dataclass
class _NeedyVoteEvaluator:
    """Unified engine for the three vote-based mechanisms.

    Configured by, per candidate i: the voter set whose unanimous approval i
    needs (``member_voters[i]``), the voter set whose messages define i's
    rival pool (``denom_voters[i]``), the candidates excluded from rival
    pools, and an optional sink receiving the residual.
    """

    label: str
    n: int
    member_voters: tuple[frozenset[int], ...]
    denom_voters: tuple[frozenset[int], ...]
    rival_sets: tuple[frozenset[int], ...]  # voters defining rival j's approval wrt i
    candidates: tuple[int, ...]
    excluded_rival: int | None
    sink: int | None
    scale: int
    mode: Mode = Mode.NEEDY_ONLY

    def __post_init__(self) -> None:
        self._cache: list[dict[tuple[int, ...], Fraction]] = [dict() for _ in range(self.n)]
        # per candidate i, the sorted voter list whose messages matter for g_i
        self._keys: list[tuple[int, ...]] = [
            tuple(sorted(self.member_voters[i] | self.denom_voters[i])) for i in range(self.n)
        ]

    def probs(self, messages: tuple[NeedySetMessage, ...]) -> tuple[Fraction, ...]:
        masks = [m.needy_mask for m in messages]
        out = [Fraction(0)] * self.n
        for i in self.candidates:
            key = tuple(masks[v] for v in self._keys[i])
            got = self._cache[i].get(key)
            if got is None:
                got = self._prob_of(i, masks)
                self._cache[i][key] = got
            out[i] = got
        if self.sink is not None:
            out[self.sink] = 1 - sum(out, Fraction(0))
        return tuple(out)

    def _prob_of(self, i: int, masks: list[int]) -> Fraction:
        if any(not (masks[v] >> i) & 1 for v in self.member_voters[i]):
            return Fraction(0)
        pool = 0
        for j in range(self.n):
            if j == self.excluded_rival:
                continue
            voters = self.denom_voters[i] & self.rival_sets[j]
            if all((masks[v] >> j) & 1 for v in voters):
                pool += 1
        return Fraction(1, pool)

    def batch_for(self, space):
        # message ids in the needy-report lattice ARE the needy bitmasks
        if space.mode is not Mode.NEEDY_ONLY:
            return None
        return self.scaled_batch

    def scaled_batch(self, ids: np.ndarray) -> np.ndarray:
        """ids[:, a] is the needy mask reported by agent a; returns scale*g."""
        B = ids.shape[0]
        out = np.zeros((B, self.n), dtype=np.int64)
        for i in self.candidates:
            member = np.ones(B, dtype=bool)
            for v in self.member_voters[i]:
                member &= (ids[:, v] >> i) & 1 == 1
            pool = np.zeros(B, dtype=np.int64)
            for j in range(self.n):
                if j == self.excluded_rival:
                    continue
                approves = np.ones(B, dtype=bool)
                for v in self.denom_voters[i] & self.rival_sets[j]:
                    approves &= (ids[:, v] >> j) & 1 == 1
                pool += approves
            out[:, i] = np.where(member, self.scale // np.maximum(pool, 1), 0)
        if self.sink is not None:
            out[:, self.sink] = self.scale - out.sum(axis=1)
        return out


@functools.lru_cache(maxsize=256)
def g1_evaluator(network: RelationNetwork) -> _NeedyVoteEvaluator:
    n = network.n
    imps = tuple(network.impartials_of(i) for i in range(n))
    return _NeedyVoteEvaluator(
        label="g1",
        n=n,
        member_voters=imps,
        denom_voters=imps,
        rival_sets=imps,
        candidates=tuple(range(n)),
        excluded_rival=None,
        sink=None,
        scale=_lcm_upto(n),
    )


@functools.lru_cache(maxsize=256)
def _sink_evaluator(network: RelationNetwork, k: int, relation: Relation, label: str) -> _NeedyVoteEvaluator:
    n = network.n
    if not 0 <= k < n:
        raise PeerselError(f"sink {k} out of range for n={n}")
    if relation is Relation.ENEMY:
        sets = tuple(network.enemies_of(i) for i in range(n))
    else:
        sets = tuple(network.friends_of(i) for i in range(n))
    shared_with_sink = tuple(sets[i] & sets[k] for i in range(n))
    return _NeedyVoteEvaluator(
        label=f"{label}(k={k})",
        n=n,
        member_voters=shared_with_sink,
        denom_voters=shared_with_sink,
        rival_sets=sets,
        candidates=tuple(i for i in range(n) if i != k),
        excluded_rival=k,
        sink=k,
        scale=_lcm_upto(n),
    )


def g2k_evaluator(network: RelationNetwork, k: int) -> _NeedyVoteEvaluator:
    return _sink_evaluator(network, k, Relation.ENEMY, "g2k")


def g3k_evaluator(network: RelationNetwork, k: int) -> _NeedyVoteEvaluator:
    return _sink_evaluator(network, k, Relation.FRIEND, "g3k")
