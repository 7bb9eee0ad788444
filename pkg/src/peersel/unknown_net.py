"""Selection mechanisms that elicit the whole local view from each agent.

Nothing about the network is known in advance here: every agent files a
``FullTypeMessage`` (her friends, her enemies, who she thinks is needy), and
the mechanism works purely from those reports.

``mechanism_rd`` averages n dictatorships: each agent in turn acts as
dictator and her report induces a uniform lottery over the most deserving
nonempty group she names — needy friends first, then friends, then needy
impartials, impartials, needy enemies, enemies.

``mechanism_duples`` runs a majority contest between every unordered pair of
agents: each outside voter ranks the two contestants by the same six-tier
hierarchy read off her own report and votes for the strictly better-ranked
one (equal ranks abstain).  The pair's probability share 2/(n(n-1)) goes to
the majority winner, split on a tie.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import (
    FullTypeMessage,
    MessageProfile,
    Mode,
    ModeMismatchError,
    SelectionDistribution,
)


def _require_full_profile(profile: MessageProfile) -> None:
    if profile.mode is not Mode.FULL_TYPE:
        raise ModeMismatchError("these mechanisms take full-type reports only")


def mechanism_constant(n: int) -> SelectionDistribution:
    """The report-independent benchmark: everyone gets 1/n."""
    return SelectionDistribution(tuple(Fraction(1, n) for _ in range(n)))


def hierarchy_tiers(msg: FullTypeMessage, n: int) -> tuple[frozenset[int], ...]:
    """Six groups, most deserving first, as seen from one agent's report.

    Order: needy friends, other friends, needy impartials, other impartials,
    needy enemies, other enemies.  The groups partition everyone but the
    reporter; her own neediness never matters.
    """
    f, e, nd = msg.friends, msg.enemies, msg.needy
    imp = msg.impartials(n)
    return (f & nd, f - nd, imp & nd, imp - nd, e & nd, e - nd)


@functools.lru_cache(maxsize=200_000)
def _pick_probs(msg: FullTypeMessage, n: int) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * n
    for tier in hierarchy_tiers(msg, n):
        if tier:
            share = Fraction(1, len(tier))
            for j in tier:
                out[j] = share
            break
    return tuple(out)


def dictator_pick(profile: MessageProfile, j: int) -> SelectionDistribution:
    """The uniform lottery agent j's report induces when she alone decides."""
    _require_full_profile(profile)
    msg = profile.messages[j]
    assert isinstance(msg, FullTypeMessage)
    return SelectionDistribution(_pick_probs(msg, profile.n))


def mechanism_rd(profile: MessageProfile) -> SelectionDistribution:
    """Random dictatorship: a uniformly drawn agent's pick decides."""
    _require_full_profile(profile)
    ev = rd_evaluator(profile.n)
    return SelectionDistribution(ev.probs(profile.messages))


@functools.lru_cache(maxsize=200_000)
def _rank_vector(msg: FullTypeMessage, n: int) -> tuple[int, ...]:
    """Tier index (1 = best .. 6 = worst) of every agent in msg's hierarchy;
    the reporter herself gets 0 and must never be looked up."""
    ranks = [0] * n
    for level, tier in enumerate(hierarchy_tiers(msg, n), start=1):
        for j in tier:
            ranks[j] = level
    return tuple(ranks)


@dataclass(frozen=True)
class PairVoteTally:
    """Outcome of the vote between contestants j < k."""

    j: int
    k: int
    votes_j: int
    votes_k: int
    voters: int  # how many agents were eligible to vote

    @property
    def abstentions(self) -> int:
        return self.voters - self.votes_j - self.votes_k


def duple_vote(profile: MessageProfile, pair: tuple[int, int]) -> PairVoteTally:
    """Tally the outside voters' pairwise comparison of two contestants."""
    _require_full_profile(profile)
    j, k = pair
    if j == k or not (0 <= j < profile.n and 0 <= k < profile.n):
        raise ValueError(f"bad contestant pair: {pair}")
    if j > k:
        j, k = k, j
    n = profile.n
    vj = vk = 0
    for i in range(n):
        if i == j or i == k:
            continue
        ranks = _rank_vector(profile.messages[i], n)
        if ranks[j] < ranks[k]:
            vj += 1
        elif ranks[k] < ranks[j]:
            vk += 1
    return PairVoteTally(j=j, k=k, votes_j=vj, votes_k=vk, voters=n - 2)


def mechanism_duples(profile: MessageProfile) -> SelectionDistribution:
    """Every unordered pair fights a majority duel for an equal slice of mass."""
    _require_full_profile(profile)
    ev = duples_evaluator(profile.n)
    return SelectionDistribution(ev.probs(profile.messages))


# --------------------------------------------------------------------------
# evaluator factories
# --------------------------------------------------------------------------


def _lcm_upto(n: int) -> int:
    import math

    return math.lcm(*range(1, n + 1))


class _RdEvaluator:
    label = "rd"
    mode = Mode.FULL_TYPE

    def __init__(self, n: int):
        self.n = n
        self.pick_scale = _lcm_upto(max(n - 1, 1))
        self.scale = n * self.pick_scale

    def probs(self, messages: tuple[FullTypeMessage, ...]) -> tuple[Fraction, ...]:
        n = self.n
        total = [Fraction(0)] * n
        for m in messages:
            pick = _pick_probs(m, n)
            for i in range(n):
                if pick[i]:
                    total[i] += pick[i]
        return tuple(t / n for t in total)

    def batch_for(self, space) -> "np.ndarray | None":
        tables = []
        for a in range(self.n):
            msgs = space.agent_messages(a)
            tab = np.zeros((len(msgs), self.n), dtype=np.int64)
            for mid, m in enumerate(msgs):
                pick = _pick_probs(m, self.n)
                for i in range(self.n):
                    if pick[i]:
                        tab[mid, i] = self.pick_scale * pick[i].numerator // pick[i].denominator
            tables.append(tab)

        def batch(ids: np.ndarray) -> np.ndarray:
            G = tables[0][ids[:, 0]].copy()
            for a in range(1, self.n):
                G += tables[a][ids[:, a]]
            return G

        return batch


class _DuplesEvaluator:
    label = "duples"
    mode = Mode.FULL_TYPE

    def __init__(self, n: int):
        self.n = n
        self.scale = n * (n - 1)
        self._pairs = [(j, k) for j in range(n) for k in range(j + 1, n)]

    def probs(self, messages: tuple[FullTypeMessage, ...]) -> tuple[Fraction, ...]:
        n = self.n
        weight = Fraction(2, n * (n - 1))
        out = [Fraction(0)] * n
        ranks = [_rank_vector(m, n) for m in messages]
        for j, k in self._pairs:
            vj = vk = 0
            for i in range(n):
                if i == j or i == k:
                    continue
                if ranks[i][j] < ranks[i][k]:
                    vj += 1
                elif ranks[i][k] < ranks[i][j]:
                    vk += 1
            if vj > vk:
                out[j] += weight
            elif vk > vj:
                out[k] += weight
            else:
                half = weight / 2
                out[j] += half
                out[k] += half
        return tuple(out)

    def batch_for(self, space):
        n = self.n
        tables = []
        for a in range(n):
            msgs = space.agent_messages(a)
            tab = np.zeros((len(msgs), n), dtype=np.int8)
            for mid, m in enumerate(msgs):
                tab[mid] = _rank_vector(m, n)
            tables.append(tab)

        def batch(ids: np.ndarray) -> np.ndarray:
            B = ids.shape[0]
            G = np.zeros((B, n), dtype=np.int64)
            ranks = [tables[a][ids[:, a]] for a in range(n)]  # each (B, n) int8
            for j, k in self._pairs:
                vj = np.zeros(B, dtype=np.int16)
                vk = np.zeros(B, dtype=np.int16)
                for i in range(n):
                    if i == j or i == k:
                        continue
                    rij = ranks[i][:, j]
                    rik = ranks[i][:, k]
                    vj += rij < rik
                    vk += rik < rij
                # winner takes 2 half-shares of the pair, a tie gives 1 each
                G[:, j] += np.where(vj > vk, 2, np.where(vj == vk, 1, 0))
                G[:, k] += np.where(vk > vj, 2, np.where(vj == vk, 1, 0))
            return G

        return batch


class _ConstantEvaluator:
    label = "constant"
    mode = Mode.FULL_TYPE  # accepts any mode in practice; engine decides

    def __init__(self, n: int):
        self.n = n
        self.scale = n

    def probs(self, messages) -> tuple[Fraction, ...]:
        return tuple(Fraction(1, self.n) for _ in range(self.n))

    def batch_for(self, space):
        n = self.n

        def batch(ids: np.ndarray) -> np.ndarray:
            return np.full((ids.shape[0], n), 1, dtype=np.int64)

        return batch


@functools.lru_cache(maxsize=64)
def rd_evaluator(n: int) -> _RdEvaluator:
    return _RdEvaluator(n)


@functools.lru_cache(maxsize=64)
def duples_evaluator(n: int) -> _DuplesEvaluator:
    return _DuplesEvaluator(n)


@functools.lru_cache(maxsize=64)
def constant_evaluator(n: int) -> _ConstantEvaluator:
    return _ConstantEvaluator(n)
