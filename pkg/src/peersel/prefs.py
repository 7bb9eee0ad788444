"""Agent preferences over selection distributions.

An agent cares first about her own probability of getting the object; among
outcomes where that ties, she trades off her friends' total probability
against her enemies' total probability with positive weights (w_f, w_e).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .model import PeerselError, SelectionDistribution


@dataclass(frozen=True)
class PreferenceWeights:
    w_f: Fraction
    w_e: Fraction

    def __post_init__(self) -> None:
        wf = Fraction(self.w_f)
        we = Fraction(self.w_e)
        object.__setattr__(self, "w_f", wf)
        object.__setattr__(self, "w_e", we)
        if wf <= 0 or we <= 0:
            raise PeerselError("preference weights must be strictly positive")


@dataclass(frozen=True)
class DeviationDelta:
    """Per-component gains of one distribution over another, from i's viewpoint.

    Each field is (value at the first distribution) minus (value at the second).
    """

    own: Fraction
    friend_sum: Fraction
    enemy_sum: Fraction


def deviation_delta(
    i: int,
    dist: SelectionDistribution,
    baseline: SelectionDistribution,
    friends: Iterable[int],
    enemies: Iterable[int],
) -> DeviationDelta:
    friends = frozenset(friends)
    enemies = frozenset(enemies)
    if i in friends or i in enemies or friends & enemies:
        raise PeerselError("friend/enemy sets must exclude i and be disjoint")
    return DeviationDelta(
        own=dist[i] - baseline[i],
        friend_sum=dist.mass_on(friends) - baseline.mass_on(friends),
        enemy_sum=dist.mass_on(enemies) - baseline.mass_on(enemies),
    )


def strictly_prefers(
    i: int,
    dist: SelectionDistribution,
    other: SelectionDistribution,
    friends: Iterable[int],
    enemies: Iterable[int],
    weights: PreferenceWeights,
) -> bool:
    """Does agent i strictly prefer ``dist`` to ``other`` at these weights?"""
    d = deviation_delta(i, dist, other, friends, enemies)
    if d.own != 0:
        return d.own > 0
    return weights.w_f * d.friend_sum - weights.w_e * d.enemy_sum > 0


def robust_improvement(delta: DeviationDelta) -> bool:
    """True when some positive weights would make this a strict improvement.

    Own probability dominates lexicographically, so a positive own-gain
    improves at every weight; with own-gain zero, any friend gain or enemy
    loss can be made decisive by choosing the weights; a negative own-gain
    never improves.
    """
    if delta.own > 0:
        return True
    if delta.own < 0:
        return False
    return delta.friend_sum > 0 or delta.enemy_sum < 0


def witness_weights(delta: DeviationDelta) -> PreferenceWeights | None:
    """Concrete positive weights at which the delta is a strict improvement.

    Returns None when ``robust_improvement`` is false.
    """
    if not robust_improvement(delta):
        return None
    if delta.own > 0:
        return PreferenceWeights(Fraction(1), Fraction(1))
    f, e = delta.friend_sum, delta.enemy_sum
    if f > 0:
        if e <= 0:
            return PreferenceWeights(Fraction(1), Fraction(1))
        # need w_f*f > w_e*e: take w_e = 1, w_f = (e/f) + 1
        return PreferenceWeights(e / f + 1, Fraction(1))
    # f <= 0, e < 0: need w_f*f > w_e*e, take w_f = 1, w_e = (f/e) + 1
    return PreferenceWeights(Fraction(1), f / e + 1)
