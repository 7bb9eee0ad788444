"""Core data model: signed relation networks, world states, messages, distributions.

Agents are integers ``0 .. n-1``.  Every unordered pair of distinct agents
carries exactly one relation label (friend / enemy / impartial); pairs not
mentioned when building a network default to impartial.  Relations are
symmetric and agents hold no relation to themselves.
"""

from __future__ import annotations

import enum
import functools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class PeerselError(Exception):
    """Base class for domain errors raised by this package."""


class InvalidNetworkError(PeerselError):
    pass


class InvalidMessageError(PeerselError):
    pass


class InvalidDistributionError(PeerselError):
    pass


class ModeMismatchError(PeerselError):
    """A mechanism was fed messages of the wrong reporting mode."""


class BudgetExceededError(PeerselError):
    """An enumeration would exceed the configured profile budget."""


class Relation(enum.Enum):
    FRIEND = "friend"
    ENEMY = "enemy"
    IMPARTIAL = "impartial"

    def __repr__(self) -> str:  # keep test output compact
        return f"Relation.{self.name}"


_REL_BY_NAME = {r.value: r for r in Relation}


def relation_from_name(name: str) -> Relation:
    try:
        return _REL_BY_NAME[name.lower()]
    except KeyError:
        raise InvalidNetworkError(f"unknown relation kind: {name!r}") from None


def _check_agent(i: int, n: int) -> None:
    if not isinstance(i, int) or isinstance(i, bool) or not 0 <= i < n:
        raise InvalidNetworkError(f"agent id {i!r} out of range for n={n}")


@dataclass(frozen=True)
class RelationNetwork:
    """Complete symmetric labelling of agent pairs.

    ``pairs`` stores only the non-impartial labels, canonically ordered
    (i < j, sorted lexicographically); impartial is the default fill, so two
    networks describing the same labelling always compare equal.
    """

    n: int
    pairs: tuple[tuple[int, int, Relation], ...]

    @functools.cached_property
    def _lookup(self) -> dict[tuple[int, int], Relation]:
        return {(i, j): r for i, j, r in self.pairs}

    def relation(self, i: int, j: int) -> Relation:
        _check_agent(i, self.n)
        _check_agent(j, self.n)
        if i == j:
            raise InvalidNetworkError("agents hold no relation to themselves")
        if i > j:
            i, j = j, i
        return self._lookup.get((i, j), Relation.IMPARTIAL)

    @functools.cached_property
    def _sets(self) -> tuple[tuple[frozenset[int], frozenset[int], frozenset[int]], ...]:
        friends: list[set[int]] = [set() for _ in range(self.n)]
        enemies: list[set[int]] = [set() for _ in range(self.n)]
        for i, j, r in self.pairs:
            if r is Relation.FRIEND:
                friends[i].add(j)
                friends[j].add(i)
            elif r is Relation.ENEMY:
                enemies[i].add(j)
                enemies[j].add(i)
        out = []
        everybody = set(range(self.n))
        for i in range(self.n):
            f = frozenset(friends[i])
            e = frozenset(enemies[i])
            imp = frozenset(everybody - f - e - {i})
            out.append((f, e, imp))
        return tuple(out)

    def friends_of(self, i: int) -> frozenset[int]:
        _check_agent(i, self.n)
        return self._sets[i][0]

    def enemies_of(self, i: int) -> frozenset[int]:
        _check_agent(i, self.n)
        return self._sets[i][1]

    def impartials_of(self, i: int) -> frozenset[int]:
        _check_agent(i, self.n)
        return self._sets[i][2]

    def permuted(self, perm: Sequence[int]) -> "RelationNetwork":
        """Relabel agents: agent ``i`` becomes ``perm[i]``."""
        if sorted(perm) != list(range(self.n)):
            raise InvalidNetworkError("perm must be a permutation of 0..n-1")
        relabeled = [(perm[i], perm[j], r) for i, j, r in self.pairs]
        return build_network(self.n, relabeled)

    def __str__(self) -> str:
        body = ", ".join(f"({i},{j},{r.value})" for i, j, r in self.pairs)
        return f"RelationNetwork(n={self.n}, [{body}])"


def build_network(
    n: int, labeled_pairs: Iterable[tuple[int, int, Relation | str]] = ()
) -> RelationNetwork:
    """Build a network from explicit pair labels; unmentioned pairs are impartial.

    Rejects n < 2, out-of-range ids, self-pairs and duplicate labels for the
    same unordered pair (even when the labels agree).
    """
    if not isinstance(n, int) or n < 2:
        raise InvalidNetworkError(f"need at least two agents, got n={n!r}")
    seen: dict[tuple[int, int], Relation] = {}
    for i, j, r in labeled_pairs:
        _check_agent(i, n)
        _check_agent(j, n)
        if i == j:
            raise InvalidNetworkError(f"self-pair ({i},{j}) is not allowed")
        if isinstance(r, str):
            r = relation_from_name(r)
        key = (i, j) if i < j else (j, i)
        if key in seen:
            raise InvalidNetworkError(f"duplicate label for pair {key}")
        seen[key] = r
    canonical = tuple(
        (i, j, r) for (i, j), r in sorted(seen.items()) if r is not Relation.IMPARTIAL
    )
    return RelationNetwork(n=n, pairs=canonical)


def sets_of(network: RelationNetwork, i: int) -> tuple[frozenset[int], frozenset[int], frozenset[int]]:
    """Return (friends, enemies, impartials) of agent ``i``."""
    return (network.friends_of(i), network.enemies_of(i), network.impartials_of(i))


@dataclass(frozen=True)
class WorldState:
    """A network together with the set of agents who currently need the object."""

    network: RelationNetwork
    needy: frozenset[int]

    def __post_init__(self) -> None:
        needy = frozenset(self.needy)
        object.__setattr__(self, "needy", needy)
        for i in needy:
            _check_agent(i, self.network.n)

    @property
    def n(self) -> int:
        return self.network.n


class Mode(enum.Enum):
    """What agents report: just who is needy, or their whole local view."""

    NEEDY_ONLY = "needy-only"
    FULL_TYPE = "full-type"


@dataclass(frozen=True)
class NeedySetMessage:
    """Agent ``reporter`` announces the set of agents she claims are needy."""

    reporter: int
    needy: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "needy", frozenset(self.needy))

    @functools.cached_property
    def needy_mask(self) -> int:
        m = 0
        for j in self.needy:
            m |= 1 << j
        return m


@dataclass(frozen=True)
class FullTypeMessage:
    """Agent ``reporter`` announces her friend set, enemy set and a needy set.

    Friends and enemies must be disjoint and exclude the reporter; everyone
    else is implicitly reported impartial.  The needy set may include anyone,
    the reporter included.
    """

    reporter: int
    friends: frozenset[int]
    enemies: frozenset[int]
    needy: frozenset[int]

    def __post_init__(self) -> None:
        f = frozenset(self.friends)
        e = frozenset(self.enemies)
        nd = frozenset(self.needy)
        object.__setattr__(self, "friends", f)
        object.__setattr__(self, "enemies", e)
        object.__setattr__(self, "needy", nd)
        if self.reporter in f or self.reporter in e:
            raise InvalidMessageError("reporter cannot list herself as friend or enemy")
        if f & e:
            raise InvalidMessageError(f"friend/enemy overlap: {sorted(f & e)}")

    def impartials(self, n: int) -> frozenset[int]:
        return frozenset(range(n)) - self.friends - self.enemies - {self.reporter}

    @functools.cached_property
    def needy_mask(self) -> int:
        m = 0
        for j in self.needy:
            m |= 1 << j
        return m


Message = NeedySetMessage | FullTypeMessage


@dataclass(frozen=True)
class MessageProfile:
    """One message per agent, indexed by reporter; all of one mode."""

    mode: Mode
    messages: tuple[Message, ...]

    def __post_init__(self) -> None:
        msgs = tuple(self.messages)
        object.__setattr__(self, "messages", msgs)
        want = NeedySetMessage if self.mode is Mode.NEEDY_ONLY else FullTypeMessage
        for idx, m in enumerate(msgs):
            if not isinstance(m, want):
                raise InvalidMessageError(
                    f"message {idx} is {type(m).__name__}, expected {want.__name__}"
                )
            if m.reporter != idx:
                raise InvalidMessageError(
                    f"message at position {idx} has reporter {m.reporter}"
                )

    @property
    def n(self) -> int:
        return len(self.messages)

    def replace(self, i: int, message: Message) -> "MessageProfile":
        if message.reporter != i:
            raise InvalidMessageError("replacement message has the wrong reporter")
        msgs = list(self.messages)
        msgs[i] = message
        return MessageProfile(self.mode, tuple(msgs))


@dataclass(frozen=True)
class SelectionDistribution:
    """Probabilities of receiving the object; exact rationals, total mass <= 1.

    The remaining mass ``1 - sum`` is the probability that the object is
    withheld from everyone.
    """

    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        probs = tuple(Fraction(p) for p in self.probs)
        object.__setattr__(self, "probs", probs)
        total = Fraction(0)
        for idx, p in enumerate(probs):
            if p < 0 or p > 1:
                raise InvalidDistributionError(f"probability {idx} out of [0,1]: {p}")
            total += p
        if total > 1:
            raise InvalidDistributionError(f"probabilities sum to {total} > 1")

    @property
    def n(self) -> int:
        return len(self.probs)

    def total(self) -> Fraction:
        return sum(self.probs, Fraction(0))

    def mass_on(self, agents: Iterable[int]) -> Fraction:
        return sum((self.probs[i] for i in agents), Fraction(0))

    def support(self) -> frozenset[int]:
        return frozenset(i for i, p in enumerate(self.probs) if p > 0)

    def __getitem__(self, i: int) -> Fraction:
        return self.probs[i]

    def __iter__(self):
        return iter(self.probs)


@dataclass(frozen=True)
class NeedyPrior:
    """Independent per-agent probability of being needy, strictly inside (0,1)."""

    q: Fraction

    def __post_init__(self) -> None:
        q = Fraction(self.q)
        object.__setattr__(self, "q", q)
        if not 0 < q < 1:
            raise PeerselError(f"prior must satisfy 0 < q < 1, got {q}")


def truthful_profile(state: WorldState, mode: Mode) -> MessageProfile:
    """The profile in which every agent reports her true local information."""
    n = state.n
    if mode is Mode.NEEDY_ONLY:
        msgs: tuple[Message, ...] = tuple(
            NeedySetMessage(i, state.needy) for i in range(n)
        )
    else:
        msgs = tuple(
            FullTypeMessage(
                i,
                state.network.friends_of(i),
                state.network.enemies_of(i),
                state.needy,
            )
            for i in range(n)
        )
    return MessageProfile(mode, msgs)


_RATIONAL_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: str) -> Fraction:
    """Parse "num/den" or "num" into an exact Fraction."""
    m = _RATIONAL_RE.match(text)
    if not m:
        raise PeerselError(f"not a rational: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise PeerselError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction, decimals: int | None = None) -> str:
    """Render exactly as "num/den" ("num" for integers), or fixed-point if asked."""
    if decimals is not None:
        scaled = x * 10**decimals
        # round half to even on the exact rational, then print fixed-point
        whole = round(scaled)
        sign = "-" if whole < 0 else ""
        whole = abs(whole)
        digits = str(whole).rjust(decimals + 1, "0")
        if decimals == 0:
            return sign + digits
        return f"{sign}{digits[:-decimals] or '0'}.{digits[-decimals:]}"
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
