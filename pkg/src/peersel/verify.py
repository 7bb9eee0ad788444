"""Verification engine: validity, dominant-strategy incentives, efficiency.

The incentive check asks, for every examined base profile and every agent i,
whether some alternative message would give i (treating her base message as
her truth) a higher own-probability, or the same own-probability with a
friend-mass gain or enemy-mass loss — i.e. an improvement at *some* positive
preference weights.  No such deviation may exist.

Two execution routes produce identical verdicts:

- a vectorized route that tabulates scale*probability as int64 over the whole
  message lattice (exactness is preserved because every achievable
  probability times the evaluator's ``scale`` is integral — asserted);
- a plain-Fraction route (``reference_dsic``) used for cross-checking and for
  evaluators that don't declare a scale.

Exhaustive sweeps refuse to run past a profile budget; sampling (seeded,
reproducible) covers the larger spaces.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .mechanisms import MechanismHandle, resolve
from .model import (
    BudgetExceededError,
    FullTypeMessage,
    Message,
    MessageProfile,
    Mode,
    NeedySetMessage,
    PeerselError,
    RelationNetwork,
    WorldState,
    truthful_profile,
)
from .prefs import DeviationDelta, PreferenceWeights, witness_weights

DEFAULT_PROFILE_BUDGET = 1 << 20


@dataclass(frozen=True)
class Exhaustive:
    """Sweep every profile of the message lattice (refuses above the budget)."""

    budget: int = DEFAULT_PROFILE_BUDGET


@dataclass(frozen=True)
class Sampled:
    """Check ``count`` seeded random base profiles against all deviations."""

    count: int = 1000
    seed: int = 0


Strategy = Exhaustive | Sampled


# --------------------------------------------------------------------------
# message spaces
# --------------------------------------------------------------------------


class MessageSpace:
    """Indexable enumeration of each agent's possible messages."""

    mode: Mode
    n: int
    sizes: tuple[int, ...]

    def agent_messages(self, a: int) -> Sequence[Message]:
        raise NotImplementedError

    def message(self, a: int, mid: int) -> Message:
        raise NotImplementedError

    def id_of(self, msg: Message) -> int:
        raise NotImplementedError

    @property
    def profile_count(self) -> int:
        out = 1
        for s in self.sizes:
            out *= s
        return out

    def profile_ids(self, profile: MessageProfile) -> tuple[int, ...]:
        return tuple(self.id_of(m) for m in profile.messages)

    def profile_from_ids(self, ids: Sequence[int]) -> MessageProfile:
        msgs = tuple(self.message(a, mid) for a, mid in enumerate(ids))
        return MessageProfile(self.mode, msgs)


class NeedyOnlySpace(MessageSpace):
    """Message id = bitmask of the reported needy set."""

    def __init__(self, n: int):
        self.mode = Mode.NEEDY_ONLY
        self.n = n
        self.sizes = tuple([1 << n] * n)
        self._cache: list[list[NeedySetMessage] | None] = [None] * n

    def agent_messages(self, a: int) -> Sequence[NeedySetMessage]:
        if self._cache[a] is None:
            self._cache[a] = [self.message(a, mid) for mid in range(1 << self.n)]
        return self._cache[a]

    def message(self, a: int, mid: int) -> NeedySetMessage:
        return NeedySetMessage(a, frozenset(j for j in range(self.n) if (mid >> j) & 1))

    def id_of(self, msg: Message) -> int:
        assert isinstance(msg, NeedySetMessage)
        return msg.needy_mask


class FullTypeSpace(MessageSpace):
    """Message id = (relation code) * 2^n + (needy bitmask).

    The relation code is a base-3 number over the other agents in increasing
    order: digit 0 = impartial, 1 = friend, 2 = enemy.
    """

    def __init__(self, n: int):
        self.mode = Mode.FULL_TYPE
        self.n = n
        size = 3 ** (n - 1) * (1 << n)
        self.sizes = tuple([size] * n)
        self._cache: list[list[FullTypeMessage] | None] = [None] * n

    def _others(self, a: int) -> list[int]:
        return [j for j in range(self.n) if j != a]

    def agent_messages(self, a: int) -> Sequence[FullTypeMessage]:
        if self._cache[a] is None:
            self._cache[a] = [self.message(a, mid) for mid in range(self.sizes[a])]
        return self._cache[a]

    def message(self, a: int, mid: int) -> FullTypeMessage:
        nmask = mid & ((1 << self.n) - 1)
        rel = mid >> self.n
        friends, enemies = [], []
        for j in self._others(a):
            rel, digit = divmod(rel, 3)
            if digit == 1:
                friends.append(j)
            elif digit == 2:
                enemies.append(j)
        return FullTypeMessage(
            a,
            frozenset(friends),
            frozenset(enemies),
            frozenset(j for j in range(self.n) if (nmask >> j) & 1),
        )

    def id_of(self, msg: Message) -> int:
        assert isinstance(msg, FullTypeMessage)
        rel = 0
        for j in reversed(self._others(msg.reporter)):
            rel *= 3
            if j in msg.friends:
                rel += 1
            elif j in msg.enemies:
                rel += 2
        return rel * (1 << self.n) + msg.needy_mask


def space_for(mode: Mode, n: int) -> MessageSpace:
    return NeedyOnlySpace(n) if mode is Mode.NEEDY_ONLY else FullTypeSpace(n)


# --------------------------------------------------------------------------
# reports
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DsicViolation:
    agent: int
    base: MessageProfile
    deviation: Message
    delta: DeviationDelta
    weights: Optional[PreferenceWeights]  # weights at which the gain is strict


@dataclass(frozen=True)
class DsicReport:
    mechanism: str
    mode: Mode
    exhaustive: bool
    bases_checked: int
    deviations_checked: int
    total_violations: int
    violations: tuple[DsicViolation, ...]

    @property
    def passed(self) -> bool:
        return self.total_violations == 0


@dataclass(frozen=True)
class ValidityReport:
    mechanism: str
    checked: int
    max_total: Fraction
    violation: Optional[MessageProfile] = None
    violation_total: Optional[Fraction] = None

    @property
    def passed(self) -> bool:
        return self.violation is None


@dataclass(frozen=True)
class EfficiencyReport:
    mechanism: str
    checked: int
    failing_needy: Optional[frozenset[int]] = None
    failing_mass: Optional[Fraction] = None

    @property
    def passed(self) -> bool:
        return self.failing_needy is None


# --------------------------------------------------------------------------
# lattice tabulation
# --------------------------------------------------------------------------

_CHUNK = 1 << 16


def _strides(sizes: Sequence[int]) -> list[int]:
    out, acc = [], 1
    for s in sizes:
        out.append(acc)
        acc *= s
    return out


def _digit_matrix(idx: np.ndarray, sizes: Sequence[int], strides: Sequence[int]) -> np.ndarray:
    cols = [((idx // strides[a]) % sizes[a]).astype(np.int64) for a in range(len(sizes))]
    return np.stack(cols, axis=1)


def _tabulate_lattice(evaluator, space: MessageSpace, budget: int) -> np.ndarray:
    """scale * probability for every profile of the lattice, shape (P, n)."""
    P = space.profile_count
    if P > budget:
        raise BudgetExceededError(
            f"lattice has {P} profiles, over the budget of {budget}"
        )
    n = space.n
    sizes, strides = space.sizes, _strides(space.sizes)
    G = np.empty((P, n), dtype=np.int64)
    batch = evaluator.batch_for(space) if hasattr(evaluator, "batch_for") else None
    if batch is not None:
        for lo in range(0, P, _CHUNK):
            hi = min(lo + _CHUNK, P)
            ids = _digit_matrix(np.arange(lo, hi, dtype=np.int64), sizes, strides)
            G[lo:hi] = batch(ids)
    else:
        scale = evaluator.scale
        per_agent = [space.agent_messages(a) for a in range(n)]
        row = np.empty(n, dtype=np.int64)
        for p in range(P):
            msgs = tuple(
                per_agent[a][(p // strides[a]) % sizes[a]] for a in range(n)
            )
            probs = evaluator.probs(msgs)
            for a in range(n):
                num, den = probs[a].numerator, probs[a].denominator
                q, r = divmod(scale * num, den)
                if r:
                    raise PeerselError(
                        f"{evaluator.label}: scale {scale} does not clear denominator {den}"
                    )
                row[a] = q
            G[p] = row
    return G


def _masked_sums(G: np.ndarray) -> np.ndarray:
    """M[:, mask] = sum of G columns in mask (dynamic programming over bits)."""
    P, n = G.shape
    M = np.zeros((P, 1 << n), dtype=np.int64)
    for mask in range(1, 1 << n):
        low = mask & -mask
        M[:, mask] = M[:, mask ^ low] + G[:, low.bit_length() - 1]
    return M


def _mask_of(agents: Iterable[int]) -> int:
    m = 0
    for a in agents:
        m |= 1 << a
    return m


# --------------------------------------------------------------------------
# incentive check
# --------------------------------------------------------------------------


def check_dsic(
    handle: MechanismHandle,
    network: RelationNetwork | None = None,
    strategy: Strategy = Exhaustive(),
    *,
    n: int | None = None,
    max_violations: int = 100,
) -> DsicReport:
    """Hunt for profitable unilateral deviations of the mechanism.

    Every base profile supplies, per agent, the message treated as that
    agent's truth.  Relations used to rank outcomes come from the network
    (needy-report mechanisms) or from the agent's own base message
    (full-type mechanisms).
    """
    ev = resolve(handle, network, n)
    space = space_for(ev.mode, network.n if network is not None else n)
    if ev.mode is Mode.NEEDY_ONLY and network is None:
        raise PeerselError("needy-report mechanisms need the network for incentives")
    if isinstance(strategy, Exhaustive):
        return _dsic_exhaustive(ev, space, network, strategy.budget, max_violations)
    return _dsic_sampled(ev, space, network, strategy, max_violations)


def _true_sets(
    space: MessageSpace, network: RelationNetwork | None, agent: int, base_msg: Message
) -> tuple[frozenset[int], frozenset[int]]:
    if space.mode is Mode.NEEDY_ONLY:
        return network.friends_of(agent), network.enemies_of(agent)
    assert isinstance(base_msg, FullTypeMessage)
    return base_msg.friends, base_msg.enemies


def _record_violation(
    out: list[DsicViolation],
    space: MessageSpace,
    ids: Sequence[int],
    agent: int,
    dev_id: int,
    own: Fraction,
    fsum: Fraction,
    esum: Fraction,
) -> None:
    base = space.profile_from_ids(ids)
    delta = DeviationDelta(own=own, friend_sum=fsum, enemy_sum=esum)
    out.append(
        DsicViolation(
            agent=agent,
            base=base,
            deviation=space.message(agent, dev_id),
            delta=delta,
            weights=witness_weights(delta),
        )
    )


def _dsic_exhaustive(ev, space, network, budget, max_violations) -> DsicReport:
    G = _tabulate_lattice(ev, space, budget)
    scale = ev.scale
    P, n = G.shape
    sizes, strides = space.sizes, _strides(space.sizes)
    base_idx = np.arange(P, dtype=np.int64)
    violations: list[DsicViolation] = []
    total = 0
    deviations = 0

    # NEEDY_ONLY: relations are profile-independent, compare over the whole lattice
    if space.mode is Mode.NEEDY_ONLY:
        fr = [sorted(network.friends_of(i)) for i in range(n)]
        en = [sorted(network.enemies_of(i)) for i in range(n)]
        for i in range(n):
            D = ((base_idx // strides[i]) % sizes[i]).astype(np.int64)
            own_b = G[:, i]
            f_b = G[:, fr[i]].sum(axis=1) if fr[i] else np.zeros(P, dtype=np.int64)
            e_b = G[:, en[i]].sum(axis=1) if en[i] else np.zeros(P, dtype=np.int64)
            for d in range(sizes[i]):
                sel2 = base_idx + (d - D) * strides[i]
                own_d = G[sel2, i]
                f_d = f_b[sel2]
                e_d = e_b[sel2]
                viol = (own_d > own_b) | (
                    (own_d == own_b) & ((f_d > f_b) | (e_d < e_b))
                )
                deviations += P
                if viol.any():
                    where = np.nonzero(viol)[0]
                    total += len(where)
                    for p in where[: max(0, max_violations - len(violations))]:
                        ids = [(int(p) // strides[a]) % sizes[a] for a in range(n)]
                        _record_violation(
                            violations, space, ids, i, d,
                            Fraction(int(own_d[p]) - int(own_b[p]), scale),
                            Fraction(int(f_d[p]) - int(f_b[p]), scale),
                            Fraction(int(e_d[p]) - int(e_b[p]), scale),
                        )
        return DsicReport(
            mechanism=ev.label, mode=space.mode, exhaustive=True,
            bases_checked=P, deviations_checked=deviations,
            total_violations=total, violations=tuple(violations),
        )

    # FULL_TYPE: group base profiles by the deviator's base message
    M = _masked_sums(G)
    for i in range(n):
        D = ((base_idx // strides[i]) % sizes[i]).astype(np.int64)
        for mu in range(sizes[i]):
            sel = np.nonzero(D == mu)[0]
            msg = space.message(i, mu)
            fm = _mask_of(msg.friends)
            em = _mask_of(msg.enemies)
            own_b = G[sel, i]
            f_b = M[sel, fm]
            e_b = M[sel, em]
            for d in range(sizes[i]):
                if d == mu:
                    continue
                sel2 = sel + (d - mu) * strides[i]
                own_d = G[sel2, i]
                f_d = M[sel2, fm]
                e_d = M[sel2, em]
                viol = (own_d > own_b) | (
                    (own_d == own_b) & ((f_d > f_b) | (e_d < e_b))
                )
                deviations += len(sel)
                if viol.any():
                    where = np.nonzero(viol)[0]
                    total += len(where)
                    for t in where[: max(0, max_violations - len(violations))]:
                        p = int(sel[t])
                        ids = [(p // strides[a]) % sizes[a] for a in range(n)]
                        _record_violation(
                            violations, space, ids, i, d,
                            Fraction(int(own_d[t]) - int(own_b[t]), scale),
                            Fraction(int(f_d[t]) - int(f_b[t]), scale),
                            Fraction(int(e_d[t]) - int(e_b[t]), scale),
                        )
    return DsicReport(
        mechanism=ev.label, mode=space.mode, exhaustive=True,
        bases_checked=P, deviations_checked=deviations,
        total_violations=total, violations=tuple(violations),
    )


def _dsic_sampled(ev, space, network, strategy: Sampled, max_violations) -> DsicReport:
    n = space.n
    sizes = space.sizes
    rng = random.Random(strategy.seed)
    batch = ev.batch_for(space) if hasattr(ev, "batch_for") else None
    scale = ev.scale
    violations: list[DsicViolation] = []
    total = 0
    deviations = 0

    # deviation template: for each agent a block of rows sweeping a's message
    blocks = []
    offset = 1  # row 0 is the base profile itself
    for a in range(n):
        blocks.append((a, offset, offset + sizes[a]))
        offset += sizes[a]
    R = offset

    for _ in range(strategy.count):
        base_ids = tuple(rng.randrange(sizes[a]) for a in range(n))
        rows = np.tile(np.array(base_ids, dtype=np.int64), (R, 1))
        for a, lo, hi in blocks:
            rows[lo:hi, a] = np.arange(sizes[a], dtype=np.int64)
        if batch is not None:
            Grows = batch(rows)
        else:
            Grows = np.empty((R, n), dtype=np.int64)
            for r in range(R):
                msgs = tuple(space.message(a, int(rows[r, a])) for a in range(n))
                probs = ev.probs(msgs)
                for a in range(n):
                    num, den = probs[a].numerator, probs[a].denominator
                    q, rem = divmod(scale * num, den)
                    if rem:
                        raise PeerselError(
                            f"{ev.label}: scale {scale} does not clear denominator {den}"
                        )
                    Grows[r, a] = q
        base_row = Grows[0]
        for a, lo, hi in blocks:
            fs, es = _true_sets(space, network, a, space.message(a, base_ids[a]))
            fcols = sorted(fs)
            ecols = sorted(es)
            own_b = int(base_row[a])
            f_b = int(base_row[fcols].sum()) if fcols else 0
            e_b = int(base_row[ecols].sum()) if ecols else 0
            seg = Grows[lo:hi]
            own_d = seg[:, a]
            f_d = seg[:, fcols].sum(axis=1) if fcols else np.zeros(hi - lo, dtype=np.int64)
            e_d = seg[:, ecols].sum(axis=1) if ecols else np.zeros(hi - lo, dtype=np.int64)
            viol = (own_d > own_b) | ((own_d == own_b) & ((f_d > f_b) | (e_d < e_b)))
            viol[base_ids[a]] = False
            deviations += sizes[a] - 1
            if viol.any():
                where = np.nonzero(viol)[0]
                total += len(where)
                for d in where[: max(0, max_violations - len(violations))]:
                    _record_violation(
                        violations, space, base_ids, a, int(d),
                        Fraction(int(own_d[d]) - own_b, scale),
                        Fraction(int(f_d[d]) - f_b, scale),
                        Fraction(int(e_d[d]) - e_b, scale),
                    )
    return DsicReport(
        mechanism=ev.label, mode=space.mode, exhaustive=False,
        bases_checked=strategy.count, deviations_checked=deviations,
        total_violations=total, violations=tuple(violations),
    )


def reference_dsic(
    handle: MechanismHandle,
    network: RelationNetwork | None = None,
    *,
    n: int | None = None,
    bases: Iterable[Sequence[int]] | None = None,
    budget: int = DEFAULT_PROFILE_BUDGET,
    max_violations: int = 100,
) -> DsicReport:
    """Plain-Fraction incentive sweep; slow, used to cross-check the engine."""
    ev = resolve(handle, network, n)
    space = space_for(ev.mode, network.n if network is not None else n)
    nn = space.n
    sizes = space.sizes
    swept_all = bases is None
    if bases is None:
        if space.profile_count > budget:
            raise BudgetExceededError("reference sweep over budget")
        bases = itertools.product(*(range(s) for s in sizes))
    cache: dict[tuple[int, ...], tuple[Fraction, ...]] = {}

    def probs_of(ids: tuple[int, ...]) -> tuple[Fraction, ...]:
        got = cache.get(ids)
        if got is None:
            msgs = tuple(space.message(a, ids[a]) for a in range(nn))
            got = ev.probs(msgs)
            cache[ids] = got
        return got

    violations: list[DsicViolation] = []
    total = 0
    bases_checked = 0
    deviations = 0
    for base in bases:
        base = tuple(base)
        bases_checked += 1
        p = probs_of(base)
        for i in range(nn):
            fs, es = _true_sets(space, network, i, space.message(i, base[i]))
            own_b = p[i]
            f_b = sum((p[j] for j in fs), Fraction(0))
            e_b = sum((p[j] for j in es), Fraction(0))
            for d in range(sizes[i]):
                if d == base[i]:
                    continue
                deviations += 1
                ids2 = base[:i] + (d,) + base[i + 1 :]
                p2 = probs_of(ids2)
                own_g = p2[i] - own_b
                f_g = sum((p2[j] for j in fs), Fraction(0)) - f_b
                e_g = sum((p2[j] for j in es), Fraction(0)) - e_b
                if own_g > 0 or (own_g == 0 and (f_g > 0 or e_g < 0)):
                    total += 1
                    if len(violations) < max_violations:
                        _record_violation(
                            violations, space, base, i, d, own_g, f_g, e_g
                        )
    return DsicReport(
        mechanism=ev.label, mode=space.mode, exhaustive=swept_all,
        bases_checked=bases_checked, deviations_checked=deviations,
        total_violations=total, violations=tuple(violations),
    )


# --------------------------------------------------------------------------
# validity and efficiency
# --------------------------------------------------------------------------


def check_validity(
    handle: MechanismHandle,
    network: RelationNetwork | None = None,
    profiles: Iterable[MessageProfile] | None = None,
    *,
    n: int | None = None,
    budget: int = DEFAULT_PROFILE_BUDGET,
) -> ValidityReport:
    """Confirm total selection mass never exceeds 1 (exact arithmetic).

    With no explicit profiles, sweeps the whole message lattice (within
    budget) using the vectorized route when available.
    """
    ev = resolve(handle, network, n)
    nn = network.n if network is not None else n
    space = space_for(ev.mode, nn)
    if profiles is None:
        G = _tabulate_lattice(ev, space, budget)
        sums = G.sum(axis=1)
        worst = int(sums.max())
        report_max = Fraction(worst, ev.scale)
        bad = np.nonzero(sums > ev.scale)[0]
        if len(bad):
            p = int(bad[0])
            sizes, strides = space.sizes, _strides(space.sizes)
            ids = [(p // strides[a]) % sizes[a] for a in range(nn)]
            return ValidityReport(
                mechanism=ev.label, checked=len(sums), max_total=report_max,
                violation=space.profile_from_ids(ids),
                violation_total=Fraction(int(sums[p]), ev.scale),
            )
        return ValidityReport(mechanism=ev.label, checked=len(sums), max_total=report_max)
    checked = 0
    max_total = Fraction(0)
    for prof in profiles:
        checked += 1
        probs = ev.probs(prof.messages)
        t = sum(probs, Fraction(0))
        if t > max_total:
            max_total = t
        if t > 1 or any(p < 0 for p in probs):
            return ValidityReport(
                mechanism=ev.label, checked=checked, max_total=max_total,
                violation=prof, violation_total=t,
            )
    return ValidityReport(mechanism=ev.label, checked=checked, max_total=max_total)


def check_efficiency(
    handle: MechanismHandle,
    network: RelationNetwork,
    *,
    budget: int = DEFAULT_PROFILE_BUDGET,
) -> EfficiencyReport:
    """At every truthful profile with someone needy, the needy must get mass 1."""
    ev = resolve(handle, network)
    n = network.n
    if (1 << n) - 1 > budget:
        raise BudgetExceededError(f"2^{n}-1 needy sets exceed the budget")
    checked = 0
    for nmask in range(1, 1 << n):
        needy = frozenset(j for j in range(n) if (nmask >> j) & 1)
        prof = truthful_profile(WorldState(network, needy), ev.mode)
        probs = ev.probs(prof.messages)
        mass = sum((probs[j] for j in needy), Fraction(0))
        checked += 1
        if mass != 1:
            return EfficiencyReport(
                mechanism=ev.label, checked=checked,
                failing_needy=needy, failing_mass=mass,
            )
    return EfficiencyReport(mechanism=ev.label, checked=checked)
