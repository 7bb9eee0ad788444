"""How often a mechanism reaches a needy agent when neediness is random.

Each agent is independently needy with probability q.  Exact evaluation
enumerates needy sets (everyone reports truthfully), weights each set's needy
mass by its prior probability, and sums in exact rationals.  The Monte-Carlo
estimator draws needy sets with a counter-based per-sample generator, so its
output depends only on (seed, samples) — never on chunking or worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from statistics import NormalDist
from typing import Iterable, Sequence

import numpy as np

from .mechanisms import MechanismHandle, resolve
from .model import (
    BudgetExceededError,
    FullTypeMessage,
    Mode,
    NeedyPrior,
    PeerselError,
    RelationNetwork,
    WorldState,
    truthful_profile,
)
from .verify import space_for

EXACT_AGENT_BUDGET = 20


def _as_q(q: Fraction | NeedyPrior) -> Fraction:
    if isinstance(q, NeedyPrior):
        return q.q
    q = Fraction(q)
    if not 0 < q < 1:
        raise PeerselError(f"prior must satisfy 0 < q < 1, got {q}")
    return q


def _threads() -> int:
    raw = os.environ.get("PEERSEL_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _truthful_row_base(ev, network: RelationNetwork) -> tuple[np.ndarray, int]:
    """Per-agent message-id offsets so that id = offset + needy mask."""
    n = network.n
    if ev.mode is Mode.NEEDY_ONLY:
        return np.zeros(n, dtype=np.int64), n
    space = space_for(Mode.FULL_TYPE, n)
    offs = np.empty(n, dtype=np.int64)
    for a in range(n):
        msg = FullTypeMessage(
            a, network.friends_of(a), network.enemies_of(a), frozenset()
        )
        offs[a] = space.id_of(msg)
    return offs, n


def needy_mass_by_mask(
    handle: MechanismHandle, network: RelationNetwork, masks: Sequence[int]
) -> list[Fraction]:
    """Exact mass the mechanism puts on the needy set, per needy bitmask,
    with everyone reporting truthfully."""
    ev = resolve(handle, network)
    n = network.n
    offs, _ = _truthful_row_base(ev, network)
    space = space_for(ev.mode, n)
    # Needy-only evaluators vectorize straight off the masks; full-type ones
    # tabulate per-message pick tables first, which only pays for itself when
    # there are many rows to amortize it over (and costs real memory past n=6).
    use_batch = ev.mode is Mode.NEEDY_ONLY or (n <= 6 and len(masks) >= 4096)
    batch = ev.batch_for(space) if use_batch and hasattr(ev, "batch_for") else None
    masks_arr = np.asarray(list(masks), dtype=np.int64)
    if batch is not None:
        rows = offs[None, :] + masks_arr[:, None]
        G = batch(rows)
        mass = np.zeros(len(masks_arr), dtype=np.int64)
        for i in range(n):
            mass += G[:, i] * ((masks_arr >> i) & 1)
        return [Fraction(int(v), ev.scale) for v in mass]

    def mass_of(mask: int) -> Fraction:
        needy = frozenset(j for j in range(n) if (mask >> j) & 1)
        prof = truthful_profile(WorldState(network, needy), ev.mode)
        probs = ev.probs(prof.messages)
        return sum((probs[j] for j in needy), Fraction(0))

    workers = min(_threads(), len(masks_arr)) or 1
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(mass_of, (int(m) for m in masks_arr)))
    return [mass_of(int(m)) for m in masks_arr]


def exact_efficiency(
    handle: MechanismHandle, network: RelationNetwork, q: Fraction | NeedyPrior
) -> Fraction:
    """Probability the object reaches a needy agent, summed exactly over all
    needy sets under the independent prior."""
    q = _as_q(q)
    n = network.n
    if n > EXACT_AGENT_BUDGET:
        raise BudgetExceededError(
            f"exact mode enumerates 2^{n} needy sets; use the MC estimator"
        )
    weights = [q**k * (1 - q) ** (n - k) for k in range(n + 1)]
    masks = list(range(1, 1 << n))
    masses = needy_mass_by_mask(handle, network, masks)
    total = Fraction(0)
    for mask, mass in zip(masks, masses):
        if mass:
            total += weights[mask.bit_count()] * mass
    return total


@dataclass(frozen=True)
class DegreeProfile:
    """Per-agent counts of friends and impartials (enemies are the rest)."""

    n: int
    counts: tuple[tuple[int, int], ...]  # (friends, impartials) per agent


def degree_profile(network: RelationNetwork) -> DegreeProfile:
    return DegreeProfile(
        n=network.n,
        counts=tuple(
            (len(network.friends_of(i)), len(network.impartials_of(i)))
            for i in range(network.n)
        ),
    )


def closed_form_prd(
    network: RelationNetwork | DegreeProfile, q: Fraction | NeedyPrior
) -> Fraction:
    """Random dictatorship's efficiency from the degree profile alone.

    A dictator with f friends reaches a needy agent unless all f are
    healthy: 1 - (1-q)^f.  With no friends she falls back on her i
    impartials, and with neither on everyone else (n-1 agents).
    """
    q = _as_q(q)
    prof = network if isinstance(network, DegreeProfile) else degree_profile(network)
    n = prof.n
    total = Fraction(0)
    for f, i in prof.counts:
        exponent = f if f > 0 else (i if i > 0 else n - 1)
        total += 1 - (1 - q) ** exponent
    return total / n


def rd_equals_prior_condition(network: RelationNetwork) -> bool:
    """True iff random dictatorship's efficiency collapses to q: every
    dictator's fallback group is a single agent."""
    n = network.n
    for f, i in degree_profile(network).counts:
        exponent = f if f > 0 else (i if i > 0 else n - 1)
        if exponent != 1:
            return False
    return True


def duples_sb_lower_bound(n: int, q: Fraction) -> Fraction:
    """Efficiency floor for the pairwise-duel mechanism on balanced networks."""
    if n < 3:
        raise PeerselError("the bound is stated for n >= 3")
    q = Fraction(q)
    return q + q * (1 - q) * Fraction(3 * n - 8, 8 * (n - 1))


# --------------------------------------------------------------------------
# Monte Carlo
# --------------------------------------------------------------------------

_SM_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_SM_M1 = np.uint64(0xBF58476D1CE4E5B9)
_SM_M2 = np.uint64(0x94D049BB133111EB)


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = (x + _SM_GAMMA).astype(np.uint64)
    x ^= x >> np.uint64(30)
    x *= _SM_M1
    x ^= x >> np.uint64(27)
    x *= _SM_M2
    x ^= x >> np.uint64(31)
    return x


def _sample_needy_masks(n: int, q: Fraction, samples: int, seed: int) -> np.ndarray:
    """One uint64 needy bitmask per sample; sample s, agent a consumes the
    counter value s*n + a, so any chunking yields identical draws."""
    if n > 63:
        raise BudgetExceededError("MC sampling packs needy sets into 64-bit masks")
    threshold = np.uint64((q.numerator << 64) // q.denominator)
    key = int(_splitmix64(np.array([seed % (1 << 64)], dtype=np.uint64))[0])
    masks = np.zeros(samples, dtype=np.uint64)
    chunk = 1 << 20
    for lo in range(0, samples, chunk):
        hi = min(lo + chunk, samples)
        idx = np.arange(lo, hi, dtype=np.uint64) * np.uint64(n)
        sub = np.zeros(hi - lo, dtype=np.uint64)
        for a in range(n):
            u = _splitmix64(np.uint64(key) + idx + np.uint64(a))
            sub |= (u < threshold).astype(np.uint64) << np.uint64(a)
        masks[lo:hi] = sub
    return masks


@dataclass(frozen=True)
class EfficiencyEstimate:
    mechanism: str
    mean: Fraction  # exact average of the sampled needy masses
    half_width: float
    confidence: float
    samples: int
    seed: int
    method: str  # "normal" or "wilson"
    distinct_needy_sets: int

    @property
    def mean_float(self) -> float:
        return float(self.mean)


def mc_efficiency(
    handle: MechanismHandle,
    network: RelationNetwork,
    q: Fraction | NeedyPrior,
    samples: int,
    seed: int,
    *,
    confidence: float = 0.95,
    wilson: bool = False,
) -> EfficiencyEstimate:
    """Estimate efficiency by sampling needy sets from the prior.

    Each distinct sampled needy set is evaluated once, exactly; the estimate
    is the exact rational average of the sampled masses.  The half-width uses
    the normal approximation by default (Wilson behind the flag, exact for
    0/1-valued masses and a documented approximation otherwise).
    """
    if samples < 1:
        raise PeerselError("need at least one sample")
    q = _as_q(q)
    ev = resolve(handle, network)
    masks = _sample_needy_masks(network.n, q, samples, seed)
    uniq, counts = np.unique(masks, return_counts=True)
    masses = needy_mass_by_mask(handle, network, [int(m) for m in uniq])
    total = Fraction(0)
    total_sq = Fraction(0)
    for cnt, mass in zip(counts, masses):
        c = int(cnt)
        total += c * mass
        total_sq += c * mass * mass
    mean = total / samples
    z = NormalDist().inv_cdf((1 + confidence) / 2)
    if wilson:
        p = float(mean)
        s = samples
        denom = 1 + z * z / s
        half = z * ((p * (1 - p) / s + z * z / (4 * s * s)) ** 0.5) / denom
        method = "wilson"
    else:
        if samples > 1:
            var = (total_sq / samples - mean * mean) * Fraction(samples, samples - 1)
            half = z * (max(float(var), 0.0) / samples) ** 0.5
        else:
            half = 0.0
        method = "normal"
    return EfficiencyEstimate(
        mechanism=ev.label,
        mean=mean,
        half_width=half,
        confidence=confidence,
        samples=samples,
        seed=seed,
        method=method,
        distinct_needy_sets=len(uniq),
    )


# --------------------------------------------------------------------------
# comparison
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonRow:
    mechanism: str
    value: Fraction
    rank: int  # 1-based; equal exact values share a rank
    half_width: float | None = None  # set when estimated


@dataclass(frozen=True)
class ComparisonTable:
    q: Fraction
    rows: tuple[ComparisonRow, ...]  # sorted by value, descending

    def as_text(self) -> str:
        width = max(len(r.mechanism) for r in self.rows)
        lines = []
        for r in self.rows:
            val = f"{r.value}" if r.half_width is None else f"{float(r.value):.6f}±{r.half_width:.6f}"
            lines.append(f"{r.rank:>2}  {r.mechanism:<{width}}  {val}")
        return "\n".join(lines)


def compare_mechanisms(
    network: RelationNetwork,
    q: Fraction | NeedyPrior,
    handles: Iterable[MechanismHandle],
    *,
    samples: int | None = None,
    seed: int = 0,
) -> ComparisonTable:
    """Rank mechanisms by efficiency on one network (exact unless ``samples``
    is given); exact-value ties share their rank."""
    q = _as_q(q)
    entries = []
    for h in handles:
        if samples is None:
            val = exact_efficiency(h, network, q)
            entries.append((resolve(h, network).label, val, None))
        else:
            est = mc_efficiency(h, network, q, samples, seed)
            entries.append((est.mechanism, est.mean, est.half_width))
    entries.sort(key=lambda t: t[1], reverse=True)
    rows = []
    for label, val, hw in entries:
        rank = 1 + sum(1 for _, v, _ in entries if v > val)
        rows.append(ComparisonRow(mechanism=label, value=val, rank=rank, half_width=hw))
    return ComparisonTable(q=q, rows=tuple(rows))
