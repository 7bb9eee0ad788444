"""Instance files and network generators.

An instance file is a small JSON document describing one network, optionally
with a needy set and a prior.  Serialization is canonical — pairs sorted with
i < j, impartial pairs omitted, rationals as "num/den" strings — so golden
files diff cleanly and ``serialize(parse(text))`` is a fixed point.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

from .model import (
    InvalidNetworkError,
    PeerselError,
    Relation,
    RelationNetwork,
    WorldState,
    build_network,
    format_rational,
    parse_rational,
    relation_from_name,
)
from .witness import theorem5b_network


class InstanceFormatError(PeerselError):
    """The instance text is malformed or out of range."""


class GeneratorError(PeerselError):
    """A generator family got invalid parameters."""


@dataclass(frozen=True)
class Instance:
    network: RelationNetwork
    needy: Optional[frozenset[int]] = None
    q: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if self.needy is not None:
            bad = [i for i in self.needy if not 0 <= i < self.network.n]
            if bad:
                raise InstanceFormatError(f"needy agents out of range: {sorted(bad)}")
        if self.q is not None and not 0 < self.q < 1:
            raise InstanceFormatError(f"prior must satisfy 0 < q < 1, got {self.q}")

    def world_state(self) -> WorldState:
        if self.needy is None:
            raise PeerselError("instance carries no needy set")
        return WorldState(self.network, self.needy)


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be an object")
    unknown = set(doc) - {"n", "relations", "needy", "q"}
    if unknown:
        raise InstanceFormatError(f"unknown fields: {sorted(unknown)}")
    try:
        n = doc["n"]
        relations = doc.get("relations", [])
    except KeyError as exc:
        raise InstanceFormatError(f"missing field: {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise InstanceFormatError("n must be an integer")
    labeled = []
    seen: dict[tuple[int, int], str] = {}
    if not isinstance(relations, list):
        raise InstanceFormatError("relations must be a list of [i, j, kind]")
    for entry in relations:
        if not (isinstance(entry, (list, tuple)) and len(entry) == 3):
            raise InstanceFormatError(f"bad relation entry: {entry!r}")
        i, j, kind = entry
        if not all(isinstance(v, int) and not isinstance(v, bool) for v in (i, j)):
            raise InstanceFormatError(f"bad relation endpoints: {entry!r}")
        if not isinstance(kind, str):
            raise InstanceFormatError(f"bad relation kind: {entry!r}")
        key = (min(i, j), max(i, j))
        if key in seen:
            if seen[key] != kind:
                raise InstanceFormatError(
                    f"conflicting labels for pair {key}: {seen[key]} vs {kind}"
                )
            continue  # harmless exact duplicate
        seen[key] = kind
        labeled.append((i, j, relation_from_name(kind)))
    try:
        network = build_network(n, labeled)
    except InvalidNetworkError as exc:
        raise InstanceFormatError(str(exc)) from None
    needy = None
    if "needy" in doc and doc["needy"] is not None:
        raw = doc["needy"]
        if not isinstance(raw, list) or not all(
            isinstance(v, int) and not isinstance(v, bool) for v in raw
        ):
            raise InstanceFormatError("needy must be a list of agent ids")
        needy = frozenset(raw)
    q = None
    if "q" in doc and doc["q"] is not None:
        if not isinstance(doc["q"], str):
            raise InstanceFormatError('q must be a "num/den" string')
        q = parse_rational(doc["q"])
    return Instance(network=network, needy=needy, q=q)


def serialize_instance(inst: Instance) -> str:
    """Canonical JSON: one relation triple per line, needy sorted, q as a string."""
    lines = ["{", f'  "n": {inst.network.n},']
    if inst.network.pairs:
        body = ",\n".join(
            f'    [{i}, {j}, "{rel.value}"]' for i, j, rel in inst.network.pairs
        )
        lines.append(f'  "relations": [\n{body}\n  ]')
    else:
        lines.append('  "relations": []')
    if inst.needy is not None:
        lines[-1] += ","
        lines.append(f'  "needy": {json.dumps(sorted(inst.needy))}')
    if inst.q is not None:
        lines[-1] += ","
        lines.append(f'  "q": "{format_rational(inst.q)}"')
    lines.append("}")
    return "\n".join(lines) + "\n"


def load_instance(path: str | Path) -> Instance:
    return parse_instance(Path(path).read_text())


def save_instance(inst: Instance, path: str | Path) -> None:
    Path(path).write_text(serialize_instance(inst))


# --------------------------------------------------------------------------
# generator families
# --------------------------------------------------------------------------


def _require_n(params: dict, minimum: int = 1) -> int:
    n = params.pop("n", None)
    if not isinstance(n, int) or n < minimum:
        raise GeneratorError(f"need integer n >= {minimum}")
    return n


def _complete(n: int, kind: Relation) -> RelationNetwork:
    return build_network(
        n, [(i, j, kind) for i in range(n) for j in range(i + 1, n)]
    )


def _gen_complete_friend(**params) -> Instance:
    n = _require_n(params, 2)
    _reject_extra(params)
    return Instance(_complete(n, Relation.FRIEND))


def _gen_complete_enemy(**params) -> Instance:
    n = _require_n(params, 2)
    _reject_extra(params)
    return Instance(_complete(n, Relation.ENEMY))


def _gen_complete_impartial(**params) -> Instance:
    n = _require_n(params, 2)
    _reject_extra(params)
    return Instance(build_network(n, []))


def _gen_matching_friends(**params) -> Instance:
    n = _require_n(params, 2)
    _reject_extra(params)
    if n % 2:
        raise GeneratorError("MatchingFriends needs an even n")
    pairs = [(2 * i, 2 * i + 1, Relation.FRIEND) for i in range(n // 2)]
    return Instance(build_network(n, pairs))


def _gen_paper_fig1(**params) -> Instance:
    side = params.pop("side", None)
    n = params.pop("n", 4)
    _reject_extra(params)
    if side not in ("left", "right"):
        raise GeneratorError('side must be "left" or "right"')
    if not isinstance(n, int) or n < 4:
        raise GeneratorError("need integer n >= 4")
    if side == "left":
        s = range(n - 2)
        pairs = [(i, j, Relation.ENEMY) for i in s for j in s if i < j]
        needy = frozenset({0})
    else:
        pairs = [(n - 2, n - 1, Relation.ENEMY)]
        needy = frozenset({n - 1})
    return Instance(build_network(n, pairs), needy=needy)


def _gen_theorem5b_cliques(**params) -> Instance:
    sizes = []
    for name in ("x1", "x2", "y1", "y2"):
        v = params.pop(name, None)
        if not isinstance(v, int) or v < 1:
            raise GeneratorError(f"need integer {name} >= 1")
        sizes.append(v)
    _reject_extra(params)
    return Instance(theorem5b_network(*sizes))


def _as_probability(value, name: str) -> Fraction:
    if isinstance(value, str):
        value = parse_rational(value)
    try:
        p = Fraction(value)
    except (TypeError, ValueError):
        raise GeneratorError(f"{name} must be a rational probability") from None
    if not 0 <= p <= 1:
        raise GeneratorError(f"{name} must lie in [0, 1], got {p}")
    return p


def _gen_random_signed(**params) -> Instance:
    n = _require_n(params, 2)
    p_f = _as_probability(params.pop("p_f", None), "p_f")
    p_e = _as_probability(params.pop("p_e", None), "p_e")
    seed = params.pop("seed", 0)
    _reject_extra(params)
    if p_f + p_e > 1:
        raise GeneratorError("p_f + p_e must not exceed 1")
    if not isinstance(seed, int):
        raise GeneratorError("seed must be an integer")
    rng = random.Random(seed)
    pairs = []
    f_cut, e_cut = float(p_f), float(p_f + p_e)
    for i in range(n):
        for j in range(i + 1, n):
            r = rng.random()
            if r < f_cut:
                pairs.append((i, j, Relation.FRIEND))
            elif r < e_cut:
                pairs.append((i, j, Relation.ENEMY))
    return Instance(build_network(n, pairs))


def _balanced_from_layout(
    clique_sizes: Sequence[int], pairing: Sequence[Sequence[int]]
) -> RelationNetwork:
    if not clique_sizes or any(
        not isinstance(s, int) or s < 1 for s in clique_sizes
    ):
        raise GeneratorError("clique_sizes must be positive integers")
    k = len(clique_sizes)
    used: set[int] = set()
    for pair in pairing:
        if len(pair) != 2:
            raise GeneratorError(f"pairing entries are clique-index pairs: {pair!r}")
        a, b = pair
        if not all(isinstance(v, int) and 0 <= v < k for v in (a, b)) or a == b:
            raise GeneratorError(f"bad clique pair: {pair!r}")
        if a in used or b in used:
            raise GeneratorError("a clique can belong to at most one enemy pair")
        used.update((a, b))
    members: list[list[int]] = []
    start = 0
    for size in clique_sizes:
        members.append(list(range(start, start + size)))
        start += size
    pairs = []
    for group in members:
        pairs.extend(
            (group[a], group[b], Relation.FRIEND)
            for a in range(len(group))
            for b in range(a + 1, len(group))
        )
    for a, b in pairing:
        pairs.extend((min(i, j), max(i, j), Relation.ENEMY) for i in members[a] for j in members[b])
    return build_network(start, pairs)


def _gen_random_balanced(**params) -> Instance:
    clique_sizes = params.pop("clique_sizes", None)
    pairing = params.pop("pairing", None)
    seed = params.pop("seed", None)
    n = params.pop("n", None)
    _reject_extra(params)
    if clique_sizes is not None:
        return Instance(_balanced_from_layout(clique_sizes, pairing or []))
    if not isinstance(n, int) or n < 2:
        raise GeneratorError("sampled layout needs integer n >= 2")
    if not isinstance(seed, int):
        raise GeneratorError("sampled layout needs an integer seed")
    rng = random.Random(("balanced", n, seed).__repr__())
    # random composition of n into positive parts
    sizes, left = [], n
    while left:
        part = rng.randint(1, left)
        sizes.append(part)
        left -= part
    rng.shuffle(sizes)
    order = list(range(len(sizes)))
    rng.shuffle(order)
    pairing = []
    idx = 0
    while idx + 1 < len(order):
        if rng.random() < 0.5:
            pairing.append((order[idx], order[idx + 1]))
            idx += 2
        else:
            idx += 1
    return Instance(_balanced_from_layout(sizes, pairing))


def _reject_extra(params: dict) -> None:
    if params:
        raise GeneratorError(f"unknown parameters: {sorted(params)}")


FAMILIES: dict[str, Callable[..., Instance]] = {
    "CompleteFriend": _gen_complete_friend,
    "CompleteEnemy": _gen_complete_enemy,
    "CompleteImpartial": _gen_complete_impartial,
    "MatchingFriends": _gen_matching_friends,
    "PaperFig1": _gen_paper_fig1,
    "Theorem5bCliques": _gen_theorem5b_cliques,
    "RandomSigned": _gen_random_signed,
    "RandomBalanced": _gen_random_balanced,
}


def generate(family: str, **params) -> Instance:
    """Build an instance from a named family; see FAMILIES for the catalog."""
    try:
        builder = FAMILIES[family]
    except KeyError:
        raise GeneratorError(
            f"unknown family {family!r}; known: {', '.join(sorted(FAMILIES))}"
        ) from None
    return builder(**params)
