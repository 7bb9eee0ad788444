"""Uniform handles for the selection mechanisms.

A ``MechanismHandle`` is a small serializable description (kind + sink);
``resolve`` binds it to a network / population size and returns the evaluator
object the verification and efficiency engines drive.  Evaluators expose:

- ``label``: short human-readable name
- ``mode``: which message type they consume
- ``scale``: integer such that scale * probability is always integral
- ``probs(messages) -> tuple[Fraction, ...]``: exact per-profile evaluation
- ``batch_for(space)`` (optional): vectorized evaluator over message-id arrays

External (test-supplied) mechanisms register a factory callable instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

from .known_net import g1_evaluator, g2k_evaluator, g3k_evaluator
from .model import (
    MessageProfile,
    Mode,
    ModeMismatchError,
    PeerselError,
    RelationNetwork,
    SelectionDistribution,
)
from .unknown_net import constant_evaluator, duples_evaluator, rd_evaluator


class MechanismKind(enum.Enum):
    G1 = "g1"
    G2K = "g2k"
    G3K = "g3k"
    RD = "rd"
    DUPLES = "duples"
    CONSTANT = "constant"
    EXTERNAL = "external"


_NEEDS_SINK = {MechanismKind.G2K, MechanismKind.G3K}
_NEEDS_NETWORK = {MechanismKind.G1, MechanismKind.G2K, MechanismKind.G3K}


@dataclass(frozen=True)
class MechanismHandle:
    kind: MechanismKind
    sink: Optional[int] = None
    factory: Optional[Callable] = field(default=None, compare=False)
    ext_label: Optional[str] = None

    def __post_init__(self) -> None:
        if self.kind in _NEEDS_SINK and self.sink is None:
            raise PeerselError(f"{self.kind.value} needs a sink agent (--sink)")
        if self.kind not in _NEEDS_SINK and self.sink is not None:
            raise PeerselError(f"{self.kind.value} takes no sink agent")
        if self.kind is MechanismKind.EXTERNAL and self.factory is None:
            raise PeerselError("external mechanisms need a factory callable")
        if self.kind is not MechanismKind.EXTERNAL and self.factory is not None:
            raise PeerselError("only external mechanisms take a factory")

    @property
    def needs_network(self) -> bool:
        return self.kind in _NEEDS_NETWORK

    @property
    def label(self) -> str:
        if self.kind is MechanismKind.EXTERNAL:
            return self.ext_label or "external"
        if self.sink is not None:
            return f"{self.kind.value}(k={self.sink})"
        return self.kind.value


def parse_mechanism(token: str, sink: int | None = None) -> MechanismHandle:
    """Turn a CLI/service mechanism name into a handle."""
    try:
        kind = MechanismKind(token.lower())
    except ValueError:
        raise PeerselError(f"unknown mechanism: {token!r}") from None
    if kind is MechanismKind.EXTERNAL:
        raise PeerselError("external mechanisms cannot be named on the command line")
    return MechanismHandle(kind=kind, sink=sink if kind in _NEEDS_SINK else None)


def resolve(
    handle: MechanismHandle,
    network: RelationNetwork | None = None,
    n: int | None = None,
):
    """Bind a handle to a concrete evaluator."""
    if handle.needs_network:
        if network is None:
            raise PeerselError(f"{handle.label} requires the relation network")
        n = network.n
    if n is None:
        if network is None:
            raise PeerselError("need a network or an explicit population size")
        n = network.n
    kind = handle.kind
    if kind is MechanismKind.G1:
        return g1_evaluator(network)
    if kind is MechanismKind.G2K:
        return g2k_evaluator(network, handle.sink)
    if kind is MechanismKind.G3K:
        return g3k_evaluator(network, handle.sink)
    if kind is MechanismKind.RD:
        return rd_evaluator(n)
    if kind is MechanismKind.DUPLES:
        return duples_evaluator(n)
    if kind is MechanismKind.CONSTANT:
        return constant_evaluator(n)
    return handle.factory(network, n)


def run_mechanism(
    handle: MechanismHandle,
    profile: MessageProfile,
    network: RelationNetwork | None = None,
) -> SelectionDistribution:
    """Evaluate a mechanism on one profile and validate the result."""
    ev = resolve(handle, network, profile.n)
    if profile.mode is not ev.mode and handle.kind is not MechanismKind.CONSTANT:
        raise ModeMismatchError(
            f"{handle.label} consumes {ev.mode.value} messages, got {profile.mode.value}"
        )
    return SelectionDistribution(ev.probs(profile.messages))
