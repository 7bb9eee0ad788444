"""Request/response models for the HTTP service (and the CLI that reuses them).

Probabilities, priors and deltas travel as exact "num/den" strings; networks
travel in the same shape as instance files (n + relation triples).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Literal, Optional

from pydantic import BaseModel, Field

from ..model import (
    FullTypeMessage,
    MessageProfile,
    Mode,
    NeedySetMessage,
    RelationNetwork,
    build_network,
    format_rational,
)


class NetworkModel(BaseModel):
    n: int
    relations: list[tuple[int, int, str]] = Field(default_factory=list)

    @classmethod
    def from_network(cls, net: RelationNetwork) -> "NetworkModel":
        return cls(n=net.n, relations=[(i, j, r.value) for i, j, r in net.pairs])

    def to_network(self) -> RelationNetwork:
        return build_network(self.n, list(self.relations))


class MessageModel(BaseModel):
    reporter: int
    needy: list[int] = Field(default_factory=list)
    friends: Optional[list[int]] = None
    enemies: Optional[list[int]] = None

    @classmethod
    def from_message(cls, msg) -> "MessageModel":
        if isinstance(msg, FullTypeMessage):
            return cls(
                reporter=msg.reporter,
                needy=sorted(msg.needy),
                friends=sorted(msg.friends),
                enemies=sorted(msg.enemies),
            )
        return cls(reporter=msg.reporter, needy=sorted(msg.needy))

    def to_message(self, mode: Mode):
        if mode is Mode.NEEDY_ONLY:
            return NeedySetMessage(self.reporter, frozenset(self.needy))
        return FullTypeMessage(
            self.reporter,
            frozenset(self.friends or ()),
            frozenset(self.enemies or ()),
            frozenset(self.needy),
        )


def profile_models(profile: MessageProfile) -> list[MessageModel]:
    return [MessageModel.from_message(m) for m in profile.messages]


def rat(value: Fraction) -> str:
    return format_rational(value)


# ---- run -----------------------------------------------------------------


class RunRequest(BaseModel):
    mechanism: str
    sink: Optional[int] = None
    network: NetworkModel
    needy: list[int] = Field(default_factory=list)
    mode: Optional[Literal["needy-only", "full-type"]] = None
    messages: Optional[list[MessageModel]] = None  # overrides truthful reports


class RunResponse(BaseModel):
    mechanism: str
    mode: str
    probs: list[str]
    total: str


# ---- check (validity + efficiency) ----------------------------------------


class CheckRequest(BaseModel):
    mechanism: str
    sink: Optional[int] = None
    network: NetworkModel
    include_efficiency: bool = True
    budget: Optional[int] = None


class ValidityModel(BaseModel):
    passed: bool
    checked: int
    max_total: str
    violation_total: Optional[str] = None


class EfficiencyCheckModel(BaseModel):
    passed: bool
    checked: int
    failing_needy: Optional[list[int]] = None
    failing_mass: Optional[str] = None


class CheckResponse(BaseModel):
    mechanism: str
    validity: ValidityModel
    efficiency: Optional[EfficiencyCheckModel] = None
    passed: bool


# ---- dsic ------------------------------------------------------------------


class DsicRequest(BaseModel):
    mechanism: str
    sink: Optional[int] = None
    network: Optional[NetworkModel] = None
    n: Optional[int] = None
    exhaustive: bool = True
    samples: Optional[int] = None
    seed: int = 0
    max_violations: int = 100
    budget: Optional[int] = None


class DsicViolationModel(BaseModel):
    agent: int
    own_delta: str
    friend_delta: str
    enemy_delta: str
    base_messages: list[MessageModel]
    deviation: MessageModel


class DsicResponse(BaseModel):
    mechanism: str
    mode: str
    exhaustive: bool
    passed: bool
    bases_checked: int
    deviations_checked: int
    total_violations: int
    violations: list[DsicViolationModel]


# ---- efficiency evaluation --------------------------------------------------


class EfficiencyRequest(BaseModel):
    mechanism: str
    sink: Optional[int] = None
    network: NetworkModel
    q: str
    method: Literal["exact", "mc"] = "exact"
    samples: int = 100_000
    seed: int = 0
    confidence: float = 0.95
    wilson: bool = False


class EfficiencyResponse(BaseModel):
    mechanism: str
    method: str
    value: str
    value_float: float
    half_width: Optional[float] = None
    samples: Optional[int] = None
    seed: Optional[int] = None
    distinct_needy_sets: Optional[int] = None


class MechanismRef(BaseModel):
    mechanism: str
    sink: Optional[int] = None


class CompareRequest(BaseModel):
    mechanisms: list[MechanismRef]
    network: NetworkModel
    q: str
    samples: Optional[int] = None
    seed: int = 0


class CompareRowModel(BaseModel):
    rank: int
    mechanism: str
    value: str
    value_float: float
    half_width: Optional[float] = None


class CompareResponse(BaseModel):
    q: str
    rows: list[CompareRowModel]


# ---- balance / classify ------------------------------------------------------


class BalanceRequest(BaseModel):
    network: NetworkModel


class BalanceResponse(BaseModel):
    balanced: bool
    violation_triple: Optional[tuple[int, int, int]] = None
    violation_rule: Optional[int] = None
    components: Optional[list[list[list[int]]]] = None  # component -> cliques -> agents


class ClassifyRequest(BaseModel):
    network: NetworkModel


class ClassifyResponse(BaseModel):
    admits: bool
    reason: str
    recommended: Optional[MechanismRef] = None
    components: list[list[list[int]]]


# ---- witness -----------------------------------------------------------------


class WitnessRequest(BaseModel):
    construction: Literal["theorem4", "theorem5b"]
    n: int = 4
    x1: int = 1
    x2: int = 1
    y1: int = 1
    y2: int = 1
    weights: Optional[tuple[str, str]] = None
    drop_efficiency_at: Optional[int] = None
    var_budget: int = 8192


class CertificateEntryModel(BaseModel):
    tag: str
    multiplier: str


class PointEntryModel(BaseModel):
    profile_mask: int
    agent: int
    value: str


class WitnessResponse(BaseModel):
    status: Literal["Infeasible", "Feasible"]
    n: int
    variables: int
    constraints: int
    verified: bool
    relaxed: bool
    certificate: Optional[list[CertificateEntryModel]] = None
    feasible_point: Optional[list[PointEntryModel]] = None


# ---- generate -----------------------------------------------------------------


class GenerateRequest(BaseModel):
    family: str
    params: dict[str, Any] = Field(default_factory=dict)


class GenerateResponse(BaseModel):
    family: str
    instance: str
    n: int
    needy: Optional[list[int]] = None
    q: Optional[str] = None
