"""One pure function per endpoint; the CLI calls these in-process and the
FastAPI app exposes them over HTTP.  All raise ``PeerselError`` subclasses on
domain failures — transport layers translate those."""

from __future__ import annotations

from fractions import Fraction

from ..balance import check_structural_balance, classify_theorem5, decompose
from ..efficiency import compare_mechanisms, exact_efficiency, mc_efficiency
from ..instances import Instance, generate, serialize_instance
from ..mechanisms import MechanismHandle, MechanismKind, parse_mechanism, resolve
from ..model import (
    MessageProfile,
    Mode,
    PeerselError,
    WorldState,
    parse_rational,
    truthful_profile,
)
from ..prefs import PreferenceWeights
from ..verify import Exhaustive, Sampled, check_dsic, check_efficiency, check_validity
from ..witness import (
    Theorem4Construction,
    Theorem5bConstruction,
    WitnessStatus,
    impossibility_witness,
)
from . import schemas as S


def _handle(req) -> MechanismHandle:
    return parse_mechanism(req.mechanism, req.sink)


def handle_run(req: S.RunRequest) -> S.RunResponse:
    handle = _handle(req)
    network = req.network.to_network()
    ev = resolve(handle, network)
    mode = ev.mode
    if req.mode is not None:
        wanted = Mode(req.mode)
        if wanted is not mode and handle.kind is not MechanismKind.CONSTANT:
            raise PeerselError(
                f"{handle.label} consumes {mode.value} messages, not {req.mode}"
            )
        mode = wanted
    if req.messages is not None:
        profile = MessageProfile(
            mode, tuple(m.to_message(mode) for m in req.messages)
        )
    else:
        state = WorldState(network, frozenset(req.needy))
        profile = truthful_profile(state, mode)
    probs = ev.probs(profile.messages)
    return S.RunResponse(
        mechanism=handle.label,
        mode=mode.value,
        probs=[S.rat(p) for p in probs],
        total=S.rat(sum(probs, Fraction(0))),
    )


def handle_check(req: S.CheckRequest) -> S.CheckResponse:
    handle = _handle(req)
    network = req.network.to_network()
    kwargs = {"budget": req.budget} if req.budget else {}
    validity = check_validity(handle, network, **kwargs)
    vmodel = S.ValidityModel(
        passed=validity.passed,
        checked=validity.checked,
        max_total=S.rat(validity.max_total),
        violation_total=(
            None if validity.violation_total is None else S.rat(validity.violation_total)
        ),
    )
    emodel = None
    if req.include_efficiency:
        eff = check_efficiency(handle, network, **kwargs)
        emodel = S.EfficiencyCheckModel(
            passed=eff.passed,
            checked=eff.checked,
            failing_needy=(
                None if eff.failing_needy is None else sorted(eff.failing_needy)
            ),
            failing_mass=None if eff.failing_mass is None else S.rat(eff.failing_mass),
        )
    passed = vmodel.passed and (emodel is None or emodel.passed)
    return S.CheckResponse(
        mechanism=handle.label, validity=vmodel, efficiency=emodel, passed=passed
    )


def handle_dsic(req: S.DsicRequest) -> S.DsicResponse:
    handle = _handle(req)
    network = req.network.to_network() if req.network is not None else None
    if req.samples is not None:
        strategy = Sampled(count=req.samples, seed=req.seed)
    elif req.exhaustive:
        strategy = Exhaustive(**({"budget": req.budget} if req.budget else {}))
    else:
        strategy = Sampled(seed=req.seed)
    report = check_dsic(
        handle, network, strategy, n=req.n, max_violations=req.max_violations
    )
    violations = [
        S.DsicViolationModel(
            agent=v.agent,
            own_delta=S.rat(v.delta.own),
            friend_delta=S.rat(v.delta.friend_sum),
            enemy_delta=S.rat(v.delta.enemy_sum),
            base_messages=S.profile_models(v.base),
            deviation=S.MessageModel.from_message(v.deviation),
        )
        for v in report.violations
    ]
    return S.DsicResponse(
        mechanism=report.mechanism,
        mode=report.mode.value,
        exhaustive=report.exhaustive,
        passed=report.passed,
        bases_checked=report.bases_checked,
        deviations_checked=report.deviations_checked,
        total_violations=report.total_violations,
        violations=violations,
    )


def handle_efficiency(req: S.EfficiencyRequest) -> S.EfficiencyResponse:
    handle = _handle(req)
    network = req.network.to_network()
    q = parse_rational(req.q)
    if req.method == "exact":
        value = exact_efficiency(handle, network, q)
        return S.EfficiencyResponse(
            mechanism=handle.label,
            method="exact",
            value=S.rat(value),
            value_float=float(value),
        )
    est = mc_efficiency(
        handle,
        network,
        q,
        samples=req.samples,
        seed=req.seed,
        confidence=req.confidence,
        wilson=req.wilson,
    )
    return S.EfficiencyResponse(
        mechanism=est.mechanism,
        method="mc",
        value=S.rat(est.mean),
        value_float=est.mean_float,
        half_width=est.half_width,
        samples=est.samples,
        seed=est.seed,
        distinct_needy_sets=est.distinct_needy_sets,
    )


def handle_compare(req: S.CompareRequest) -> S.CompareResponse:
    network = req.network.to_network()
    q = parse_rational(req.q)
    handles = [parse_mechanism(ref.mechanism, ref.sink) for ref in req.mechanisms]
    if not handles:
        raise PeerselError("nothing to compare: no mechanisms given")
    table = compare_mechanisms(network, q, handles, samples=req.samples, seed=req.seed)
    rows = [
        S.CompareRowModel(
            rank=r.rank,
            mechanism=r.mechanism,
            value=S.rat(r.value),
            value_float=float(r.value),
            half_width=r.half_width,
        )
        for r in table.rows
    ]
    return S.CompareResponse(q=S.rat(q), rows=rows)


def _component_lists(decomposition) -> list[list[list[int]]]:
    return [
        [sorted(clique) for clique in comp.cliques] for comp in decomposition.components
    ]


def handle_balance(req: S.BalanceRequest) -> S.BalanceResponse:
    network = req.network.to_network()
    verdict = check_structural_balance(network)
    if not verdict.balanced:
        return S.BalanceResponse(
            balanced=False,
            violation_triple=verdict.violation.triple,
            violation_rule=verdict.violation.rule,
        )
    return S.BalanceResponse(
        balanced=True, components=_component_lists(decompose(network))
    )


def handle_classify(req: S.ClassifyRequest) -> S.ClassifyResponse:
    network = req.network.to_network()
    verdict = classify_theorem5(network)
    recommended = None
    if verdict.recommended is not None:
        recommended = S.MechanismRef(
            mechanism=verdict.recommended.kind.value, sink=verdict.recommended.sink
        )
    return S.ClassifyResponse(
        admits=verdict.admits,
        reason=verdict.reason.value,
        recommended=recommended,
        components=_component_lists(verdict.decomposition),
    )


def handle_witness(req: S.WitnessRequest) -> S.WitnessResponse:
    if req.construction == "theorem4":
        construction = Theorem4Construction(req.n)
    else:
        construction = Theorem5bConstruction(req.x1, req.x2, req.y1, req.y2)
    weights = None
    if req.weights is not None:
        weights = PreferenceWeights(
            parse_rational(req.weights[0]), parse_rational(req.weights[1])
        )
    witness = impossibility_witness(
        construction,
        weights=weights,
        drop_efficiency_at=req.drop_efficiency_at,
        var_budget=req.var_budget,
    )
    certificate = None
    if witness.certificate is not None:
        certificate = [
            S.CertificateEntryModel(tag=e.tag, multiplier=S.rat(e.multiplier))
            for e in witness.certificate
        ]
    point = None
    if witness.feasible_point is not None:
        point = [
            S.PointEntryModel(profile_mask=mask, agent=agent, value=S.rat(v))
            for (mask, agent), v in sorted(witness.feasible_point.items())
            if v
        ]
    return S.WitnessResponse(
        status=witness.status.value,
        n=witness.n,
        variables=witness.variables,
        constraints=witness.constraints,
        verified=witness.verify(),
        relaxed=req.drop_efficiency_at is not None,
        certificate=certificate,
        feasible_point=point,
    )


def handle_generate(req: S.GenerateRequest) -> S.GenerateResponse:
    inst: Instance = generate(req.family, **req.params)
    return S.GenerateResponse(
        family=req.family,
        instance=serialize_instance(inst),
        n=inst.network.n,
        needy=None if inst.needy is None else sorted(inst.needy),
        q=None if inst.q is None else S.rat(inst.q),
    )
