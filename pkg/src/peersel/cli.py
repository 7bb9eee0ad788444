"""Command-line front-end.

Thin client over the service handlers (same request/response models as the
HTTP endpoints, dispatched in-process).  Exit codes are fixed for CI use:

===  =========================================================
0    success
1    domain error (bad network, unbalanced input, budget, ...)
2    usage error (unknown flags/mechanism, missing/extra sink)
3    a verification verdict came back FAIL (dsic/check)
4    witness anomaly (expected-infeasible system came back
     feasible, or a certificate failed re-verification)
===  =========================================================
"""

from __future__ import annotations

import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click

from . import __version__
from .instances import load_instance
from .mechanisms import MechanismKind
from .model import PeerselError, parse_rational, format_rational
from .service import handlers
from .service import schemas as S

_SINKED = {"g2k", "g3k"}
_MECHANISMS = [k.value for k in MechanismKind if k is not MechanismKind.EXTERNAL]


def _fail(message: str, code: int) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _network_model(path: str) -> S.NetworkModel:
    try:
        inst = load_instance(path)
    except (OSError, PeerselError) as exc:
        _fail(str(exc), 1)
    return S.NetworkModel.from_network(inst.network)


def _check_sink(mechanism: str, sink: Optional[int]) -> None:
    if mechanism in _SINKED and sink is None:
        raise click.UsageError(f"--mechanism {mechanism} requires --sink")
    if mechanism not in _SINKED and sink is not None:
        raise click.UsageError(f"--mechanism {mechanism} takes no --sink")


def _parse_needy(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(tok) for tok in text.split(",")]
    except ValueError:
        raise click.UsageError(f"--needy wants comma-separated agent ids, got {text!r}")


def _value(text_value: str, decimals: Optional[int]) -> str:
    if decimals is None:
        return text_value
    return format_rational(parse_rational(text_value), decimals)


def _domain_guard(fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PeerselError as exc:
        _fail(str(exc), 1)


_network_opt = click.option(
    "--network", "network_path", required=True, metavar="FILE",
    help="Instance file describing the relation network.",
)
_mechanism_opt = click.option(
    "--mechanism", required=True, type=click.Choice(_MECHANISMS), metavar="NAME",
    help=f"One of: {', '.join(_MECHANISMS)}.",
)
_sink_opt = click.option(
    "--sink", type=int, default=None, metavar="K",
    help="Sink agent (required for g2k/g3k, forbidden otherwise).",
)
_decimals_opt = click.option(
    "--decimals", type=click.IntRange(0, 30), default=None, metavar="D",
    help="Print probabilities as D-digit decimals instead of num/den.",
)


@click.group()
@click.version_option(__version__, prog_name="peersel")
def main() -> None:
    """Peer selection over friend/enemy networks, in exact arithmetic."""


@main.command("run")
@_mechanism_opt
@_network_opt
@_sink_opt
@click.option("--needy", default="", metavar="LIST",
              help="Comma-separated ids of truly needy agents (may be empty).")
@click.option("--mode", type=click.Choice(["needy-only", "full-type"]), default=None,
              help="Override the reporting mode (must match the mechanism).")
@_decimals_opt
def cmd_run(mechanism, network_path, sink, needy, mode, decimals) -> None:
    """Evaluate one mechanism at the truthful profile for a needy set."""
    _check_sink(mechanism, sink)
    req = S.RunRequest(
        mechanism=mechanism,
        sink=sink,
        network=_network_model(network_path),
        needy=_parse_needy(needy),
        mode=mode,
    )
    resp = _domain_guard(handlers.handle_run, req)
    for agent, prob in enumerate(resp.probs):
        click.echo(f"{agent}: {_value(prob, decimals)}")


@main.command("check")
@_mechanism_opt
@_network_opt
@_sink_opt
@click.option("--skip-efficiency", is_flag=True,
              help="Only check validity (mass never exceeds 1).")
def cmd_check(mechanism, network_path, sink, skip_efficiency) -> None:
    """Check validity (and efficiency) over the whole message lattice."""
    _check_sink(mechanism, sink)
    req = S.CheckRequest(
        mechanism=mechanism,
        sink=sink,
        network=_network_model(network_path),
        include_efficiency=not skip_efficiency,
    )
    resp = _domain_guard(handlers.handle_check, req)
    v = resp.validity
    click.echo(
        f"validity: {'PASS' if v.passed else 'FAIL'} "
        f"(profiles={v.checked}, max_total={v.max_total})"
    )
    if resp.efficiency is not None:
        e = resp.efficiency
        if e.passed:
            click.echo(f"efficiency: PASS (needy_sets={e.checked})")
        else:
            click.echo(
                f"efficiency: FAIL (needy={e.failing_needy}, mass={e.failing_mass})"
            )
    if not resp.passed:
        sys.exit(3)


@main.command("dsic")
@_mechanism_opt
@_sink_opt
@click.option("--network", "network_path", default=None, metavar="FILE",
              help="Instance file (needed by g1/g2k/g3k; optional for rd/duples).")
@click.option("--n", "n_agents", type=int, default=None,
              help="Population size when no network file is given.")
@click.option("--exhaustive", "exhaustive", is_flag=True, default=False,
              help="Sweep every base profile (within budget).")
@click.option("--samples", type=int, default=None, metavar="N",
              help="Check N seeded random base profiles instead.")
@click.option("--seed", type=int, default=0, metavar="S")
@click.option("--max-violations", type=int, default=10, metavar="M",
              help="Report at most M violations in detail.")
def cmd_dsic(mechanism, sink, network_path, n_agents, exhaustive, samples, seed,
             max_violations) -> None:
    """Hunt for profitable unilateral deviations (exit 3 if any exist)."""
    _check_sink(mechanism, sink)
    if exhaustive and samples is not None:
        raise click.UsageError("--exhaustive and --samples are mutually exclusive")
    if not exhaustive and samples is None:
        raise click.UsageError("pick a strategy: --exhaustive or --samples N")
    if network_path is None and n_agents is None:
        raise click.UsageError("give --network FILE or --n N")
    req = S.DsicRequest(
        mechanism=mechanism,
        sink=sink,
        network=None if network_path is None else _network_model(network_path),
        n=n_agents,
        exhaustive=exhaustive,
        samples=samples,
        seed=seed,
        max_violations=max_violations,
    )
    resp = _domain_guard(handlers.handle_dsic, req)
    verdict = "PASS" if resp.passed else "FAIL"
    sweep = "exhaustive" if resp.exhaustive else f"sampled(seed={seed})"
    click.echo(
        f"{verdict} mechanism={resp.mechanism} mode={resp.mode} sweep={sweep} "
        f"bases={resp.bases_checked} deviations={resp.deviations_checked} "
        f"violations={resp.total_violations}"
    )
    for v in resp.violations:
        click.echo(
            f"  agent {v.agent}: own {v.own_delta}, friends {v.friend_delta}, "
            f"enemies {v.enemy_delta}; deviate to needy="
            f"{sorted(v.deviation.needy)}"
        )
    if not resp.passed:
        sys.exit(3)


@main.command("efficiency")
@_mechanism_opt
@_network_opt
@_sink_opt
@click.option("--q", "q_text", required=True, metavar="NUM/DEN",
              help="Independent prior probability that an agent is needy.")
@click.option("--exact", "method", flag_value="exact", default=True,
              help="Enumerate all needy sets (default).")
@click.option("--mc", "method", flag_value="mc",
              help="Monte-Carlo estimate instead.")
@click.option("--samples", type=int, default=100_000, metavar="N")
@click.option("--seed", type=int, default=0, metavar="S")
@click.option("--confidence", type=float, default=0.95)
@click.option("--wilson", is_flag=True, help="Wilson interval half-width.")
@_decimals_opt
def cmd_efficiency(mechanism, network_path, sink, q_text, method, samples, seed,
                   confidence, wilson, decimals) -> None:
    """Probability the selection reaches a needy agent under the prior."""
    _check_sink(mechanism, sink)
    req = S.EfficiencyRequest(
        mechanism=mechanism,
        sink=sink,
        network=_network_model(network_path),
        q=q_text,
        method=method,
        samples=samples,
        seed=seed,
        confidence=confidence,
        wilson=wilson,
    )
    resp = _domain_guard(handlers.handle_efficiency, req)
    if resp.method == "exact":
        click.echo(f"value: {_value(resp.value, decimals)}")
    else:
        click.echo(f"estimate: {_value(resp.value, decimals)}")
        click.echo(f"half_width: {resp.half_width:.6g} (confidence {confidence:g})")
        click.echo(f"samples: {resp.samples} seed: {resp.seed} "
                   f"distinct_needy_sets: {resp.distinct_needy_sets}")


@main.command("compare")
@click.option("--mechanism", "mechanisms", multiple=True, required=True,
              type=click.Choice(_MECHANISMS),
              help="Repeatable; every mechanism joins the ranking.")
@_network_opt
@_sink_opt
@click.option("--q", "q_text", required=True, metavar="NUM/DEN")
@click.option("--samples", type=int, default=None, metavar="N",
              help="Estimate instead of exact enumeration.")
@click.option("--seed", type=int, default=0, metavar="S")
@_decimals_opt
def cmd_compare(mechanisms, network_path, sink, q_text, samples, seed, decimals) -> None:
    """Rank several mechanisms by efficiency on one network."""
    refs = []
    for token in mechanisms:
        if token in _SINKED and sink is None:
            raise click.UsageError(f"--mechanism {token} requires --sink")
        refs.append(S.MechanismRef(mechanism=token, sink=sink if token in _SINKED else None))
    req = S.CompareRequest(
        mechanisms=refs,
        network=_network_model(network_path),
        q=q_text,
        samples=samples,
        seed=seed,
    )
    resp = _domain_guard(handlers.handle_compare, req)
    for row in resp.rows:
        val = _value(row.value, decimals)
        hw = "" if row.half_width is None else f" ±{row.half_width:.6g}"
        click.echo(f"{row.rank}: {row.mechanism} {val}{hw}")


@main.command("balance")
@_network_opt
def cmd_balance(network_path) -> None:
    """Check structural balance; show the clique decomposition if balanced."""
    req = S.BalanceRequest(network=_network_model(network_path))
    resp = _domain_guard(handlers.handle_balance, req)
    if not resp.balanced:
        i, j, k = resp.violation_triple
        click.echo(f"unbalanced: triple ({i},{j},{k}) breaks rule {resp.violation_rule}")
        return
    click.echo("balanced")
    for idx, comp in enumerate(resp.components):
        cliques = " | ".join("{" + ",".join(map(str, c)) + "}" for c in comp)
        click.echo(f"component {idx}: {cliques}")


@main.command("classify")
@_network_opt
def cmd_classify(network_path) -> None:
    """Decide whether the network admits an efficient DSIC mechanism."""
    req = S.ClassifyRequest(network=_network_model(network_path))
    resp = _domain_guard(handlers.handle_classify, req)
    if resp.admits:
        rec = resp.recommended
        label = rec.mechanism if rec.sink is None else f"{rec.mechanism}(k={rec.sink})"
        click.echo(f"admits efficient DSIC ({resp.reason}); recommended: {label}")
    else:
        click.echo(f"does not admit efficient DSIC ({resp.reason})")


@main.command("witness")
@click.option("--construction", required=True,
              type=click.Choice(["theorem4", "theorem5b"]))
@click.option("--n", "n_agents", type=int, default=4, metavar="N",
              help="Population size (theorem4).")
@click.option("--x1", type=int, default=1)
@click.option("--x2", type=int, default=1)
@click.option("--y1", type=int, default=1)
@click.option("--y2", type=int, default=1)
@click.option("--weights", default=None, metavar="WF,WE",
              help="Fix preference weights instead of the robust encoding.")
@click.option("--drop-efficiency-at", type=click.IntRange(0, 1), default=None,
              metavar="S", help="Relax: drop the efficiency row of state S.")
@click.option("--var-budget", type=int, default=8192)
def cmd_witness(construction, n_agents, x1, x2, y1, y2, weights,
                drop_efficiency_at, var_budget) -> None:
    """Solve the two-state feasibility system; print certificate or point.

    Without relaxation flags the system is expected infeasible; a feasible
    outcome (or a certificate that fails re-verification) exits 4.
    """
    wpair = None
    if weights is not None:
        parts = weights.split(",")
        if len(parts) != 2:
            raise click.UsageError("--weights wants WF,WE")
        wpair = (parts[0].strip(), parts[1].strip())
    req = S.WitnessRequest(
        construction=construction,
        n=n_agents,
        x1=x1, x2=x2, y1=y1, y2=y2,
        weights=wpair,
        drop_efficiency_at=drop_efficiency_at,
        var_budget=var_budget,
    )
    resp = _domain_guard(handlers.handle_witness, req)
    click.echo(resp.status.upper())
    click.echo(f"variables: {resp.variables} constraints: {resp.constraints} "
               f"verified: {str(resp.verified).lower()}")
    if resp.certificate is not None:
        click.echo("certificate:")
        for entry in resp.certificate:
            click.echo(f"  {entry.tag}: {entry.multiplier}")
    if resp.feasible_point is not None:
        click.echo("feasible point (nonzero entries):")
        for entry in resp.feasible_point:
            click.echo(
                f"  profile {entry.profile_mask:0{resp.n}b} -> agent {entry.agent}: {entry.value}"
            )
    anomaly = not resp.verified or (resp.status == "Feasible" and not resp.relaxed)
    if anomaly:
        click.echo("anomaly: unexpected witness outcome", err=True)
        sys.exit(4)


@main.command("generate")
@click.option("--family", required=True, metavar="NAME")
@click.option("--param", "params", multiple=True, metavar="KEY=VALUE",
              help="Repeatable family parameter; values parse as int, "
                   "rational, JSON list, or string.")
@click.option("--out", "out_path", default=None, metavar="FILE",
              help="Write the instance here instead of stdout.")
def cmd_generate(family, params, out_path) -> None:
    """Produce an instance file from a named generator family."""
    import json as _json

    parsed: dict = {}
    for item in params:
        key, sep, raw = item.partition("=")
        if not sep:
            raise click.UsageError(f"--param wants KEY=VALUE, got {item!r}")
        value: object
        try:
            value = int(raw)
        except ValueError:
            if raw.startswith("["):
                try:
                    value = _json.loads(raw)
                except _json.JSONDecodeError:
                    raise click.UsageError(f"bad list parameter: {item!r}")
            else:
                value = raw
        parsed[key] = value
    resp = _domain_guard(handlers.handle_generate, S.GenerateRequest(family=family, params=parsed))
    if out_path is None:
        click.echo(resp.instance, nl=False)
    else:
        Path(out_path).write_text(resp.instance)
        click.echo(f"wrote {out_path} (n={resp.n})")


if __name__ == "__main__":
    main()
