"""Command line interface: a thin layer over the core package.

Exit codes: 0 success, 1 requirement failure (not playable / nothing found /
illegal trace), 2 usage or load errors.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .engine import applicable_mechanics, execute_tick, goals_hold, initial_state, verify_trace
from .gen import adapt as run_adapt
from .gen import generate as run_generate
from .loader import (
    DomainFormatError,
    load_domain,
    load_mechanics,
    load_trace,
    validate_domain,
)
from .model import NOOP, canonical_json


def _load_domain_or_die(paths):
    try:
        spec = load_domain(*paths)
    except (OSError, DomainFormatError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    report = validate_domain(spec)
    if not report.ok:
        for v in report.violations:
            click.echo(f"invalid domain: {v.message}", err=True)
        sys.exit(2)
    return spec


def _load_mechanics_or_die(path, spec):
    try:
        return load_mechanics(path, spec)
    except (OSError, DomainFormatError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)


def _write_or_print(payload: dict, out: str | None):
    text = canonical_json(payload)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)


@click.group()
def main():
    """Generate, check, simulate, play, and adapt game mechanics."""


@main.command()
@click.argument("domains", nargs=-1, required=False, type=click.Path())
@click.option("--domain", "extra_domains", multiple=True, type=click.Path(),
              help="Additional domain fragments to merge.")
@click.option("-o", "--out", type=click.Path(), help="Write the result JSON here.")
@click.option("--horizon", type=int, default=None, help="Override the plan horizon.")
@click.option("--max-candidates", type=int, default=None)
@click.option("--time-budget", type=float, default=None)
def generate(domains, extra_domains, out, horizon, max_candidates, time_budget):
    """Synthesize a mechanic set for one or more DOMAINS (fragments merge)."""
    paths = list(domains) + list(extra_domains)
    if not paths:
        raise click.UsageError("at least one domain file is required")
    spec = _load_domain_or_die(paths)
    if horizon is not None:
        from dataclasses import replace

        spec = replace(spec, playability=replace(spec.playability, horizon=horizon))
    budgets = {}
    if max_candidates is not None:
        budgets["max_candidates"] = max_candidates
    if time_budget is not None:
        budgets["time_budget"] = time_budget
    result = run_generate(spec, **budgets)
    _write_or_print(result.to_json(), out)
    if not result.found:
        click.echo(f"generation ended with status: {result.status}", err=True)
        sys.exit(1)
    click.echo(
        f"found {len(result.mechanics)} mechanic(s) after testing "
        f"{result.candidates_tested} candidate(s)",
        err=True,
    )


@main.command()
@click.argument("domains", nargs=-1, required=True, type=click.Path())
@click.argument("mechanics_file", type=click.Path())
@click.option("--domain", "extra_domains", multiple=True, type=click.Path())
@click.option("-o", "--out", type=click.Path(), help="Write the playability report here.")
@click.option("--horizon", type=int, default=None)
def check(domains, mechanics_file, extra_domains, out, horizon):
    """Check a mechanics file against a domain's playability requirements."""
    from .planner import check_playability

    spec = _load_domain_or_die(list(domains) + list(extra_domains))
    mechanics = _load_mechanics_or_die(mechanics_file, spec)
    report = check_playability(spec, mechanics, horizon=horizon)
    for name, result in report.instances:
        witness = ""
        if result.witness is not None:
            actions = [str(s.action) for s in result.witness.steps]
            witness = f"  witness: {' -> '.join(actions) if actions else '(empty)'}"
        click.echo(f"{name:20s} {result.status}{witness}")
    if out:
        _write_or_print(report.to_json(mechanics), out)
    if not report.passed:
        sys.exit(1)


@main.command()
@click.argument("domain_file", type=click.Path())
@click.argument("mechanics_file", type=click.Path())
@click.argument("trace_file", type=click.Path())
@click.option("-o", "--out", type=click.Path(), help="Write the replay report here.")
def simulate(domain_file, mechanics_file, trace_file, out):
    """Replay a trace file and report per-tick legality and goal flags."""
    spec = _load_domain_or_die([domain_file])
    mechanics = _load_mechanics_or_die(mechanics_file, spec)
    try:
        trace = load_trace(trace_file, spec, mechanics)
    except (OSError, DomainFormatError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    instance = spec.instance_by_name(trace.instance)
    report = verify_trace(spec, mechanics, instance, trace)
    for tick in report.ticks:
        flag = "ok" if tick.legal else f"ILLEGAL ({tick.reason})"
        click.echo(f"tick {tick.tick:3d} {tick.agent:10s} {str(tick.action):12s} {flag}")
    click.echo(f"legal: {report.legal}  goal ticks: {dict(report.goal_ticks)}")
    if out:
        _write_or_print(report.to_json(), out)
    if not report.legal:
        sys.exit(1)


def _state_lines(session):
    entities = session.spec.entities
    lines = []
    for entity in entities:
        owned = [
            f"{p}={session.state.values[(p, entity)]}"
            for (e, p) in session.spec.has
            if e == entity
        ]
        if owned:
            lines.append(f"  {entity:12s} {'  '.join(sorted(owned))}")
    return lines


def play_loop(spec, mechanics, instance, controls=None, in_stream=None, out_stream=None):
    """Interactive text loop; returns 'won', 'lost', or 'quit'."""
    in_stream = in_stream if in_stream is not None else sys.stdin
    out_stream = out_stream if out_stream is not None else sys.stdout

    def say(text=""):
        print(text, file=out_stream)

    controls = {item["mechanic"]: list(item.get("inputs", [])) for item in (controls or [])}
    by_id = {m.id: m for m in mechanics}
    session = initial_state(spec, instance, mechanics)
    player = spec.playability.player_agent
    goals = spec.playability.goals_for(player)
    while True:
        states = [s.values for s in session.history]
        events = frozenset(session.events)
        if not goals_hold(spec, states, events, player, goals.maintenance, session.time):
            say("*** You lost: a maintenance goal no longer holds. ***")
            return "lost"
        if goals.goal and goals_hold(spec, states, events, player, goals.goal, session.time):
            say("*** You won! ***")
            return "won"
        agent = session.turn_agent()
        say(f"-- tick {session.time}, {agent} to act --")
        for line in _state_lines(session):
            say(line)
        actions = applicable_mechanics(session, agent)
        menu = {}
        for i, action in enumerate(actions, start=1):
            if action == NOOP:
                label = "wait"
                symbols = ""
            else:
                label = by_id[action].display()
                symbols = " ".join(controls.get(action, []))
                symbols = f"  [{symbols}]" if symbols else ""
            say(f"  {i}) {label}{symbols}")
            menu[str(i)] = action
            if action != NOOP:
                menu[by_id[action].display().lower()] = action
                for symbol in controls.get(action, []):
                    menu.setdefault(symbol.lower(), action)
            else:
                menu["wait"] = action
                menu[NOOP] = action
        say("choose an action (or q to quit):")
        line = in_stream.readline()
        if not line or line.strip().lower() in ("q", "quit"):
            say("bye")
            return "quit"
        choice = line.strip().lower()
        if choice not in menu:
            say(f"unknown choice {choice!r}")
            continue
        session = execute_tick(session, agent, menu[choice])


@main.command()
@click.argument("domain_file", type=click.Path())
@click.argument("mechanics_file", type=click.Path())
@click.option("--instance", "instance_name", default=None, help="Instance to play.")
@click.option("--controls", "controls_file", type=click.Path(), default=None,
              help="JSON control mapping from a generation result.")
def play(domain_file, mechanics_file, instance_name, controls_file):
    """Playtest a mechanic set in a text loop."""
    spec = _load_domain_or_die([domain_file])
    mechanics = _load_mechanics_or_die(mechanics_file, spec)
    controls = None
    if controls_file:
        try:
            controls = json.loads(Path(controls_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
    instance = (
        spec.instance_by_name(instance_name) if instance_name else spec.instances[0]
    )
    play_loop(spec, mechanics, instance, controls)


@main.command()
@click.argument("domains", nargs=-1, required=True, type=click.Path())
@click.option("--seed-mechanics", "seed_file", required=True, type=click.Path())
@click.option("--overlay", "overlay_file", type=click.Path(), default=None,
              help="Requirement fragment merged over the domain.")
@click.option("--domain", "extra_domains", multiple=True, type=click.Path())
@click.option("-o", "--out", type=click.Path())
@click.option("--max-candidates", type=int, default=None)
@click.option("--time-budget", type=float, default=None)
def adapt(domains, seed_file, overlay_file, extra_domains, out, max_candidates, time_budget):
    """Minimally rework a seed mechanic set to satisfy new requirements."""
    spec = _load_domain_or_die(list(domains) + list(extra_domains))
    seed = _load_mechanics_or_die(seed_file, spec)
    overlay = None
    if overlay_file:
        try:
            overlay = json.loads(Path(overlay_file).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(2)
    budgets = {}
    if max_candidates is not None:
        budgets["max_candidates"] = max_candidates
    if time_budget is not None:
        budgets["time_budget"] = time_budget
    try:
        result = run_adapt(spec, seed, overlay, **budgets)
    except DomainFormatError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    _write_or_print(result.to_json(), out)
    if not result.found:
        click.echo(f"adaptation ended with status: {result.status}", err=True)
        sys.exit(1)


@main.command()
@click.option("--port", type=int, default=8000)
@click.option("--host", default="127.0.0.1")
@click.option("--data-dir", type=click.Path(), default=None,
              help="Record directory (default: MECH_DATA_DIR or ./mechgen-data).")
def serve(port, host, data_dir):
    """Start the HTTP service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(data_dir), host=host, port=port)


if __name__ == "__main__":
    main()
