"""Turn-based simulation: time-indexed conditions, scheduled effects, engine rules.

Each tick runs a fixed pipeline: record the acting agent's event, schedule the
chosen mechanic's effects at absolute ticks, land all effects due now (relative
deltas sum, absolute sets apply last in (mechanic, atom) order), resolve
invocation effects against the staged state, saturate values into their
absolute ranges, run forced updates, and check invariants.  Invariants are
judged against both the pre-saturation values and the final values, so
overdrawing a resource is illegal even though stored state clamps at the range
bound.  Parameters untouched by any effect keep their value; performed-mechanic
events are instants, not state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .model import (
    ABSOLUTE,
    NOOP,
    RELATIVE,
    ConditionAtom,
    DerivedTest,
    DomainSpec,
    EventInvoke,
    EventTest,
    ForcedUpdateRule,
    GameInstance,
    GuardAtom,
    InvariantRule,
    Mechanic,
    ParamTest,
    ParamUpdate,
    Trace,
    TraceStep,
    compare,
)

logger = logging.getLogger(__name__)


class EngineError(Exception):
    """Base for simulation faults."""


class MissingInitialError(EngineError):
    pass


class EvaluationError(EngineError):
    pass


class OutOfTurnError(EngineError):
    pass


class IllegalActionError(EngineError):
    """The requested tick cannot be executed; the session is unchanged."""


class PreconditionError(IllegalActionError):
    pass


class InvariantViolation(IllegalActionError):
    def __init__(self, rule: str, entity: str | None = None):
        self.rule = rule
        self.entity = entity
        suffix = f" for {entity}" if entity else ""
        super().__init__(f"engine invariant {rule!r} violated{suffix}")


class InvokeDepthExceeded(IllegalActionError):
    pass


@dataclass(frozen=True)
class SimState:
    time: int
    values: dict  # (param, entity) -> int; never mutated once stored

    def value(self, param: str, entity: str) -> int:
        return self.values[(param, entity)]


@dataclass(frozen=True)
class PendingEffect:
    due: int
    mech: int
    atom_idx: int
    actor: str
    depth: int
    atom: ParamUpdate | EventInvoke

    def sort_key(self):
        return (self.mech, self.atom_idx, self.actor, self.depth)


@dataclass(frozen=True)
class Session:
    spec: DomainSpec
    mechanics: tuple[Mechanic, ...]
    instance: GameInstance
    history: tuple[SimState, ...]
    events: tuple[tuple[int, str, int], ...] = ()
    pending: tuple[PendingEffect, ...] = ()

    @property
    def time(self) -> int:
        return self.history[-1].time

    @property
    def state(self) -> SimState:
        return self.history[-1]

    def mechanic_map(self) -> dict[int, Mechanic]:
        return {m.id: m for m in self.mechanics}

    def turn_agent(self) -> str:
        return self.spec.agents[self.time % len(self.spec.agents)]


def initial_state(spec: DomainSpec, instance: GameInstance, mechanics=()) -> Session:
    values = instance.initial_values()
    for param, entity in spec.has_pairs():
        if (param, entity) not in values:
            raise MissingInitialError(
                f"instance {instance.name!r} has no initial value for {param}({entity})"
            )
    return Session(
        spec=spec,
        mechanics=tuple(mechanics),
        instance=instance,
        history=(SimState(time=0, values=dict(values)),),
    )


# ---------------------------------------------------------------------------
# Condition evaluation
# ---------------------------------------------------------------------------


def _eval_derived(spec: DomainSpec, values: dict, pred_name: str, entity: str) -> bool:
    pred = spec.derived_by_name(pred_name)
    members = spec.class_members(pred.klass)
    for bound in members:
        ok = True
        for c in pred.conjuncts:
            arg_key = (c.param, entity)
            bound_key = (c.bound_param, bound)
            if arg_key not in values or bound_key not in values:
                ok = False
                break
            if not compare(c.rel, values[arg_key], values[bound_key] + c.const):
                ok = False
                break
        if ok:
            return True
    return False


def evaluate_atom(
    spec: DomainSpec,
    states: list[dict],
    events: frozenset | set,
    actor: str,
    atom: ConditionAtom,
    now: int,
) -> bool:
    """Evaluate one condition atom with ``now`` as the reference tick.

    ``states`` is indexed by tick.  A reference into pre-game time (negative
    tick) makes the atom false rather than raising: history is simply empty.
    """
    t = now + atom.offset
    if t < 0:
        return False
    values = states[t]
    if isinstance(atom, ParamTest):
        subject = values[(atom.param, atom.entity)]
        if atom.frame == RELATIVE:
            actor_key = (atom.param, actor)
            if actor_key not in values:
                raise EvaluationError(
                    f"relative test on {atom.param}: acting agent {actor!r} lacks the parameter"
                )
            subject = subject - values[actor_key]
        return compare(atom.rel, subject, atom.rhs)
    if isinstance(atom, DerivedTest):
        result = _eval_derived(spec, values, atom.pred, atom.entity)
        return (not result) if atom.negated else result
    if isinstance(atom, EventTest):
        result = (t, atom.entity, atom.mech) in events
        return (not result) if atom.negated else result
    raise EngineError(f"not a condition atom: {atom!r}")


def _eval_guard(spec: DomainSpec, values: dict, atom: GuardAtom, bound_entity: str | None) -> bool:
    entity = atom.entity if atom.entity is not None else bound_entity
    if entity is None:
        raise EngineError("guard atom has no entity binding")
    if atom.kind == "param_test":
        key = (atom.param, entity)
        if key not in values:
            raise EvaluationError(f"guard tests unowned {atom.param}({entity})")
        return compare(atom.rel, values[key], atom.rhs)
    result = _eval_derived(spec, values, atom.pred, entity)
    return (not result) if atom.negated else result


def preconditions_hold(
    spec: DomainSpec,
    states: list[dict],
    events,
    actor: str,
    mechanic: Mechanic,
    now: int,
) -> bool:
    return all(evaluate_atom(spec, states, events, actor, a, now) for a in mechanic.pre)


def goals_hold(spec: DomainSpec, states: list[dict], events, agent: str, atoms, now: int) -> bool:
    return all(evaluate_atom(spec, states, events, agent, a, now) for a in atoms)


# ---------------------------------------------------------------------------
# The tick pipeline
# ---------------------------------------------------------------------------


def _clamp(spec: DomainSpec, values: dict) -> dict:
    abs_ranges = dict(spec.abs_ranges)
    out = {}
    for pair, v in values.items():
        rng = abs_ranges.get(pair)
        if rng is not None:
            v = min(max(v, rng[0]), rng[1])
        out[pair] = v
    return out


def compute_next(
    spec: DomainSpec,
    mech_map: dict[int, Mechanic],
    states: list[dict],
    events,
    pending: tuple[PendingEffect, ...],
    agent: str,
    action: int | str,
    warn_sink: list | None = None,
):
    """Advance one tick; returns (next_values, next_pending, next_events).

    ``states`` must be indexed by tick with the current tick last.  Raises
    :class:`IllegalActionError` subclasses when the tick cannot happen; the
    caller's state is untouched either way.
    """
    t = len(states) - 1
    new_events = events
    scheduled = list(pending)
    if action != NOOP:
        mechanic = mech_map[action]
        new_events = set(events)
        new_events.add((t, agent, mechanic.id))
        new_events = frozenset(new_events)
        for idx, atom in enumerate(mechanic.eff):
            scheduled.append(
                PendingEffect(
                    due=t + atom.offset,
                    mech=mechanic.id,
                    atom_idx=idx,
                    actor=agent,
                    depth=0,
                    atom=atom,
                )
            )

    due = [p for p in scheduled if p.due == t + 1]
    remaining = [p for p in scheduled if p.due != t + 1]

    raw = dict(states[t])
    for p in due:
        atom = p.atom
        if isinstance(atom, ParamUpdate) and atom.frame == RELATIVE:
            raw[(atom.param, atom.entity)] += atom.amount
    abs_writes: dict[tuple, int] = {}
    for p in sorted((p for p in due if isinstance(p.atom, ParamUpdate) and p.atom.frame == ABSOLUTE), key=PendingEffect.sort_key):
        key = (p.atom.param, p.atom.entity)
        abs_writes[key] = abs_writes.get(key, 0) + 1
        if abs_writes[key] > 1 and warn_sink is not None:
            warn_sink.append(
                f"conflicting absolute writes to {key[0]}({key[1]}) at tick {t + 1}; last write wins"
            )
        raw[key] = p.atom.amount

    # Invocation effects land later; their preconditions are judged as if the
    # invoked mechanic executed at t+1, against the staged state.
    staged = states + [raw]
    for p in sorted((p for p in due if isinstance(p.atom, EventInvoke)), key=PendingEffect.sort_key):
        depth = p.depth + 1
        if depth > spec.bounds.invoke_depth:
            raise InvokeDepthExceeded(
                f"invocation chain for mechanic {p.atom.mech} exceeds depth {spec.bounds.invoke_depth}"
            )
        invoked = mech_map.get(p.atom.mech)
        if invoked is None:
            continue
        try:
            ok = preconditions_hold(spec, staged, new_events, p.actor, invoked, t + 1)
        except EvaluationError:
            ok = False
        if not ok:
            continue
        for idx, atom in enumerate(invoked.eff):
            remaining.append(
                PendingEffect(
                    due=t + 1 + atom.offset,
                    mech=invoked.id,
                    atom_idx=idx,
                    actor=p.actor,
                    depth=depth,
                    atom=atom,
                )
            )

    clamped = _clamp(spec, raw)

    deltas: dict[tuple, int] = {}
    for rule in spec.engine_rules:
        if not isinstance(rule, ForcedUpdateRule):
            continue
        for entity in spec.class_members(rule.klass):
            if all(_eval_guard(spec, clamped, a, entity) for a in rule.guard):
                key = (rule.param, entity)
                deltas[key] = deltas.get(key, 0) + rule.delta
    work = dict(clamped)
    for key, d in deltas.items():
        work[key] = work[key] + d
    final = _clamp(spec, work)

    for rule in spec.engine_rules:
        if not isinstance(rule, InvariantRule):
            continue
        bindings = spec.class_members(rule.klass) if rule.klass is not None else (None,)
        for entity in bindings:
            for view in (raw, final):
                for atom in rule.atoms:
                    if not _eval_guard(spec, view, atom, entity):
                        raise InvariantViolation(rule.name, entity)

    return final, tuple(sorted(remaining, key=lambda p: (p.due,) + p.sort_key())), new_events


def applicable_mechanics(session: Session, agent: str) -> list[int | str]:
    """Actions ``agent`` can take now: preconditions hold and the resulting
    tick (effect arrivals, forced updates) breaks no invariant."""
    states = [s.values for s in session.history]
    events = frozenset(session.events)
    mech_map = session.mechanic_map()
    now = session.time
    out: list[int | str] = []
    for mid in sorted(mech_map):
        mechanic = mech_map[mid]
        if not preconditions_hold(session.spec, states, events, agent, mechanic, now):
            continue
        try:
            compute_next(session.spec, mech_map, states, events, session.pending, agent, mid)
        except IllegalActionError:
            continue
        out.append(mid)
    if session.spec.playability.allow_noop:
        try:
            compute_next(session.spec, mech_map, states, events, session.pending, agent, NOOP)
            out.append(NOOP)
        except IllegalActionError:
            pass
    return out


def execute_tick(session: Session, agent: str, action: int | str) -> Session:
    """Run one tick; returns the extended session (the input is unchanged)."""
    expected = session.turn_agent()
    if agent != expected:
        raise OutOfTurnError(f"it is {expected!r}'s turn, not {agent!r}")
    states = [s.values for s in session.history]
    events = frozenset(session.events)
    mech_map = session.mechanic_map()
    if action == NOOP:
        if not session.spec.playability.allow_noop:
            raise PreconditionError("noop is disabled for this domain")
    else:
        if action not in mech_map:
            raise PreconditionError(f"unknown mechanic {action!r}")
        if not preconditions_hold(session.spec, states, events, agent, mech_map[action], session.time):
            raise PreconditionError(
                f"preconditions of {mech_map[action].display()} do not hold at tick {session.time}"
            )
    warnings: list[str] = []
    final, pending, new_events = compute_next(
        session.spec, mech_map, states, events, session.pending, agent, action,
        warn_sink=warnings,
    )
    for message in warnings:
        logger.warning(message)
    new_event_tuple = session.events
    if action != NOOP:
        new_event_tuple = session.events + ((session.time, agent, action),)
    return Session(
        spec=session.spec,
        mechanics=session.mechanics,
        instance=session.instance,
        history=session.history + (SimState(time=session.time + 1, values=final),),
        events=new_event_tuple,
        pending=pending,
    )


# ---------------------------------------------------------------------------
# Trace replay
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TickReport:
    tick: int
    agent: str
    action: int | str
    legal: bool
    reason: str | None = None
    maintenance: tuple[tuple[str, bool], ...] = ()
    goal: tuple[tuple[str, bool], ...] = ()


@dataclass(frozen=True)
class TraceReport:
    instance: str
    legal: bool
    ticks: tuple[TickReport, ...]
    goal_ticks: tuple[tuple[str, int], ...]

    def to_json(self) -> dict:
        return {
            "instance": self.instance,
            "legal": self.legal,
            "ticks": [
                {
                    "tick": tr.tick,
                    "agent": tr.agent,
                    "action": tr.action,
                    "legal": tr.legal,
                    **({"reason": tr.reason} if tr.reason else {}),
                    "maintenance": dict(tr.maintenance),
                    "goal": dict(tr.goal),
                }
                for tr in self.ticks
            ],
            "goal_ticks": {a: t for a, t in self.goal_ticks},
        }


def _flags(spec: DomainSpec, states, events, tick: int):
    maintenance = []
    goal = []
    for agent, goals in spec.playability.per_agent:
        maintenance.append((agent, goals_hold(spec, states, events, agent, goals.maintenance, tick)))
        goal.append((agent, bool(goals.goal) and goals_hold(spec, states, events, agent, goals.goal, tick)))
    return tuple(maintenance), tuple(goal)


def verify_trace(
    spec: DomainSpec,
    mechanics,
    instance: GameInstance,
    trace: Trace,
) -> TraceReport:
    """Replay a trace tick by tick; illegality is reported, never raised."""
    session = initial_state(spec, instance, mechanics)
    goal_first: dict[str, int] = {}
    reports: list[TickReport] = []

    def note_goals(tick: int):
        states = [s.values for s in session.history]
        events = frozenset(session.events)
        maintenance, goal = _flags(spec, states, events, tick)
        for agent, achieved in goal:
            if achieved and agent not in goal_first:
                goal_first[agent] = tick
        return maintenance, goal

    note_goals(0)
    legal = True
    for step in trace.steps:
        if not legal:
            reports.append(
                TickReport(step.tick, step.agent, step.action, False, "not executed")
            )
            continue
        try:
            session = execute_tick(session, step.agent, step.action)
            maintenance, goal = note_goals(session.time)
            reports.append(
                TickReport(step.tick, step.agent, step.action, True, None, maintenance, goal)
            )
        except EngineError as e:
            legal = False
            reports.append(TickReport(step.tick, step.agent, step.action, False, str(e)))
    return TraceReport(
        instance=trace.instance,
        legal=legal,
        ticks=tuple(reports),
        goal_ticks=tuple(sorted(goal_first.items())),
    )


def build_trace(instance: str, steps, goal_ticks=()) -> Trace:
    return Trace(
        instance=instance,
        steps=tuple(TraceStep(tick=i, agent=a, action=act) for i, (a, act) in enumerate(steps)),
        terminal_tick=len(steps),
        goal_ticks=tuple(goal_ticks),
    )
