"""Core data model: game domains, mechanics, requirements, and their JSON forms.

A game domain declares entities, integer-valued parameters, per-pair value
ranges, derived predicates, engine rules, an agent turn order, and concrete
instances (initial values).  Mechanics are integer-id'd bundles of
time-indexed precondition and effect atoms.  Everything in this module is
immutable after construction; parsing and validation live in ``loader``.
"""

from __future__ import annotations

import hashlib
import itertools
import json
from dataclasses import dataclass, field, replace

ABSOLUTE = "absolute"
RELATIVE = "relative"
FRAMES = (ABSOLUTE, RELATIVE)

# Relations available to mechanic atoms (the generator's vocabulary).
RELATIONS = ("eq", "neq", "lt", "gt")
# Engine rules are hand-authored and may also use the inclusive forms.
GUARD_RELATIONS = RELATIONS + ("le", "ge")

NOOP = "noop"

_REL_FUNCS = {
    "eq": lambda a, b: a == b,
    "neq": lambda a, b: a != b,
    "lt": lambda a, b: a < b,
    "gt": lambda a, b: a > b,
    "le": lambda a, b: a <= b,
    "ge": lambda a, b: a >= b,
}


def compare(rel: str, a: int, b: int) -> bool:
    return _REL_FUNCS[rel](a, b)


class ModelError(ValueError):
    """Raised for structurally invalid model values."""


# ---------------------------------------------------------------------------
# Condition and effect atoms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ParamTest:
    """Compare a parameter value at ``offset`` ticks from now against ``rhs``.

    Absolute frame compares the raw value; relative frame compares the
    difference between the subject's value and the acting agent's value of
    the same parameter.
    """

    frame: str
    offset: int
    param: str
    entity: str
    rel: str
    rhs: int


@dataclass(frozen=True)
class DerivedTest:
    """Test a named derived predicate applied to ``entity``, optionally negated."""

    offset: int
    pred: str
    entity: str
    negated: bool = False


@dataclass(frozen=True)
class EventTest:
    """Test whether ``entity`` performed mechanic ``mech`` at ``offset`` (< 0)."""

    offset: int
    mech: int
    entity: str
    negated: bool = False


@dataclass(frozen=True)
class ParamUpdate:
    """Write a parameter ``offset`` ticks after execution.

    Absolute frame sets the value to ``amount``; relative frame adds
    ``amount`` as a delta.
    """

    frame: str
    offset: int
    param: str
    entity: str
    amount: int


@dataclass(frozen=True)
class EventInvoke:
    """Trigger another mechanic ``offset`` ticks after execution."""

    offset: int
    mech: int


ConditionAtom = ParamTest | DerivedTest | EventTest
EffectAtom = ParamUpdate | EventInvoke

_KIND_ORDER = {ParamTest: 0, DerivedTest: 1, EventTest: 2, ParamUpdate: 3, EventInvoke: 4}


def atom_sort_key(atom) -> tuple:
    """Total order over atoms: kind, frame, offset, subject, relation, value."""
    if isinstance(atom, ParamTest):
        return (0, atom.frame, atom.offset, atom.param, atom.entity, atom.rel, atom.rhs)
    if isinstance(atom, DerivedTest):
        return (1, "", atom.offset, atom.pred, atom.entity, "", int(atom.negated))
    if isinstance(atom, EventTest):
        return (2, "", atom.offset, str(atom.mech), atom.entity, "", int(atom.negated))
    if isinstance(atom, ParamUpdate):
        return (3, atom.frame, atom.offset, atom.param, atom.entity, "", atom.amount)
    if isinstance(atom, EventInvoke):
        return (4, "", atom.offset, str(atom.mech), "", "", 0)
    raise ModelError(f"not an atom: {atom!r}")


def atom_to_json(atom) -> dict:
    if isinstance(atom, ParamTest):
        return {
            "kind": "param_test",
            "frame": atom.frame,
            "offset": atom.offset,
            "param": atom.param,
            "entity": atom.entity,
            "rel": atom.rel,
            "rhs": atom.rhs,
        }
    if isinstance(atom, DerivedTest):
        return {
            "kind": "derived_test",
            "offset": atom.offset,
            "pred": atom.pred,
            "entity": atom.entity,
            "negated": atom.negated,
        }
    if isinstance(atom, EventTest):
        return {
            "kind": "event_test",
            "offset": atom.offset,
            "mech": atom.mech,
            "entity": atom.entity,
            "negated": atom.negated,
        }
    if isinstance(atom, ParamUpdate):
        return {
            "kind": "param_update",
            "frame": atom.frame,
            "offset": atom.offset,
            "param": atom.param,
            "entity": atom.entity,
            "amount": atom.amount,
        }
    if isinstance(atom, EventInvoke):
        return {"kind": "event_invoke", "offset": atom.offset, "mech": atom.mech}
    raise ModelError(f"not an atom: {atom!r}")


# ---------------------------------------------------------------------------
# Mechanics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Mechanic:
    """An avatar-initiated transition: id, preconditions, effects."""

    id: int
    pre: tuple[ConditionAtom, ...]
    eff: tuple[EffectAtom, ...]
    name: str | None = None

    def display(self) -> str:
        return self.name if self.name else f"mech{self.id}"

    def atoms(self):
        return self.pre + self.eff


def canonicalize_mechanic(m: Mechanic) -> Mechanic:
    """Sort atoms into the total order and drop duplicates (idempotent)."""
    pre = tuple(sorted(set(m.pre), key=atom_sort_key))
    eff = tuple(sorted(set(m.eff), key=atom_sort_key))
    if pre == m.pre and eff == m.eff:
        return m
    return replace(m, pre=pre, eff=eff)


def _shape_key(atom, mapping: dict[int, int]) -> tuple:
    # Event references inside the set are relabeled through ``mapping``;
    # references to mechanics outside the set stay distinguishable.
    if isinstance(atom, EventTest):
        label = ("i", mapping[atom.mech]) if atom.mech in mapping else ("x", atom.mech)
        return (2, atom.offset, label, atom.entity, int(atom.negated))
    if isinstance(atom, EventInvoke):
        label = ("i", mapping[atom.mech]) if atom.mech in mapping else ("x", atom.mech)
        return (4, atom.offset, label)
    return atom_sort_key(atom)


def mechanic_signature(mechanics) -> str:
    """Stable signature of a mechanic multiset, insensitive to order and ids.

    Ids are canonicalized by minimizing over all bijections onto 1..k, with
    each mechanic's shape pinned at its relabeled position so self-references
    and cross-references stay distinct.  Sets at generator scale are tiny, so
    the factorial sweep is cheap.
    """
    ms = [canonicalize_mechanic(m) for m in mechanics]
    ids = [m.id for m in ms]
    if len(set(ids)) != len(ids):
        raise ModelError("mechanic ids must be distinct within a set")
    best = None
    for perm in itertools.permutations(range(1, len(ms) + 1)):
        mapping = dict(zip(ids, perm))
        entry: list = [None] * len(ms)
        for m in ms:
            pre = tuple(sorted(_shape_key(a, mapping) for a in m.pre))
            eff = tuple(sorted(_shape_key(a, mapping) for a in m.eff))
            entry[mapping[m.id] - 1] = (pre, eff)
        key = tuple(entry)
        if best is None or key < best:
            best = key
    payload = repr(best).encode()
    return hashlib.sha256(payload).hexdigest()


# ---------------------------------------------------------------------------
# Domain declarations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Conjunct:
    """One clause of a derived predicate: param(arg) REL bound_param(b) + const."""

    param: str
    rel: str
    bound_param: str
    const: int


@dataclass(frozen=True)
class DerivedPredicate:
    """Existential predicate over a bound entity class.

    ``pred(e)`` holds when some entity ``b`` in ``klass`` satisfies every
    conjunct with ``e`` as the argument.
    """

    name: str
    klass: str
    conjuncts: tuple[Conjunct, ...]


@dataclass(frozen=True)
class GuardAtom:
    """Condition used by engine rules; ``entity=None`` binds the rule's class entity."""

    kind: str  # "param_test" | "derived_test"
    param: str | None = None
    pred: str | None = None
    entity: str | None = None
    rel: str | None = None
    rhs: int | None = None
    negated: bool = False


@dataclass(frozen=True)
class InvariantRule:
    """Must hold in every reached state, for every entity of ``klass`` if set.

    Violations are judged against both the pre-saturation values produced by
    effects and the final values after forced updates, so overdrawing a
    resource is illegal even though stored values saturate at range bounds.
    """

    name: str
    atoms: tuple[GuardAtom, ...]
    klass: str | None = None


@dataclass(frozen=True)
class ForcedUpdateRule:
    """Per-tick engine update (e.g. gravity) applied to every entity of a class."""

    name: str
    klass: str
    guard: tuple[GuardAtom, ...]
    param: str
    delta: int


EngineRule = InvariantRule | ForcedUpdateRule


@dataclass(frozen=True)
class GameInstance:
    name: str
    level: int
    initials: tuple[tuple[tuple[str, str], int], ...]  # ((param, entity), value)

    def initial_values(self) -> dict[tuple[str, str], int]:
        return dict(self.initials)


@dataclass(frozen=True)
class AgentGoals:
    goal: tuple[ConditionAtom, ...] = ()
    maintenance: tuple[ConditionAtom, ...] = ()


ORDERING_NONE = "none"
ORDERING_PLAYER_FIRST = "player_first"


@dataclass(frozen=True)
class PlayabilityRequirements:
    player_agent: str
    per_agent: tuple[tuple[str, AgentGoals], ...] = ()
    ordering: str = ORDERING_NONE
    horizon: int | None = None
    allow_noop: bool = True

    def goals_for(self, agent: str) -> AgentGoals:
        for name, goals in self.per_agent:
            if name == agent:
                return goals
        return AgentGoals()


# -- design requirements ----------------------------------------------------


@dataclass(frozen=True)
class NoContradictoryEquality:
    kind: str = field(default="no_contradictory_equality", init=False)


@dataclass(frozen=True)
class NoDuplicateMechanics:
    kind: str = field(default="no_duplicate_mechanics", init=False)


@dataclass(frozen=True)
class CostRequired:
    """Every mechanic must spend an agent-owned resource via a negative delta."""

    resources: tuple[tuple[str, bool], ...]  # (param, owner_must_be_agent)
    kind: str = field(default="cost_required", init=False)


@dataclass(frozen=True)
class NoEmptyEffects:
    kind: str = field(default="no_empty_effects", init=False)


@dataclass(frozen=True)
class MaxAtoms:
    max_pre: int | None = None
    max_eff: int | None = None
    kind: str = field(default="max_atoms", init=False)


HardReq = (
    NoContradictoryEquality | NoDuplicateMechanics | CostRequired | NoEmptyEffects | MaxAtoms
)

SOFT_TERMS = (
    "atom_count",
    "mechanic_count",
    "distinct_entities",
    "adaptation_distance",
    "control_intuitiveness",
)


@dataclass(frozen=True)
class SoftReq:
    term: str
    weight: int = 1
    priority: int = 1


@dataclass(frozen=True)
class AdaptationReqs:
    weight: int = 1
    priority: int | None = None  # defaults to one above the highest soft priority


@dataclass(frozen=True)
class ProgressionReqs:
    increasing_usage: bool = True
    reuse_in_subsequent: bool = True


@dataclass(frozen=True)
class ControlReqs:
    require_input: bool = True
    unambiguous: bool = True
    intuitiveness_priority: int | None = None
    intuitiveness_weight: int = 1


@dataclass(frozen=True)
class DesignRequirements:
    hard: tuple[HardReq, ...] = ()
    soft: tuple[SoftReq, ...] = ()
    adaptation: AdaptationReqs | None = None
    progression: ProgressionReqs | None = None
    controls: ControlReqs | None = None


@dataclass(frozen=True)
class GeneratorBounds:
    max_mechanics: int = 1
    max_pre: int = 1
    max_eff: int = 1
    pre_offsets: tuple[int, int] = (0, 0)  # [lo, 0]
    eff_offsets: tuple[int, int] = (1, 1)  # [1, hi]
    constants: tuple[int, ...] = (0,)
    horizon: int = 8
    trace_cap: int = 32
    invoke_depth: int = 4


@dataclass(frozen=True)
class DomainSpec:
    entities: tuple[str, ...]
    classes: tuple[tuple[str, tuple[str, ...]], ...]
    parameters: tuple[str, ...]
    has: tuple[tuple[str, str], ...]  # (entity, param)
    abs_ranges: tuple[tuple[tuple[str, str], tuple[int, int]], ...]  # ((param, entity), (lo, hi))
    rel_ranges: tuple[tuple[tuple[str, str], tuple[int, int]], ...]
    derived: tuple[DerivedPredicate, ...]
    engine_rules: tuple[EngineRule, ...]
    agents: tuple[str, ...]
    inputs: tuple[str, ...]
    instances: tuple[GameInstance, ...]
    playability: PlayabilityRequirements
    design: DesignRequirements
    bounds: GeneratorBounds

    # -- convenience views (deterministic, derived from the declarations) --

    def class_members(self, name: str) -> tuple[str, ...]:
        for klass, members in self.classes:
            if klass == name:
                return members
        raise ModelError(f"unknown entity class: {name}")

    def has_pairs(self) -> tuple[tuple[str, str], ...]:
        """Owned (param, entity) pairs in deterministic (entity, param) order."""
        return tuple((p, e) for e, p in sorted(self.has))

    def abs_range(self, param: str, entity: str) -> tuple[int, int]:
        for pair, rng in self.abs_ranges:
            if pair == (param, entity):
                return rng
        raise ModelError(f"no absolute range for {param}({entity})")

    def rel_range(self, param: str, entity: str) -> tuple[int, int]:
        for pair, rng in self.rel_ranges:
            if pair == (param, entity):
                return rng
        raise ModelError(f"no relative range for {param}({entity})")

    def owns(self, entity: str, param: str) -> bool:
        return (entity, param) in set(self.has)

    def derived_by_name(self, name: str) -> DerivedPredicate:
        for dp in self.derived:
            if dp.name == name:
                return dp
        raise ModelError(f"unknown derived predicate: {name}")

    def instance_by_name(self, name: str) -> GameInstance:
        for inst in self.instances:
            if inst.name == name:
                return inst
        raise ModelError(f"unknown instance: {name}")

    def horizon(self) -> int:
        if self.playability.horizon is not None:
            return self.playability.horizon
        return self.bounds.horizon


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceStep:
    tick: int
    agent: str
    action: int | str  # mechanic id or NOOP


@dataclass(frozen=True)
class Trace:
    instance: str
    steps: tuple[TraceStep, ...]
    terminal_tick: int = 0
    goal_ticks: tuple[tuple[str, int], ...] = ()

    def used_mechanics(self) -> frozenset[int]:
        return frozenset(s.action for s in self.steps if s.action != NOOP)


def trace_to_json(trace: Trace, mechanics: dict[int, Mechanic] | None = None) -> dict:
    steps = []
    for s in trace.steps:
        action: int | str = s.action
        if action != NOOP and mechanics and action in mechanics and mechanics[action].name:
            action = mechanics[action].name
        steps.append({"tick": s.tick, "agent": s.agent, "action": action})
    return {
        "instance": trace.instance,
        "steps": steps,
        "terminal_tick": trace.terminal_tick,
        "goal_ticks": {a: t for a, t in trace.goal_ticks},
    }


def canonical_json(obj) -> str:
    """Stable on-disk JSON form; files written this way round-trip bit-exact."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
