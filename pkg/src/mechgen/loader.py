"""Domain, mechanics, and trace file handling.

Domain files are JSON documents with a closed set of top-level keys.  A file
may also hold a JSON array of domain fragments; fragments are merged with
union semantics so independently authored domains concatenate without edits
(entities, classes, ranges, rules, and per-agent goals combine; instances
merge level by level).  Parsing rejects unknown fields and unknown
references; range and coverage invariants are reported by
:func:`validate_domain` rather than raised.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .model import (
    ABSOLUTE,
    FRAMES,
    GUARD_RELATIONS,
    RELATIONS,
    RELATIVE,
    SOFT_TERMS,
    AdaptationReqs,
    AgentGoals,
    Conjunct,
    ControlReqs,
    CostRequired,
    DerivedPredicate,
    DerivedTest,
    DesignRequirements,
    DomainSpec,
    EventInvoke,
    EventTest,
    ForcedUpdateRule,
    GameInstance,
    GeneratorBounds,
    GuardAtom,
    InvariantRule,
    MaxAtoms,
    Mechanic,
    NoContradictoryEquality,
    NoDuplicateMechanics,
    NoEmptyEffects,
    NOOP,
    ORDERING_NONE,
    ORDERING_PLAYER_FIRST,
    ParamTest,
    ParamUpdate,
    PlayabilityRequirements,
    ProgressionReqs,
    SoftReq,
    Trace,
    TraceStep,
    atom_to_json,
    canonical_json,
    canonicalize_mechanic,
)

logger = logging.getLogger(__name__)

DOMAIN_KEYS = {
    "entities",
    "classes",
    "parameters",
    "has",
    "abs_ranges",
    "rel_ranges",
    "derived",
    "engine_rules",
    "agents",
    "inputs",
    "instances",
    "playability",
    "design",
    "bounds",
}


class DomainFormatError(ValueError):
    """A domain, mechanics, or trace document cannot be loaded."""


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}


# ---------------------------------------------------------------------------
# Scalar helpers
# ---------------------------------------------------------------------------


def _int(value, where: str) -> int:
    # bool is an int subclass; parameter values are strict integers.
    if isinstance(value, bool) or not isinstance(value, int):
        raise DomainFormatError(f"{where}: expected an integer, got {value!r}")
    return value


def _str(value, where: str) -> str:
    if not isinstance(value, str) or not value:
        raise DomainFormatError(f"{where}: expected a non-empty string, got {value!r}")
    return value


def _bool(value, where: str) -> bool:
    if not isinstance(value, bool):
        raise DomainFormatError(f"{where}: expected a boolean, got {value!r}")
    return value


def _obj(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise DomainFormatError(f"{where}: expected an object, got {value!r}")
    return value


def _arr(value, where: str) -> list:
    if not isinstance(value, list):
        raise DomainFormatError(f"{where}: expected an array, got {value!r}")
    return value


def _check_keys(doc: dict, allowed: set[str], where: str) -> None:
    unknown = set(doc) - allowed
    if unknown:
        raise DomainFormatError(f"{where}: unknown field(s) {sorted(unknown)}")


def _choice(value, options, where: str) -> str:
    if value not in options:
        raise DomainFormatError(f"{where}: expected one of {sorted(options)}, got {value!r}")
    return value


# ---------------------------------------------------------------------------
# Atom parsing (shared by domain goals, mechanics files, and overlays)
# ---------------------------------------------------------------------------


class _Ctx:
    """Name tables collected from a parsed document, used for reference checks."""

    def __init__(self, entities, parameters, has, classes, derived):
        self.entities = entities
        self.parameters = parameters
        self.has = has
        self.classes = classes
        self.derived = derived

    def check_entity(self, name, where):
        if name not in self.entities:
            raise DomainFormatError(f"{where}: unknown entity {name!r}")

    def check_param(self, name, where):
        if name not in self.parameters:
            raise DomainFormatError(f"{where}: unknown parameter {name!r}")


def parse_condition_atom(doc: dict, ctx: _Ctx, where: str):
    doc = _obj(doc, where)
    kind = _str(doc.get("kind"), f"{where}.kind")
    if kind == "param_test":
        _check_keys(doc, {"kind", "frame", "offset", "param", "entity", "rel", "rhs"}, where)
        atom = ParamTest(
            frame=_choice(doc.get("frame", ABSOLUTE), FRAMES, f"{where}.frame"),
            offset=_int(doc.get("offset", 0), f"{where}.offset"),
            param=_str(doc.get("param"), f"{where}.param"),
            entity=_str(doc.get("entity"), f"{where}.entity"),
            rel=_choice(doc.get("rel"), RELATIONS, f"{where}.rel"),
            rhs=_int(doc.get("rhs"), f"{where}.rhs"),
        )
        ctx.check_entity(atom.entity, where)
        ctx.check_param(atom.param, where)
        if atom.offset > 0:
            raise DomainFormatError(f"{where}: precondition offsets must be <= 0")
        return atom
    if kind == "derived_test":
        _check_keys(doc, {"kind", "offset", "pred", "entity", "negated"}, where)
        atom = DerivedTest(
            offset=_int(doc.get("offset", 0), f"{where}.offset"),
            pred=_str(doc.get("pred"), f"{where}.pred"),
            entity=_str(doc.get("entity"), f"{where}.entity"),
            negated=_bool(doc.get("negated", False), f"{where}.negated"),
        )
        ctx.check_entity(atom.entity, where)
        if atom.pred not in ctx.derived:
            raise DomainFormatError(f"{where}: unknown derived predicate {atom.pred!r}")
        if atom.offset > 0:
            raise DomainFormatError(f"{where}: precondition offsets must be <= 0")
        return atom
    if kind == "event_test":
        _check_keys(doc, {"kind", "offset", "mech", "entity", "negated"}, where)
        atom = EventTest(
            offset=_int(doc.get("offset", -1), f"{where}.offset"),
            mech=_int(doc.get("mech"), f"{where}.mech"),
            entity=_str(doc.get("entity"), f"{where}.entity"),
            negated=_bool(doc.get("negated", False), f"{where}.negated"),
        )
        ctx.check_entity(atom.entity, where)
        if atom.offset > -1:
            raise DomainFormatError(f"{where}: event test offsets must be <= -1")
        return atom
    raise DomainFormatError(f"{where}: unknown condition kind {kind!r}")


def parse_effect_atom(doc: dict, ctx: _Ctx, where: str, warnings: list[str]):
    doc = _obj(doc, where)
    kind = _str(doc.get("kind"), f"{where}.kind")
    if kind == "param_update":
        _check_keys(doc, {"kind", "frame", "offset", "param", "entity", "amount"}, where)
        offset = _int(doc.get("offset", 1), f"{where}.offset")
        if offset == 0:
            warnings.append(f"{where}: effect offset 0 normalized to 1")
            offset = 1
        if offset < 1:
            raise DomainFormatError(f"{where}: effect offsets must be >= 1")
        atom = ParamUpdate(
            frame=_choice(doc.get("frame", RELATIVE), FRAMES, f"{where}.frame"),
            offset=offset,
            param=_str(doc.get("param"), f"{where}.param"),
            entity=_str(doc.get("entity"), f"{where}.entity"),
            amount=_int(doc.get("amount"), f"{where}.amount"),
        )
        ctx.check_entity(atom.entity, where)
        ctx.check_param(atom.param, where)
        return atom
    if kind == "event_invoke":
        _check_keys(doc, {"kind", "offset", "mech"}, where)
        offset = _int(doc.get("offset", 1), f"{where}.offset")
        if offset == 0:
            warnings.append(f"{where}: effect offset 0 normalized to 1")
            offset = 1
        if offset < 1:
            raise DomainFormatError(f"{where}: effect offsets must be >= 1")
        return EventInvoke(offset=offset, mech=_int(doc.get("mech"), f"{where}.mech"))
    raise DomainFormatError(f"{where}: unknown effect kind {kind!r}")


def _parse_guard_atom(doc: dict, ctx: _Ctx, where: str) -> GuardAtom:
    doc = _obj(doc, where)
    kind = _str(doc.get("kind"), f"{where}.kind")
    entity = doc.get("entity")
    if entity is not None:
        entity = _str(entity, f"{where}.entity")
        ctx.check_entity(entity, where)
    if kind == "param_test":
        _check_keys(doc, {"kind", "param", "entity", "rel", "rhs"}, where)
        param = _str(doc.get("param"), f"{where}.param")
        ctx.check_param(param, where)
        return GuardAtom(
            kind="param_test",
            param=param,
            entity=entity,
            rel=_choice(doc.get("rel"), GUARD_RELATIONS, f"{where}.rel"),
            rhs=_int(doc.get("rhs"), f"{where}.rhs"),
        )
    if kind == "derived_test":
        _check_keys(doc, {"kind", "pred", "entity", "negated"}, where)
        pred = _str(doc.get("pred"), f"{where}.pred")
        if pred not in ctx.derived:
            raise DomainFormatError(f"{where}: unknown derived predicate {pred!r}")
        return GuardAtom(
            kind="derived_test",
            pred=pred,
            entity=entity,
            negated=_bool(doc.get("negated", False), f"{where}.negated"),
        )
    raise DomainFormatError(f"{where}: unknown guard kind {kind!r}")


# ---------------------------------------------------------------------------
# Domain parsing
# ---------------------------------------------------------------------------


def _parse_pair_ranges(docs, ctx: _Ctx, where: str):
    out = {}
    for i, item in enumerate(_arr(docs, where)):
        w = f"{where}[{i}]"
        item = _obj(item, w)
        _check_keys(item, {"param", "entity", "lo", "hi"}, w)
        param = _str(item.get("param"), f"{w}.param")
        entity = _str(item.get("entity"), f"{w}.entity")
        ctx.check_param(param, w)
        ctx.check_entity(entity, w)
        pair = (param, entity)
        if pair in out:
            raise DomainFormatError(f"{w}: duplicate range for {param}({entity})")
        out[pair] = (_int(item.get("lo"), f"{w}.lo"), _int(item.get("hi"), f"{w}.hi"))
    return tuple(sorted(out.items()))


def _parse_hard_req(doc: dict, ctx: _Ctx, where: str):
    doc = _obj(doc, where)
    kind = _str(doc.get("kind"), f"{where}.kind")
    if kind == "no_contradictory_equality":
        _check_keys(doc, {"kind"}, where)
        return NoContradictoryEquality()
    if kind == "no_duplicate_mechanics":
        _check_keys(doc, {"kind"}, where)
        return NoDuplicateMechanics()
    if kind == "no_empty_effects":
        _check_keys(doc, {"kind"}, where)
        return NoEmptyEffects()
    if kind == "cost_required":
        _check_keys(doc, {"kind", "resources"}, where)
        resources = []
        for i, res in enumerate(_arr(doc.get("resources"), f"{where}.resources")):
            w = f"{where}.resources[{i}]"
            res = _obj(res, w)
            _check_keys(res, {"param", "actor"}, w)
            param = _str(res.get("param"), f"{w}.param")
            ctx.check_param(param, w)
            resources.append((param, _bool(res.get("actor", True), f"{w}.actor")))
        if not resources:
            raise DomainFormatError(f"{where}: cost_required needs at least one resource")
        return CostRequired(resources=tuple(resources))
    if kind == "max_atoms":
        _check_keys(doc, {"kind", "max_pre", "max_eff"}, where)
        max_pre = doc.get("max_pre")
        max_eff = doc.get("max_eff")
        return MaxAtoms(
            max_pre=None if max_pre is None else _int(max_pre, f"{where}.max_pre"),
            max_eff=None if max_eff is None else _int(max_eff, f"{where}.max_eff"),
        )
    raise DomainFormatError(f"{where}: unknown hard requirement {kind!r}")


def _parse_design(doc, ctx: _Ctx, where: str) -> DesignRequirements:
    doc = _obj(doc, where)
    _check_keys(doc, {"hard", "soft", "adaptation", "progression", "controls"}, where)
    hard = tuple(
        _parse_hard_req(h, ctx, f"{where}.hard[{i}]")
        for i, h in enumerate(_arr(doc.get("hard", []), f"{where}.hard"))
    )
    soft = []
    seen_priorities = set()
    for i, s in enumerate(_arr(doc.get("soft", []), f"{where}.soft")):
        w = f"{where}.soft[{i}]"
        s = _obj(s, w)
        _check_keys(s, {"term", "weight", "priority"}, w)
        term = _choice(s.get("term"), SOFT_TERMS, f"{w}.term")
        weight = _int(s.get("weight", 1), f"{w}.weight")
        priority = _int(s.get("priority", 1), f"{w}.priority")
        if weight < 1:
            raise DomainFormatError(f"{w}: weight must be >= 1")
        if priority in seen_priorities:
            raise DomainFormatError(f"{w}: duplicate soft priority {priority}")
        seen_priorities.add(priority)
        soft.append(SoftReq(term=term, weight=weight, priority=priority))
    adaptation = None
    if doc.get("adaptation") is not None:
        a = _obj(doc["adaptation"], f"{where}.adaptation")
        _check_keys(a, {"weight", "priority"}, f"{where}.adaptation")
        adaptation = AdaptationReqs(
            weight=_int(a.get("weight", 1), f"{where}.adaptation.weight"),
            priority=(
                None
                if a.get("priority") is None
                else _int(a["priority"], f"{where}.adaptation.priority")
            ),
        )
    progression = None
    if doc.get("progression") is not None:
        p = _obj(doc["progression"], f"{where}.progression")
        _check_keys(p, {"increasing_usage", "reuse_in_subsequent"}, f"{where}.progression")
        progression = ProgressionReqs(
            increasing_usage=_bool(p.get("increasing_usage", True), f"{where}.progression"),
            reuse_in_subsequent=_bool(p.get("reuse_in_subsequent", True), f"{where}.progression"),
        )
    controls = None
    if doc.get("controls") is not None:
        c = _obj(doc["controls"], f"{where}.controls")
        _check_keys(
            c,
            {"require_input", "unambiguous", "intuitiveness_priority", "intuitiveness_weight"},
            f"{where}.controls",
        )
        controls = ControlReqs(
            require_input=_bool(c.get("require_input", True), f"{where}.controls"),
            unambiguous=_bool(c.get("unambiguous", True), f"{where}.controls"),
            intuitiveness_priority=(
                None
                if c.get("intuitiveness_priority") is None
                else _int(c["intuitiveness_priority"], f"{where}.controls")
            ),
            intuitiveness_weight=_int(c.get("intuitiveness_weight", 1), f"{where}.controls"),
        )
    return DesignRequirements(
        hard=hard, soft=tuple(soft), adaptation=adaptation, progression=progression,
        controls=controls,
    )


def _parse_bounds(doc, where: str) -> GeneratorBounds:
    doc = _obj(doc, where)
    _check_keys(
        doc,
        {
            "max_mechanics",
            "max_pre",
            "max_eff",
            "pre_offsets",
            "eff_offsets",
            "constants",
            "horizon",
            "trace_cap",
            "invoke_depth",
        },
        where,
    )
    defaults = GeneratorBounds()

    def window(key, default, lo_ok, hi_ok):
        raw = doc.get(key)
        if raw is None:
            return default
        raw = _arr(raw, f"{where}.{key}")
        if len(raw) != 2:
            raise DomainFormatError(f"{where}.{key}: expected [lo, hi]")
        lo = _int(raw[0], f"{where}.{key}[0]")
        hi = _int(raw[1], f"{where}.{key}[1]")
        if lo > hi or not lo_ok(lo) or not hi_ok(hi):
            raise DomainFormatError(f"{where}.{key}: invalid window [{lo}, {hi}]")
        return (lo, hi)

    bounds = GeneratorBounds(
        max_mechanics=_int(doc.get("max_mechanics", defaults.max_mechanics), f"{where}.max_mechanics"),
        max_pre=_int(doc.get("max_pre", defaults.max_pre), f"{where}.max_pre"),
        max_eff=_int(doc.get("max_eff", defaults.max_eff), f"{where}.max_eff"),
        pre_offsets=window("pre_offsets", defaults.pre_offsets, lambda lo: lo <= 0, lambda hi: hi == 0),
        eff_offsets=window("eff_offsets", defaults.eff_offsets, lambda lo: lo == 1, lambda hi: hi >= 1),
        constants=tuple(
            sorted(
                {
                    _int(c, f"{where}.constants[{i}]")
                    for i, c in enumerate(_arr(doc.get("constants", [0]), f"{where}.constants"))
                }
            )
        ),
        horizon=_int(doc.get("horizon", defaults.horizon), f"{where}.horizon"),
        trace_cap=_int(doc.get("trace_cap", defaults.trace_cap), f"{where}.trace_cap"),
        invoke_depth=_int(doc.get("invoke_depth", defaults.invoke_depth), f"{where}.invoke_depth"),
    )
    for field_name in ("max_mechanics", "max_eff", "horizon", "trace_cap", "invoke_depth"):
        if getattr(bounds, field_name) < 1:
            raise DomainFormatError(f"{where}.{field_name}: must be >= 1")
    if bounds.max_pre < 0:
        raise DomainFormatError(f"{where}.max_pre: must be >= 0")
    return bounds


def parse_domain_dict(doc: dict) -> DomainSpec:
    doc = _obj(doc, "domain")
    _check_keys(doc, DOMAIN_KEYS, "domain")

    entities = []
    for i, e in enumerate(_arr(doc.get("entities", []), "entities")):
        name = _str(e, f"entities[{i}]")
        if name in entities:
            raise DomainFormatError(f"entities[{i}]: duplicate declaration of {name!r}")
        entities.append(name)
    if not entities:
        raise DomainFormatError("no entities declared")

    parameters = []
    for i, p in enumerate(_arr(doc.get("parameters", []), "parameters")):
        name = _str(p, f"parameters[{i}]")
        if name in parameters:
            raise DomainFormatError(f"parameters[{i}]: duplicate declaration of {name!r}")
        parameters.append(name)

    classes = []
    class_names = set()
    for name, members in _obj(doc.get("classes", {}), "classes").items():
        if name in class_names:
            raise DomainFormatError(f"classes: duplicate declaration of {name!r}")
        class_names.add(name)
        out = []
        for i, m in enumerate(_arr(members, f"classes.{name}")):
            member = _str(m, f"classes.{name}[{i}]")
            if member not in entities:
                raise DomainFormatError(f"classes.{name}[{i}]: unknown entity {member!r}")
            if member in out:
                raise DomainFormatError(f"classes.{name}[{i}]: duplicate member {member!r}")
            out.append(member)
        classes.append((name, tuple(out)))

    has = set()
    for i, pair in enumerate(_arr(doc.get("has", []), "has")):
        w = f"has[{i}]"
        pair = _arr(pair, w)
        if len(pair) != 2:
            raise DomainFormatError(f"{w}: expected [entity, parameter]")
        entity = _str(pair[0], f"{w}[0]")
        param = _str(pair[1], f"{w}[1]")
        if entity not in entities:
            raise DomainFormatError(f"{w}: unknown entity {entity!r}")
        if param not in parameters:
            raise DomainFormatError(f"{w}: unknown parameter {param!r}")
        if (entity, param) in has:
            raise DomainFormatError(f"{w}: duplicate declaration of ({entity}, {param})")
        has.add((entity, param))

    derived_names: dict[str, DerivedPredicate] = {}
    ctx = _Ctx(set(entities), set(parameters), has, dict(classes), derived_names)

    abs_ranges = _parse_pair_ranges(doc.get("abs_ranges", []), ctx, "abs_ranges")
    rel_ranges = _parse_pair_ranges(doc.get("rel_ranges", []), ctx, "rel_ranges")

    derived = []
    for i, d in enumerate(_arr(doc.get("derived", []), "derived")):
        w = f"derived[{i}]"
        d = _obj(d, w)
        _check_keys(d, {"name", "class", "conjuncts"}, w)
        name = _str(d.get("name"), f"{w}.name")
        if name in derived_names:
            raise DomainFormatError(f"{w}: duplicate declaration of {name!r}")
        klass = _str(d.get("class"), f"{w}.class")
        if klass not in ctx.classes:
            raise DomainFormatError(f"{w}: unknown entity class {klass!r}")
        conjuncts = []
        for j, c in enumerate(_arr(d.get("conjuncts", []), f"{w}.conjuncts")):
            cw = f"{w}.conjuncts[{j}]"
            c = _obj(c, cw)
            _check_keys(c, {"param", "rel", "bound_param", "const"}, cw)
            param = _str(c.get("param"), f"{cw}.param")
            bound = _str(c.get("bound_param"), f"{cw}.bound_param")
            ctx.check_param(param, cw)
            ctx.check_param(bound, cw)
            conjuncts.append(
                Conjunct(
                    param=param,
                    rel=_choice(c.get("rel", "eq"), RELATIONS, f"{cw}.rel"),
                    bound_param=bound,
                    const=_int(c.get("const", 0), f"{cw}.const"),
                )
            )
        if not conjuncts:
            raise DomainFormatError(f"{w}: derived predicate needs at least one conjunct")
        pred = DerivedPredicate(name=name, klass=klass, conjuncts=tuple(conjuncts))
        derived.append(pred)
        derived_names[name] = pred

    engine_rules = []
    rule_names = set()
    for i, r in enumerate(_arr(doc.get("engine_rules", []), "engine_rules")):
        w = f"engine_rules[{i}]"
        r = _obj(r, w)
        kind = _str(r.get("kind"), f"{w}.kind")
        name = _str(r.get("name"), f"{w}.name")
        if name in rule_names:
            raise DomainFormatError(f"{w}: duplicate declaration of {name!r}")
        rule_names.add(name)
        klass = r.get("class")
        if klass is not None:
            klass = _str(klass, f"{w}.class")
            if klass not in ctx.classes:
                raise DomainFormatError(f"{w}: unknown entity class {klass!r}")
        if kind == "invariant":
            _check_keys(r, {"kind", "name", "class", "all"}, w)
            atoms = tuple(
                _parse_guard_atom(a, ctx, f"{w}.all[{j}]")
                for j, a in enumerate(_arr(r.get("all", []), f"{w}.all"))
            )
            if not atoms:
                raise DomainFormatError(f"{w}: invariant needs at least one condition")
            engine_rules.append(InvariantRule(name=name, klass=klass, atoms=atoms))
        elif kind == "forced_update":
            _check_keys(r, {"kind", "name", "class", "guard", "param", "delta"}, w)
            if klass is None:
                raise DomainFormatError(f"{w}: forced_update requires a class")
            param = _str(r.get("param"), f"{w}.param")
            ctx.check_param(param, w)
            guard = tuple(
                _parse_guard_atom(a, ctx, f"{w}.guard[{j}]")
                for j, a in enumerate(_arr(r.get("guard", []), f"{w}.guard"))
            )
            engine_rules.append(
                ForcedUpdateRule(
                    name=name,
                    klass=klass,
                    guard=guard,
                    param=param,
                    delta=_int(r.get("delta"), f"{w}.delta"),
                )
            )
        else:
            raise DomainFormatError(f"{w}: unknown engine rule kind {kind!r}")

    agents = []
    for i, a in enumerate(_arr(doc.get("agents", []), "agents")):
        name = _str(a, f"agents[{i}]")
        if name not in entities:
            raise DomainFormatError(f"agents[{i}]: unknown entity {name!r}")
        if name in agents:
            raise DomainFormatError(f"agents[{i}]: duplicate declaration of {name!r}")
        agents.append(name)
    if not agents:
        raise DomainFormatError("no agents declared")

    inputs = []
    for i, s in enumerate(_arr(doc.get("inputs", []), "inputs")):
        sym = _str(s, f"inputs[{i}]")
        if sym in inputs:
            raise DomainFormatError(f"inputs[{i}]: duplicate declaration of {sym!r}")
        inputs.append(sym)

    instances = []
    instance_names = set()
    for i, inst in enumerate(_arr(doc.get("instances", []), "instances")):
        w = f"instances[{i}]"
        inst = _obj(inst, w)
        _check_keys(inst, {"name", "level", "initials"}, w)
        name = _str(inst.get("name"), f"{w}.name")
        if name in instance_names:
            raise DomainFormatError(f"{w}: duplicate instance name {name!r}")
        instance_names.add(name)
        level = _int(inst.get("level", 0), f"{w}.level")
        if level < 0:
            raise DomainFormatError(f"{w}.level: must be >= 0")
        initials = {}
        for j, init in enumerate(_arr(inst.get("initials", []), f"{w}.initials")):
            iw = f"{w}.initials[{j}]"
            init = _obj(init, iw)
            _check_keys(init, {"param", "entity", "value"}, iw)
            param = _str(init.get("param"), f"{iw}.param")
            entity = _str(init.get("entity"), f"{iw}.entity")
            ctx.check_param(param, iw)
            ctx.check_entity(entity, iw)
            pair = (param, entity)
            if pair in initials:
                raise DomainFormatError(f"{iw}: duplicate initial for {param}({entity})")
            initials[pair] = _int(init.get("value"), f"{iw}.value")
        instances.append(
            GameInstance(name=name, level=level, initials=tuple(sorted(initials.items())))
        )
    if not instances:
        raise DomainFormatError("no instances declared")

    play = _obj(doc.get("playability", {}), "playability")
    _check_keys(play, {"player_agent", "ordering", "horizon", "allow_noop", "agents"}, "playability")
    player_agent = _str(play.get("player_agent", agents[0]), "playability.player_agent")
    if player_agent not in agents:
        raise DomainFormatError(f"playability.player_agent: unknown agent {player_agent!r}")
    per_agent = []
    for agent_name, goals in _obj(play.get("agents", {}), "playability.agents").items():
        w = f"playability.agents.{agent_name}"
        if agent_name not in agents:
            raise DomainFormatError(f"{w}: unknown agent {agent_name!r}")
        goals = _obj(goals, w)
        _check_keys(goals, {"goal", "maintenance"}, w)

        def goal_atoms(key):
            atoms = []
            for j, a in enumerate(_arr(goals.get(key, []), f"{w}.{key}")):
                atom = parse_condition_atom(a, ctx, f"{w}.{key}[{j}]")
                if atom.offset != 0:
                    raise DomainFormatError(f"{w}.{key}[{j}]: goal atoms use offset 0 only")
                if isinstance(atom, EventTest):
                    raise DomainFormatError(f"{w}.{key}[{j}]: event tests require offset <= -1")
                atoms.append(atom)
            return tuple(atoms)

        per_agent.append((agent_name, AgentGoals(goal=goal_atoms("goal"), maintenance=goal_atoms("maintenance"))))
    playability = PlayabilityRequirements(
        player_agent=player_agent,
        per_agent=tuple(sorted(per_agent)),
        ordering=_choice(
            play.get("ordering", ORDERING_NONE),
            (ORDERING_NONE, ORDERING_PLAYER_FIRST),
            "playability.ordering",
        ),
        horizon=(
            None if play.get("horizon") is None else _int(play["horizon"], "playability.horizon")
        ),
        allow_noop=_bool(play.get("allow_noop", True), "playability.allow_noop"),
    )

    design = _parse_design(doc.get("design", {}), ctx, "design")
    bounds = _parse_bounds(doc.get("bounds", {}), "bounds")

    return DomainSpec(
        entities=tuple(entities),
        classes=tuple(classes),
        parameters=tuple(parameters),
        has=tuple(sorted(has)),
        abs_ranges=abs_ranges,
        rel_ranges=rel_ranges,
        derived=tuple(derived),
        engine_rules=tuple(engine_rules),
        agents=tuple(agents),
        inputs=tuple(inputs),
        instances=tuple(instances),
        playability=playability,
        design=design,
        bounds=bounds,
    )


def _loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise DomainFormatError(
            f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e


def parse_domain(text: str) -> DomainSpec:
    """Parse a domain document (or an array of fragments) from JSON text."""
    doc = _loads(text)
    if isinstance(doc, list):
        return parse_domain_dict(merge_fragments([_obj(d, f"fragment[{i}]") for i, d in enumerate(doc)]))
    return parse_domain_dict(doc)


def load_domain(*paths: str | Path) -> DomainSpec:
    """Load one or more domain files; several files merge as fragments."""
    fragments: list[dict] = []
    for path in paths:
        doc = _loads(Path(path).read_text(encoding="utf-8"))
        if isinstance(doc, list):
            fragments.extend(_obj(d, f"{path}: fragment[{i}]") for i, d in enumerate(doc))
        else:
            fragments.append(_obj(doc, str(path)))
    if not fragments:
        raise DomainFormatError("no domain documents given")
    if len(fragments) == 1:
        return parse_domain_dict(fragments[0])
    return parse_domain_dict(merge_fragments(fragments))


# ---------------------------------------------------------------------------
# Fragment merging
# ---------------------------------------------------------------------------


def _union(sequences):
    out = []
    for seq in sequences:
        for item in seq:
            if item not in out:
                out.append(item)
    return out


def merge_fragments(fragments: list[dict]) -> dict:
    """Combine domain fragments: unions of declarations, conjunctive goals,
    level-wise instance merging, and field-wise widening of bounds."""
    for i, frag in enumerate(fragments):
        _check_keys(_obj(frag, f"fragment[{i}]"), DOMAIN_KEYS, f"fragment[{i}]")
    merged: dict = {}
    merged["entities"] = _union(f.get("entities", []) for f in fragments)
    merged["parameters"] = _union(f.get("parameters", []) for f in fragments)

    classes: dict[str, list] = {}
    for frag in fragments:
        for name, members in _obj(frag.get("classes", {}), "classes").items():
            classes.setdefault(name, [])
            classes[name] = _union([classes[name], members])
    merged["classes"] = classes

    merged["has"] = _union(f.get("has", []) for f in fragments)

    for key in ("abs_ranges", "rel_ranges"):
        ranges: dict[tuple, dict] = {}
        for frag in fragments:
            for item in frag.get(key, []):
                pair = (item.get("param"), item.get("entity"))
                if pair in ranges and ranges[pair] != item:
                    raise DomainFormatError(
                        f"{key}: conflicting ranges for {pair[0]}({pair[1]}) across fragments"
                    )
                ranges[pair] = item
        merged[key] = [ranges[pair] for pair in sorted(ranges)]

    derived: dict[str, dict] = {}
    for frag in fragments:
        for item in frag.get("derived", []):
            name = item.get("name")
            if name in derived and derived[name] != item:
                raise DomainFormatError(f"derived: conflicting definitions of {name!r}")
            derived.setdefault(name, item)
    merged["derived"] = list(derived.values())

    rules: dict[str, dict] = {}
    for frag in fragments:
        for item in frag.get("engine_rules", []):
            name = item.get("name")
            if name in rules and rules[name] != item:
                raise DomainFormatError(f"engine_rules: conflicting definitions of {name!r}")
            rules.setdefault(name, item)
    merged["engine_rules"] = list(rules.values())

    merged["agents"] = _union(f.get("agents", []) for f in fragments)
    merged["inputs"] = _union(f.get("inputs", []) for f in fragments)

    # Instances merge level by level: the combined level-l instance carries
    # the union of every fragment's level-l initial values.
    by_level: dict[int, dict] = {}
    for frag in fragments:
        for inst in frag.get("instances", []):
            level = inst.get("level", 0)
            slot = by_level.setdefault(level, {"names": [], "level": level, "initials": {}})
            if inst.get("name") not in slot["names"]:
                slot["names"].append(inst.get("name"))
            for init in inst.get("initials", []):
                pair = (init.get("param"), init.get("entity"))
                if pair in slot["initials"] and slot["initials"][pair] != init.get("value"):
                    raise DomainFormatError(
                        f"instances: conflicting initial for {pair[0]}({pair[1]}) at level {level}"
                    )
                slot["initials"][pair] = init.get("value")
    merged["instances"] = [
        {
            "name": "+".join(str(n) for n in by_level[level]["names"]),
            "level": level,
            "initials": [
                {"param": p, "entity": e, "value": v}
                for (p, e), v in sorted(by_level[level]["initials"].items())
            ],
        }
        for level in sorted(by_level)
    ]

    plays = [_obj(f.get("playability", {}), "playability") for f in fragments]
    player_agents = {p.get("player_agent") for p in plays if p.get("player_agent") is not None}
    if len(player_agents) > 1:
        raise DomainFormatError(f"playability: conflicting player agents {sorted(player_agents)}")
    agents_goals: dict[str, dict] = {}
    for p in plays:
        for agent, goals in _obj(p.get("agents", {}), "playability.agents").items():
            slot = agents_goals.setdefault(agent, {"goal": [], "maintenance": []})
            slot["goal"].extend(goals.get("goal", []))
            slot["maintenance"].extend(goals.get("maintenance", []))
    horizons = [p["horizon"] for p in plays if p.get("horizon") is not None]
    merged["playability"] = {
        **({"player_agent": player_agents.pop()} if player_agents else {}),
        "ordering": (
            ORDERING_PLAYER_FIRST
            if any(p.get("ordering") == ORDERING_PLAYER_FIRST for p in plays)
            else ORDERING_NONE
        ),
        **({"horizon": max(horizons)} if horizons else {}),
        "allow_noop": all(p.get("allow_noop", True) for p in plays),
        "agents": agents_goals,
    }

    designs = [_obj(f.get("design", {}), "design") for f in fragments]
    hard = _union(d.get("hard", []) for d in designs)
    soft_by_term: dict[str, dict] = {}
    for d in designs:
        for s in d.get("soft", []):
            term = s.get("term")
            slot = soft_by_term.setdefault(term, {"term": term, "weight": 1, "priority": 1})
            slot["weight"] = max(slot["weight"], s.get("weight", 1))
            slot["priority"] = max(slot["priority"], s.get("priority", 1))
    # Re-rank on priority collisions so the merged profile stays lexicographic.
    ordered = sorted(soft_by_term.values(), key=lambda s: (-s["priority"], s["term"]))
    taken: set[int] = set()
    for s in ordered:
        priority = s["priority"]
        while priority in taken:
            priority -= 1
        s["priority"] = priority
        taken.add(priority)
    merged_design: dict = {"hard": hard, "soft": ordered}
    for key in ("adaptation", "progression", "controls"):
        values = [d[key] for d in designs if d.get(key) is not None]
        if values:
            merged_value = dict(values[0])
            for v in values[1:]:
                for k2, v2 in v.items():
                    if isinstance(v2, bool):
                        merged_value[k2] = merged_value.get(k2, False) or v2
                    elif v2 is not None:
                        merged_value[k2] = max(merged_value.get(k2) or v2, v2)
            merged_design[key] = merged_value
    merged["design"] = merged_design

    bounds_list = [_obj(f.get("bounds", {}), "bounds") for f in fragments]
    defaults = GeneratorBounds()
    merged_bounds: dict = {}
    for key, default in (
        ("max_mechanics", defaults.max_mechanics),
        ("max_pre", defaults.max_pre),
        ("max_eff", defaults.max_eff),
        ("horizon", defaults.horizon),
        ("trace_cap", defaults.trace_cap),
        ("invoke_depth", defaults.invoke_depth),
    ):
        merged_bounds[key] = max(b.get(key, default) for b in bounds_list) if bounds_list else default
    pre_lo = min(b.get("pre_offsets", list(defaults.pre_offsets))[0] for b in bounds_list)
    eff_hi = max(b.get("eff_offsets", list(defaults.eff_offsets))[1] for b in bounds_list)
    merged_bounds["pre_offsets"] = [pre_lo, 0]
    merged_bounds["eff_offsets"] = [1, eff_hi]
    merged_bounds["constants"] = sorted(
        set().union(*(b.get("constants", [0]) for b in bounds_list))
    )
    merged["bounds"] = merged_bounds
    return merged


def apply_overlay(spec: DomainSpec, overlay: dict) -> DomainSpec:
    """Overlay a requirement fragment onto an existing domain.

    The overlay uses the domain schema (usually only ``engine_rules``,
    ``playability``, ``design``, or ``bounds``) and merges with the same rules
    as file concatenation.
    """
    return parse_domain_dict(merge_fragments([serialize_domain(spec), overlay]))


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _guard_to_json(g: GuardAtom) -> dict:
    if g.kind == "param_test":
        out = {"kind": "param_test", "param": g.param, "rel": g.rel, "rhs": g.rhs}
    else:
        out = {"kind": "derived_test", "pred": g.pred, "negated": g.negated}
    if g.entity is not None:
        out["entity"] = g.entity
    return out


def serialize_domain(spec: DomainSpec) -> dict:
    def ranges(pairs):
        return [
            {"param": p, "entity": e, "lo": lo, "hi": hi} for (p, e), (lo, hi) in pairs
        ]

    rules = []
    for rule in spec.engine_rules:
        if isinstance(rule, InvariantRule):
            out = {"kind": "invariant", "name": rule.name, "all": [_guard_to_json(a) for a in rule.atoms]}
            if rule.klass is not None:
                out["class"] = rule.klass
        else:
            out = {
                "kind": "forced_update",
                "name": rule.name,
                "class": rule.klass,
                "guard": [_guard_to_json(a) for a in rule.guard],
                "param": rule.param,
                "delta": rule.delta,
            }
        rules.append(out)

    design: dict = {
        "hard": [_hard_to_json(h) for h in spec.design.hard],
        "soft": [
            {"term": s.term, "weight": s.weight, "priority": s.priority}
            for s in spec.design.soft
        ],
    }
    if spec.design.adaptation is not None:
        design["adaptation"] = {
            "weight": spec.design.adaptation.weight,
            **(
                {"priority": spec.design.adaptation.priority}
                if spec.design.adaptation.priority is not None
                else {}
            ),
        }
    if spec.design.progression is not None:
        design["progression"] = {
            "increasing_usage": spec.design.progression.increasing_usage,
            "reuse_in_subsequent": spec.design.progression.reuse_in_subsequent,
        }
    if spec.design.controls is not None:
        design["controls"] = {
            "require_input": spec.design.controls.require_input,
            "unambiguous": spec.design.controls.unambiguous,
            **(
                {"intuitiveness_priority": spec.design.controls.intuitiveness_priority}
                if spec.design.controls.intuitiveness_priority is not None
                else {}
            ),
            "intuitiveness_weight": spec.design.controls.intuitiveness_weight,
        }

    playability: dict = {
        "player_agent": spec.playability.player_agent,
        "ordering": spec.playability.ordering,
        "allow_noop": spec.playability.allow_noop,
        "agents": {
            agent: {
                "goal": [atom_to_json(a) for a in goals.goal],
                "maintenance": [atom_to_json(a) for a in goals.maintenance],
            }
            for agent, goals in spec.playability.per_agent
        },
    }
    if spec.playability.horizon is not None:
        playability["horizon"] = spec.playability.horizon

    return {
        "entities": list(spec.entities),
        "classes": {name: list(members) for name, members in spec.classes},
        "parameters": list(spec.parameters),
        "has": [[e, p] for e, p in spec.has],
        "abs_ranges": ranges(spec.abs_ranges),
        "rel_ranges": ranges(spec.rel_ranges),
        "derived": [
            {
                "name": d.name,
                "class": d.klass,
                "conjuncts": [
                    {"param": c.param, "rel": c.rel, "bound_param": c.bound_param, "const": c.const}
                    for c in d.conjuncts
                ],
            }
            for d in spec.derived
        ],
        "engine_rules": rules,
        "agents": list(spec.agents),
        "inputs": list(spec.inputs),
        "instances": [
            {
                "name": inst.name,
                "level": inst.level,
                "initials": [
                    {"param": p, "entity": e, "value": v} for (p, e), v in inst.initials
                ],
            }
            for inst in spec.instances
        ],
        "playability": playability,
        "design": design,
        "bounds": {
            "max_mechanics": spec.bounds.max_mechanics,
            "max_pre": spec.bounds.max_pre,
            "max_eff": spec.bounds.max_eff,
            "pre_offsets": list(spec.bounds.pre_offsets),
            "eff_offsets": list(spec.bounds.eff_offsets),
            "constants": list(spec.bounds.constants),
            "horizon": spec.bounds.horizon,
            "trace_cap": spec.bounds.trace_cap,
            "invoke_depth": spec.bounds.invoke_depth,
        },
    }


def _hard_to_json(h) -> dict:
    if isinstance(h, CostRequired):
        return {
            "kind": h.kind,
            "resources": [{"param": p, "actor": actor} for p, actor in h.resources],
        }
    if isinstance(h, MaxAtoms):
        out: dict = {"kind": h.kind}
        if h.max_pre is not None:
            out["max_pre"] = h.max_pre
        if h.max_eff is not None:
            out["max_eff"] = h.max_eff
        return out
    return {"kind": h.kind}


def domain_to_text(spec: DomainSpec) -> str:
    return canonical_json(serialize_domain(spec))


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def validate_domain(spec: DomainSpec) -> ValidationReport:
    """Check the structural invariants that are data issues, not parse faults."""
    violations: list[Violation] = []
    abs_ranges = dict(spec.abs_ranges)
    rel_ranges = dict(spec.rel_ranges)
    has_pairs = spec.has_pairs()

    for param, entity in has_pairs:
        rng = abs_ranges.get((param, entity))
        if rng is None:
            violations.append(
                Violation("missing_abs_range", f"{param}({entity}) has no absolute range")
            )
        elif rng[0] > rng[1]:
            violations.append(
                Violation("empty_abs_range", f"{param}({entity}) absolute range {rng} is empty")
            )
    for (param, entity), rng in rel_ranges.items():
        if rng[0] > rng[1]:
            violations.append(
                Violation("empty_rel_range", f"{param}({entity}) relative range {rng} is empty")
            )
    owned = set(has_pairs)
    for pair in list(abs_ranges) + list(rel_ranges):
        if pair not in owned:
            violations.append(
                Violation("range_without_has", f"range declared for unowned {pair[0]}({pair[1]})")
            )

    levels = sorted({inst.level for inst in spec.instances})
    if levels != list(range(len(levels))):
        violations.append(
            Violation(
                "non_contiguous_levels",
                f"instance levels {levels} do not form a contiguous 0..{max(len(levels) - 1, 0)} sequence",
            )
        )

    for inst in spec.instances:
        values = inst.initial_values()
        for param, entity in has_pairs:
            if (param, entity) not in values:
                violations.append(
                    Violation(
                        "missing_initial",
                        f"instance {inst.name!r} lacks an initial value for {param}({entity})",
                    )
                )
        for (param, entity), value in values.items():
            if (param, entity) not in owned:
                violations.append(
                    Violation(
                        "initial_without_has",
                        f"instance {inst.name!r} sets unowned {param}({entity})",
                    )
                )
                continue
            rng = abs_ranges.get((param, entity))
            if rng and not (rng[0] <= value <= rng[1]):
                violations.append(
                    Violation(
                        "initial_out_of_range",
                        f"instance {inst.name!r}: {param}({entity}) = {value} outside {list(rng)}",
                    )
                )

    classes = dict(spec.classes)
    for dp in spec.derived:
        for member in classes.get(dp.klass, ()):
            for c in dp.conjuncts:
                if (member, c.bound_param) not in set(spec.has):
                    violations.append(
                        Violation(
                            "derived_unowned_param",
                            f"derived {dp.name!r}: class member {member} lacks {c.bound_param}",
                        )
                    )

    for rule in spec.engine_rules:
        atoms = rule.atoms if isinstance(rule, InvariantRule) else rule.guard
        for atom in atoms:
            if atom.kind == "param_test" and atom.entity is not None:
                if (atom.param, atom.entity) not in owned:
                    violations.append(
                        Violation(
                            "rule_unowned_param",
                            f"engine rule {rule.name!r} tests unowned {atom.param}({atom.entity})",
                        )
                    )
            if atom.entity is None and (isinstance(rule, InvariantRule) and rule.klass is None):
                violations.append(
                    Violation(
                        "rule_unbound_entity",
                        f"engine rule {rule.name!r} uses a class-bound atom without a class",
                    )
                )
        if isinstance(rule, ForcedUpdateRule):
            for member in classes.get(rule.klass, ()):
                if (member, rule.param) not in set(spec.has):
                    violations.append(
                        Violation(
                            "rule_unowned_param",
                            f"engine rule {rule.name!r}: class member {member} lacks {rule.param}",
                        )
                    )
        if isinstance(rule, InvariantRule) and rule.klass is not None:
            for member in classes.get(rule.klass, ()):
                for atom in rule.atoms:
                    if atom.kind == "param_test" and atom.entity is None:
                        if (member, atom.param) not in set(spec.has):
                            violations.append(
                                Violation(
                                    "rule_unowned_param",
                                    f"engine rule {rule.name!r}: class member {member} lacks {atom.param}",
                                )
                            )

    for agent, goals in spec.playability.per_agent:
        for atom in goals.goal + goals.maintenance:
            if isinstance(atom, ParamTest) and (atom.param, atom.entity) not in owned:
                violations.append(
                    Violation(
                        "goal_unowned_param",
                        f"goal for {agent!r} tests unowned {atom.param}({atom.entity})",
                    )
                )

    return ValidationReport(violations=tuple(violations))


# ---------------------------------------------------------------------------
# Mechanics files
# ---------------------------------------------------------------------------


def _ctx_for(spec: DomainSpec) -> _Ctx:
    return _Ctx(
        set(spec.entities),
        set(spec.parameters),
        set(spec.has),
        dict(spec.classes),
        {d.name: d for d in spec.derived},
    )


def parse_mechanics(doc, spec: DomainSpec) -> tuple[list[Mechanic], list[str]]:
    """Parse a mechanics document (JSON list) against a domain.

    Returns the canonical mechanics plus any normalization warnings.
    """
    ctx = _ctx_for(spec)
    warnings: list[str] = []
    mechanics: list[Mechanic] = []
    ids: set[int] = set()
    owned = set(spec.has_pairs())
    abs_ranges = dict(spec.abs_ranges)
    rel_ranges = dict(spec.rel_ranges)

    items = _arr(doc, "mechanics")
    declared_ids = set()
    for item in items:
        if isinstance(item, dict) and not isinstance(item.get("id"), bool) and isinstance(item.get("id"), int):
            declared_ids.add(item["id"])

    for i, item in enumerate(items):
        w = f"mechanics[{i}]"
        item = _obj(item, w)
        _check_keys(item, {"id", "name", "pre", "eff"}, w)
        mid = _int(item.get("id", i + 1), f"{w}.id")
        if mid in ids:
            raise DomainFormatError(f"{w}: duplicate mechanic id {mid}")
        ids.add(mid)
        name = item.get("name")
        if name is not None:
            name = _str(name, f"{w}.name")
        pre = tuple(
            parse_condition_atom(a, ctx, f"{w}.pre[{j}]")
            for j, a in enumerate(_arr(item.get("pre", []), f"{w}.pre"))
        )
        eff = tuple(
            parse_effect_atom(a, ctx, f"{w}.eff[{j}]", warnings)
            for j, a in enumerate(_arr(item.get("eff", []), f"{w}.eff"))
        )
        if not eff:
            raise DomainFormatError(f"{w}: mechanics must have at least one effect")
        for j, atom in enumerate(pre):
            if isinstance(atom, ParamTest) and (atom.param, atom.entity) not in owned:
                raise DomainFormatError(
                    f"{w}.pre[{j}]: {atom.param}({atom.entity}) is not an owned pair"
                )
        for j, atom in enumerate(eff):
            if isinstance(atom, ParamUpdate):
                pair = (atom.param, atom.entity)
                if pair not in owned:
                    raise DomainFormatError(
                        f"{w}.eff[{j}]: {atom.param}({atom.entity}) is not an owned pair"
                    )
                if atom.frame == ABSOLUTE:
                    rng = abs_ranges.get(pair)
                    if rng and not (rng[0] <= atom.amount <= rng[1]):
                        raise DomainFormatError(
                            f"{w}.eff[{j}]: absolute amount {atom.amount} outside range {list(rng)}"
                        )
                else:
                    rng = rel_ranges.get(pair)
                    if rng is None:
                        raise DomainFormatError(
                            f"{w}.eff[{j}]: no relative range declared for {atom.param}({atom.entity})"
                        )
                    if not (rng[0] <= atom.amount <= rng[1]):
                        raise DomainFormatError(
                            f"{w}.eff[{j}]: relative amount {atom.amount} outside range {list(rng)}"
                        )
            elif isinstance(atom, EventInvoke):
                if atom.mech == mid:
                    raise DomainFormatError(f"{w}.eff[{j}]: a mechanic may not invoke itself")
                if atom.mech not in declared_ids:
                    raise DomainFormatError(f"{w}.eff[{j}]: unknown invoked mechanic {atom.mech}")
        mechanics.append(canonicalize_mechanic(Mechanic(id=mid, pre=pre, eff=eff, name=name)))
    for warning in warnings:
        logger.warning(warning)
    return mechanics, warnings


def parse_mechanics_text(text: str, spec: DomainSpec) -> tuple[list[Mechanic], list[str]]:
    return parse_mechanics(_loads(text), spec)


def load_mechanics(path: str | Path, spec: DomainSpec) -> list[Mechanic]:
    mechanics, _ = parse_mechanics_text(Path(path).read_text(encoding="utf-8"), spec)
    return mechanics


def mechanics_to_json(mechanics) -> list:
    out = []
    for m in mechanics:
        item: dict = {"id": m.id}
        if m.name:
            item["name"] = m.name
        item["pre"] = [atom_to_json(a) for a in m.pre]
        item["eff"] = [atom_to_json(a) for a in m.eff]
        out.append(item)
    return out


def mechanics_to_text(mechanics) -> str:
    return canonical_json(mechanics_to_json(mechanics))


# ---------------------------------------------------------------------------
# Trace files
# ---------------------------------------------------------------------------


def parse_trace(doc, spec: DomainSpec, mechanics) -> Trace:
    doc = _obj(doc, "trace")
    _check_keys(doc, {"instance", "steps", "terminal_tick", "goal_ticks"}, "trace")
    instance = _str(doc.get("instance"), "trace.instance")
    spec.instance_by_name(instance)
    by_id = {m.id: m for m in mechanics}
    by_name = {m.name: m for m in mechanics if m.name}
    steps = []
    for i, step in enumerate(_arr(doc.get("steps", []), "trace.steps")):
        w = f"trace.steps[{i}]"
        step = _obj(step, w)
        _check_keys(step, {"tick", "agent", "action"}, w)
        agent = _str(step.get("agent"), f"{w}.agent")
        if agent not in spec.agents:
            raise DomainFormatError(f"{w}: unknown agent {agent!r}")
        raw_action = step.get("action")
        action: int | str
        if isinstance(raw_action, str) and raw_action.lower() == NOOP:
            action = NOOP
        elif isinstance(raw_action, str):
            if raw_action not in by_name:
                raise DomainFormatError(f"{w}: unknown mechanic {raw_action!r}")
            action = by_name[raw_action].id
        else:
            action = _int(raw_action, f"{w}.action")
            if action not in by_id:
                raise DomainFormatError(f"{w}: unknown mechanic id {action}")
        steps.append(TraceStep(tick=_int(step.get("tick", i), f"{w}.tick"), agent=agent, action=action))
    terminal = _int(doc.get("terminal_tick", len(steps)), "trace.terminal_tick")
    goal_ticks = tuple(
        sorted(
            (str(agent), _int(tick, "trace.goal_ticks"))
            for agent, tick in _obj(doc.get("goal_ticks", {}), "trace.goal_ticks").items()
        )
    )
    return Trace(instance=instance, steps=tuple(steps), terminal_tick=terminal, goal_ticks=goal_ticks)


def load_trace(path: str | Path, spec: DomainSpec, mechanics) -> Trace:
    return parse_trace(_loads(Path(path).read_text(encoding="utf-8")), spec, mechanics)
