"""Independent oracles used to cross-check the planner and generator.

``brute_plan`` enumerates every action sequence through the engine with no
search machinery (no visited set, no deepening).  ``brute_generate``
enumerates every candidate mechanic set directly from the vocabulary and
selects the best playable one by ascending score, using ``brute_plan`` for
playability.  Both stay deliberately naive so they share nothing with the
implementations they check beyond the engine semantics themselves.
"""

from __future__ import annotations

import itertools
import random

from mechgen.engine import (
    IllegalActionError,
    applicable_mechanics,
    execute_tick,
    goals_hold,
    initial_state,
)
from mechgen.gen import condition_vocabulary
from mechgen.loader import parse_domain_dict
from mechgen.model import (
    NOOP,
    ORDERING_PLAYER_FIRST,
    EventInvoke,
    EventTest,
    Mechanic,
    canonicalize_mechanic,
    mechanic_signature,
)
from mechgen.reqs import check_hard, score_key, score_soft

PLAYABLE = "playable"
NOT_PLAYABLE = "not_playable_within_horizon"


def _status(spec, session, reqs):
    states = [s.values for s in session.history]
    events = frozenset(session.events)
    now = session.time
    player = reqs.player_agent
    goals = reqs.goals_for(player)
    if not goals_hold(spec, states, events, player, goals.maintenance, now):
        return "dead"
    if goals.goal and goals_hold(spec, states, events, player, goals.goal, now):
        return "goal"
    if reqs.ordering == ORDERING_PLAYER_FIRST:
        for agent, agent_goals in reqs.per_agent:
            if agent == player or not agent_goals.goal:
                continue
            if goals_hold(spec, states, events, agent, agent_goals.goal, now):
                return "dead"
    return "open"


def brute_plan(spec, mechanics, instance, horizon=None, reqs=None):
    """(status, shortest goal tick or None) by exhaustive sequence enumeration."""
    reqs = reqs if reqs is not None else spec.playability
    horizon = horizon if horizon is not None else spec.horizon()
    root = initial_state(spec, instance, mechanics)
    status = _status(spec, root, reqs)
    if status == "goal":
        return PLAYABLE, 0
    if status == "dead":
        return NOT_PLAYABLE, None
    best: list[int | None] = [None]

    def walk(session):
        if best[0] is not None and session.time >= best[0]:
            return
        if session.time >= horizon:
            return
        agent = session.turn_agent()
        for action in applicable_mechanics(session, agent):
            child = execute_tick(session, agent, action)
            status = _status(spec, child, reqs)
            if status == "goal":
                if best[0] is None or child.time < best[0]:
                    best[0] = child.time
            elif status == "open":
                walk(child)

    walk(root)
    if best[0] is None:
        return NOT_PLAYABLE, None
    return PLAYABLE, best[0]


def brute_traces(spec, mechanics, instance, horizon=None, reqs=None):
    """All goal-terminal action sequences within the horizon, as step lists."""
    reqs = reqs if reqs is not None else spec.playability
    horizon = horizon if horizon is not None else spec.horizon()
    root = initial_state(spec, instance, mechanics)
    if _status(spec, root, reqs) == "goal":
        return [[]]
    out: list[list] = []

    def walk(session, path):
        if session.time >= horizon:
            return
        agent = session.turn_agent()
        for action in applicable_mechanics(session, agent):
            child = execute_tick(session, agent, action)
            status = _status(spec, child, reqs)
            step = (agent, action)
            if status == "goal":
                out.append(path + [step])
            elif status == "open":
                walk(child, path + [step])

    walk(root, [])
    out.sort(key=lambda p: (len(p), [str(s) for s in p]))
    return out


# ---------------------------------------------------------------------------
# Brute-force candidate enumeration
# ---------------------------------------------------------------------------


def _mech_options(vocab, bounds, position):
    """All (pre, eff) atom-tuple combos legal for a mechanic at ``position``."""
    pre_sets = [()]
    for r in range(1, bounds.max_pre + 1):
        pre_sets.extend(itertools.combinations(range(len(vocab.pre)), r))
    eff_sets = []
    usable_eff = [
        i
        for i, atom in enumerate(vocab.eff)
        if not (isinstance(atom, EventInvoke) and atom.mech == position)
    ]
    for r in range(1, bounds.max_eff + 1):
        eff_sets.extend(itertools.combinations(usable_eff, r))
    return [(p, e) for p in pre_sets for e in eff_sets]


def _refs_ok(vocab, combo, k):
    for pre, eff in combo:
        for i in pre:
            atom = vocab.pre[i]
            if isinstance(atom, EventTest) and atom.mech > k:
                return False
        for i in eff:
            atom = vocab.eff[i]
            if isinstance(atom, EventInvoke) and atom.mech > k:
                return False
    return True


def all_candidates(spec, bounds):
    """Every candidate mechanic set within bounds, one per signature."""
    vocab = condition_vocabulary(spec, bounds)
    seen = set()
    out = []
    options = {
        pos: _mech_options(vocab, bounds, pos)
        for pos in range(1, bounds.max_mechanics + 1)
    }
    for k in range(0, bounds.max_mechanics + 1):
        for combo in itertools.product(*(options[pos] for pos in range(1, k + 1))):
            if not _refs_ok(vocab, combo, k):
                continue
            mechanics = tuple(
                canonicalize_mechanic(
                    Mechanic(
                        id=pos,
                        pre=tuple(vocab.pre[i] for i in pre),
                        eff=tuple(vocab.eff[i] for i in eff),
                    )
                )
                for pos, (pre, eff) in enumerate(combo, start=1)
            )
            sig = mechanic_signature(mechanics)
            if sig in seen:
                continue
            seen.add(sig)
            out.append(mechanics)
    return out


def brute_generate(spec, bounds=None, design=None, context=None):
    """Minimum score over all hard-passing playable candidates, or None."""
    bounds = bounds if bounds is not None else spec.bounds
    design = design if design is not None else spec.design
    scored = []
    for mechanics in all_candidates(spec, bounds):
        if check_hard(mechanics, spec, design.hard):
            continue
        score = score_soft(mechanics, design.soft, context)
        scored.append((score_key(score), score, mechanics))
    scored.sort(key=lambda item: item[0])
    for _, score, mechanics in scored:
        ok = True
        for instance in spec.instances:
            status, _ = brute_plan(spec, mechanics, instance)
            if status != PLAYABLE:
                ok = False
                break
        if ok:
            return score, mechanics
    return None, None


# ---------------------------------------------------------------------------
# Random micro-domains
# ---------------------------------------------------------------------------


def random_micro_domain(seed: int):
    """A tiny random domain plus a random mechanic set for oracle checks."""
    rng = random.Random(seed)
    n_entities = rng.randint(1, 3)
    entities = ["A", "B", "C"][:n_entities]
    n_agents = 2 if n_entities >= 2 and rng.random() < 0.3 else 1
    agents = entities[:n_agents]
    params = ["P", "Q"][: rng.randint(1, 2)]
    hi = rng.randint(2, 3)

    doc = {
        "entities": entities,
        "classes": {"All": entities},
        "parameters": params,
        "has": [[e, p] for e in entities for p in params],
        "abs_ranges": [
            {"param": p, "entity": e, "lo": 0, "hi": hi} for e in entities for p in params
        ],
        "rel_ranges": [
            {"param": p, "entity": e, "lo": -2, "hi": 2} for e in entities for p in params
        ],
        "derived": [],
        "engine_rules": [],
        "agents": agents,
        "inputs": [],
        "instances": [
            {
                "name": "inst",
                "level": 0,
                "initials": [
                    {"param": p, "entity": e, "value": rng.randint(0, hi)}
                    for e in entities
                    for p in params
                ],
            }
        ],
        "playability": {
            "player_agent": agents[0],
            "ordering": "none",
            "horizon": rng.randint(3, 6),
            "allow_noop": True,
            "agents": {},
        },
        "design": {"hard": [], "soft": [{"term": "atom_count", "weight": 1, "priority": 1}]},
        "bounds": {
            "max_mechanics": 3,
            "max_pre": 2,
            "max_eff": 2,
            "pre_offsets": [-1, 0],
            "eff_offsets": [1, 2],
            "constants": [-1, 0, 1],
            "horizon": rng.randint(3, 6),
            "trace_cap": 16,
            "invoke_depth": 3,
        },
    }

    if rng.random() < 0.4 and n_entities >= 2:
        doc["derived"].append(
            {
                "name": "Near",
                "class": "All",
                "conjuncts": [
                    {"param": params[0], "rel": "eq", "bound_param": params[0], "const": 1}
                ],
            }
        )
    if rng.random() < 0.35:
        doc["engine_rules"].append(
            {
                "kind": "invariant",
                "name": "floor",
                "all": [
                    {
                        "kind": "param_test",
                        "param": params[0],
                        "entity": agents[0],
                        "rel": "ge",
                        "rhs": 0,
                    }
                ],
            }
        )
    if rng.random() < 0.3:
        doc["engine_rules"].append(
            {
                "kind": "forced_update",
                "name": "drift",
                "class": "All",
                "guard": [
                    {
                        "kind": "param_test",
                        "param": params[0],
                        "rel": "gt",
                        "rhs": rng.randint(0, hi - 1),
                    }
                ],
                "param": params[0],
                "delta": rng.choice([-1, 1]),
            }
        )

    def goal_atoms(count):
        atoms = []
        for _ in range(count):
            atoms.append(
                {
                    "kind": "param_test",
                    "frame": "absolute",
                    "offset": 0,
                    "param": rng.choice(params),
                    "entity": rng.choice(entities),
                    "rel": rng.choice(["eq", "gt", "lt", "neq"]),
                    "rhs": rng.randint(0, hi),
                }
            )
        return atoms

    doc["playability"]["agents"][agents[0]] = {
        "goal": goal_atoms(rng.randint(1, 2)),
        "maintenance": goal_atoms(rng.randint(0, 1)),
    }
    if n_agents == 2:
        doc["playability"]["agents"][agents[1]] = {
            "goal": goal_atoms(1) if rng.random() < 0.7 else [],
            "maintenance": [],
        }
        if rng.random() < 0.6:
            doc["playability"]["ordering"] = "player_first"

    spec = parse_domain_dict(doc)

    n_mechs = rng.randint(1, 3)
    mechanics = []
    for mid in range(1, n_mechs + 1):
        pre = []
        for _ in range(rng.randint(0, 2)):
            kind = rng.random()
            if kind < 0.7 or (not spec.derived and mid == 1):
                pre.append(
                    {
                        "kind": "param_test",
                        "frame": rng.choice(["absolute", "relative"]),
                        "offset": rng.choice([-1, 0]),
                        "param": rng.choice(params),
                        "entity": rng.choice(entities),
                        "rel": rng.choice(["eq", "gt", "lt", "neq"]),
                        "rhs": rng.randint(-1, hi),
                    }
                )
            elif spec.derived and kind < 0.85:
                pre.append(
                    {
                        "kind": "derived_test",
                        "offset": rng.choice([-1, 0]),
                        "pred": "Near",
                        "entity": rng.choice(entities),
                        "negated": rng.random() < 0.5,
                    }
                )
            else:
                pre.append(
                    {
                        "kind": "event_test",
                        "offset": -1,
                        "mech": rng.randint(1, n_mechs),
                        "entity": rng.choice(agents),
                        "negated": rng.random() < 0.5,
                    }
                )
        eff = []
        for _ in range(rng.randint(1, 2)):
            if rng.random() < 0.85 or n_mechs == 1:
                frame = rng.choice(["absolute", "relative"])
                amount = (
                    rng.randint(0, hi)
                    if frame == "absolute"
                    else rng.choice([-2, -1, 1, 2])
                )
                eff.append(
                    {
                        "kind": "param_update",
                        "frame": frame,
                        "offset": rng.choice([1, 2]),
                        "param": rng.choice(params),
                        "entity": rng.choice(entities),
                        "amount": amount,
                    }
                )
            else:
                target = rng.choice([m for m in range(1, n_mechs + 1) if m != mid])
                eff.append({"kind": "event_invoke", "offset": rng.choice([1, 2]), "mech": target})
        mechanics.append({"id": mid, "pre": pre, "eff": eff})

    from mechgen.loader import parse_mechanics

    ms, _ = parse_mechanics(mechanics, spec)
    return spec, ms


def micro_space_domain(seed: int):
    """A one-entity domain whose generator vocabulary has at most 12 atoms."""
    rng = random.Random(seed)
    hi = 2
    constant = rng.choice([-1, 0, 1])
    goal_rel = rng.choice(["eq", "gt", "lt", "neq"])
    goal_rhs = rng.randint(0, hi)
    init = rng.randint(0, hi)
    doc = {
        "entities": ["A"],
        "classes": {},
        "parameters": ["P"],
        "has": [["A", "P"]],
        "abs_ranges": [{"param": "P", "entity": "A", "lo": 0, "hi": hi}],
        "rel_ranges": [{"param": "P", "entity": "A", "lo": -1, "hi": 1}],
        "derived": [],
        "engine_rules": [],
        "agents": ["A"],
        "inputs": [],
        "instances": [
            {"name": "inst", "level": 0, "initials": [{"param": "P", "entity": "A", "value": init}]}
        ],
        "playability": {
            "player_agent": "A",
            "ordering": "none",
            "horizon": rng.randint(3, 4),
            "allow_noop": True,
            "agents": {
                "A": {
                    "goal": [
                        {
                            "kind": "param_test",
                            "frame": "absolute",
                            "offset": 0,
                            "param": "P",
                            "entity": "A",
                            "rel": goal_rel,
                            "rhs": goal_rhs,
                        }
                    ],
                    "maintenance": [],
                }
            },
        },
        "design": {
            "hard": [{"kind": "no_duplicate_mechanics"}],
            "soft": [
                {"term": "mechanic_count", "weight": 1, "priority": 2},
                {"term": "atom_count", "weight": 1, "priority": 1},
            ],
        },
        "bounds": {
            "max_mechanics": 2,
            "max_pre": 1,
            "max_eff": 2,
            "pre_offsets": [0, 0],
            "eff_offsets": [1, 1],
            "constants": [constant],
            "horizon": rng.randint(3, 4),
            "trace_cap": 8,
            "invoke_depth": 3,
        },
    }
    if rng.random() < 0.3:
        doc["engine_rules"].append(
            {
                "kind": "invariant",
                "name": "cap",
                "all": [
                    {"kind": "param_test", "param": "P", "entity": "A", "rel": "le", "rhs": hi}
                ],
            }
        )
    return parse_domain_dict(doc)
