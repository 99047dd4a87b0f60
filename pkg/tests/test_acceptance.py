"""End-to-end acceptance suite.

One test per shipped guarantee, each printing a pass line.  These are the
exit criteria for the package: worked-example reproduction at desk scale plus
statistical cross-checks against brute-force oracles.
"""

from __future__ import annotations

import itertools
import json
import logging
import time

from conftest import fixture_path
from mechgen.engine import applicable_mechanics, execute_tick, initial_state, verify_trace
from mechgen.gen import adapt, condition_vocabulary, generate
from mechgen.loader import apply_overlay, load_domain, parse_mechanics
from mechgen.model import (
    NOOP,
    Mechanic,
    ParamUpdate,
    canonical_json,
    canonicalize_mechanic,
    mechanic_signature,
)
from mechgen.planner import enumerate_traces, plan
from mechgen.reqs import check_hard, check_progression, edit_distance, score_key
from oracles import brute_generate, brute_plan, micro_space_domain, random_micro_domain

logging.getLogger("mechgen.engine").setLevel(logging.ERROR)


def passed(name: str, detail: str = ""):
    suffix = f" ({detail})" if detail else ""
    print(f"[acceptance] {name}: PASS{suffix}")


def test_semantics_conformance(rpg_spec, rpg_mechanics, platformer_spec,
                               platformer_mechanics):
    started = time.monotonic()

    # damage over time: -1 at t+1 and t+2, nothing afterwards
    s = initial_state(rpg_spec, rpg_spec.instances[0], rpg_mechanics)
    s = execute_tick(s, "Player", 1)
    assert s.state.value("Health", "Enemy1") == 1
    s = execute_tick(s, "Player", NOOP)
    assert s.state.value("Health", "Enemy1") == 0
    s = execute_tick(s, "Player", NOOP)
    assert s.state.value("Health", "Enemy1") == 0

    # damage all: both enemies -1, caster pays 2 mana
    s = initial_state(rpg_spec, rpg_spec.instances[0], rpg_mechanics)
    s = execute_tick(s, "Player", 2)
    assert s.state.value("Health", "Enemy1") == 1
    assert s.state.value("Health", "Enemy2") == 1
    assert s.state.value("Mana", "Player") == 3

    # jump: up-and-forward, settled by gravity onto the next ground block
    p = initial_state(platformer_spec, platformer_spec.instances[0], platformer_mechanics)
    p = execute_tick(p, "Player", 2)
    assert (p.state.value("Xpos", "Player"), p.state.value("Ypos", "Player")) == (1, 1)

    # double jump: enabled exactly one tick after a jump
    assert 3 in applicable_mechanics(p, "Player")
    p2 = execute_tick(p, "Player", 3)
    assert (p2.state.value("Xpos", "Player"), p2.state.value("Ypos", "Player")) == (2, 2)
    assert 3 not in applicable_mechanics(p2, "Player")

    # magic missile: avatar-relative targeting, effect normalized to land next tick
    from test_engine import spatial_duel_doc
    from mechgen.loader import parse_domain_dict

    duel = parse_domain_dict(spatial_duel_doc())
    missile, warnings = parse_mechanics(
        [{
            "id": 1, "name": "MagicMissile",
            "pre": [
                {"kind": "param_test", "frame": "relative", "offset": 0,
                 "param": "Xpos", "entity": "Enemy", "rel": "eq", "rhs": 2},
                {"kind": "param_test", "frame": "relative", "offset": 0,
                 "param": "Ypos", "entity": "Enemy", "rel": "eq", "rhs": 0},
            ],
            "eff": [{"kind": "param_update", "frame": "relative", "offset": 0,
                     "param": "Health", "entity": "Enemy", "amount": -1}],
        }],
        duel,
    )
    assert warnings  # the zero-offset effect was normalized on load
    d = initial_state(duel, duel.instances[0], missile)
    d = execute_tick(d, "Player", 1)
    assert d.state.value("Health", "Enemy") == 1

    elapsed = time.monotonic() - started
    assert elapsed < 1.0, f"semantics checks took {elapsed:.2f}s"
    passed("semantics-conformance", f"{elapsed * 1000:.0f} ms")


def test_rpg_reproduction(rpg_spec):
    started = time.monotonic()
    result = generate(rpg_spec)
    elapsed = time.monotonic() - started
    assert result.found, result.status
    assert elapsed < 60.0, f"generation took {elapsed:.1f}s"
    for m in result.mechanics:
        assert any(
            isinstance(a, ParamUpdate) and a.frame == "relative" and a.amount < 0
            and a.entity == "Player" and a.param in ("Mana", "Health")
            for a in m.eff
        ), f"{m} lacks an actor resource cost"
    witness = dict(result.witnesses)["battle"]
    report = verify_trace(rpg_spec, result.mechanics, rpg_spec.instances[0], witness)
    assert report.legal
    goal_tick = dict(report.goal_ticks)["Player"]
    for tick_report in report.ticks:
        if tick_report.tick < goal_tick:
            assert dict(tick_report.maintenance)["Player"]
    passed("rpg-reproduction", f"{elapsed:.1f}s, {result.candidates_tested} candidates")


def test_planner_oracle_equivalence():
    mismatches = []
    for seed in range(200):
        spec, ms = random_micro_domain(seed)
        expected, _ = brute_plan(spec, ms, spec.instances[0])
        got = plan(spec, ms, spec.instances[0])
        if got.status != expected:
            mismatches.append((seed, got.status, expected))
    assert mismatches == []
    passed("planner-oracle-equivalence", "200 domains, 0 mismatches")


def test_generator_optimality():
    agreements = 0
    for seed in range(100):
        spec = micro_space_domain(seed)
        vocab = condition_vocabulary(spec, spec.bounds)
        assert vocab.size() <= 12
        result = generate(spec)
        brute_score, _ = brute_generate(spec)
        if brute_score is None:
            assert result.status == "exhausted_within_bounds", seed
        else:
            assert result.found, seed
            assert score_key(result.score) == score_key(brute_score), seed
        agreements += 1
    assert agreements == 100
    passed("generator-optimality", "100/100 micro-spaces")


def test_platformer_reproduction(platformer_spec, flat_spec):
    # a one-cell gap plus a two-block ledge is solvable by a generated set
    result = generate(platformer_spec)
    assert result.found, result.status
    witness = dict(result.witnesses)["level1"]
    report = verify_trace(
        platformer_spec, result.mechanics, platformer_spec.instances[0], witness
    )
    assert report.legal
    assert "Player" in dict(report.goal_ticks)

    # a flat corridor needs exactly one mechanic, confirmed exhaustively
    flat_result = generate(flat_spec)
    assert flat_result.found
    assert len(flat_result.mechanics) == 1
    brute_score, brute_set = brute_generate(flat_spec)
    assert score_key(flat_result.score) == score_key(brute_score)
    assert len(brute_set) == 1
    passed("platformer-reproduction")


def test_combined_domain_modularity():
    # the two shipped fragments concatenate with zero edits to either file
    combined = load_domain(
        fixture_path("rpg.domain.json"), fixture_path("platformer_flat.domain.json")
    )
    started = time.monotonic()
    result = generate(combined, max_candidates=200_000, time_budget=600.0)
    elapsed = time.monotonic() - started
    assert result.found, result.status
    witness = dict(result.witnesses)[combined.instances[0].name]
    report = verify_trace(combined, result.mechanics, combined.instances[0], witness)
    assert report.legal
    goals = combined.playability.goals_for("Player").goal
    assert len(goals) == 3  # both kills and the corridor end, conjoined
    passed("combined-domain-modularity", f"{elapsed:.1f}s")


def test_progression(progression_spec, progression_noledge_spec, progression_mechanics):
    reqs = progression_spec.design.progression
    assert reqs is not None

    def level_traces(spec, mechanics):
        out = []
        for inst in spec.instances:
            out.append(
                enumerate_traces(
                    spec, mechanics, inst, cap=spec.bounds.trace_cap,
                    horizon=spec.horizon(),
                )
            )
        return out

    ok, witness = check_progression(level_traces(progression_spec, progression_mechanics), reqs)
    assert ok
    sizes = [len(t.used_mechanics()) for t in witness]
    assert sizes == sorted(set(sizes)) and len(sizes) == 3
    assert sizes[0] < sizes[1] < sizes[2]
    for earlier, later in zip(witness, witness[1:]):
        assert earlier.used_mechanics() <= later.used_mechanics()

    # removing the third level's ledge leaves no room for a third mechanic
    noledge_mechanics, _ = parse_mechanics(
        json.loads(fixture_path("progression_mechanics.json").read_text()),
        progression_noledge_spec,
    )
    ok, _ = check_progression(
        level_traces(progression_noledge_spec, noledge_mechanics), reqs
    )
    assert not ok
    passed("progression", f"witness usage sizes {sizes}")


def test_adaptation_minimality(rpg3_spec, rpg3_seed, mana_overlay):
    target = apply_overlay(rpg3_spec, mana_overlay)
    result = adapt(rpg3_spec, rpg3_seed, mana_overlay)
    assert result.found, result.status
    got = edit_distance(rpg3_seed, result.mechanics, target.bounds)

    # brute force: scan the seed's edit neighborhood in ascending distance;
    # the first satisfying distance is the minimum
    vocab = condition_vocabulary(target, target.bounds)
    seed_mech = rpg3_seed[0]
    extra_eff = sorted(set(seed_mech.eff) - set(vocab.eff), key=str)
    eff_pool = list(vocab.eff) + extra_eff
    pre_pool = list(vocab.pre)
    seed_eff = set(seed_mech.eff)
    seed_pre = set(seed_mech.pre)
    seed_atoms = sorted(seed_eff | seed_pre, key=str)
    pool = [a for a in eff_pool + pre_pool if a not in seed_eff | seed_pre]
    best = None
    for distance in range(0, 4):
        for removals in range(0, distance + 1):
            additions = distance - removals
            for removed in itertools.combinations(seed_atoms, removals):
                for added in itertools.combinations(pool, additions):
                    pre = (seed_pre - set(removed)) | {a for a in added if a in pre_pool}
                    eff = (seed_eff - set(removed)) | {a for a in added if a in eff_pool}
                    if not eff or len(eff) > target.bounds.max_eff:
                        continue
                    if len(pre) > target.bounds.max_pre:
                        continue
                    candidate = (canonicalize_mechanic(
                        Mechanic(id=1, pre=tuple(pre), eff=tuple(eff))
                    ),)
                    assert edit_distance(rpg3_seed, candidate, target.bounds) == distance
                    if check_hard(candidate, target, target.design.hard):
                        continue
                    status, _ = brute_plan(target, candidate, target.instances[0])
                    if status == "playable":
                        best = distance
                        break
                if best is not None:
                    break
            if best is not None:
                break
        if best is not None:
            break
    assert best is not None, "no satisfying candidate within distance 3"
    assert got == best, (got, best)
    passed("adaptation-minimality", f"distance {got} == brute minimum")


def test_determinism_and_persistence(tmp_path, flat_spec, rpg_spec):
    # identical inputs give byte-identical generation results
    a = canonical_json(generate(flat_spec).to_json())
    b = canonical_json(generate(flat_spec).to_json())
    assert a == b
    c = canonical_json(generate(rpg_spec).to_json())
    d = canonical_json(generate(rpg_spec).to_json())
    assert c == d

    # a session interrupted mid-run resumes to an identical replay
    from mechgen.service.sessions import SessionManager
    from mechgen.service.store import FileStore

    domain_doc = json.loads(fixture_path("rpg.domain.json").read_text())
    mechanics_doc = json.loads(fixture_path("rpg_mechanics.json").read_text())

    store = FileStore(tmp_path / "data")
    manager = SessionManager(store)
    session = manager.create(domain_doc, mechanics_doc, "battle")
    manager.act(session.id, "Player", "DamageOverTime")
    manager.act(session.id, "Player", "noop")

    # simulate a crash: a brand-new manager over the same directory
    resumed = SessionManager(FileStore(tmp_path / "data")).get(session.id)
    assert resumed is not None
    assert [s.values for s in resumed.session.history] == [
        s.values for s in session.session.history
    ]

    # and the uninterrupted run matches the resumed continuation exactly
    resumed.act("Player", "DamageAll")
    straight = manager.get(session.id)
    straight.act("Player", "DamageAll")
    assert [s.values for s in resumed.session.history] == [
        s.values for s in straight.session.history
    ]
    passed("determinism-and-persistence")
