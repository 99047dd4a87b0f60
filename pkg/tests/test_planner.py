from __future__ import annotations

import dataclasses

import pytest

from mechgen.engine import verify_trace
from mechgen.loader import parse_domain_dict
from mechgen.model import NOOP, Mechanic, ParamTest, ParamUpdate
from mechgen.planner import (
    NOT_PLAYABLE,
    PLAYABLE,
    RESOURCE_LIMIT,
    check_playability,
    enumerate_traces,
    plan,
)
from oracles import brute_plan, brute_traces, random_micro_domain


class TestPlan:
    def test_rpg_damage_all_minimal_two_casts(self, rpg_spec, rpg_mechanics):
        damage_all = rpg_mechanics[1]
        result = plan(rpg_spec, [damage_all], rpg_spec.instances[0], horizon=8)
        assert result.playable
        assert len(result.witness.steps) == 2
        assert all(s.action == 2 for s in result.witness.steps)
        report = verify_trace(rpg_spec, [damage_all], rpg_spec.instances[0], result.witness)
        assert report.legal
        assert dict(report.goal_ticks)["Player"] == 2

    def test_goal_already_true_gives_empty_witness(self, rpg_spec, rpg_mechanics):
        inst = rpg_spec.instances[0]
        initials = dict(inst.initials)
        initials[("Health", "Enemy1")] = 0
        initials[("Health", "Enemy2")] = 0
        won = dataclasses.replace(inst, initials=tuple(sorted(initials.items())))
        result = plan(rpg_spec, rpg_mechanics, won)
        assert result.playable
        assert result.witness.steps == ()

    def test_no_mechanics_cannot_kill(self, rpg_spec):
        result = plan(rpg_spec, [], rpg_spec.instances[0])
        assert result.status == NOT_PLAYABLE

    def test_node_cap_gives_resource_limit(self, platformer_spec, platformer_mechanics):
        result = plan(
            platformer_spec, platformer_mechanics, platformer_spec.instances[0], node_cap=2
        )
        assert result.status == RESOURCE_LIMIT

    def test_horizon_monotonicity(self, rpg_spec, rpg_mechanics):
        damage_all = rpg_mechanics[1]

        statuses = [
            plan(rpg_spec, [damage_all], rpg_spec.instances[0], horizon=h).status
            for h in range(1, 7)
        ]
        first_playable = statuses.index(PLAYABLE)
        assert all(s == PLAYABLE for s in statuses[first_playable:])
        assert all(s == NOT_PLAYABLE for s in statuses[:first_playable])

    def test_extra_mechanics_never_hurt(self, rpg_spec, rpg_mechanics):
        damage_all = rpg_mechanics[1]
        assert plan(rpg_spec, [damage_all], rpg_spec.instances[0]).playable
        assert plan(rpg_spec, rpg_mechanics, rpg_spec.instances[0]).playable

    def test_witnesses_always_replay(self):
        for seed in range(30):
            spec, ms = random_micro_domain(seed)
            result = plan(spec, ms, spec.instances[0])
            if not result.playable:
                continue
            report = verify_trace(spec, ms, spec.instances[0], result.witness)
            assert report.legal, seed
            player = spec.playability.player_agent
            assert dict(report.goal_ticks).get(player) == result.witness.terminal_tick


class TestOracleAgreement:
    def test_micro_domains_match_brute_force(self):
        mismatches = []
        for seed in range(60):
            spec, ms = random_micro_domain(seed)
            expected, shortest = brute_plan(spec, ms, spec.instances[0])
            result = plan(spec, ms, spec.instances[0])
            if result.status != expected:
                mismatches.append((seed, result.status, expected))
            elif expected == PLAYABLE and len(result.witness.steps) != shortest:
                mismatches.append((seed, len(result.witness.steps), shortest))
        assert not mismatches


class TestCheckPlayability:
    def test_multi_level_requires_every_instance(
        self, progression_spec, progression_mechanics
    ):
        walk = [m for m in progression_mechanics if m.name == "Walk"]
        report = check_playability(progression_spec, walk)
        assert not report.passed
        statuses = dict((name, r.status) for name, r in report.instances)
        assert statuses["intro"] == PLAYABLE
        assert statuses["gap"] == NOT_PLAYABLE

    def test_full_set_passes_everywhere(self, progression_spec, progression_mechanics):
        report = check_playability(progression_spec, progression_mechanics)
        assert report.passed
        assert all(r.witness is not None for _, r in report.instances)

    def test_zero_mechanics_with_trivial_goal(self, rpg_spec):
        initials = dict(rpg_spec.instances[0].initials)
        initials[("Health", "Enemy1")] = 0
        initials[("Health", "Enemy2")] = 0
        inst = dataclasses.replace(
            rpg_spec.instances[0], initials=tuple(sorted(initials.items()))
        )
        spec = dataclasses.replace(rpg_spec, instances=(inst,))
        report = check_playability(spec, [])
        assert report.passed


class TestEnumerateTraces:
    def test_rpg_capped_enumeration_orders_by_length(self, rpg_spec, rpg_mechanics):
        damage_all = rpg_mechanics[1]
        traces = enumerate_traces(
            rpg_spec, [damage_all], rpg_spec.instances[0], cap=3, horizon=8
        )
        assert [len(t.steps) for t in traces] == [2, 3, 3]
        two_casts = [s.action for s in traces[0].steps]
        assert two_casts == [2, 2]

    def test_cap_one_is_the_shortest_witness(self, rpg_spec, rpg_mechanics):
        damage_all = rpg_mechanics[1]
        traces = enumerate_traces(
            rpg_spec, [damage_all], rpg_spec.instances[0], cap=1, horizon=8
        )
        assert len(traces) == 1
        assert len(traces[0].steps) == 2

    def test_unplayable_set_enumerates_nothing(self, rpg_spec):
        assert enumerate_traces(rpg_spec, [], rpg_spec.instances[0], cap=5) == []

    def test_matches_brute_enumeration_on_micro_domains(self):
        for seed in range(20):
            spec, ms = random_micro_domain(seed)
            expected = brute_traces(spec, ms, spec.instances[0])
            got = enumerate_traces(
                spec, ms, spec.instances[0], cap=len(expected) + 5
            )
            got_steps = sorted(
                [[(s.agent, s.action) for s in t.steps] for t in got],
                key=lambda p: (len(p), [str(x) for x in p]),
            )
            assert got_steps == expected, seed


class TestMultiagent:
    def two_agent_race(self, ordering: str):
        doc = {
            "entities": ["Hero", "Rival"],
            "classes": {},
            "parameters": ["Score"],
            "has": [["Hero", "Score"], ["Rival", "Score"]],
            "abs_ranges": [
                {"param": "Score", "entity": "Hero", "lo": 0, "hi": 3},
                {"param": "Score", "entity": "Rival", "lo": 0, "hi": 3},
            ],
            "rel_ranges": [
                {"param": "Score", "entity": "Hero", "lo": -1, "hi": 1},
                {"param": "Score", "entity": "Rival", "lo": -1, "hi": 1},
            ],
            "derived": [],
            "engine_rules": [],
            "agents": ["Hero", "Rival"],
            "inputs": [],
            "instances": [{"name": "race", "level": 0, "initials": [
                {"param": "Score", "entity": "Hero", "value": 0},
                {"param": "Score", "entity": "Rival", "value": 2},
            ]}],
            "playability": {
                "player_agent": "Hero",
                "ordering": ordering,
                "horizon": 8,
                "allow_noop": True,
                "agents": {
                    "Hero": {"goal": [{"kind": "param_test", "frame": "absolute", "offset": 0,
                                        "param": "Score", "entity": "Hero", "rel": "eq", "rhs": 2}],
                             "maintenance": []},
                    "Rival": {"goal": [{"kind": "param_test", "frame": "absolute", "offset": 0,
                                         "param": "Score", "entity": "Rival", "rel": "eq", "rhs": 3}],
                              "maintenance": []},
                },
            },
            "design": {},
            "bounds": {},
        }
        spec = parse_domain_dict(doc)
        bump_hero = Mechanic(
            id=1, pre=(), eff=(ParamUpdate("relative", 1, "Score", "Hero", 1),)
        )
        bump_rival = Mechanic(
            id=2, pre=(), eff=(ParamUpdate("relative", 1, "Score", "Rival", 1),)
        )
        return spec, [bump_hero, bump_rival]

    def test_cooperative_search_chooses_all_agents_moves(self):
        spec, ms = self.two_agent_race("none")
        result = plan(spec, ms, spec.instances[0])
        assert result.playable
        agents = [s.agent for s in result.witness.steps]
        assert agents == ["Hero", "Rival", "Hero"][: len(agents)]

    def test_player_first_blocks_early_rival_goal(self):
        spec, ms = self.two_agent_race("player_first")
        result = plan(spec, ms, spec.instances[0])
        # the hero needs two bumps (ticks 0 and 2); the rival acts at tick 1
        # and must avoid reaching its own goal first
        assert result.playable
        report = verify_trace(spec, ms, spec.instances[0], result.witness)
        assert report.legal
        rival_goal_tick = dict(report.goal_ticks).get("Rival")
        hero_goal_tick = dict(report.goal_ticks)["Hero"]
        assert rival_goal_tick is None or rival_goal_tick >= hero_goal_tick
