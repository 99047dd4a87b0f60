"""Bounded-horizon playability proving over the turn-based state graph.

Search is iterative-deepening depth-first over nodes identified by the turn
phase, a bounded window of recent states, outstanding scheduled effects
(relative to now), and the recent event window.  Raw state alone is not
enough: two histories with equal current values can still diverge through
pending effects or event-indexed preconditions.  A node is a success when the
player agent's goal holds, a dead end when a maintenance goal fails, and under
player-first ordering any opposing goal achieved earlier prunes the branch.
"""

from __future__ import annotations

from dataclasses import dataclass

from .engine import (
    IllegalActionError,
    compute_next,
    goals_hold,
    initial_state,
    preconditions_hold,
)
from .model import (
    NOOP,
    ORDERING_PLAYER_FIRST,
    DerivedTest,
    DomainSpec,
    EventTest,
    GameInstance,
    ParamTest,
    PlayabilityRequirements,
    Trace,
    TraceStep,
)

PLAYABLE = "playable"
NOT_PLAYABLE = "not_playable_within_horizon"
RESOURCE_LIMIT = "resource_limit"

DEFAULT_NODE_CAP = 2_000_000


class PlanResourceLimit(Exception):
    """The node budget ran out before the search could decide."""


@dataclass(frozen=True)
class PlanResult:
    status: str
    witness: Trace | None
    states_expanded: int
    horizon_used: int

    @property
    def playable(self) -> bool:
        return self.status == PLAYABLE

    def to_json(self, mechanics=None) -> dict:
        from .model import trace_to_json

        mech_map = {m.id: m for m in mechanics} if mechanics else None
        return {
            "status": self.status,
            "witness": trace_to_json(self.witness, mech_map) if self.witness else None,
            "states_expanded": self.states_expanded,
            "horizon_used": self.horizon_used,
        }


@dataclass(frozen=True)
class PlayabilityReport:
    passed: bool
    resource_limited: bool
    instances: tuple[tuple[str, PlanResult], ...]

    def to_json(self, mechanics=None) -> dict:
        return {
            "passed": self.passed,
            "resource_limited": self.resource_limited,
            "instances": {name: r.to_json(mechanics) for name, r in self.instances},
        }


def _windows(mechanics) -> tuple[int, int]:
    """(state lookback, event lookback) implied by the mechanic set's offsets."""
    state_lb = 0
    event_lb = 0
    for m in mechanics:
        for a in m.pre:
            if isinstance(a, (ParamTest, DerivedTest)):
                state_lb = max(state_lb, -a.offset)
            elif isinstance(a, EventTest):
                event_lb = max(event_lb, -a.offset)
    return state_lb, event_lb


class _Search:
    def __init__(self, spec, mechanics, instance, reqs, horizon, node_cap):
        self.spec = spec
        self.reqs: PlayabilityRequirements = reqs if reqs is not None else spec.playability
        self.mechanics = tuple(mechanics)
        self.mech_map = {m.id: m for m in self.mechanics}
        self.instance = instance
        self.horizon = horizon if horizon is not None else spec.horizon()
        self.node_cap = node_cap
        self.expanded = 0
        self.pairs = spec.has_pairs()
        self.state_lb, self.event_lb = _windows(self.mechanics)
        self.player = self.reqs.player_agent
        self.player_goals = self.reqs.goals_for(self.player)
        self.opponents = tuple(
            (agent, goals)
            for agent, goals in self.reqs.per_agent
            if agent != self.player and goals.goal
        )
        self.actions = tuple(sorted(self.mech_map)) + ((NOOP,) if self.reqs.allow_noop else ())
        session = initial_state(spec, instance, self.mechanics)
        self.root_values = session.state.values

    def _key(self, states, events, pending, t):
        # (mech, atom_idx) pins the resolved effect atom, so the tuple below
        # fully identifies a pending entry.
        lo = max(0, t - self.state_lb)
        window = tuple(
            tuple(states[i][p] for p in self.pairs) for i in range(lo, t + 1)
        )
        pend = tuple(
            sorted((p.due - t, p.mech, p.atom_idx, p.actor, p.depth) for p in pending)
        )
        evs = tuple(sorted((tick - t, agent, mid) for tick, agent, mid in events if tick > t - self.event_lb))
        return (t % len(self.spec.agents), t - lo, window, pend, evs)

    def _bump(self):
        self.expanded += 1
        if self.expanded > self.node_cap:
            raise PlanResourceLimit()

    def _node_status(self, states, events, t):
        """'dead' | 'goal' | 'open' for the state at tick t."""
        if not goals_hold(self.spec, states, events, self.player, self.player_goals.maintenance, t):
            return "dead"
        if self.player_goals.goal and goals_hold(
            self.spec, states, events, self.player, self.player_goals.goal, t
        ):
            return "goal"
        if self.reqs.ordering == ORDERING_PLAYER_FIRST:
            for agent, goals in self.opponents:
                if goals_hold(self.spec, states, events, agent, goals.goal, t):
                    return "dead"
        return "open"


def _run_plan(search: _Search) -> tuple[str, list | None]:
    """Iterative deepening; returns (status, path-of-(agent, action) or None)."""
    spec = search.spec
    states = [search.root_values]
    base_events: frozenset = frozenset()
    base_pending: tuple = ()

    status0 = search._node_status(states, base_events, 0)
    if status0 == "goal":
        return PLAYABLE, []
    if status0 == "dead":
        return NOT_PLAYABLE, None

    for limit in range(1, search.horizon + 1):
        visited: dict = {}
        cutoff = False
        path: list = []

        def dfs(events, pending, t) -> bool:
            nonlocal cutoff
            if t >= limit:
                cutoff = True
                return False
            key = search._key(states, events, pending, t)
            seen = visited.get(key)
            if seen is not None and seen <= t:
                # A known node reached no earlier than before offers nothing
                # new: node identity captures everything the future depends
                # on, so its subtree was already covered with a bigger budget.
                return False
            visited[key] = t
            search._bump()
            agent = spec.agents[t % len(spec.agents)]
            for action in search.actions:
                if action != NOOP and not preconditions_hold(
                    spec, states, events, agent, search.mech_map[action], t
                ):
                    continue
                try:
                    values, new_pending, new_events = compute_next(
                        spec, search.mech_map, states, events, pending, agent, action
                    )
                except IllegalActionError:
                    continue
                states.append(values)
                path.append((agent, action))
                status = search._node_status(states, new_events, t + 1)
                if status == "goal":
                    return True
                if status == "open" and dfs(new_events, new_pending, t + 1):
                    return True
                states.pop()
                path.pop()
            return False

        if dfs(base_events, base_pending, 0):
            return PLAYABLE, path
        if not cutoff:
            return NOT_PLAYABLE, None
    return NOT_PLAYABLE, None


def plan(
    spec: DomainSpec,
    mechanics,
    instance: GameInstance,
    reqs: PlayabilityRequirements | None = None,
    horizon: int | None = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> PlanResult:
    """Decide whether the mechanic set makes ``instance`` winnable in bound."""
    search = _Search(spec, mechanics, instance, reqs, horizon, node_cap)
    try:
        status, path = _run_plan(search)
    except PlanResourceLimit:
        return PlanResult(RESOURCE_LIMIT, None, search.expanded, search.horizon)
    witness = None
    if status == PLAYABLE:
        witness = Trace(
            instance=instance.name,
            steps=tuple(
                TraceStep(tick=i, agent=agent, action=action)
                for i, (agent, action) in enumerate(path)
            ),
            terminal_tick=len(path),
            goal_ticks=((search.player, len(path)),),
        )
    return PlanResult(status, witness, search.expanded, search.horizon)


def check_playability(
    spec: DomainSpec,
    mechanics,
    reqs: PlayabilityRequirements | None = None,
    horizon: int | None = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> PlayabilityReport:
    """Run the planner on every instance; all must be playable to pass."""
    results = []
    passed = True
    limited = False
    for instance in spec.instances:
        result = plan(spec, mechanics, instance, reqs, horizon, node_cap)
        results.append((instance.name, result))
        if result.status == RESOURCE_LIMIT:
            limited = True
        if not result.playable:
            passed = False
    return PlayabilityReport(passed=passed, resource_limited=limited, instances=tuple(results))


def enumerate_traces(
    spec: DomainSpec,
    mechanics,
    instance: GameInstance,
    reqs: PlayabilityRequirements | None = None,
    horizon: int | None = None,
    cap: int = 1,
    node_cap: int = DEFAULT_NODE_CAP,
) -> list[Trace]:
    """Up to ``cap`` goal-achieving traces, shortest first, deterministic.

    A trace ends at the first tick its goal holds, so every returned trace is
    goal-terminal; longer entries differ in interleaved alternatives rather
    than trailing padding.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    search = _Search(spec, mechanics, instance, reqs, horizon, node_cap)
    spec_agents = spec.agents
    states = [search.root_values]
    collected: list[Trace] = []

    status0 = search._node_status(states, frozenset(), 0)
    if status0 == "goal":
        return [Trace(instance=instance.name, steps=(), terminal_tick=0, goal_ticks=((search.player, 0),))]
    if status0 == "dead":
        return []

    def record(path):
        collected.append(
            Trace(
                instance=instance.name,
                steps=tuple(
                    TraceStep(tick=i, agent=a, action=act) for i, (a, act) in enumerate(path)
                ),
                terminal_tick=len(path),
                goal_ticks=((search.player, len(path)),),
            )
        )

    for limit in range(1, search.horizon + 1):
        if len(collected) >= cap:
            break
        cutoff = False
        path: list = []

        def dfs(events, pending, t) -> bool:
            nonlocal cutoff
            if len(collected) >= cap:
                return True
            if t >= limit:
                cutoff = True
                return False
            search._bump()
            agent = spec_agents[t % len(spec_agents)]
            for action in search.actions:
                if action != NOOP and not preconditions_hold(
                    spec, states, events, agent, search.mech_map[action], t
                ):
                    continue
                try:
                    values, new_pending, new_events = compute_next(
                        spec, search.mech_map, states, events, pending, agent, action
                    )
                except IllegalActionError:
                    continue
                states.append(values)
                path.append((agent, action))
                status = search._node_status(states, new_events, t + 1)
                if status == "goal":
                    if t + 1 == limit:  # only collect at the frontier depth
                        record(list(path))
                        if len(collected) >= cap:
                            states.pop()
                            path.pop()
                            return True
                elif status == "open":
                    if dfs(new_events, new_pending, t + 1):
                        states.pop()
                        path.pop()
                        return True
                states.pop()
                path.pop()
            return False

        if dfs(frozenset(), (), 0):
            break
        if not cutoff:
            break
    return collected
