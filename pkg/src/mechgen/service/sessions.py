"""Interactive playtest sessions: single-writer, snapshot-on-every-move.

A session snapshot stores the inputs plus the action log; restoring replays
the log through the deterministic engine, so a resumed session is bit-for-bit
the session that was interrupted.
"""

from __future__ import annotations

import threading

from ..engine import (
    EngineError,
    IllegalActionError,
    OutOfTurnError,
    Session,
    applicable_mechanics,
    execute_tick,
    goals_hold,
    initial_state,
)
from ..loader import mechanics_to_json, parse_domain_dict, parse_mechanics
from ..model import NOOP
from .store import FileStore, new_id

ACTIVE = "active"
WON = "won"
LOST = "lost"


class SessionError(Exception):
    def __init__(self, code: str, message: str):
        self.code = code
        super().__init__(message)


class PlaySession:
    def __init__(self, session_id: str, domain_doc: dict, instance_name: str,
                 mechanics_doc: list, controls: list | None):
        self.id = session_id
        self.domain_doc = domain_doc
        self.spec = parse_domain_dict(domain_doc)
        self.mechanics, _ = parse_mechanics(mechanics_doc, self.spec)
        self.instance = self.spec.instance_by_name(instance_name)
        self.controls = controls or []
        self.lock = threading.Lock()
        self.steps: list[dict] = []
        self.session: Session = initial_state(self.spec, self.instance, self.mechanics)

    # -- queries -----------------------------------------------------------

    def _label(self, mid: int) -> list[str]:
        for item in self.controls:
            if item.get("mechanic") == mid:
                return list(item.get("inputs", []))
        return []

    def _flags(self) -> dict:
        states = [s.values for s in self.session.history]
        events = frozenset(self.session.events)
        now = self.session.time
        out = {}
        for agent, goals in self.spec.playability.per_agent:
            out[agent] = {
                "goal": bool(goals.goal)
                and goals_hold(self.spec, states, events, agent, goals.goal, now),
                "maintenance": goals_hold(
                    self.spec, states, events, agent, goals.maintenance, now
                ),
            }
        return out

    def status(self) -> str:
        flags = self._flags()
        player = self.spec.playability.player_agent
        player_flags = flags.get(player, {"goal": False, "maintenance": True})
        if not player_flags["maintenance"]:
            return LOST
        if player_flags["goal"]:
            return WON
        return ACTIVE

    def snapshot(self) -> dict:
        return {
            "id": self.id,
            "domain": self.domain_doc,
            "instance": self.instance.name,
            "mechanics": mechanics_to_json(self.mechanics),
            "controls": self.controls,
            "steps": list(self.steps),
        }

    def view(self) -> dict:
        by_id = {m.id: m for m in self.mechanics}
        turn = self.session.turn_agent()
        applicable = []
        if self.status() == ACTIVE:
            for action in applicable_mechanics(self.session, turn):
                if action == NOOP:
                    applicable.append({"action": NOOP, "label": "wait", "inputs": []})
                else:
                    applicable.append(
                        {
                            "action": action,
                            "label": by_id[action].display(),
                            "inputs": self._label(action),
                        }
                    )
        return {
            "id": self.id,
            "instance": self.instance.name,
            "tick": self.session.time,
            "turn_agent": turn,
            "status": self.status(),
            "state": [
                {"param": p, "entity": e, "value": v}
                for (p, e), v in sorted(self.session.state.values.items())
            ],
            "history": [
                {
                    "tick": s.time,
                    "values": [
                        {"param": p, "entity": e, "value": v}
                        for (p, e), v in sorted(s.values.items())
                    ],
                }
                for s in self.session.history
            ],
            "steps": list(self.steps),
            "applicable": applicable,
            "agents": self._flags(),
        }

    # -- mutation ----------------------------------------------------------

    def resolve_action(self, raw) -> int | str:
        if isinstance(raw, str) and raw.lower() == NOOP:
            return NOOP
        if isinstance(raw, int) and not isinstance(raw, bool):
            if any(m.id == raw for m in self.mechanics):
                return raw
            raise SessionError("unknown_action", f"no mechanic with id {raw}")
        if isinstance(raw, str):
            for m in self.mechanics:
                if m.name == raw:
                    return m.id
        raise SessionError("unknown_action", f"no mechanic named {raw!r}")

    def act(self, agent: str, raw_action) -> None:
        action = self.resolve_action(raw_action)
        self.session = execute_tick(self.session, agent, action)
        self.steps.append({"agent": agent, "action": raw_action if action != NOOP else NOOP})

    def reset(self) -> None:
        self.steps = []
        self.session = initial_state(self.spec, self.instance, self.mechanics)


class SessionManager:
    def __init__(self, store: FileStore):
        self.store = store
        self._lock = threading.Lock()
        self._sessions: dict[str, PlaySession] = {}
        for session_id, record in store.load_all("sessions").items():
            try:
                self._sessions[session_id] = self._replay(record)
            except (EngineError, Exception) as e:  # noqa: BLE001
                import logging

                logging.getLogger(__name__).warning(
                    "could not restore session %s: %s", session_id, e
                )

    @staticmethod
    def _replay(record: dict) -> PlaySession:
        ps = PlaySession(
            record["id"],
            record["domain"],
            record["instance"],
            record["mechanics"],
            record.get("controls"),
        )
        for step in record.get("steps", []):
            ps.act(step["agent"], step["action"])
        return ps

    def create(self, domain_doc: dict, mechanics_doc: list, instance_name: str | None,
               controls: list | None = None) -> PlaySession:
        spec = parse_domain_dict(domain_doc)
        name = instance_name or spec.instances[0].name
        ps = PlaySession(new_id(), domain_doc, name, mechanics_doc, controls)
        with self._lock:
            self._sessions[ps.id] = ps
        self.store.save("sessions", ps.id, ps.snapshot())
        return ps

    def get(self, session_id: str) -> PlaySession | None:
        with self._lock:
            return self._sessions.get(session_id)

    def act(self, session_id: str, agent: str, raw_action) -> PlaySession:
        ps = self.get(session_id)
        if ps is None:
            raise SessionError("not_found", f"no session {session_id}")
        with ps.lock:
            try:
                ps.act(agent, raw_action)
            except OutOfTurnError as e:
                raise SessionError("out_of_turn", str(e)) from e
            except IllegalActionError as e:
                raise SessionError("illegal_action", str(e)) from e
            self.store.save("sessions", ps.id, ps.snapshot())
        return ps

    def reset(self, session_id: str) -> PlaySession:
        ps = self.get(session_id)
        if ps is None:
            raise SessionError("not_found", f"no session {session_id}")
        with ps.lock:
            ps.reset()
            self.store.save("sessions", ps.id, ps.snapshot())
        return ps
