"""Design requirement evaluation: hard filters and lexicographic soft scores.

Hard requirements reject candidate mechanic sets outright; soft requirements
rank admissible ones through prioritized weighted sums compared
lexicographically (higher priority dominates, lower sums win).  Progression
and control checkers extend the same machinery to multi-level usage and
input-mapping constraints.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .model import (
    CostRequired,
    DerivedTest,
    DomainSpec,
    EventTest,
    MaxAtoms,
    Mechanic,
    NoContradictoryEquality,
    NoDuplicateMechanics,
    NoEmptyEffects,
    ParamTest,
    ParamUpdate,
    ProgressionReqs,
    ControlReqs,
    Trace,
    RELATIVE,
)

# A score vector is ((priority, value), ...) ordered by descending priority.
ScoreVector = tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ReqViolation:
    requirement: str
    mechanics: tuple[int, ...]
    message: str

    def to_json(self) -> dict:
        return {
            "requirement": self.requirement,
            "mechanics": list(self.mechanics),
            "message": self.message,
        }


class ScoreStructureError(ValueError):
    """Score vectors with different priority structures cannot be compared."""


class ControlMappingError(ValueError):
    """A control mapping references unknown mechanics or inputs."""


# ---------------------------------------------------------------------------
# Hard requirements
# ---------------------------------------------------------------------------


def check_hard(mechanics, spec: DomainSpec, hard) -> list[ReqViolation]:
    """One violation per offending (requirement, mechanic group); empty means
    the candidate is admissible."""
    ms = list(mechanics)
    violations: list[ReqViolation] = []
    agents = set(spec.agents)
    for req in hard:
        if isinstance(req, NoContradictoryEquality):
            for m in ms:
                groups: dict[tuple, set[int]] = {}
                for atom in m.pre:
                    if isinstance(atom, ParamTest) and atom.rel == "eq":
                        groups.setdefault(
                            (atom.frame, atom.offset, atom.param, atom.entity), set()
                        ).add(atom.rhs)
                for (frame, offset, param, entity), values in groups.items():
                    if len(values) > 1:
                        violations.append(
                            ReqViolation(
                                "no_contradictory_equality",
                                (m.id,),
                                f"{m.display()} requires {param}({entity}) to equal "
                                f"{sorted(values)} at the same frame/offset",
                            )
                        )
        elif isinstance(req, NoDuplicateMechanics):
            seen: dict[tuple, int] = {}
            for m in ms:
                key = (m.pre, m.eff)
                if key in seen:
                    violations.append(
                        ReqViolation(
                            "no_duplicate_mechanics",
                            (seen[key], m.id),
                            f"{m.display()} duplicates mechanic {seen[key]}",
                        )
                    )
                else:
                    seen[key] = m.id
        elif isinstance(req, CostRequired):
            for m in ms:
                if not _has_cost(m, req, agents):
                    names = ", ".join(p for p, _ in req.resources)
                    violations.append(
                        ReqViolation(
                            "cost_required",
                            (m.id,),
                            f"{m.display()} spends none of: {names}",
                        )
                    )
        elif isinstance(req, NoEmptyEffects):
            for m in ms:
                if not m.eff:
                    violations.append(
                        ReqViolation("no_empty_effects", (m.id,), f"{m.display()} has no effects")
                    )
        elif isinstance(req, MaxAtoms):
            for m in ms:
                if req.max_pre is not None and len(m.pre) > req.max_pre:
                    violations.append(
                        ReqViolation(
                            "max_atoms",
                            (m.id,),
                            f"{m.display()} has {len(m.pre)} preconditions (max {req.max_pre})",
                        )
                    )
                if req.max_eff is not None and len(m.eff) > req.max_eff:
                    violations.append(
                        ReqViolation(
                            "max_atoms",
                            (m.id,),
                            f"{m.display()} has {len(m.eff)} effects (max {req.max_eff})",
                        )
                    )
        else:
            raise ValueError(f"unknown hard requirement: {req!r}")
    return violations


def _has_cost(m: Mechanic, req: CostRequired, agents: set[str]) -> bool:
    for atom in m.eff:
        if not isinstance(atom, ParamUpdate) or atom.frame != RELATIVE or atom.amount >= 0:
            continue
        for param, actor_owned in req.resources:
            if atom.param != param:
                continue
            if actor_owned and atom.entity not in agents:
                continue
            return True
    return False


# ---------------------------------------------------------------------------
# Soft scoring
# ---------------------------------------------------------------------------


def atom_count(mechanics) -> int:
    return sum(len(m.pre) + len(m.eff) for m in mechanics)


def distinct_entities(mechanics) -> int:
    entities = set()
    for m in mechanics:
        for atom in m.atoms():
            if isinstance(atom, (ParamTest, DerivedTest, EventTest, ParamUpdate)):
                entities.add(atom.entity)
    return len(entities)


def edit_distance(seed, candidate, bounds) -> int:
    """Edits between mechanic sets matched by id: symmetric atom-set
    difference per shared id, plus a whole-mechanic charge per unmatched id."""
    seed_map = {m.id: m for m in seed}
    cand_map = {m.id: m for m in candidate}
    whole = bounds.max_pre + bounds.max_eff + 1
    total = 0
    for mid in set(seed_map) | set(cand_map):
        if mid in seed_map and mid in cand_map:
            s, c = seed_map[mid], cand_map[mid]
            total += len(set(s.pre) ^ set(c.pre)) + len(set(s.eff) ^ set(c.eff))
        else:
            total += whole
    return total


def score_soft(mechanics, soft, context: dict | None = None) -> ScoreVector:
    """Deterministic lexicographic score for a canonical mechanic set.

    ``context`` supplies the seed set and generator bounds for the adaptation
    term and the chosen control mapping for the intuitiveness term.
    """
    ms = list(mechanics)
    context = context or {}
    levels = []
    for req in sorted(soft, key=lambda s: -s.priority):
        if req.term == "atom_count":
            value = atom_count(ms)
        elif req.term == "mechanic_count":
            value = len(ms)
        elif req.term == "distinct_entities":
            value = distinct_entities(ms)
        elif req.term == "adaptation_distance":
            if "seed" not in context or "bounds" not in context:
                raise ValueError("adaptation_distance needs seed and bounds in context")
            value = edit_distance(context["seed"], ms, context["bounds"])
        elif req.term == "control_intuitiveness":
            if "control_mapping" not in context:
                raise ValueError("control_intuitiveness needs control_mapping in context")
            value = -intuitiveness_score(ms, context["control_mapping"])
        else:
            raise ValueError(f"unknown soft term: {req.term}")
        levels.append((req.priority, req.weight * value))
    return tuple(levels)


def compare_scores(a: ScoreVector, b: ScoreVector) -> int:
    """-1, 0, or 1; lexicographic by descending priority, lower sums better."""
    if tuple(p for p, _ in a) != tuple(p for p, _ in b):
        raise ScoreStructureError(f"mismatched priority structures: {a} vs {b}")
    av = tuple(v for _, v in a)
    bv = tuple(v for _, v in b)
    if av < bv:
        return -1
    if av > bv:
        return 1
    return 0


def score_key(score: ScoreVector) -> tuple:
    return tuple(v for _, v in score)


# ---------------------------------------------------------------------------
# Progression
# ---------------------------------------------------------------------------


def check_progression(
    traces_per_level: list[list[Trace]], reqs: ProgressionReqs
) -> tuple[bool, tuple[Trace, ...] | None]:
    """Look for one trace per level whose used-mechanic sets grow as required.

    Returns the first satisfying tuple in input order, bounded by the caps the
    caller applied when enumerating.
    """
    if any(not traces for traces in traces_per_level):
        return False, None
    for combo in itertools.product(*traces_per_level):
        used = [t.used_mechanics() for t in combo]
        ok = True
        for prev, cur in zip(used, used[1:]):
            if reqs.increasing_usage and not len(prev) < len(cur):
                ok = False
                break
            if reqs.reuse_in_subsequent and not prev <= cur:
                ok = False
                break
        if ok and reqs.increasing_usage and used and len(used[0]) < 1:
            ok = False
        if ok:
            return True, tuple(combo)
    return False, None


# ---------------------------------------------------------------------------
# Controls
# ---------------------------------------------------------------------------


def _normalize_mapping(mechanics, mapping, inputs) -> dict[int, frozenset[str]]:
    ids = {m.id for m in mechanics}
    symbols = set(inputs)
    normalized: dict[int, frozenset[str]] = {}
    for mid, assigned in mapping.items():
        if mid not in ids:
            raise ControlMappingError(f"mapping references unknown mechanic {mid}")
        chosen = frozenset(assigned)
        unknown = chosen - symbols
        if unknown:
            raise ControlMappingError(f"mapping uses unknown inputs {sorted(unknown)}")
        normalized[mid] = chosen
    missing = ids - set(normalized)
    if missing:
        raise ControlMappingError(f"mapping misses mechanics {sorted(missing)}")
    return normalized


def check_controls(mechanics, mapping, reqs: ControlReqs, inputs) -> list[ReqViolation]:
    ms = list(mechanics)
    normalized = _normalize_mapping(ms, mapping, inputs)
    violations: list[ReqViolation] = []
    if reqs.require_input:
        for m in ms:
            if not normalized[m.id]:
                violations.append(
                    ReqViolation("require_input", (m.id,), f"{m.display()} has no inputs")
                )
    if reqs.unambiguous:
        for a, b in itertools.combinations(ms, 2):
            if set(a.pre) == set(b.pre) and normalized[a.id] == normalized[b.id]:
                violations.append(
                    ReqViolation(
                        "unambiguous",
                        (a.id, b.id),
                        f"{a.display()} and {b.display()} share preconditions and inputs",
                    )
                )
    return violations


def intuitiveness_score(mechanics, mapping) -> int:
    """Overlap credit: input overlap times effect-target overlap, summed over
    mechanic pairs.  Higher means mappings reuse buttons for related effects."""
    ms = list(mechanics)
    targets = {
        m.id: {
            (a.param, a.entity) for a in m.eff if isinstance(a, ParamUpdate)
        }
        for m in ms
    }
    score = 0
    for a, b in itertools.combinations(ms, 2):
        shared_inputs = len(frozenset(mapping[a.id]) & frozenset(mapping[b.id]))
        shared_targets = len(targets[a.id] & targets[b.id])
        score += shared_inputs * shared_targets
    return score
