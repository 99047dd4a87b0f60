"""Candidate synthesis: score-ordered enumeration, planner certification, nogoods.

Candidates are built atom by atom over a finite vocabulary using an
include/exclude cursor walk, so every (preconditions, effects) combination has
exactly one construction path.  Partial candidates carry an admissible lower
bound of their final score; completed candidates re-enter the frontier with
their exact score, which makes the first certified candidate optimal.
Candidates that fail certification are recorded as nogood signatures and never
rebuilt, including under reorderings or id renamings.
"""

from __future__ import annotations

import heapq
import itertools
import time as _time
from dataclasses import dataclass

from .engine import EvaluationError
from .model import (
    ABSOLUTE,
    RELATIONS,
    RELATIVE,
    ControlReqs,
    CostRequired,
    DerivedTest,
    DesignRequirements,
    DomainSpec,
    EventInvoke,
    EventTest,
    GeneratorBounds,
    MaxAtoms,
    Mechanic,
    ParamTest,
    ParamUpdate,
    SoftReq,
    Trace,
    atom_sort_key,
    canonicalize_mechanic,
    mechanic_signature,
    trace_to_json,
)
from .planner import (
    DEFAULT_NODE_CAP,
    PlanResourceLimit,
    check_playability,
    enumerate_traces,
)
from .reqs import (
    ScoreVector,
    check_controls,
    check_hard,
    check_progression,
    intuitiveness_score,
    score_key,
    score_soft,
)

DEFAULT_VOCAB_CAP = 4096
DEFAULT_CANDIDATE_BUDGET = 100_000
DEFAULT_TIME_BUDGET = 60.0

FOUND = "found"
EXHAUSTED = "exhausted_within_bounds"
RESOURCE_LIMIT = "resource_limit"


class VocabularyTooLarge(Exception):
    def __init__(self, pre: int, eff: int, cap: int):
        self.pre = pre
        self.eff = eff
        self.cap = cap
        super().__init__(f"vocabulary of {pre} condition + {eff} effect atoms exceeds cap {cap}")


class ControlsUnsatisfiable(Exception):
    pass


@dataclass(frozen=True)
class Vocabulary:
    pre: tuple
    eff: tuple

    def size(self) -> int:
        return len(self.pre) + len(self.eff)


def condition_vocabulary(
    spec: DomainSpec, bounds: GeneratorBounds | None = None, cap: int = DEFAULT_VOCAB_CAP
) -> Vocabulary:
    """Enumerate every condition and effect atom the generator may use.

    Order is deterministic: parameter atoms by (entity, parameter, frame,
    offset, ...), then derived tests, then event atoms.  Relative-frame tests
    are only emitted when every agent owns the parameter, since they read the
    acting agent's own value at evaluation time.
    """
    bounds = bounds if bounds is not None else spec.bounds
    pre_lo = bounds.pre_offsets[0]
    eff_hi = bounds.eff_offsets[1]
    constants = bounds.constants
    pairs = spec.has_pairs()
    owned = set(spec.has)

    pre: list = []
    for param, entity in pairs:
        rel_safe = all((agent, param) in owned for agent in spec.agents)
        for frame in (ABSOLUTE, RELATIVE):
            if frame == RELATIVE and not rel_safe:
                continue
            for offset in range(pre_lo, 1):
                for rel in RELATIONS:
                    for rhs in constants:
                        pre.append(ParamTest(frame, offset, param, entity, rel, rhs))
    for dp in spec.derived:
        for entity in spec.entities:
            if not all((entity, c.param) in owned for c in dp.conjuncts):
                continue
            for offset in range(pre_lo, 1):
                for negated in (False, True):
                    pre.append(DerivedTest(offset, dp.name, entity, negated))
    for mech in range(1, bounds.max_mechanics + 1):
        for entity in spec.agents:
            for offset in range(pre_lo, 0):
                for negated in (False, True):
                    pre.append(EventTest(offset, mech, entity, negated))

    abs_ranges = dict(spec.abs_ranges)
    rel_ranges = dict(spec.rel_ranges)
    eff: list = []
    for param, entity in pairs:
        for offset in range(1, eff_hi + 1):
            rng = abs_ranges.get((param, entity))
            if rng:
                for amount in constants:
                    if rng[0] <= amount <= rng[1]:
                        eff.append(ParamUpdate(ABSOLUTE, offset, param, entity, amount))
            rng = rel_ranges.get((param, entity))
            if rng:
                for amount in constants:
                    # a zero delta can never change anything
                    if amount != 0 and rng[0] <= amount <= rng[1]:
                        eff.append(ParamUpdate(RELATIVE, offset, param, entity, amount))
    for mech in range(1, bounds.max_mechanics + 1):
        for offset in range(1, eff_hi + 1):
            eff.append(EventInvoke(offset, mech))

    if len(pre) + len(eff) > cap:
        raise VocabularyTooLarge(len(pre), len(eff), cap)
    return Vocabulary(pre=tuple(pre), eff=tuple(eff))


# ---------------------------------------------------------------------------
# Candidates and the search frontier
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Candidate:
    mechanics: tuple[Mechanic, ...]
    score: ScoreVector
    signature: str
    control_mapping: tuple[tuple[int, tuple[str, ...]], ...] | None = None


def _ref_id(atom) -> int | None:
    if isinstance(atom, (EventTest, EventInvoke)):
        return atom.mech
    return None


class SearchFrontier:
    """Best-first enumeration of hard-requirement-passing candidates.

    ``next_candidate`` yields canonical candidates in nondecreasing score
    order, never repeating a signature and skipping recorded nogoods.
    """

    def __init__(
        self,
        spec: DomainSpec,
        vocab: Vocabulary,
        bounds: GeneratorBounds,
        soft: tuple[SoftReq, ...],
        hard,
        context: dict | None = None,
    ):
        self.spec = spec
        self.vocab = vocab
        self.bounds = bounds
        self.soft = tuple(sorted(soft, key=lambda s: -s.priority))
        self.hard = tuple(hard)
        self.context = dict(context or {})
        self.nogoods: set[str] = set()
        self.yielded: set[str] = set()
        self._seq = itertools.count()
        self._heap: list = []

        self.max_pre = bounds.max_pre
        self.max_eff = bounds.max_eff
        for req in self.hard:
            if isinstance(req, MaxAtoms):
                if req.max_pre is not None:
                    self.max_pre = min(self.max_pre, req.max_pre)
                if req.max_eff is not None:
                    self.max_eff = min(self.max_eff, req.max_eff)

        self._cost_eff = self._cost_indices()
        self._pre_entities = tuple(self._atom_entity(a) for a in vocab.pre)
        self._eff_entities = tuple(self._atom_entity(a) for a in vocab.eff)
        self._pre_refs = tuple(_ref_id(a) for a in vocab.pre)
        self._eff_refs = tuple(_ref_id(a) for a in vocab.eff)

        seed = self.context.get("seed")
        self._seed_pre_idx: list[set[int]] = []
        self._seed_eff_idx: list[set[int]] = []
        if seed is not None:
            pre_index = {a: i for i, a in enumerate(vocab.pre)}
            eff_index = {a: i for i, a in enumerate(vocab.eff)}
            for m in sorted(seed, key=lambda m: m.id):
                self._seed_pre_idx.append({pre_index[a] for a in m.pre})
                self._seed_eff_idx.append({eff_index[a] for a in m.eff})
        self._adapt_whole = bounds.max_pre + bounds.max_eff + 1

        self._intuit_floor = 0
        if any(s.term == "control_intuitiveness" for s in self.soft):
            pairs = bounds.max_mechanics * (bounds.max_mechanics - 1) // 2
            self._intuit_floor = -(pairs * max(len(spec.inputs), 1) * self.max_eff)

        # root: the empty candidate, plus growth into mechanic construction
        self._push_node(("between", ()))

    # -- scoring ---------------------------------------------------------

    def _atom_entity(self, atom) -> str | None:
        if isinstance(atom, (ParamTest, DerivedTest, EventTest, ParamUpdate)):
            return atom.entity
        return None

    def _lower_bound(self, done, phase, cur_pre, cur_eff, cursor) -> tuple:
        started = len(done) + (1 if phase in ("eff", "pre") else 0)
        atoms = sum(len(p) + len(e) for p, e in done) + len(cur_pre) + len(cur_eff)
        values = []
        for req in self.soft:
            if req.term == "mechanic_count":
                values.append(req.weight * started)
            elif req.term == "atom_count":
                values.append(req.weight * atoms)
            elif req.term == "distinct_entities":
                entities = set()
                for p, e in done:
                    entities.update(self._pre_entities[i] for i in p)
                    entities.update(self._eff_entities[i] for i in e)
                entities.update(self._pre_entities[i] for i in cur_pre)
                entities.update(self._eff_entities[i] for i in cur_eff)
                entities.discard(None)
                values.append(req.weight * len(entities))
            elif req.term == "adaptation_distance":
                values.append(req.weight * self._adapt_bound(done, phase, cur_pre, cur_eff, cursor))
            elif req.term == "control_intuitiveness":
                values.append(req.weight * self._intuit_floor)
            else:
                raise ValueError(f"unknown soft term: {req.term}")
        return tuple(values)

    def _adapt_bound(self, done, phase, cur_pre, cur_eff, cursor) -> int:
        m = len(self._seed_pre_idx)
        total = 0
        for pos, (p, e) in enumerate(done):
            if pos < m:
                total += len(set(p) ^ self._seed_pre_idx[pos])
                total += len(set(e) ^ self._seed_eff_idx[pos])
            else:
                total += self._adapt_whole
        if phase in ("eff", "pre"):
            pos = len(done)
            if pos < m:
                seed_pre = self._seed_pre_idx[pos]
                seed_eff = self._seed_eff_idx[pos]
                if phase == "eff":
                    total += len(set(cur_eff) - seed_eff)
                    total += sum(1 for i in seed_eff if i < cursor and i not in cur_eff)
                else:
                    total += len(set(cur_eff) ^ seed_eff)
                    total += len(set(cur_pre) - seed_pre)
                    total += sum(1 for i in seed_pre if i < cursor and i not in cur_pre)
            else:
                total += self._adapt_whole
        return total

    # -- heap plumbing -----------------------------------------------------

    def _push(self, values, mech_count, pre_count, node):
        heapq.heappush(self._heap, ((tuple(values), mech_count, pre_count), next(self._seq), node))

    def _push_node(self, node):
        kind = node[0]
        if kind == "between":
            done = node[1]
            values = self._lower_bound(done, "between", (), (), 0)
            self._push(values, len(done), sum(len(p) for p, _ in done), node)
        else:
            _, done, phase, cur_pre, cur_eff, cursor, _ = node
            values = self._lower_bound(done, phase, cur_pre, cur_eff, cursor)
            self._push(
                values,
                len(done) + 1,
                sum(len(p) for p, _ in done) + len(cur_pre),
                node,
            )

    # -- candidate completion ---------------------------------------------

    def _build_mechanics(self, done) -> tuple[Mechanic, ...]:
        ms = []
        for pos, (p, e) in enumerate(done, start=1):
            ms.append(
                canonicalize_mechanic(
                    Mechanic(
                        id=pos,
                        pre=tuple(self.vocab.pre[i] for i in p),
                        eff=tuple(self.vocab.eff[i] for i in e),
                    )
                )
            )
        return tuple(ms)

    def _complete(self, done):
        k = len(done)
        for p, e in done:
            for i in p:
                ref = self._pre_refs[i]
                if ref is not None and ref > k:
                    return
            for i in e:
                ref = self._eff_refs[i]
                if ref is not None and ref > k:
                    return
        mechanics = self._build_mechanics(done)
        if check_hard(mechanics, self.spec, self.hard):
            return
        mapping = None
        context = dict(self.context)
        controls: ControlReqs | None = context.pop("controls", None)
        if controls is not None:
            try:
                mapping = generate_controls(mechanics, controls, self.spec.inputs)
            except ControlsUnsatisfiable:
                return
            if any(s.term == "control_intuitiveness" for s in self.soft):
                context["control_mapping"] = {mid: set(syms) for mid, syms in mapping}
        score = score_soft(mechanics, self.soft, context)
        signature = mechanic_signature(mechanics)
        candidate = Candidate(
            mechanics=mechanics, score=score, signature=signature, control_mapping=mapping
        )
        self._push(score_key(score), k, sum(len(p) for p, _ in done), ("complete", candidate))

    # -- expansion ----------------------------------------------------------

    def _expand(self, node):
        kind = node[0]
        if kind == "between":
            done = node[1]
            self._complete(done)
            if len(done) < self.bounds.max_mechanics:
                self._push_node(("atoms", done, "eff", (), (), 0, False))
            return

        # Atom phases walk an include/advance/close cursor.  A phase closes
        # only at its start or right after an include, so every atom subset is
        # finished exactly once and immediately after its last atom, keeping
        # completion order lexicographic within equal scores.
        _, done, phase, cur_pre, cur_eff, cursor, can_close = node
        vocab = self.vocab.eff if phase == "eff" else self.vocab.pre
        limit = self.max_eff if phase == "eff" else self.max_pre
        committed = cur_eff if phase == "eff" else cur_pre

        closable = can_close or (phase == "pre" and not cur_pre and cursor == 0)
        if phase == "eff" and self._cost_eff is not None:
            has_cost = any(i in self._cost_eff for i in cur_eff)
            if not has_cost:
                # this mechanic still owes a cost effect
                closable = False
                if not self._cost_eff or cursor > max(self._cost_eff):
                    return

        if phase == "eff":
            may_close = closable and bool(cur_eff)
        else:
            may_close = closable
        if may_close:
            self._close_phase(done, phase, cur_pre, cur_eff)
        if cursor < len(vocab) and len(committed) < limit:
            if self._may_include(done, phase, cursor):
                if phase == "eff":
                    child = ("atoms", done, phase, cur_pre, cur_eff + (cursor,), cursor + 1, True)
                else:
                    child = ("atoms", done, phase, cur_pre + (cursor,), cur_eff, cursor + 1, True)
                self._push_node(child)
            self._push_node(("atoms", done, phase, cur_pre, cur_eff, cursor + 1, False))

    def _close_phase(self, done, phase, cur_pre, cur_eff):
        if phase == "eff":
            self._push_node(("atoms", done, "pre", (), cur_eff, 0, False))
            return
        new_mech = (cur_pre, cur_eff)
        if self._ordered_ok(done, new_mech):
            self._push_node(("between", done + (new_mech,)))

    def _may_include(self, done, phase, cursor) -> bool:
        if phase != "eff":
            return True
        atom = self.vocab.eff[cursor]
        # a mechanic may not invoke itself
        return not (isinstance(atom, EventInvoke) and atom.mech == len(done) + 1)

    def _ordered_ok(self, done, new_mech) -> bool:
        """Break permutation symmetry between adjacent event-free mechanics."""
        if not done:
            return True
        prev = done[-1]
        if self._has_refs(prev) or self._has_refs(new_mech):
            return True
        return (prev[1], prev[0]) <= (new_mech[1], new_mech[0])

    def _has_refs(self, mech) -> bool:
        p, e = mech
        return any(self._pre_refs[i] is not None for i in p) or any(
            self._eff_refs[i] is not None for i in e
        )

    def _cost_indices(self):
        reqs = [r for r in self.hard if isinstance(r, CostRequired)]
        if not reqs:
            return None
        agents = set(self.spec.agents)
        indices = set()
        for i, atom in enumerate(self.vocab.eff):
            if not isinstance(atom, ParamUpdate) or atom.frame != RELATIVE or atom.amount >= 0:
                continue
            if all(
                any(
                    atom.param == param and (not actor_owned or atom.entity in agents)
                    for param, actor_owned in req.resources
                )
                for req in reqs
            ):
                indices.add(i)
        return indices

    # -- public ------------------------------------------------------------

    def next_candidate(self) -> Candidate | None:
        """Next admissible candidate by score, or None when space is exhausted."""
        while self._heap:
            _, _, node = heapq.heappop(self._heap)
            if node[0] == "complete":
                candidate: Candidate = node[1]
                if candidate.signature in self.yielded or candidate.signature in self.nogoods:
                    continue
                self.yielded.add(candidate.signature)
                return candidate
            self._expand(node)
        return None

    def record_nogood(self, signature: str) -> None:
        self.nogoods.add(signature)


def next_candidate(frontier: SearchFrontier) -> Candidate | None:
    return frontier.next_candidate()


def record_nogood(frontier: SearchFrontier, signature: str) -> SearchFrontier:
    frontier.record_nogood(signature)
    return frontier


# ---------------------------------------------------------------------------
# Control mapping synthesis
# ---------------------------------------------------------------------------


def generate_controls(mechanics, reqs: ControlReqs, inputs) -> tuple[tuple[int, tuple[str, ...]], ...]:
    """Assign input sets to mechanics, maximizing the overlap credit.

    Exhausts all assignments (inputs and mechanic counts are tiny), keeps the
    constraint that equal-precondition mechanics get distinct input sets, and
    breaks score ties by the lexicographically first assignment.
    """
    ms = sorted(mechanics, key=lambda m: m.id)
    if not ms:
        return ()
    symbols = tuple(inputs)
    if reqs.require_input and not symbols:
        raise ControlsUnsatisfiable("no input symbols declared")
    subsets: list[frozenset[str]] = []
    if not reqs.require_input:
        subsets.append(frozenset())
    for r in range(1, len(symbols) + 1):
        for combo in itertools.combinations(symbols, r):
            subsets.append(frozenset(combo))
    if len(subsets) ** len(ms) > 1_000_000:
        raise ControlsUnsatisfiable(
            f"{len(subsets)} input subsets over {len(ms)} mechanics is too large to search"
        )
    best = None
    best_score = None
    for assignment in itertools.product(subsets, repeat=len(ms)):
        mapping = {m.id: assignment[i] for i, m in enumerate(ms)}
        if reqs.unambiguous:
            clash = False
            for a, b in itertools.combinations(ms, 2):
                if set(a.pre) == set(b.pre) and mapping[a.id] == mapping[b.id]:
                    clash = True
                    break
            if clash:
                continue
        score = intuitiveness_score(ms, mapping)
        if best_score is None or score > best_score:
            best_score = score
            best = mapping
    if best is None:
        raise ControlsUnsatisfiable(
            "no assignment separates all equal-precondition mechanics"
        )
    return tuple((m.id, tuple(sorted(best[m.id]))) for m in ms)


# ---------------------------------------------------------------------------
# Generation and adaptation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenerationResult:
    status: str
    mechanics: tuple[Mechanic, ...] = ()
    score: ScoreVector = ()
    witnesses: tuple[tuple[str, Trace], ...] = ()
    control_mapping: tuple[tuple[int, tuple[str, ...]], ...] | None = None
    candidates_tested: int = 0
    nogoods_recorded: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_json(self) -> dict:
        from .loader import mechanics_to_json

        mech_map = {m.id: m for m in self.mechanics}
        out = {
            "status": self.status,
            "mechanics": mechanics_to_json(self.mechanics),
            "score": [[p, v] for p, v in self.score],
            "witnesses": {name: trace_to_json(t, mech_map) for name, t in self.witnesses},
            "candidates_tested": self.candidates_tested,
            "nogoods_recorded": self.nogoods_recorded,
        }
        if self.control_mapping is not None:
            out["control_mapping"] = [
                {"mechanic": mid, "inputs": list(syms)} for mid, syms in self.control_mapping
            ]
        return out


def _instances_by_level(spec: DomainSpec):
    levels: dict[int, list] = {}
    for inst in spec.instances:
        levels.setdefault(inst.level, []).append(inst)
    return [levels[level] for level in sorted(levels)]


def _certify(spec, candidate: Candidate, design, horizon, node_cap):
    """Planner (+ progression/control) certification; returns (ok, witnesses)."""
    report = check_playability(spec, candidate.mechanics, horizon=horizon, node_cap=node_cap)
    if report.resource_limited:
        raise PlanResourceLimit()
    if not report.passed:
        return False, ()
    witnesses = tuple(
        (name, result.witness) for name, result in report.instances if result.witness is not None
    )
    if design.progression is not None:
        per_level = []
        for instances in _instances_by_level(spec):
            traces: list[Trace] = []
            for inst in instances:
                traces.extend(
                    enumerate_traces(
                        spec,
                        candidate.mechanics,
                        inst,
                        horizon=horizon,
                        cap=spec.bounds.trace_cap,
                        node_cap=node_cap,
                    )
                )
            per_level.append(traces)
        ok, _ = check_progression(per_level, design.progression)
        if not ok:
            return False, ()
    if design.controls is not None and candidate.control_mapping is not None:
        mapping = {mid: set(syms) for mid, syms in candidate.control_mapping}
        if check_controls(candidate.mechanics, mapping, design.controls, spec.inputs):
            return False, ()
    return True, witnesses


def generate(
    spec: DomainSpec,
    design: DesignRequirements | None = None,
    bounds: GeneratorBounds | None = None,
    *,
    seed=None,
    max_candidates: int = DEFAULT_CANDIDATE_BUDGET,
    time_budget: float = DEFAULT_TIME_BUDGET,
    node_cap: int = DEFAULT_NODE_CAP,
    vocab_cap: int = DEFAULT_VOCAB_CAP,
) -> GenerationResult:
    """Find the best-scoring mechanic set meeting every requirement.

    Candidates come out of the frontier in nondecreasing score order, so the
    first one to pass hard requirements, playability on every instance, and
    any progression/control requirements is optimal within bounds.
    """
    design = design if design is not None else spec.design
    bounds = bounds if bounds is not None else spec.bounds
    vocab = condition_vocabulary(spec, bounds, cap=vocab_cap)
    soft = design.soft
    context: dict = {}
    if design.controls is not None:
        context["controls"] = design.controls
    if seed is not None:
        seed = _normalize_seed_ids(seed)
        vocab = _merge_seed_atoms(vocab, seed)
        adaptation = design.adaptation
        priority = None if adaptation is None else adaptation.priority
        weight = 1 if adaptation is None else adaptation.weight
        if priority is None:
            priority = max((s.priority for s in soft), default=0) + 1
        soft = (SoftReq("adaptation_distance", weight=weight, priority=priority),) + tuple(
            s for s in soft if s.term != "adaptation_distance"
        )
        context["seed"] = seed
        context["bounds"] = bounds

    frontier = SearchFrontier(spec, vocab, bounds, soft, design.hard, context)
    horizon = spec.horizon()
    started = _time.monotonic()
    tested = 0
    while True:
        if tested >= max_candidates or _time.monotonic() - started > time_budget:
            return GenerationResult(
                status=RESOURCE_LIMIT,
                candidates_tested=tested,
                nogoods_recorded=len(frontier.nogoods),
            )
        candidate = frontier.next_candidate()
        if candidate is None:
            return GenerationResult(
                status=EXHAUSTED,
                candidates_tested=tested,
                nogoods_recorded=len(frontier.nogoods),
            )
        tested += 1
        try:
            ok, witnesses = _certify(spec, candidate, design, horizon, node_cap)
        except (PlanResourceLimit, EvaluationError):
            return GenerationResult(
                status=RESOURCE_LIMIT,
                candidates_tested=tested,
                nogoods_recorded=len(frontier.nogoods),
            )
        if ok:
            return GenerationResult(
                status=FOUND,
                mechanics=candidate.mechanics,
                score=candidate.score,
                witnesses=witnesses,
                control_mapping=candidate.control_mapping,
                candidates_tested=tested,
                nogoods_recorded=len(frontier.nogoods),
            )
        frontier.record_nogood(candidate.signature)


def _normalize_seed_ids(seed) -> tuple[Mechanic, ...]:
    """Renumber seed mechanics densely by ascending id; event references follow."""
    ms = sorted((canonicalize_mechanic(m) for m in seed), key=lambda m: m.id)
    mapping = {m.id: i + 1 for i, m in enumerate(ms)}
    out = []
    for m in ms:
        pre = tuple(
            EventTest(a.offset, mapping.get(a.mech, a.mech), a.entity, a.negated)
            if isinstance(a, EventTest)
            else a
            for a in m.pre
        )
        eff = tuple(
            EventInvoke(a.offset, mapping.get(a.mech, a.mech))
            if isinstance(a, EventInvoke)
            else a
            for a in m.eff
        )
        out.append(
            canonicalize_mechanic(Mechanic(id=mapping[m.id], pre=pre, eff=eff, name=m.name))
        )
    return tuple(out)


def _merge_seed_atoms(vocab: Vocabulary, seed) -> Vocabulary:
    """Ensure every seed atom is constructible; extras append in stable order."""
    pre = list(vocab.pre)
    eff = list(vocab.eff)
    pre_set = set(pre)
    eff_set = set(eff)
    extra_pre = sorted(
        {a for m in seed for a in m.pre if a not in pre_set}, key=atom_sort_key
    )
    extra_eff = sorted(
        {a for m in seed for a in m.eff if a not in eff_set}, key=atom_sort_key
    )
    return Vocabulary(pre=tuple(pre + extra_pre), eff=tuple(eff + extra_eff))


def adapt(
    spec: DomainSpec,
    seed,
    overlay: dict | None = None,
    **budgets,
) -> GenerationResult:
    """Re-synthesize starting from ``seed`` under old plus overlay requirements,
    minimizing the edit distance from the seed ahead of every other objective."""
    from .loader import apply_overlay

    target = apply_overlay(spec, overlay) if overlay else spec
    return generate(target, seed=seed, **budgets)
