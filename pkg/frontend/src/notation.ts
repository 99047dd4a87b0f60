// Mechanic card notation: every atom renders as an angle-bracket triple
// (frame, time index, condition), and parsing the rendered text reproduces
// the wire encoding exactly.

import type { ConditionAtom, EffectAtom, Frame, Rel } from "./types.js";

const REL_NAMES: Record<Rel, string> = {
  eq: "Equal",
  neq: "NotEqual",
  lt: "LessThan",
  gt: "GreaterThan",
};

const NAME_RELS: Record<string, Rel> = Object.fromEntries(
  Object.entries(REL_NAMES).map(([rel, name]) => [name, rel as Rel]),
) as Record<string, Rel>;

export interface MechanicNames {
  byId: Map<number, string>;
  byName: Map<string, number>;
}

export function mechanicNames(mechanics: { id: number; name?: string }[]): MechanicNames {
  const byId = new Map<number, string>();
  const byName = new Map<string, number>();
  for (const m of mechanics) {
    const label = m.name ?? `mech${m.id}`;
    byId.set(m.id, label);
    byName.set(label, m.id);
  }
  return { byId, byName };
}

function mechLabel(mech: number, names?: MechanicNames): string {
  return names?.byId.get(mech) ?? `mech${mech}`;
}

function group(match: RegExpExecArray, index: number): string {
  const value = match[index];
  if (value === undefined) throw new Error(`missing capture group ${index}`);
  return value;
}

function mechFromLabel(label: string, names?: MechanicNames): number {
  const known = names?.byName.get(label);
  if (known !== undefined) return known;
  const match = /^mech(\d+)$/.exec(label);
  if (!match) throw new Error(`unknown mechanic label: ${label}`);
  return Number(group(match, 1));
}

export function renderAtom(atom: ConditionAtom | EffectAtom, names?: MechanicNames): string {
  switch (atom.kind) {
    case "param_test": {
      const rel = REL_NAMES[atom.rel];
      return `⟨${atom.frame}, ${atom.offset}, ${rel}(${atom.param}(${atom.entity}), ${atom.rhs})⟩`;
    }
    case "derived_test": {
      const body = `${atom.pred}(${atom.entity})`;
      return `⟨absolute, ${atom.offset}, ${atom.negated ? `Not(${body})` : body}⟩`;
    }
    case "event_test": {
      const rel = atom.negated ? "NotEqual" : "Equal";
      return `⟨absolute, ${atom.offset}, ${rel}(Performed(${mechLabel(atom.mech, names)}), ${atom.entity})⟩`;
    }
    case "param_update":
      return `⟨${atom.frame}, ${atom.offset}, Update(${atom.param}(${atom.entity}), ${atom.amount})⟩`;
    case "event_invoke":
      return `⟨absolute, ${atom.offset}, Performed(${mechLabel(atom.mech, names)})⟩`;
  }
}

const TRIPLE = /^⟨(absolute|relative),\s*(-?\d+),\s*(.+)⟩$/u;

export function parseAtom(
  text: string,
  side: "pre" | "eff",
  names?: MechanicNames,
): ConditionAtom | EffectAtom {
  const match = TRIPLE.exec(text.trim());
  if (!match) throw new Error(`not an atom triple: ${text}`);
  const frame = group(match, 1) as Frame;
  const offset = Number(group(match, 2));
  const body = group(match, 3).trim();

  const update = /^Update\((\w+)\((\w+)\),\s*(-?\d+)\)$/.exec(body);
  if (update) {
    if (side !== "eff") throw new Error(`updates only appear in effects: ${text}`);
    return {
      kind: "param_update",
      frame,
      offset,
      param: group(update, 1),
      entity: group(update, 2),
      amount: Number(group(update, 3)),
    };
  }

  const invoke = /^Performed\((\w+)\)$/.exec(body);
  if (invoke) {
    if (side !== "eff") throw new Error(`bare Performed only appears in effects: ${text}`);
    return { kind: "event_invoke", offset, mech: mechFromLabel(group(invoke, 1), names) };
  }

  const eventTest = /^(Equal|NotEqual)\(Performed\((\w+)\),\s*(\w+)\)$/.exec(body);
  if (eventTest) {
    return {
      kind: "event_test",
      offset,
      mech: mechFromLabel(group(eventTest, 2), names),
      entity: group(eventTest, 3),
      negated: group(eventTest, 1) === "NotEqual",
    };
  }

  const paramTest = /^(Equal|NotEqual|LessThan|GreaterThan)\((\w+)\((\w+)\),\s*(-?\d+)\)$/.exec(body);
  if (paramTest) {
    const rel = NAME_RELS[group(paramTest, 1)];
    if (!rel) throw new Error(`unknown relation in: ${text}`);
    return {
      kind: "param_test",
      frame,
      offset,
      param: group(paramTest, 2),
      entity: group(paramTest, 3),
      rel,
      rhs: Number(group(paramTest, 4)),
    };
  }

  const negatedDerived = /^Not\((\w+)\((\w+)\)\)$/.exec(body);
  if (negatedDerived) {
    return {
      kind: "derived_test",
      offset,
      pred: group(negatedDerived, 1),
      entity: group(negatedDerived, 2),
      negated: true,
    };
  }
  const derived = /^(\w+)\((\w+)\)$/.exec(body);
  if (derived) {
    return {
      kind: "derived_test",
      offset,
      pred: group(derived, 1),
      entity: group(derived, 2),
      negated: false,
    };
  }
  throw new Error(`unrecognized condition: ${text}`);
}
