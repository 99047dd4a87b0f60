// Pure builders from service responses to renderable structures.  Nothing in
// here advances game state; every number shown on screen originates in a
// response body.

import { mechanicNames, renderAtom } from "./notation.js";
import type {
  DomainDoc,
  MechanicDoc,
  SessionView,
  StateEntry,
} from "./types.js";

export interface DomainSummary {
  entities: string[];
  parameters: string[];
  agents: string[];
  instances: string[];
  spatial: boolean;
}

export function buildDomainSummary(doc: DomainDoc): DomainSummary {
  const parameters = doc.parameters ?? [];
  return {
    entities: doc.entities ?? [],
    parameters,
    agents: doc.agents ?? [],
    instances: (doc.instances ?? []).map((i) => i.name),
    spatial: parameters.includes("Xpos") && parameters.includes("Ypos"),
  };
}

export interface MechanicCard {
  id: number;
  title: string;
  pre: string[];
  eff: string[];
}

export function buildMechanicCards(mechanics: MechanicDoc[]): MechanicCard[] {
  const names = mechanicNames(mechanics);
  return mechanics.map((m) => ({
    id: m.id,
    title: m.name ?? `mech${m.id}`,
    pre: m.pre.map((a) => renderAtom(a, names)),
    eff: m.eff.map((a) => renderAtom(a, names)),
  }));
}

export type Board =
  | { kind: "grid"; width: number; height: number; cells: { x: number; y: number; entities: string[] }[] }
  | { kind: "stats"; rows: { entity: string; values: { param: string; value: number; max: number | null }[] }[] };

function positions(state: StateEntry[]): Map<string, { x?: number; y?: number }> {
  const byEntity = new Map<string, { x?: number; y?: number }>();
  for (const entry of state) {
    if (entry.param !== "Xpos" && entry.param !== "Ypos") continue;
    const slot = byEntity.get(entry.entity) ?? {};
    if (entry.param === "Xpos") slot.x = entry.value;
    else slot.y = entry.value;
    byEntity.set(entry.entity, slot);
  }
  return byEntity;
}

export function buildBoard(view: SessionView, domain?: DomainDoc): Board {
  const spatial = view.state.some((e) => e.param === "Xpos") &&
    view.state.some((e) => e.param === "Ypos");
  if (spatial) {
    const located = positions(view.state);
    let width = 0;
    let height = 0;
    for (const slot of located.values()) {
      width = Math.max(width, (slot.x ?? 0) + 1);
      height = Math.max(height, (slot.y ?? 0) + 1);
    }
    const cells = new Map<string, { x: number; y: number; entities: string[] }>();
    for (const [entity, slot] of located) {
      if (slot.x === undefined || slot.y === undefined) continue;
      const key = `${slot.x},${slot.y}`;
      const cell = cells.get(key) ?? { x: slot.x, y: slot.y, entities: [] };
      cell.entities.push(entity);
      cells.set(key, cell);
    }
    const ordered = [...cells.values()].sort((a, b) => a.y - b.y || a.x - b.x);
    for (const cell of ordered) cell.entities.sort();
    return { kind: "grid", width, height, cells: ordered };
  }
  const maxima = new Map<string, number>();
  for (const rng of domain?.abs_ranges ?? []) {
    maxima.set(`${rng.param}/${rng.entity}`, rng.hi);
  }
  const rows = new Map<string, { param: string; value: number; max: number | null }[]>();
  for (const entry of view.state) {
    const row = rows.get(entry.entity) ?? [];
    row.push({
      param: entry.param,
      value: entry.value,
      max: maxima.get(`${entry.param}/${entry.entity}`) ?? null,
    });
    rows.set(entry.entity, row);
  }
  const ordered = [...rows.entries()]
    .map(([entity, values]) => ({
      entity,
      values: values.sort((a, b) => a.param.localeCompare(b.param)),
    }))
    .sort((a, b) => a.entity.localeCompare(b.entity));
  return { kind: "stats", rows: ordered };
}

export interface PaletteEntry {
  action: number | "noop";
  label: string;
  inputs: string[];
  enabled: boolean;
}

export function buildPalette(view: SessionView, actAs: string): PaletteEntry[] {
  const enabled = view.status === "active" && view.turn_agent === actAs;
  return view.applicable.map((a) => ({
    action: a.action,
    label: a.label,
    inputs: a.inputs,
    enabled,
  }));
}

export interface TimelineEntry {
  tick: number;
  agent: string;
  label: string;
}

export function buildTimeline(view: SessionView): TimelineEntry[] {
  return view.steps.map((step, index) => ({
    tick: index,
    agent: step.agent,
    label: String(step.action),
  }));
}

export function banner(view: SessionView): string | null {
  if (view.status === "won") return "Victory: the goal was achieved.";
  if (view.status === "lost") return "Defeat: a maintenance goal failed.";
  return null;
}
