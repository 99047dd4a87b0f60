// Wire types mirrored from the service's JSON encodings.

export type Frame = "absolute" | "relative";
export type Rel = "eq" | "neq" | "lt" | "gt";

export interface ParamTestAtom {
  kind: "param_test";
  frame: Frame;
  offset: number;
  param: string;
  entity: string;
  rel: Rel;
  rhs: number;
}

export interface DerivedTestAtom {
  kind: "derived_test";
  offset: number;
  pred: string;
  entity: string;
  negated: boolean;
}

export interface EventTestAtom {
  kind: "event_test";
  offset: number;
  mech: number;
  entity: string;
  negated: boolean;
}

export interface ParamUpdateAtom {
  kind: "param_update";
  frame: Frame;
  offset: number;
  param: string;
  entity: string;
  amount: number;
}

export interface EventInvokeAtom {
  kind: "event_invoke";
  offset: number;
  mech: number;
}

export type ConditionAtom = ParamTestAtom | DerivedTestAtom | EventTestAtom;
export type EffectAtom = ParamUpdateAtom | EventInvokeAtom;

export interface MechanicDoc {
  id: number;
  name?: string;
  pre: ConditionAtom[];
  eff: EffectAtom[];
}

export interface DomainDoc {
  entities: string[];
  parameters: string[];
  agents: string[];
  instances: { name: string; level: number; initials: StateEntry[] }[];
  abs_ranges?: { param: string; entity: string; lo: number; hi: number }[];
  [key: string]: unknown;
}

export interface StateEntry {
  param: string;
  entity: string;
  value: number;
}

export interface ApplicableAction {
  action: number | "noop";
  label: string;
  inputs: string[];
}

export interface SessionView {
  id: string;
  instance: string;
  tick: number;
  turn_agent: string;
  status: "active" | "won" | "lost";
  state: StateEntry[];
  history: { tick: number; values: StateEntry[] }[];
  steps: { agent: string; action: number | string }[];
  applicable: ApplicableAction[];
  agents: Record<string, { goal: boolean; maintenance: boolean }>;
}

export interface GenerationResultDoc {
  status: string;
  mechanics: MechanicDoc[];
  score: [number, number][];
  witnesses: Record<string, unknown>;
  candidates_tested: number;
  nogoods_recorded: number;
  control_mapping?: { mechanic: number; inputs: string[] }[];
}

export interface JobView {
  id: string;
  kind: string;
  status: "queued" | "running" | "done" | "failed";
  domain_id?: string | null;
  result: GenerationResultDoc | null;
  error?: string | null;
}

export interface ServiceError {
  code: string;
  message: string;
}
