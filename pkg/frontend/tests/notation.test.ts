import { describe, expect, it } from "vitest";

import { mechanicNames, parseAtom, renderAtom } from "../src/notation.js";
import type { ConditionAtom, EffectAtom, MechanicDoc } from "../src/types.js";
import { loadRecording } from "./helpers.js";

const MECHANICS: MechanicDoc[] = [
  {
    id: 1,
    name: "Jump",
    pre: [{ kind: "derived_test", offset: 0, pred: "Supported", entity: "Player", negated: false }],
    eff: [
      { kind: "param_update", frame: "relative", offset: 1, param: "Xpos", entity: "Player", amount: 1 },
      { kind: "param_update", frame: "relative", offset: 1, param: "Ypos", entity: "Player", amount: 1 },
    ],
  },
  {
    id: 2,
    name: "DoubleJump",
    pre: [
      { kind: "event_test", offset: -1, mech: 1, entity: "Player", negated: false },
      { kind: "param_test", frame: "relative", offset: 0, param: "Xpos", entity: "Enemy", rel: "eq", rhs: 2 },
      { kind: "param_test", frame: "absolute", offset: -1, param: "Health", entity: "Enemy", rel: "gt", rhs: 0 },
      { kind: "derived_test", offset: 0, pred: "Supported", entity: "Player", negated: true },
      { kind: "event_test", offset: -2, mech: 2, entity: "Player", negated: true },
    ],
    eff: [
      { kind: "param_update", frame: "absolute", offset: 2, param: "Ypos", entity: "Player", amount: 0 },
      { kind: "event_invoke", offset: 1, mech: 1 },
    ],
  },
];

describe("mechanic card notation", () => {
  it("renders the alive test in the canonical triple form", () => {
    const atom: ConditionAtom = {
      kind: "param_test", frame: "absolute", offset: 0,
      param: "Health", entity: "Enemy", rel: "gt", rhs: 0,
    };
    expect(renderAtom(atom)).toBe("⟨absolute, 0, GreaterThan(Health(Enemy), 0)⟩");
  });

  it("renders event preconditions with the performed marker", () => {
    const names = mechanicNames(MECHANICS);
    const atom = MECHANICS[1]!.pre[0]!;
    expect(renderAtom(atom, names)).toBe("⟨absolute, -1, Equal(Performed(Jump), Player)⟩");
  });

  it("round-trips every atom of every handcrafted mechanic", () => {
    const names = mechanicNames(MECHANICS);
    for (const mechanic of MECHANICS) {
      for (const atom of mechanic.pre) {
        const text = renderAtom(atom, names);
        expect(parseAtom(text, "pre", names)).toEqual(atom);
      }
      for (const atom of mechanic.eff) {
        const text = renderAtom(atom, names);
        expect(parseAtom(text, "eff", names)).toEqual(atom);
      }
    }
  });

  it("round-trips the mechanics recorded from the service", () => {
    const recorded = loadRecording("flat_job_done").body as {
      result: { mechanics: MechanicDoc[] };
    };
    const mechanics = recorded.result.mechanics;
    const names = mechanicNames(mechanics);
    for (const mechanic of mechanics) {
      for (const atom of mechanic.pre) {
        expect(parseAtom(renderAtom(atom, names), "pre", names)).toEqual(atom);
      }
      for (const atom of mechanic.eff as EffectAtom[]) {
        expect(parseAtom(renderAtom(atom, names), "eff", names)).toEqual(atom);
      }
    }
  });

  it("rejects garbage", () => {
    expect(() => parseAtom("nonsense", "pre")).toThrow();
    expect(() => parseAtom("⟨absolute, 0, Equal(1, 2)⟩", "pre")).toThrow();
    // an update atom can never be a precondition
    expect(() => parseAtom("⟨relative, 1, Update(Xpos(Player), 1)⟩", "pre")).toThrow();
  });
});
