import { describe, expect, it } from "vitest";

import { CompositionDraft } from "../src/draft";

function verticalFarmDraft(): CompositionDraft {
  const draft = new CompositionDraft();
  draft.name = "vertical_farm";
  draft.addUnit("H", "U1");
  draft.addUnit("L", "U4");
  draft.addUnit("L", "U4");
  draft.units[2].twist2Deg = 45;
  return draft;
}

describe("CompositionDraft", () => {
  it("builds sequences from the palette", () => {
    const draft = verticalFarmDraft();
    expect(draft.sequence()).toBe("H1-L4-L4");
    expect(draft.selectedIndex).toBe(2);
    expect(draft.jointAnglesRad).toEqual([0, 0, 0]);
  });

  it("reorders and removes units together with their joint angles", () => {
    const draft = verticalFarmDraft();
    draft.jointAnglesRad = [0.1, 0.2, 0.3];
    draft.moveUnit(2, -1);
    expect(draft.sequence()).toBe("H1-L4-L4");
    expect(draft.units[1].twist2Deg).toBe(45);
    expect(draft.jointAnglesRad).toEqual([0.1, 0.3, 0.2]);
    draft.removeUnit(0);
    expect(draft.sequence()).toBe("L4-L4");
    expect(draft.jointAnglesRad).toEqual([0.3, 0.2]);
  });

  it("serializes to a composition document", () => {
    const doc = verticalFarmDraft().toDocument();
    expect(doc.version).toBe("modkin-composition/1");
    expect(doc.units).toHaveLength(3);
    expect(doc.units[2].twist2_deg).toBe(45);
    expect(doc.units[0].joint_limits_deg).toEqual([-170, 170]);
  });

  it("round-trips through the document form (camera excluded)", () => {
    const draft = verticalFarmDraft();
    draft.payloadMassKg = 0.4;
    draft.camera = { position: [1, 2, 3], target: [0, 0, 1] };
    const restored = CompositionDraft.fromDocument(draft.toDocument());
    expect(restored.toDocument()).toEqual(draft.toDocument());
    expect(restored.camera).not.toEqual(draft.camera);
  });

  it("round-trips the full UI state through storage", () => {
    const draft = verticalFarmDraft();
    draft.jointAnglesRad = [0.4, -0.2, 1.1];
    draft.camera = { position: [1, 2, 3], target: [0, 0, 1] };
    const restored = CompositionDraft.fromStorage(draft.toStorage());
    expect(restored.toDocument()).toEqual(draft.toDocument());
    expect(restored.jointAnglesRad).toEqual(draft.jointAnglesRad);
    expect(restored.camera).toEqual(draft.camera);
  });

  it("annotates broken fields instead of serializing", () => {
    const draft = verticalFarmDraft();
    draft.units[1].jointLimitsDeg = [90, -90];
    draft.units[0].twist2Deg = Number.NaN;
    const errors = draft.fieldErrors();
    expect(errors).toContainEqual({
      unitIndex: 1,
      field: "joint_limits_deg",
      message: "lower limit must be below upper",
    });
    expect(errors.some((e) => e.unitIndex === 0 && e.field === "twist2_deg")).toBe(true);
    expect(() => draft.toDocument()).toThrow(/not serializable/);
  });

  it("flags the empty draft", () => {
    const draft = new CompositionDraft();
    expect(draft.fieldErrors()[0].field).toBe("units");
    expect(draft.sequence()).toBe("");
  });
});
