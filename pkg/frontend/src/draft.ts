/**
 * The working copy of a composition plus UI-only state (selection, pending
 * dial values, joint angles, camera). A draft either serializes to a valid
 * composition document or reports per-field error annotations.
 */

import type { CompositionDocument, UnitDocument, UnitKind, Variant } from "./types";

export const COMPOSITION_FORMAT = "modkin-composition/1";
export const DEFAULT_JOINT_LIMITS: [number, number] = [-170, 170];

export interface DraftUnit {
  variant: Variant;
  kind: UnitKind;
  twist1Deg: number;
  twist2Deg: number;
  jointLimitsDeg: [number, number];
  label: string;
}

export interface CameraPose {
  position: [number, number, number];
  target: [number, number, number];
}

export interface FieldError {
  unitIndex: number | null;
  field: string;
  message: string;
}

const DEFAULT_CAMERA: CameraPose = { position: [0.9, -0.9, 0.7], target: [0, 0, 0.25] };

export class CompositionDraft {
  name = "untitled";
  units: DraftUnit[] = [];
  payloadMassKg = 0;
  payloadOffsetM: [number, number, number] = [0, 0, 0];

  // UI-only state
  selectedIndex: number | null = null;
  /** Raw dial positions before snapping, per selected unit. */
  pendingTwist1Deg: number | null = null;
  pendingTwist2Deg: number | null = null;
  jointAnglesRad: number[] = [];
  camera: CameraPose = { ...DEFAULT_CAMERA };

  addUnit(variant: Variant, kind: UnitKind): number {
    this.units.push({
      variant,
      kind,
      twist1Deg: 0,
      twist2Deg: 0,
      jointLimitsDeg: [...DEFAULT_JOINT_LIMITS],
      label: "",
    });
    this.jointAnglesRad.push(0);
    this.selectedIndex = this.units.length - 1;
    return this.selectedIndex;
  }

  removeUnit(index: number): void {
    if (index < 0 || index >= this.units.length) return;
    this.units.splice(index, 1);
    this.jointAnglesRad.splice(index, 1);
    if (this.selectedIndex !== null) {
      if (this.units.length === 0) this.selectedIndex = null;
      else if (this.selectedIndex >= this.units.length) this.selectedIndex = this.units.length - 1;
    }
  }

  moveUnit(index: number, delta: -1 | 1): void {
    const target = index + delta;
    if (index < 0 || index >= this.units.length || target < 0 || target >= this.units.length) return;
    [this.units[index], this.units[target]] = [this.units[target], this.units[index]];
    [this.jointAnglesRad[index], this.jointAnglesRad[target]] = [
      this.jointAnglesRad[target],
      this.jointAnglesRad[index],
    ];
    if (this.selectedIndex === index) this.selectedIndex = target;
    else if (this.selectedIndex === target) this.selectedIndex = index;
  }

  fieldErrors(): FieldError[] {
    const errors: FieldError[] = [];
    if (this.units.length === 0) {
      errors.push({ unitIndex: null, field: "units", message: "add at least one unit" });
    }
    if (!Number.isFinite(this.payloadMassKg) || this.payloadMassKg < 0) {
      errors.push({ unitIndex: null, field: "payload.mass_kg", message: "payload mass must be >= 0" });
    }
    this.units.forEach((unit, i) => {
      if (!Number.isFinite(unit.twist1Deg)) {
        errors.push({ unitIndex: i, field: "twist1_deg", message: "not a number" });
      }
      if (!Number.isFinite(unit.twist2Deg)) {
        errors.push({ unitIndex: i, field: "twist2_deg", message: "not a number" });
      }
      if (!(unit.jointLimitsDeg[0] < unit.jointLimitsDeg[1])) {
        errors.push({ unitIndex: i, field: "joint_limits_deg", message: "lower limit must be below upper" });
      }
    });
    return errors;
  }

  /** Composition document for the API / export. Throws if fields are broken. */
  toDocument(): CompositionDocument {
    const errors = this.fieldErrors();
    if (errors.length > 0) {
      const first = errors[0];
      throw new Error(`draft is not serializable: ${first.field}: ${first.message}`);
    }
    return {
      version: COMPOSITION_FORMAT,
      name: this.name,
      base_pose: { xyz_m: [0, 0, 0], rpy_deg: [0, 0, 0] },
      payload: { mass_kg: this.payloadMassKg, offset_m: [...this.payloadOffsetM] },
      units: this.units.map(
        (unit): UnitDocument => ({
          variant: unit.variant,
          kind: unit.kind,
          twist1_deg: unit.twist1Deg,
          twist2_deg: unit.twist2Deg,
          joint_limits_deg: [...unit.jointLimitsDeg],
          label: unit.label,
        }),
      ),
    };
  }

  static fromDocument(doc: CompositionDocument): CompositionDraft {
    const draft = new CompositionDraft();
    draft.name = doc.name ?? "untitled";
    draft.payloadMassKg = doc.payload?.mass_kg ?? 0;
    const offset = doc.payload?.offset_m ?? [0, 0, 0];
    draft.payloadOffsetM = [offset[0] ?? 0, offset[1] ?? 0, offset[2] ?? 0];
    draft.units = (doc.units ?? []).map((unit) => ({
      variant: unit.variant,
      kind: unit.kind,
      twist1Deg: unit.twist1_deg ?? 0,
      twist2Deg: unit.twist2_deg ?? 0,
      jointLimitsDeg: [
        unit.joint_limits_deg?.[0] ?? DEFAULT_JOINT_LIMITS[0],
        unit.joint_limits_deg?.[1] ?? DEFAULT_JOINT_LIMITS[1],
      ],
      label: unit.label ?? "",
    }));
    draft.jointAnglesRad = draft.units.map(() => 0);
    draft.selectedIndex = draft.units.length > 0 ? 0 : null;
    return draft;
  }

  /** Full UI state for localStorage (includes camera and joint angles). */
  toStorage(): string {
    return JSON.stringify({
      document: this.toDocumentLenient(),
      selectedIndex: this.selectedIndex,
      jointAnglesRad: this.jointAnglesRad,
      camera: this.camera,
    });
  }

  private toDocumentLenient(): CompositionDocument {
    // Storage must work even while a field is mid-edit and invalid.
    return {
      version: COMPOSITION_FORMAT,
      name: this.name,
      base_pose: { xyz_m: [0, 0, 0], rpy_deg: [0, 0, 0] },
      payload: { mass_kg: this.payloadMassKg, offset_m: [...this.payloadOffsetM] },
      units: this.units.map((unit) => ({
        variant: unit.variant,
        kind: unit.kind,
        twist1_deg: unit.twist1Deg,
        twist2_deg: unit.twist2Deg,
        joint_limits_deg: [...unit.jointLimitsDeg] as [number, number],
        label: unit.label,
      })),
    };
  }

  static fromStorage(text: string): CompositionDraft {
    const data = JSON.parse(text);
    const draft = CompositionDraft.fromDocument(data.document);
    draft.selectedIndex = data.selectedIndex ?? draft.selectedIndex;
    if (Array.isArray(data.jointAnglesRad) && data.jointAnglesRad.length === draft.units.length) {
      draft.jointAnglesRad = data.jointAnglesRad.map((v: unknown) => Number(v) || 0);
    }
    if (data.camera) draft.camera = data.camera;
    return draft;
  }

  sequence(): string {
    return this.units.map((unit) => `${unit.variant}${unit.kind[1]}`).join("-");
  }
}
