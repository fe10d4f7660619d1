/**
 * Reader/writer for the canonical composition file format, so the browser can
 * exchange files with the CLI. Covers exactly the subset the format uses:
 * top-level keys, [base_pose], [payload], and repeated [[units]] tables with
 * string / number / number-array values.
 */

import { COMPOSITION_FORMAT } from "./draft";
import type { CompositionDocument, UnitDocument, UnitKind, Variant } from "./types";

function formatNumber(value: number): string {
  if (Number.isInteger(value) && Math.abs(value) < 1e15) {
    return `${value}.0`;
  }
  return String(value);
}

function formatValue(value: string | number | number[]): string {
  if (typeof value === "string") {
    return `"${value.replace(/\\/g, "\\\\").replace(/"/g, '\\"')}"`;
  }
  if (Array.isArray(value)) {
    return `[${value.map(formatNumber).join(", ")}]`;
  }
  return formatNumber(value);
}

export function emitComposition(doc: CompositionDocument): string {
  const lines = [
    `version = ${formatValue(doc.version)}`,
    `name = ${formatValue(doc.name)}`,
    "",
    "[base_pose]",
    `xyz_m = ${formatValue(doc.base_pose.xyz_m)}`,
    `rpy_deg = ${formatValue(doc.base_pose.rpy_deg)}`,
    "",
    "[payload]",
    `mass_kg = ${formatValue(doc.payload.mass_kg)}`,
    `offset_m = ${formatValue(doc.payload.offset_m)}`,
  ];
  for (const unit of doc.units) {
    lines.push(
      "",
      "[[units]]",
      `variant = ${formatValue(unit.variant)}`,
      `kind = ${formatValue(unit.kind)}`,
      `twist1_deg = ${formatValue(unit.twist1_deg)}`,
      `twist2_deg = ${formatValue(unit.twist2_deg)}`,
      `joint_limits_deg = ${formatValue(unit.joint_limits_deg)}`,
      `label = ${formatValue(unit.label)}`,
    );
  }
  return lines.join("\n") + "\n";
}

type TomlValue = string | number | number[];

function parseValue(raw: string, line: number): TomlValue {
  const text = raw.trim();
  if (text.startsWith('"')) {
    if (!text.endsWith('"') || text.length < 2) {
      throw new Error(`line ${line}: unterminated string`);
    }
    return text.slice(1, -1).replace(/\\"/g, '"').replace(/\\\\/g, "\\");
  }
  if (text.startsWith("[")) {
    if (!text.endsWith("]")) throw new Error(`line ${line}: unterminated array`);
    const inner = text.slice(1, -1).trim();
    if (inner === "") return [];
    return inner.split(",").map((cell) => {
      const value = Number(cell.trim());
      if (!Number.isFinite(value)) throw new Error(`line ${line}: not a number: ${cell.trim()}`);
      return value;
    });
  }
  if (text === "true" || text === "false") {
    throw new Error(`line ${line}: booleans are not used in composition files`);
  }
  const value = Number(text);
  if (!Number.isFinite(value)) throw new Error(`line ${line}: not a number: ${text}`);
  return value;
}

export function parseComposition(text: string): CompositionDocument {
  const doc: CompositionDocument = {
    version: COMPOSITION_FORMAT,
    name: "",
    base_pose: { xyz_m: [0, 0, 0], rpy_deg: [0, 0, 0] },
    payload: { mass_kg: 0, offset_m: [0, 0, 0] },
    units: [],
  };
  let section: "top" | "base_pose" | "payload" | "unit" = "top";
  let currentUnit: UnitDocument | null = null;

  const pushUnit = () => {
    if (currentUnit) doc.units.push(currentUnit);
  };

  text.split(/\r?\n/).forEach((rawLine, i) => {
    const lineNo = i + 1;
    const line = rawLine.trim();
    if (line === "" || line.startsWith("#")) return;
    if (line === "[[units]]") {
      pushUnit();
      currentUnit = {
        variant: "H",
        kind: "U1",
        twist1_deg: 0,
        twist2_deg: 0,
        joint_limits_deg: [-170, 170],
        label: "",
      };
      section = "unit";
      return;
    }
    if (line === "[base_pose]") {
      section = "base_pose";
      return;
    }
    if (line === "[payload]") {
      section = "payload";
      return;
    }
    if (line.startsWith("[")) {
      throw new Error(`line ${lineNo}: unknown section ${line}`);
    }
    const eq = line.indexOf("=");
    if (eq < 0) throw new Error(`line ${lineNo}: expected key = value`);
    const key = line.slice(0, eq).trim();
    const value = parseValue(line.slice(eq + 1), lineNo);

    if (section === "top") {
      if (key === "version") doc.version = String(value);
      else if (key === "name") doc.name = String(value);
      else throw new Error(`line ${lineNo}: unknown top-level key ${key}`);
    } else if (section === "base_pose") {
      if (key === "xyz_m" || key === "rpy_deg") doc.base_pose[key] = value as number[];
      else throw new Error(`line ${lineNo}: unknown base_pose key ${key}`);
    } else if (section === "payload") {
      if (key === "mass_kg") doc.payload.mass_kg = value as number;
      else if (key === "offset_m") doc.payload.offset_m = value as number[];
      else throw new Error(`line ${lineNo}: unknown payload key ${key}`);
    } else if (currentUnit) {
      if (key === "variant") currentUnit.variant = String(value) as Variant;
      else if (key === "kind") currentUnit.kind = String(value) as UnitKind;
      else if (key === "twist1_deg") currentUnit.twist1_deg = value as number;
      else if (key === "twist2_deg") currentUnit.twist2_deg = value as number;
      else if (key === "joint_limits_deg") {
        const limits = value as number[];
        currentUnit.joint_limits_deg = [limits[0], limits[1]];
      } else if (key === "label") currentUnit.label = String(value);
      else throw new Error(`line ${lineNo}: unknown unit key ${key}`);
    }
  });
  pushUnit();

  if (doc.version !== COMPOSITION_FORMAT) {
    throw new Error(`unsupported composition format version: ${doc.version}`);
  }
  return doc;
}
