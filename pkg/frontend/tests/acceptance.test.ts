/**
 * Secondary acceptance: with the service running, the 3-DoF vertical-farm
 * composition built in the configurator validates with zero errors, the 3D
 * preview's end-effector readout equals POST /fk to 6 decimals, and the
 * downloaded URDF is byte-equal to the service response.
 */

import { describe, expect, inject, it } from "vitest";

import { ModkinClient, endEffectorReadout, urdfDownloadText } from "../src/api";
import { CompositionDraft } from "../src/draft";
import { buildRobotGroup } from "../src/scene";
import { snapTwist2 } from "../src/snapping";

function buildVerticalFarmDraft(twist2Allowed: number[]): CompositionDraft {
  // The same flow the palette + dials drive: H base, two light modules,
  // 45 degree pivot twist between modules 2 and 3 (dial value snapped).
  const draft = new CompositionDraft();
  draft.name = "vertical_farm";
  draft.addUnit("H", "U1");
  draft.addUnit("L", "U4");
  draft.addUnit("L", "U4");
  draft.pendingTwist2Deg = 43; // raw dial position
  draft.units[2].twist2Deg = snapTwist2(draft.pendingTwist2Deg, twist2Allowed);
  return draft;
}

describe("configurator acceptance", () => {
  it("builds the vertical-farm arm with zero validation errors", async () => {
    const client = new ModkinClient(inject("serviceUrl"));
    const catalog = await client.catalog();
    const draft = buildVerticalFarmDraft(catalog.twist_quantization.twist2_allowed_deg);
    expect(draft.units[2].twist2Deg).toBe(45);
    expect(draft.sequence()).toBe("H1-L4-L4");

    const report = await client.validate(draft.toDocument());
    expect(report.ok).toBe(true);
    expect(report.violations).toEqual([]);
    expect(report.sequence).toBe("H1-L4-L4");
  });

  it("shows an end-effector readout equal to POST /fk to 6 decimals", async () => {
    const client = new ModkinClient(inject("serviceUrl"));
    const catalog = await client.catalog();
    const draft = buildVerticalFarmDraft(catalog.twist_quantization.twist2_allowed_deg);
    draft.jointAnglesRad = [0.35, -0.6, 1.1];

    const fk = await client.fk(draft.toDocument(), draft.jointAnglesRad);
    const readout = endEffectorReadout(fk.end_effector);

    // independent second request: the displayed numbers must match it
    const again = await client.fk(draft.toDocument(), draft.jointAnglesRad);
    const [x, y, z] = again.end_effector.xyz_m;
    expect(readout).toBe(`x ${x.toFixed(6)} m, y ${y.toFixed(6)} m, z ${z.toFixed(6)} m`);

    // and the rendered end-effector triad sits exactly on the service pose
    const group = buildRobotGroup(
      fk,
      draft.units.map((u) => u.variant),
      catalog,
    );
    const triad = group.getObjectByName("triad-end-effector")!;
    const m = triad.matrix.toArray(); // column-major
    expect(m[12]).toBeCloseTo(x, 12);
    expect(m[13]).toBeCloseTo(y, 12);
    expect(m[14]).toBeCloseTo(z, 12);
  });

  it("downloads URDF bytes identical to the service response", async () => {
    const serviceUrl = inject("serviceUrl");
    const client = new ModkinClient(serviceUrl);
    const catalog = await client.catalog();
    const draft = buildVerticalFarmDraft(catalog.twist_quantization.twist2_allowed_deg);

    const response = await client.urdf(draft.toDocument());
    const downloaded = urdfDownloadText(response);

    const raw = await fetch(`${serviceUrl}/urdf`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ composition: draft.toDocument() }),
    });
    const rawBody = (await raw.json()) as { urdf_xml: string };
    expect(downloaded).toBe(rawBody.urdf_xml);
    expect(downloaded).toContain('<robot name="mod3_vertical_farm">');
    expect(downloaded.match(/type="revolute"/g)).toHaveLength(3);
  });
});
