/**
 * Configurator app: palette -> draft -> live /validate + /fk round trips ->
 * 3D preview, IK probing, torque panel, URDF download. All displayed numbers
 * originate from service responses.
 */

import * as THREE from "three";
import { OrbitControls } from "three/examples/jsm/controls/OrbitControls.js";

import {
  ApiRequestError,
  ModkinClient,
  RequestSupersededError,
  ServiceUnreachableError,
  endEffectorReadout,
  urdfDownloadText,
} from "./api";
import { CompositionDraft } from "./draft";
import { buildRobotGroup, buildWorkspaceCloud, interpolateJointPath } from "./scene";
import { snapTwist1, snapTwist2 } from "./snapping";
import { emitComposition, parseComposition } from "./toml";
import type { CatalogResponse, FkResponse, UnitKind, Variant } from "./types";

const SERVICE_URL = (import.meta as any).env?.VITE_MODKIN_URL ?? "http://127.0.0.1:8000";
const STORAGE_KEY = "modkin-configurator-draft";

const client = new ModkinClient(SERVICE_URL);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

let draft = new CompositionDraft();
let catalog: CatalogResponse | null = null;
let lastFk: FkResponse | null = null;
let workspaceVisible = false;
let animationTimer: number | null = null;

// ---------------------------------------------------------------------------
// 3D view
// ---------------------------------------------------------------------------

const viewport = el<HTMLDivElement>("viewport");
const renderer = new THREE.WebGLRenderer({ antialias: true });
renderer.setSize(viewport.clientWidth, viewport.clientHeight);
viewport.appendChild(renderer.domElement);

const scene = new THREE.Scene();
scene.background = new THREE.Color(0x14171c);
scene.add(new THREE.AmbientLight(0xffffff, 0.7));
const keyLight = new THREE.DirectionalLight(0xffffff, 1.2);
keyLight.position.set(1, -1, 2);
scene.add(keyLight);
scene.up = new THREE.Vector3(0, 0, 1);

const camera = new THREE.PerspectiveCamera(50, viewport.clientWidth / viewport.clientHeight, 0.01, 50);
camera.up.set(0, 0, 1);
const controls = new OrbitControls(camera, renderer.domElement);
camera.position.set(...draft.camera.position);
controls.target.set(...draft.camera.target);

const grid = new THREE.GridHelper(2, 20, 0x30363f, 0x23272e);
grid.rotation.x = Math.PI / 2;
scene.add(grid);

let robotGroup: THREE.Group | null = null;
let workspaceCloud: THREE.Points | null = null;
let targetMarker: THREE.Object3D | null = null;

function renderLoop() {
  requestAnimationFrame(renderLoop);
  controls.update();
  renderer.render(scene, camera);
}

window.addEventListener("resize", () => {
  renderer.setSize(viewport.clientWidth, viewport.clientHeight);
  camera.aspect = viewport.clientWidth / viewport.clientHeight;
  camera.updateProjectionMatrix();
});

// ---------------------------------------------------------------------------
// Banners and panels
// ---------------------------------------------------------------------------

const banner = el<HTMLDivElement>("banner");
const violationsPanel = el<HTMLUListElement>("violations");
const sequenceLabel = el<HTMLSpanElement>("sequence");
const readoutLabel = el<HTMLSpanElement>("readout");
const ikStatus = el<HTMLSpanElement>("ik-status");
const torqueBody = el<HTMLTableSectionElement>("torque-body");

function showBanner(message: string, withRetry: boolean) {
  banner.textContent = message;
  banner.classList.remove("hidden");
  if (withRetry) {
    const retry = document.createElement("button");
    retry.textContent = "retry";
    retry.addEventListener("click", () => {
      banner.classList.add("hidden");
      void bootstrap();
    });
    banner.appendChild(retry);
  }
}

function hideBanner() {
  banner.classList.add("hidden");
  banner.textContent = "";
}

function reportError(err: unknown) {
  if (err instanceof RequestSupersededError) return;
  if (err instanceof ServiceUnreachableError) {
    showBanner("service unreachable - is `modkin serve` running?", true);
    return;
  }
  if (err instanceof ApiRequestError) {
    showBanner(`${err.errorCode}: ${err.message}`, false);
    return;
  }
  showBanner(String(err), false);
}

// ---------------------------------------------------------------------------
// Assembly editor
// ---------------------------------------------------------------------------

const unitList = el<HTMLUListElement>("unit-list");
const palette = el<HTMLDivElement>("palette");

for (const variant of ["H", "L"] as Variant[]) {
  for (const kind of ["U1", "U2", "U3", "U4"] as UnitKind[]) {
    const button = document.createElement("button");
    button.textContent = `${variant}${kind[1]}`;
    button.title = `add a ${variant} module as unit kind ${kind}`;
    button.addEventListener("click", () => {
      draft.addUnit(variant, kind);
      onDraftEdited();
    });
    palette.appendChild(button);
  }
}

function renderUnitList(violationsByUnit: Map<number, string[]>) {
  unitList.replaceChildren();
  draft.units.forEach((unit, i) => {
    const item = document.createElement("li");
    if (i === draft.selectedIndex) item.classList.add("selected");
    const label = document.createElement("span");
    label.textContent = `${i + 1}. ${unit.variant}${unit.kind[1]}  t1 ${unit.twist1Deg}° t2 ${unit.twist2Deg}°`;
    label.addEventListener("click", () => {
      draft.selectedIndex = i;
      draft.pendingTwist1Deg = null;
      draft.pendingTwist2Deg = null;
      refreshControls();
      renderUnitList(violationsByUnit);
    });
    item.appendChild(label);
    for (const [text, action] of [
      ["↑", () => draft.moveUnit(i, -1)],
      ["↓", () => draft.moveUnit(i, 1)],
      ["✕", () => draft.removeUnit(i)],
    ] as const) {
      const button = document.createElement("button");
      button.textContent = text;
      button.addEventListener("click", () => {
        action();
        onDraftEdited();
      });
      item.appendChild(button);
    }
    const rules = violationsByUnit.get(i) ?? [];
    for (const rule of rules) {
      const tag = document.createElement("em");
      tag.textContent = rule;
      item.appendChild(tag);
    }
    unitList.appendChild(item);
  });
}

// Twist dials and joint sliders for the selected unit
const twist1Dial = el<HTMLInputElement>("twist1");
const twist2Dial = el<HTMLInputElement>("twist2");
const twist1Value = el<HTMLSpanElement>("twist1-value");
const twist2Value = el<HTMLSpanElement>("twist2-value");
const slidersPanel = el<HTMLDivElement>("sliders");

function refreshControls() {
  const index = draft.selectedIndex;
  const hasSelection = index !== null && index < draft.units.length;
  twist1Dial.disabled = !hasSelection;
  twist2Dial.disabled = !hasSelection;
  if (hasSelection) {
    const unit = draft.units[index!];
    twist1Dial.value = String(draft.pendingTwist1Deg ?? unit.twist1Deg);
    twist2Dial.value = String(draft.pendingTwist2Deg ?? unit.twist2Deg);
    twist1Value.textContent = `${unit.twist1Deg}°`;
    twist2Value.textContent = `${unit.twist2Deg}°`;
  } else {
    twist1Value.textContent = "-";
    twist2Value.textContent = "-";
  }

  slidersPanel.replaceChildren();
  draft.units.forEach((unit, i) => {
    const row = document.createElement("div");
    const caption = document.createElement("label");
    caption.textContent = `q${i + 1}`;
    const slider = document.createElement("input");
    slider.type = "range";
    // slider bounds equal the unit's joint limits
    slider.min = String((unit.jointLimitsDeg[0] * Math.PI) / 180);
    slider.max = String((unit.jointLimitsDeg[1] * Math.PI) / 180);
    slider.step = "0.005";
    slider.value = String(draft.jointAnglesRad[i] ?? 0);
    const value = document.createElement("span");
    value.textContent = `${(((draft.jointAnglesRad[i] ?? 0) * 180) / Math.PI).toFixed(1)}°`;
    slider.addEventListener("input", () => {
      draft.jointAnglesRad[i] = Number(slider.value);
      value.textContent = `${((Number(slider.value) * 180) / Math.PI).toFixed(1)}°`;
      persistDraft();
      void refreshPose();
    });
    row.append(caption, slider, value);
    slidersPanel.appendChild(row);
  });
}

twist1Dial.addEventListener("input", () => {
  if (draft.selectedIndex === null || !catalog) return;
  draft.pendingTwist1Deg = Number(twist1Dial.value);
  const snapped = snapTwist1(draft.pendingTwist1Deg, catalog.twist_quantization.twist1_allowed_deg);
  draft.units[draft.selectedIndex].twist1Deg = snapped;
  twist1Value.textContent = `${snapped}° (dial ${draft.pendingTwist1Deg}°)`;
  onDraftEdited(false);
});

twist2Dial.addEventListener("input", () => {
  if (draft.selectedIndex === null || !catalog) return;
  draft.pendingTwist2Deg = Number(twist2Dial.value);
  const snapped = snapTwist2(draft.pendingTwist2Deg, catalog.twist_quantization.twist2_allowed_deg);
  draft.units[draft.selectedIndex].twist2Deg = snapped;
  twist2Value.textContent = `${snapped}° (dial ${draft.pendingTwist2Deg}°)`;
  onDraftEdited(false);
});

// ---------------------------------------------------------------------------
// Service round trips
// ---------------------------------------------------------------------------

function persistDraft() {
  draft.camera = {
    position: [camera.position.x, camera.position.y, camera.position.z],
    target: [controls.target.x, controls.target.y, controls.target.z],
  };
  localStorage.setItem(STORAGE_KEY, draft.toStorage());
}

async function refreshValidation() {
  violationsPanel.replaceChildren();
  const fieldErrors = draft.fieldErrors();
  const byUnit = new Map<number, string[]>();
  if (fieldErrors.length > 0 || draft.units.length === 0) {
    for (const err of fieldErrors) {
      const item = document.createElement("li");
      item.textContent = `${err.field}: ${err.message}`;
      violationsPanel.appendChild(item);
    }
    sequenceLabel.textContent = draft.sequence() || "(empty)";
    renderUnitList(byUnit);
    return;
  }
  try {
    const report = await client.validate(draft.toDocument());
    hideBanner();
    sequenceLabel.textContent = report.sequence || "(empty)";
    for (const violation of report.violations) {
      const item = document.createElement("li");
      item.textContent = `[${violation.rule}] ${violation.message}`;
      violationsPanel.appendChild(item);
      if (violation.unit_index !== null) {
        byUnit.set(violation.unit_index, [...(byUnit.get(violation.unit_index) ?? []), violation.rule]);
      }
    }
    if (report.violations.length === 0) {
      const item = document.createElement("li");
      item.classList.add("ok");
      item.textContent = "no violations";
      violationsPanel.appendChild(item);
    }
  } catch (err) {
    reportError(err);
  }
  renderUnitList(byUnit);
}

async function refreshPose() {
  if (draft.units.length === 0 || draft.fieldErrors().length > 0) {
    if (robotGroup) {
      scene.remove(robotGroup);
      robotGroup = null;
    }
    readoutLabel.textContent = "-";
    return;
  }
  try {
    const fk = await client.fk(draft.toDocument(), draft.jointAnglesRad);
    lastFk = fk;
    hideBanner();
    if (robotGroup) scene.remove(robotGroup);
    robotGroup = buildRobotGroup(
      fk,
      draft.units.map((unit) => unit.variant),
      catalog!,
    );
    scene.add(robotGroup);
    readoutLabel.textContent = endEffectorReadout(fk.end_effector);
  } catch (err) {
    reportError(err);
  }
}

async function refreshWorkspace() {
  if (workspaceCloud) {
    scene.remove(workspaceCloud);
    workspaceCloud = null;
  }
  if (!workspaceVisible || draft.units.length === 0) return;
  try {
    const response = await client.workspace(draft.toDocument(), 1500, 0);
    workspaceCloud = buildWorkspaceCloud(response.points);
    scene.add(workspaceCloud);
  } catch (err) {
    reportError(err);
  }
}

async function refreshTorques() {
  if (draft.units.length === 0) return;
  const payload = Number(el<HTMLInputElement>("payload").value) || 0;
  try {
    const response = await client.torques(draft.toDocument(), undefined, payload);
    torqueBody.replaceChildren();
    for (const joint of response.joints) {
      const row = document.createElement("tr");
      if (!joint.nominal_ok) row.classList.add("exceeded");
      row.innerHTML =
        `<td>${joint.joint} (${joint.variant})</td><td>${joint.tau_Nm.toFixed(3)}</td>` +
        `<td>${joint.tau_nom_limit_Nm}</td><td>${joint.tau_max_limit_Nm}</td>` +
        `<td>${joint.nominal_ok ? "ok" : "over nominal"}</td>`;
      torqueBody.appendChild(row);
    }
  } catch (err) {
    reportError(err);
  }
}

function onDraftEdited(resetPending = true) {
  if (resetPending) {
    draft.pendingTwist1Deg = null;
    draft.pendingTwist2Deg = null;
  }
  persistDraft();
  refreshControls();
  void refreshValidation();
  void refreshPose();
  if (workspaceVisible) void refreshWorkspace();
}

// ---------------------------------------------------------------------------
// IK probing: click to place a target at the picked point, keep the current
// end-effector orientation, animate the joint-space line to the solution.
// ---------------------------------------------------------------------------

renderer.domElement.addEventListener("dblclick", (event) => {
  if (!lastFk || draft.units.length === 0) return;
  const rect = renderer.domElement.getBoundingClientRect();
  const ndc = new THREE.Vector2(
    ((event.clientX - rect.left) / rect.width) * 2 - 1,
    -((event.clientY - rect.top) / rect.height) * 2 + 1,
  );
  const raycaster = new THREE.Raycaster();
  raycaster.setFromCamera(ndc, camera);
  // pick on the horizontal plane through the current end effector
  const plane = new THREE.Plane(new THREE.Vector3(0, 0, 1), -lastFk.end_effector.xyz_m[2]);
  const picked = new THREE.Vector3();
  if (!raycaster.ray.intersectPlane(plane, picked)) return;

  if (targetMarker) scene.remove(targetMarker);
  targetMarker = new THREE.Mesh(
    new THREE.SphereGeometry(0.012, 16, 16),
    new THREE.MeshBasicMaterial({ color: 0xe15759 }),
  );
  targetMarker.position.copy(picked);
  scene.add(targetMarker);

  ikStatus.textContent = "solving...";
  client
    .ik(
      draft.toDocument(),
      { xyz_m: [picked.x, picked.y, picked.z], rotation: lastFk.end_effector.rotation },
      draft.jointAnglesRad,
    )
    .then((result) => {
      if (result.converged) {
        ikStatus.textContent = `converged in ${result.iterations} iterations`;
      } else {
        ikStatus.textContent =
          `not converged: pos err ${result.pos_err_m.toExponential(2)} m, ` +
          `rot err ${result.rot_err_rad.toExponential(2)} rad (best effort shown)`;
      }
      animateTo(result.q);
    })
    .catch(reportError);
});

function animateTo(targetQ: number[]) {
  if (animationTimer !== null) window.clearInterval(animationTimer);
  const path = interpolateJointPath([...draft.jointAnglesRad], targetQ, 30);
  let step = 0;
  animationTimer = window.setInterval(() => {
    if (step >= path.length) {
      window.clearInterval(animationTimer!);
      animationTimer = null;
      refreshControls();
      persistDraft();
      return;
    }
    draft.jointAnglesRad = path[step];
    step += 1;
    void refreshPose();
  }, 33);
}

// ---------------------------------------------------------------------------
// Export / import
// ---------------------------------------------------------------------------

el<HTMLButtonElement>("download-urdf").addEventListener("click", () => {
  if (draft.units.length === 0) return;
  client
    .urdf(draft.toDocument())
    .then((response) => {
      const blob = new Blob([urdfDownloadText(response)], { type: "application/xml" });
      const anchor = document.createElement("a");
      anchor.href = URL.createObjectURL(blob);
      anchor.download = `${response.robot_name}.urdf`;
      anchor.click();
      URL.revokeObjectURL(anchor.href);
    })
    .catch(reportError);
});

el<HTMLButtonElement>("export-comp").addEventListener("click", () => {
  const blob = new Blob([emitComposition(draft.toDocument())], { type: "text/plain" });
  const anchor = document.createElement("a");
  anchor.href = URL.createObjectURL(blob);
  anchor.download = `${draft.name || "composition"}.toml`;
  anchor.click();
  URL.revokeObjectURL(anchor.href);
});

el<HTMLInputElement>("import-comp").addEventListener("change", async (event) => {
  const input = event.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  try {
    const doc = parseComposition(await file.text());
    draft = CompositionDraft.fromDocument(doc);
    onDraftEdited();
  } catch (err) {
    showBanner(`import failed: ${err}`, false);
  } finally {
    input.value = "";
  }
});

el<HTMLInputElement>("workspace-toggle").addEventListener("change", (event) => {
  workspaceVisible = (event.target as HTMLInputElement).checked;
  void refreshWorkspace();
});

el<HTMLButtonElement>("torque-refresh").addEventListener("click", () => void refreshTorques());

el<HTMLInputElement>("comp-name").addEventListener("change", (event) => {
  draft.name = (event.target as HTMLInputElement).value;
  onDraftEdited();
});

// ---------------------------------------------------------------------------
// Bootstrap
// ---------------------------------------------------------------------------

async function bootstrap() {
  try {
    catalog = await client.catalog();
    hideBanner();
  } catch (err) {
    reportError(err);
    return;
  }
  const stored = localStorage.getItem(STORAGE_KEY);
  if (stored) {
    try {
      draft = CompositionDraft.fromStorage(stored);
      camera.position.set(...draft.camera.position);
      controls.target.set(...draft.camera.target);
    } catch {
      localStorage.removeItem(STORAGE_KEY);
    }
  }
  el<HTMLInputElement>("comp-name").value = draft.name;
  onDraftEdited();
}

void bootstrap();
renderLoop();
