/**
 * three.js scene-graph construction from service responses. Everything is
 * placed with matrices and points taken verbatim from /fk and /workspace;
 * the only geometry invented here is display thickness.
 */

import * as THREE from "three";
import type { CatalogResponse, FkResponse, Pose } from "./types";

export const TRIAD_AXIS_LENGTH = 0.05;

const AXIS_COLORS = { x: 0xd62728, y: 0x2ca02c, z: 0x1f77b4 } as const;

export function poseToMatrix(pose: Pose): THREE.Matrix4 {
  const r = pose.rotation;
  const [x, y, z] = pose.xyz_m;
  const m = new THREE.Matrix4();
  // Matrix4.set takes row-major arguments.
  m.set(r[0][0], r[0][1], r[0][2], x, r[1][0], r[1][1], r[1][2], y, r[2][0], r[2][1], r[2][2], z, 0, 0, 0, 1);
  return m;
}

/** Frame triad: x red, y green, z blue. */
export function buildTriad(size = TRIAD_AXIS_LENGTH): THREE.Group {
  const group = new THREE.Group();
  group.name = "triad";
  const axes: [keyof typeof AXIS_COLORS, THREE.Vector3][] = [
    ["x", new THREE.Vector3(size, 0, 0)],
    ["y", new THREE.Vector3(0, size, 0)],
    ["z", new THREE.Vector3(0, 0, size)],
  ];
  for (const [name, direction] of axes) {
    const geometry = new THREE.BufferGeometry().setFromPoints([new THREE.Vector3(0, 0, 0), direction]);
    const line = new THREE.Line(geometry, new THREE.LineBasicMaterial({ color: AXIS_COLORS[name] }));
    line.name = `axis-${name}`;
    group.add(line);
  }
  return group;
}

function placed(object: THREE.Object3D, matrix: THREE.Matrix4): THREE.Object3D {
  object.matrixAutoUpdate = false;
  object.matrix.copy(matrix);
  return object;
}

function segmentBetween(
  from: [number, number, number],
  to: [number, number, number],
  radius: number,
  color: number,
  name: string,
): THREE.Object3D | null {
  const start = new THREE.Vector3(...from);
  const end = new THREE.Vector3(...to);
  const length = start.distanceTo(end);
  if (length < 1e-9) return null;
  const geometry = new THREE.CylinderGeometry(radius, radius, length, 16);
  const mesh = new THREE.Mesh(geometry, new THREE.MeshStandardMaterial({ color }));
  mesh.name = name;
  mesh.position.copy(start).add(end).multiplyScalar(0.5);
  mesh.quaternion.setFromUnitVectors(
    new THREE.Vector3(0, 1, 0),
    end.clone().sub(start).normalize(),
  );
  return mesh;
}

export interface RobotSceneOptions {
  triadSize?: number;
  showTriads?: boolean;
}

/**
 * Robot group: per unit a triad at each of the three frames, an actuator
 * puck at the joint frame, and tube segments along the riser and link runs.
 */
export function buildRobotGroup(
  fk: FkResponse,
  variants: ("H" | "L")[],
  catalog: CatalogResponse,
  options: RobotSceneOptions = {},
): THREE.Group {
  const group = new THREE.Group();
  group.name = "robot";
  const triadSize = options.triadSize ?? TRIAD_AXIS_LENGTH;
  const showTriads = options.showTriads ?? true;

  let previousTip: [number, number, number] = [0, 0, 0];
  fk.frames.forEach((frames, i) => {
    const unit = new THREE.Group();
    unit.name = `unit-${i + 1}`;

    if (showTriads) {
      for (const [frameName, pose] of [
        ["twist1", frames.twist1],
        ["joint", frames.joint],
        ["twist2", frames.twist2],
      ] as const) {
        const triad = placed(buildTriad(triadSize), poseToMatrix(pose));
        triad.name = `triad-${frameName}`;
        unit.add(triad);
      }
    }

    const variant = variants[i] ?? "L";
    const radius = variant === "H" ? 0.0375 : 0.029;
    const puck = new THREE.Mesh(
      new THREE.CylinderGeometry(radius, radius, 0.05, 24),
      new THREE.MeshStandardMaterial({ color: variant === "H" ? 0xf28e2b : 0x76b7b2 }),
    );
    puck.name = "actuator";
    const puckPose = poseToMatrix(frames.joint).multiply(
      new THREE.Matrix4().makeRotationX(Math.PI / 2),
    );
    unit.add(placed(puck, puckPose));

    const riser = segmentBetween(previousTip, frames.joint.xyz_m, 0.012, 0x888888, "riser");
    if (riser) unit.add(riser);
    const link = segmentBetween(
      frames.joint.xyz_m,
      frames.twist2.xyz_m,
      catalog.link_module.radius_m,
      0xcccccc,
      "link",
    );
    if (link) unit.add(link);

    previousTip = frames.twist2.xyz_m;
    group.add(unit);
  });

  if (showTriads) {
    const eeTriad = placed(buildTriad(triadSize * 1.4), poseToMatrix(fk.end_effector));
    eeTriad.name = "triad-end-effector";
    group.add(eeTriad);
  }
  return group;
}

export function buildWorkspaceCloud(points: [number, number, number][]): THREE.Points {
  const geometry = new THREE.BufferGeometry();
  const data = new Float32Array(points.length * 3);
  points.forEach((p, i) => {
    data[3 * i] = p[0];
    data[3 * i + 1] = p[1];
    data[3 * i + 2] = p[2];
  });
  geometry.setAttribute("position", new THREE.BufferAttribute(data, 3));
  const cloud = new THREE.Points(
    geometry,
    new THREE.PointsMaterial({ color: 0x59a14f, size: 0.004 }),
  );
  cloud.name = "workspace-cloud";
  return cloud;
}

/** Straight-line joint-space interpolation for the IK animation (cosmetic). */
export function interpolateJointPath(from: number[], to: number[], steps: number): number[][] {
  const path: number[][] = [];
  for (let s = 1; s <= steps; s++) {
    const t = s / steps;
    path.push(from.map((v, i) => v + (to[i] - v) * t));
  }
  return path;
}
