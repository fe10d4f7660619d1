/** Wire types for the modkin HTTP API (version modkin-api/1). */

export type Variant = "H" | "L";
export type UnitKind = "U1" | "U2" | "U3" | "U4";

export interface UnitDocument {
  variant: Variant;
  kind: UnitKind;
  twist1_deg: number;
  twist2_deg: number;
  joint_limits_deg: [number, number];
  label: string;
}

export interface CompositionDocument {
  version: string;
  name: string;
  base_pose: { xyz_m: number[]; rpy_deg: number[] };
  payload: { mass_kg: number; offset_m: number[] };
  units: UnitDocument[];
}

export interface Pose {
  xyz_m: [number, number, number];
  rpy_rad: [number, number, number];
  rotation: number[][];
}

export interface UnitFrames {
  twist1: Pose;
  joint: Pose;
  twist2: Pose;
}

export interface CatalogResponse {
  version: string;
  actuators: Record<
    Variant,
    {
      variant: Variant;
      mass_kg: number;
      speed_rpm: number;
      tau_nom_Nm: number;
      tau_max_Nm: number;
      epsilon: number;
    }
  >;
  unit_geometries: Record<
    UnitKind,
    { kind: UnitKind; x01_m: number; z01_m: number; z12_m: number; x23_m: number }
  >;
  link_module: { length_m: number; mass_kg: number; radius_m: number };
  twist_quantization: {
    twist1_allowed_deg: number[];
    twist2_allowed_deg: number[];
    tolerance_deg: number;
    continuous: boolean;
  };
}

export interface Violation {
  rule: string;
  unit_index: number | null;
  message: string;
}

export interface ValidateResponse {
  version: string;
  ok: boolean;
  sequence: string;
  violations: Violation[];
}

export interface FkResponse {
  version: string;
  frames: UnitFrames[];
  end_effector: Pose;
}

export interface IkResponse {
  version: string;
  q: number[];
  pos_err_m: number;
  rot_err_rad: number;
  converged: boolean;
  iterations: number;
}

export interface TorqueJoint {
  joint: number;
  variant: Variant;
  tau_Nm: number;
  tau_nom_limit_Nm: number;
  tau_max_limit_Nm: number;
  nominal_ok: boolean;
  peak_ok: boolean;
}

export interface TorquesResponse {
  version: string;
  samples: number;
  joints: TorqueJoint[];
  all_nominal_ok: boolean;
  all_peak_ok: boolean;
}

export interface WorkspaceResponse {
  version: string;
  points: [number, number, number][];
}

export interface UrdfResponse {
  version: string;
  robot_name: string;
  urdf_xml: string;
}

export interface ApiError {
  version: string;
  error_code: string;
  message: string;
  field_path?: string | null;
  violations?: Violation[];
}
