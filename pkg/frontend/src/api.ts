/**
 * Client for the modkin service. The UI computes nothing itself: every number
 * it shows comes out of one of these calls.
 *
 * Each endpoint keeps at most one request in flight; firing again aborts the
 * previous call (latest wins), which surfaces to the superseded caller as a
 * RequestSupersededError.
 */

import type {
  CatalogResponse,
  CompositionDocument,
  FkResponse,
  IkResponse,
  Pose,
  TorquesResponse,
  UrdfResponse,
  ValidateResponse,
  WorkspaceResponse,
} from "./types";

export class ServiceUnreachableError extends Error {
  constructor(baseUrl: string, cause?: unknown) {
    super(`modkin service unreachable at ${baseUrl}`);
    this.name = "ServiceUnreachableError";
    this.cause = cause;
  }
}

export class RequestSupersededError extends Error {
  constructor(route: string) {
    super(`request to ${route} superseded by a newer one`);
    this.name = "RequestSupersededError";
  }
}

export class ApiRequestError extends Error {
  constructor(
    readonly status: number,
    readonly errorCode: string,
    message: string,
    readonly fieldPath?: string | null,
    readonly violations?: { rule: string; unit_index: number | null; message: string }[],
  ) {
    super(message);
    this.name = "ApiRequestError";
  }
}

export class ModkinClient {
  private readonly inflight = new Map<string, AbortController>();

  constructor(readonly baseUrl: string) {}

  private async request<T>(route: string, init?: RequestInit): Promise<T> {
    this.inflight.get(route)?.abort();
    const controller = new AbortController();
    this.inflight.set(route, controller);
    let response: Response;
    try {
      response = await fetch(`${this.baseUrl}${route}`, { ...init, signal: controller.signal });
    } catch (err) {
      if (controller.signal.aborted) throw new RequestSupersededError(route);
      throw new ServiceUnreachableError(this.baseUrl, err);
    } finally {
      if (this.inflight.get(route) === controller) this.inflight.delete(route);
    }
    const body = await response.json().catch(() => null);
    if (!response.ok) {
      throw new ApiRequestError(
        response.status,
        body?.error_code ?? "UNKNOWN",
        body?.message ?? `HTTP ${response.status}`,
        body?.field_path,
        body?.violations,
      );
    }
    return body as T;
  }

  private post<T>(route: string, payload: unknown): Promise<T> {
    return this.request<T>(route, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  catalog(): Promise<CatalogResponse> {
    return this.request<CatalogResponse>("/catalog");
  }

  validate(composition: CompositionDocument): Promise<ValidateResponse> {
    return this.post("/validate", { composition });
  }

  fk(composition: CompositionDocument, q: number[]): Promise<FkResponse> {
    return this.post("/fk", { composition, q });
  }

  ik(
    composition: CompositionDocument,
    targetPose: Partial<Pose>,
    seedQ?: number[],
    opts?: { seed?: number; max_iters?: number; restarts?: number },
  ): Promise<IkResponse> {
    return this.post("/ik", { composition, target_pose: targetPose, seed_q: seedQ, opts });
  }

  torques(composition: CompositionDocument, q?: number[], payloadKg?: number): Promise<TorquesResponse> {
    return this.post("/torques", { composition, q, payload_kg: payloadKg });
  }

  workspace(composition: CompositionDocument, samples: number, seed = 0): Promise<WorkspaceResponse> {
    return this.post("/workspace", { composition, samples, seed });
  }

  urdf(composition: CompositionDocument): Promise<UrdfResponse> {
    return this.post("/urdf", { composition });
  }
}

/** The exact bytes a URDF download saves: the service response, untouched. */
export function urdfDownloadText(response: UrdfResponse): string {
  return response.urdf_xml;
}

/** End-effector readout shown next to the 3D view: service numbers, 6 decimals. */
export function endEffectorReadout(pose: Pose): string {
  const [x, y, z] = pose.xyz_m;
  return `x ${x.toFixed(6)} m, y ${y.toFixed(6)} m, z ${z.toFixed(6)} m`;
}
