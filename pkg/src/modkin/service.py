"""Stateless HTTP API over the toolkit: one route per pipeline operation.

Every request carries the full composition document, so identical bodies
(with fixed seeds) always produce identical responses. Bodies are parsed by
the same functions the file formats use; the service adds no numerics of
its own.
"""

from __future__ import annotations

import json

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import dh as dh_mod
from .catalog import Catalog, get_catalog
from .composition import (
    Composition,
    composition_from_dict,
    composition_to_dict,
    unit_sequence_string,
    validate,
)
from .dynamics import feasibility_check, torque_report_at
from .errors import ModkinError, ParseError
from .kinematics import IKOptions, forward_kinematics, inverse_kinematics, sample_workspace
from .transform import Transform
from .urdf import generate_urdf, serialize_urdf

API_VERSION = "modkin-api/1"
MAX_BODY_BYTES = 1 << 20  # 1 MiB


def _transform_to_json(t: Transform) -> dict:
    return {
        "xyz_m": [float(v) for v in t.translation],
        "rpy_rad": list(t.rpy()),
        "rotation": [[float(v) for v in row] for row in t.rotation],
    }


def _transform_from_json(data, context: str) -> Transform:
    if not isinstance(data, dict):
        raise ParseError(f"{context}: expected an object", field=context)
    xyz = data.get("xyz_m", [0.0, 0.0, 0.0])
    if not isinstance(xyz, list) or len(xyz) != 3:
        raise ParseError(f"{context}: xyz_m must be a 3-element list", field=f"{context}.xyz_m")
    if "rotation" in data:
        rot = np.asarray(data["rotation"], dtype=float)
        if rot.shape != (3, 3):
            raise ParseError(f"{context}: rotation must be 3x3", field=f"{context}.rotation")
        return Transform(rot, np.asarray(xyz, dtype=float))
    rpy = data.get("rpy_rad", [0.0, 0.0, 0.0])
    if not isinstance(rpy, list) or len(rpy) != 3:
        raise ParseError(f"{context}: rpy_rad must be a 3-element list", field=f"{context}.rpy_rad")
    return Transform.from_rpy(xyz, rpy)


def _catalog_json(catalog: Catalog) -> dict:
    return {
        "actuators": {
            variant: {
                "variant": spec.variant,
                "mass_kg": spec.mass_kg,
                "speed_rpm": spec.speed_rpm,
                "tau_nom_Nm": spec.tau_nom_Nm,
                "tau_max_Nm": spec.tau_max_Nm,
                "epsilon": spec.epsilon,
            }
            for variant, spec in (("H", catalog.H), ("L", catalog.L))
        },
        "unit_geometries": {
            kind: {
                "kind": geom.kind,
                "x01_m": geom.x01_m,
                "z01_m": geom.z01_m,
                "z12_m": geom.z12_m,
                "x23_m": geom.x23_m,
            }
            for kind, geom in catalog.unit_geometries.items()
        },
        "link_module": {
            "length_m": catalog.link_module.length_m,
            "mass_kg": catalog.link_module.mass_kg,
            "radius_m": catalog.link_module.radius_m,
        },
        "twist_quantization": {
            "twist1_allowed_deg": list(catalog.twist_quantization.twist1_allowed_deg),
            "twist2_allowed_deg": list(catalog.twist_quantization.twist2_allowed_deg),
            "tolerance_deg": catalog.twist_quantization.tolerance_deg,
            "continuous": catalog.twist_quantization.continuous,
        },
    }


def _error_response(status: int, code: str, message: str, field_path: str | None = None, **extra):
    body = {"version": API_VERSION, "error_code": code, "message": message, "field_path": field_path}
    body.update(extra)
    return JSONResponse(status_code=status, content=body)


async def _read_json(request: Request) -> dict:
    body = await request.body()
    if len(body) > MAX_BODY_BYTES:
        raise ParseError(f"request body exceeds {MAX_BODY_BYTES} bytes")
    try:
        data = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ParseError("request body must be a JSON object")
    version = data.get("version", API_VERSION)
    if version != API_VERSION:
        raise ParseError(f"unsupported API version {version!r}", field="version")
    return data


def _composition_from_body(data: dict) -> Composition:
    if "composition" not in data:
        raise ParseError("missing required field", field="composition")
    return composition_from_dict(data["composition"])


def _q_from_body(data: dict, comp: Composition, key: str = "q") -> np.ndarray:
    q = data.get(key)
    if q is None:
        raise ParseError("missing required field", field=key)
    if not isinstance(q, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in q):
        raise ParseError(f"{key} must be a list of numbers", field=key)
    return np.asarray(q, dtype=float)


def _report_json(report) -> dict:
    return {
        "samples": report.samples,
        "joints": [
            {
                "joint": j.joint,
                "variant": j.variant,
                "tau_Nm": j.tau_Nm,
                "tau_nom_limit_Nm": j.tau_nom_limit_Nm,
                "tau_max_limit_Nm": j.tau_max_limit_Nm,
                "nominal_ok": j.nominal_ok,
                "peak_ok": j.peak_ok,
            }
            for j in report.joints
        ],
        "all_nominal_ok": report.all_nominal_ok,
        "all_peak_ok": report.all_peak_ok,
    }


def create_app(catalog: Catalog | None = None, cors_origins: list[str] | None = None) -> FastAPI:
    catalog = catalog or get_catalog()
    app = FastAPI(title="modkin", docs_url=None, redoc_url=None, openapi_url=None)

    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    @app.middleware("http")
    async def limit_body_size(request: Request, call_next):
        length = request.headers.get("content-length")
        if length and length.isdigit() and int(length) > MAX_BODY_BYTES:
            return _error_response(413, "REQUEST_TOO_LARGE", f"request body exceeds {MAX_BODY_BYTES} bytes")
        return await call_next(request)

    @app.exception_handler(ParseError)
    async def on_parse_error(_request, exc: ParseError):
        return _error_response(400, exc.code, str(exc), field_path=exc.field)

    @app.exception_handler(ModkinError)
    async def on_domain_error(_request, exc: ModkinError):
        return _error_response(422, exc.code, str(exc))

    @app.exception_handler(ValueError)
    async def on_value_error(_request, exc: ValueError):
        return _error_response(422, "INVALID_ARGUMENT", str(exc))

    @app.exception_handler(Exception)
    async def on_unexpected(_request, _exc: Exception):
        return _error_response(500, "INTERNAL", "internal error")

    @app.get("/catalog")
    async def catalog_route():
        return {"version": API_VERSION, **_catalog_json(catalog)}

    @app.post("/validate")
    async def validate_route(request: Request):
        data = await _read_json(request)
        comp = _composition_from_body(data)
        report = validate(comp, catalog, strict_epsilon=bool(data.get("strict_epsilon", False)))
        return {
            "version": API_VERSION,
            "ok": report.ok,
            "sequence": unit_sequence_string(comp),
            "violations": [
                {"rule": v.rule, "unit_index": v.unit_index, "message": v.message}
                for v in report.violations
            ],
        }

    @app.post("/fk")
    async def fk_route(request: Request):
        data = await _read_json(request)
        comp = _composition_from_body(data)
        q = _q_from_body(data, comp)
        poses = forward_kinematics(comp, q, catalog)
        return {
            "version": API_VERSION,
            "frames": [
                {
                    "twist1": _transform_to_json(poses.twist1_frames[i]),
                    "joint": _transform_to_json(poses.joint_frames[i]),
                    "twist2": _transform_to_json(poses.twist2_frames[i]),
                }
                for i in range(comp.n)
            ],
            "end_effector": _transform_to_json(poses.end_effector),
        }

    @app.post("/ik")
    async def ik_route(request: Request):
        data = await _read_json(request)
        comp = _composition_from_body(data)
        if "target_pose" not in data:
            raise ParseError("missing required field", field="target_pose")
        target = _transform_from_json(data["target_pose"], "target_pose")
        seed_q = None
        if data.get("seed_q") is not None:
            seed_q = _q_from_body(data, comp, key="seed_q")
        raw_opts = data.get("opts", {})
        if not isinstance(raw_opts, dict):
            raise ParseError("opts must be an object", field="opts")
        known = {"pos_tol_m", "rot_tol_rad", "max_iters", "restarts", "damping", "seed"}
        unknown = set(raw_opts) - known
        if unknown:
            raise ParseError(f"unknown IK options: {sorted(unknown)}", field="opts")
        opts = IKOptions(**raw_opts)
        result = inverse_kinematics(comp, target, seed_q=seed_q, opts=opts, catalog=catalog)
        return {
            "version": API_VERSION,
            "q": [float(v) for v in result.q],
            "pos_err_m": result.pos_err_m,
            "rot_err_rad": result.rot_err_rad,
            "converged": result.converged,
            "iterations": result.iterations,
        }

    @app.post("/convert")
    async def convert_route(request: Request):
        data = await _read_json(request)
        raw_table = data.get("dh_table")
        if not isinstance(raw_table, dict) or not isinstance(raw_table.get("rows"), list):
            raise ParseError("dh_table must be an object with a rows list", field="dh_table")
        rows = []
        for idx, raw in enumerate(raw_table["rows"]):
            if not isinstance(raw, dict):
                raise ParseError(f"dh_table.rows[{idx}] must be an object", field="dh_table.rows")
            try:
                rows.append(
                    dh_mod.DHRow(
                        a_m=float(raw.get("a_m", 0.0)),
                        alpha_rad=float(raw.get("alpha_rad", 0.0)),
                        d_m=float(raw.get("d_m", 0.0)),
                        theta_offset_rad=float(raw.get("theta_offset_rad", 0.0)),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise ParseError(f"dh_table.rows[{idx}]: {exc}", field="dh_table.rows") from None
        if not rows:
            raise ParseError("dh_table.rows must not be empty", field="dh_table.rows")
        table = dh_mod.DHTable(rows=tuple(rows))
        raw_opts = data.get("options", {})
        if not isinstance(raw_opts, dict):
            raise ParseError("options must be an object", field="options")
        known = {"continuous_twists", "h_count", "name", "fidelity_samples", "seed"}
        unknown = set(raw_opts) - known
        if unknown:
            raise ParseError(f"unknown convert options: {sorted(unknown)}", field="options")
        result = dh_mod.convert(table, dh_mod.ConvertOptions(**raw_opts), catalog)
        return {
            "version": API_VERSION,
            "sequence": result.sequence,
            "composition": composition_to_dict(result.composition),
            "fidelity": result.fidelity,
            "notes": [
                {
                    "row": note.row,
                    "rule": note.rule,
                    "unit_code": note.unit_code,
                    "port": note.port,
                    "quant_residual_deg": note.quant_residual_deg,
                    "axis_gap_deg": note.axis_gap_deg,
                    "length_residual_m": note.length_residual_m,
                    "theta_offset_deg": note.theta_offset_deg,
                    "twist_clamped": note.twist_clamped,
                    "detail": note.detail,
                }
                for note in result.per_row_notes
            ],
        }

    @app.post("/torques")
    async def torques_route(request: Request):
        data = await _read_json(request)
        comp = _composition_from_body(data)
        payload = data.get("payload_kg")
        if payload is not None and (isinstance(payload, bool) or not isinstance(payload, (int, float))):
            raise ParseError("payload_kg must be a number", field="payload_kg")
        if data.get("q") is not None:
            q = _q_from_body(data, comp)
            report = torque_report_at(comp, q, payload_kg=payload, catalog=catalog)
        else:
            density = data.get("q_grid_density", 7)
            if isinstance(density, bool) or not isinstance(density, int):
                raise ParseError("q_grid_density must be an integer", field="q_grid_density")
            report = feasibility_check(comp, q_grid_density=density, payload_kg=payload, catalog=catalog)
        return {"version": API_VERSION, **_report_json(report)}

    @app.post("/workspace")
    async def workspace_route(request: Request):
        data = await _read_json(request)
        comp = _composition_from_body(data)
        samples = data.get("samples")
        if isinstance(samples, bool) or not isinstance(samples, int):
            raise ParseError("samples must be an integer", field="samples")
        seed = data.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int):
            raise ParseError("seed must be an integer", field="seed")
        points = sample_workspace(comp, samples, seed=seed, catalog=catalog)
        return {
            "version": API_VERSION,
            "points": [[float(v) for v in p] for p in points],
        }

    @app.post("/urdf")
    async def urdf_route(request: Request):
        data = await _read_json(request)
        comp = _composition_from_body(data)
        report = validate(comp, catalog)
        if not report.ok:
            return _error_response(
                422,
                "INVALID_COMPOSITION",
                "composition fails validation",
                violations=[
                    {"rule": v.rule, "unit_index": v.unit_index, "message": v.message}
                    for v in report.violations
                ],
            )
        doc = generate_urdf(comp, catalog)
        return {"version": API_VERSION, "robot_name": doc.robot_name, "urdf_xml": serialize_urdf(doc)}

    return app


def run_server(host: str = "127.0.0.1", port: int = 8000, cors_origins: list[str] | None = None):
    import uvicorn

    uvicorn.run(create_app(cors_origins=cors_origins), host=host, port=port, log_level="warning")
