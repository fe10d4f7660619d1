"""Command-line front door: thin shells over the library operations.

Exit codes: 0 on success, 1 on a domain error (single machine-greppable
``error: CODE: message`` line on stderr), 2 on usage errors (argparse).
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .catalog import catalog_from_env
from .composition import (
    composition_to_dict,
    load_composition,
    unit_sequence_string,
    validate,
)
from .dh import ConvertOptions, conversion_report_text, convert, parse_dh_csv
from .dynamics import feasibility_check, torque_report_at
from .errors import ModkinError
from .kinematics import (
    IKOptions,
    forward_kinematics,
    inverse_kinematics,
    sample_workspace,
    workspace_to_csv,
)
from .transform import Transform
from .urdf import generate_urdf, serialize_urdf


def _positive_int(text: str) -> int:
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _csv_floats(text: str) -> list[float]:
    try:
        return [float(cell) for cell in text.split(",") if cell.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated number list: {text!r}") from None


def _load_comp(path: str):
    with open(path, "r", encoding="utf-8") as fp:
        return load_composition(fp.read())


def _print_pose(pose: Transform, fmt: str):
    if fmt == "json":
        print(
            json.dumps(
                {
                    "xyz_m": [float(v) for v in pose.translation],
                    "rpy_rad": list(pose.rpy()),
                    "rotation": [[float(v) for v in row] for row in pose.rotation],
                },
                indent=2,
            )
        )
    else:
        x, y, z = pose.translation
        roll, pitch, yaw = pose.rpy()
        print(f"position (m): {x:.6f} {y:.6f} {z:.6f}")
        print(f"rpy (rad):    {roll:.6f} {pitch:.6f} {yaw:.6f}")


def _report_lines(report) -> list[str]:
    lines = [f"{'joint':>5} {'variant':>7} {'tau [Nm]':>10} {'nom':>6} {'peak':>6} {'nominal':>8} {'peak_ok':>8}"]
    for j in report.joints:
        lines.append(
            f"{j.joint:>5} {j.variant:>7} {j.tau_Nm:>10.4f} {j.tau_nom_limit_Nm:>6.1f} "
            f"{j.tau_max_limit_Nm:>6.1f} {'ok' if j.nominal_ok else 'EXCEEDED':>8} "
            f"{'ok' if j.peak_ok else 'EXCEEDED':>8}"
        )
    return lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="modkin", description="Modular manipulator modeling toolkit")
    parser.add_argument("--version", action="version", version=f"modkin {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", help="print the module library")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("validate", help="check a composition against the assembly rules")
    p.add_argument("comp_file")
    p.add_argument("--strict-epsilon", action="store_true")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("fk", help="forward kinematics of a composition")
    p.add_argument("comp_file")
    p.add_argument("--q", type=_csv_floats, required=True, help="joint angles, comma separated")
    p.add_argument("--degrees", action="store_true", help="interpret --q in degrees")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("ik", help="inverse kinematics toward a target pose")
    p.add_argument("comp_file")
    p.add_argument(
        "--target",
        type=_csv_floats,
        required=True,
        help="target pose: x,y,z or x,y,z,roll,pitch,yaw (meters, radians)",
    )
    p.add_argument("--seed-q", type=_csv_floats, default=None, help="starting joint angles (radians)")
    p.add_argument("--seed", type=int, default=0, help="random restart seed")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("convert", help="convert a DH table (CSV) to a modular composition")
    p.add_argument("dh_csv")
    p.add_argument("--degrees", action="store_true", help="angles in the CSV are degrees")
    p.add_argument("--continuous-twists", action="store_true", help="skip twist quantization")
    p.add_argument("--h-count", type=int, default=None, help="number of proximal H modules")
    p.add_argument("--name", default="converted")
    p.add_argument("-o", "--output", default=None, help="write the composition file here")
    p.add_argument("--format", choices=["text", "json"], default="text")

    p = sub.add_parser("urdf", help="emit a URDF robot description")
    p.add_argument("comp_file")
    p.add_argument("-o", "--output", default=None, help="output .urdf path (default: stdout)")
    p.add_argument("--allow-invalid", action="store_true", help="skip assembly-rule validation")

    p = sub.add_parser("torque", help="static torque feasibility against actuator limits")
    p.add_argument("comp_file")
    p.add_argument("--payload", type=float, default=None, help="payload mass override (kg)")
    p.add_argument("--q", type=_csv_floats, default=None, help="single configuration (radians)")
    p.add_argument("--density", type=_positive_int, default=7, help="grid samples per joint")
    p.add_argument("--format", choices=["text", "json", "csv"], default="text")

    p = sub.add_parser("workspace", help="sample reachable end-effector positions")
    p.add_argument("comp_file")
    p.add_argument("--samples", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", default=None, help="output CSV path (default: stdout)")

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--cors-origin", action="append", default=None, help="allowed browser origin (repeatable)")

    return parser


def _cmd_catalog(args, catalog) -> int:
    from .service import _catalog_json

    data = _catalog_json(catalog)
    if args.format == "json":
        print(json.dumps({"version": "modkin-api/1", **data}, indent=2))
        return 0
    print("actuators:")
    for variant, spec in data["actuators"].items():
        print(
            f"  {variant}: mass {spec['mass_kg']} kg, {spec['speed_rpm']} rpm, "
            f"tau_nom {spec['tau_nom_Nm']} Nm, tau_max {spec['tau_max_Nm']} Nm, epsilon {spec['epsilon']}"
        )
    print("unit geometries (x01, z01, z12, x23 in m):")
    for kind, geom in data["unit_geometries"].items():
        print(f"  {kind}: {geom['x01_m']}, {geom['z01_m']}, {geom['z12_m']}, {geom['x23_m']}")
    link = data["link_module"]
    print(f"link module: length {link['length_m']} m, mass {link['mass_kg']} kg, radius {link['radius_m']} m")
    quant = data["twist_quantization"]
    print(f"twist1 allowed (deg): {quant['twist1_allowed_deg']}")
    print(f"twist2 allowed (deg): {quant['twist2_allowed_deg']}")
    return 0


def _cmd_validate(args, catalog) -> int:
    comp = _load_comp(args.comp_file)
    report = validate(comp, catalog, strict_epsilon=args.strict_epsilon)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "ok": report.ok,
                    "sequence": unit_sequence_string(comp),
                    "violations": [
                        {"rule": v.rule, "unit_index": v.unit_index, "message": v.message}
                        for v in report.violations
                    ],
                },
                indent=2,
            )
        )
    else:
        print(f"sequence: {unit_sequence_string(comp)}")
        if report.ok:
            print("ok")
        else:
            for v in report.violations:
                print(f"violation [{v.rule}]: {v.message}")
    return 0 if report.ok else 1


def _cmd_fk(args, catalog) -> int:
    comp = _load_comp(args.comp_file)
    q = np.asarray(args.q, dtype=float)
    if args.degrees:
        q = np.radians(q)
    poses = forward_kinematics(comp, q, catalog)
    _print_pose(poses.end_effector, args.format)
    return 0


def _cmd_ik(args, catalog) -> int:
    comp = _load_comp(args.comp_file)
    target_values = args.target
    if len(target_values) == 3:
        target = Transform.from_rpy(target_values, (0.0, 0.0, 0.0))
    elif len(target_values) == 6:
        target = Transform.from_rpy(target_values[:3], target_values[3:])
    else:
        raise ModkinError("target must have 3 or 6 comma-separated values")
    result = inverse_kinematics(
        comp, target, seed_q=args.seed_q, opts=IKOptions(seed=args.seed), catalog=catalog
    )
    if args.format == "json":
        print(
            json.dumps(
                {
                    "q": [float(v) for v in result.q],
                    "pos_err_m": result.pos_err_m,
                    "rot_err_rad": result.rot_err_rad,
                    "converged": result.converged,
                    "iterations": result.iterations,
                },
                indent=2,
            )
        )
    else:
        print(f"q (rad): {', '.join(f'{v:.6f}' for v in result.q)}")
        print(f"pos err: {result.pos_err_m:.3e} m, rot err: {result.rot_err_rad:.3e} rad")
        print(f"converged: {result.converged} in {result.iterations} iterations")
    if not result.converged:
        print("error: IK_NOT_CONVERGED: best-effort result printed above", file=sys.stderr)
        return 1
    return 0


def _cmd_convert(args, catalog) -> int:
    with open(args.dh_csv, "r", encoding="utf-8") as fp:
        table = parse_dh_csv(fp.read(), degrees=args.degrees)
    options = ConvertOptions(
        continuous_twists=args.continuous_twists, h_count=args.h_count, name=args.name
    )
    result = convert(table, options, catalog)
    if args.output:
        from .composition import save_composition

        with open(args.output, "w", encoding="utf-8") as fp:
            fp.write(save_composition(result.composition))
    if args.format == "json":
        print(
            json.dumps(
                {
                    "sequence": result.sequence,
                    "fidelity": result.fidelity,
                    "composition": composition_to_dict(result.composition),
                    "notes": [
                        {
                            "row": n.row,
                            "rule": n.rule,
                            "unit_code": n.unit_code,
                            "port": n.port,
                            "quant_residual_deg": n.quant_residual_deg,
                            "axis_gap_deg": n.axis_gap_deg,
                            "length_residual_m": n.length_residual_m,
                            "theta_offset_deg": n.theta_offset_deg,
                            "twist_clamped": n.twist_clamped,
                            "detail": n.detail,
                        }
                        for n in result.per_row_notes
                    ],
                },
                indent=2,
            )
        )
    else:
        print(conversion_report_text(result), end="")
    return 0


def _cmd_urdf(args, catalog) -> int:
    comp = _load_comp(args.comp_file)
    doc = generate_urdf(comp, catalog, require_valid=not args.allow_invalid)
    xml = serialize_urdf(doc)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fp:
            fp.write(xml)
        print(f"wrote {args.output} ({doc.robot_name})")
    else:
        print(xml, end="")
    return 0


def _cmd_torque(args, catalog) -> int:
    comp = _load_comp(args.comp_file)
    if args.q is not None:
        report = torque_report_at(comp, np.asarray(args.q), payload_kg=args.payload, catalog=catalog)
    else:
        report = feasibility_check(
            comp, q_grid_density=args.density, payload_kg=args.payload, catalog=catalog
        )
    if args.format == "json":
        from .service import _report_json

        print(json.dumps(_report_json(report), indent=2))
    elif args.format == "csv":
        print(report.to_csv(), end="")
    else:
        print("\n".join(_report_lines(report)))
        print(f"(worst case over {report.samples} sampled configurations)")
    return 0


def _cmd_workspace(args, catalog) -> int:
    comp = _load_comp(args.comp_file)
    points = sample_workspace(comp, args.samples, seed=args.seed, catalog=catalog)
    csv_text = workspace_to_csv(points)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fp:
            fp.write(csv_text)
        print(f"wrote {args.output} ({len(points)} points)")
    else:
        print(csv_text, end="")
    return 0


def _cmd_serve(args, _catalog) -> int:
    from .service import run_server

    run_server(host=args.host, port=args.port, cors_origins=args.cors_origin)
    return 0


_COMMANDS = {
    "catalog": _cmd_catalog,
    "validate": _cmd_validate,
    "fk": _cmd_fk,
    "ik": _cmd_ik,
    "convert": _cmd_convert,
    "urdf": _cmd_urdf,
    "torque": _cmd_torque,
    "workspace": _cmd_workspace,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        catalog = catalog_from_env()
        return _COMMANDS[args.command](args, catalog)
    except ModkinError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: IO_ERROR: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
