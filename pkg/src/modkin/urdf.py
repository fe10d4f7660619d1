"""URDF emission and verification for modular compositions.

The emitter folds each unit's fixed factors into the successor joint's
origin, so an n-DoF composition yields exactly n revolute joints plus one
terminal fixed joint that carries the last unit's riser and link offset out
to the tool frame. The FK oracle at the bottom re-derives end-effector
poses straight from the XML-level joint data with its own matrix math,
giving an independent check on both the emitter and the kinematics chain.
"""

from __future__ import annotations

import math
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import numpy as np

from .catalog import Catalog, get_catalog
from .composition import Composition, validate
from .dynamics import ACTUATOR_BODY_LENGTH_M, ACTUATOR_BODY_RADIUS_M, build_inertial_model
from .errors import DimensionMismatch, InvalidComposition, ParseError
from .kinematics import chain_joint_origins
from .transform import matrix_to_rpy

BASE_LINK = "base_link"
EE_LINK = "ee_link"


@dataclass(frozen=True)
class URDFInertial:
    mass: float
    origin_xyz: tuple[float, float, float]
    origin_rpy: tuple[float, float, float]
    ixx: float
    ixy: float
    ixz: float
    iyy: float
    iyz: float
    izz: float


@dataclass(frozen=True)
class URDFGeometry:
    shape: str  # "cylinder" | "box"
    radius: float = 0.0
    length: float = 0.0
    size: tuple[float, float, float] = (0.0, 0.0, 0.0)


@dataclass(frozen=True)
class URDFVisual:
    origin_xyz: tuple[float, float, float]
    origin_rpy: tuple[float, float, float]
    geometry: URDFGeometry


@dataclass(frozen=True)
class URDFLink:
    name: str
    inertial: URDFInertial | None = None
    visuals: tuple[URDFVisual, ...] = ()
    collisions: tuple[URDFVisual, ...] = ()


@dataclass(frozen=True)
class URDFLimit:
    lower: float
    upper: float
    effort: float
    velocity: float


@dataclass(frozen=True)
class URDFJoint:
    name: str
    type: str  # "revolute" | "fixed"
    parent: str
    child: str
    origin_xyz: tuple[float, float, float]
    origin_rpy: tuple[float, float, float]
    axis: tuple[float, float, float] | None = None
    limit: URDFLimit | None = None


@dataclass(frozen=True)
class URDFDocument:
    robot_name: str
    links: tuple[URDFLink, ...]
    joints: tuple[URDFJoint, ...]

    def link_names(self) -> list[str]:
        return [link.name for link in self.links]

    def root_link(self) -> str:
        children = {joint.child for joint in self.joints}
        roots = [link.name for link in self.links if link.name not in children]
        if len(roots) != 1:
            raise InvalidComposition(f"document must have exactly one root link, found {roots}")
        return roots[0]

    def revolute_joints(self) -> list[URDFJoint]:
        return [joint for joint in self.joints if joint.type == "revolute"]


def document_problems(doc: URDFDocument) -> list[str]:
    """Structural problems: duplicate names, broken references, non-tree shape."""
    problems = []
    names = doc.link_names()
    if len(set(names)) != len(names):
        problems.append("duplicate link names")
    joint_names = [joint.name for joint in doc.joints]
    if len(set(joint_names)) != len(joint_names):
        problems.append("duplicate joint names")
    link_set = set(names)
    child_count: dict[str, int] = {}
    for joint in doc.joints:
        if joint.parent not in link_set:
            problems.append(f"joint {joint.name} references missing parent {joint.parent}")
        if joint.child not in link_set:
            problems.append(f"joint {joint.name} references missing child {joint.child}")
        child_count[joint.child] = child_count.get(joint.child, 0) + 1
    for child, count in child_count.items():
        if count > 1:
            problems.append(f"link {child} has {count} parent joints")
    roots = [name for name in names if name not in child_count]
    if len(roots) != 1:
        problems.append(f"expected exactly one root link, found {roots}")
    if len(doc.links) != len(doc.joints) + 1:
        problems.append("links and joints do not form a single connected tree")
    return problems


def _sanitize(name: str) -> str:
    cleaned = re.sub(r"[^A-Za-z0-9_-]+", "_", name.strip())
    return cleaned.strip("_")


def generate_urdf(
    comp: Composition, catalog: Catalog | None = None, *, require_valid: bool = True
) -> URDFDocument:
    """URDF document for a composition: one revolute joint per modular unit.

    ``require_valid=False`` skips assembly-rule validation so subchains
    (e.g. an all-light wrist) can still be modeled; the emitted document is
    structurally sound either way.
    """
    catalog = catalog or get_catalog()
    if require_valid:
        report = validate(comp, catalog)
        if not report.ok:
            rules = ", ".join(v.rule for v in report.violations)
            raise InvalidComposition(f"composition fails validation: {rules}")
    elif comp.n == 0:
        raise InvalidComposition("composition has no units")

    origins, tail = chain_joint_origins(comp, catalog)
    bodies = build_inertial_model(comp, catalog)
    name = _sanitize(comp.name) or "composition"
    robot_name = f"mod{comp.n}_{name}"

    links: list[URDFLink] = [
        URDFLink(
            name=BASE_LINK,
            visuals=(
                URDFVisual((0.0, 0.0, 0.01), (0.0, 0.0, 0.0), URDFGeometry("cylinder", radius=0.04, length=0.02)),
            ),
            collisions=(
                URDFVisual((0.0, 0.0, 0.01), (0.0, 0.0, 0.0), URDFGeometry("cylinder", radius=0.04, length=0.02)),
            ),
        )
    ]
    joints: list[URDFJoint] = []

    for i, unit in enumerate(comp.units):
        geom = catalog.unit_geometry(unit.kind)
        spec = catalog.actuator(unit.variant)
        body = bodies[i]
        shapes = [
            URDFVisual(
                (0.0, 0.0, geom.z12_m),
                (0.0, 0.0, 0.0),
                URDFGeometry("cylinder", radius=ACTUATOR_BODY_RADIUS_M[unit.variant], length=ACTUATOR_BODY_LENGTH_M),
            )
        ]
        if geom.has_link_module:
            link_spec = catalog.link_module
            shapes.append(
                URDFVisual(
                    (geom.x23_m / 2.0, 0.0, geom.z12_m),
                    (0.0, math.pi / 2.0, 0.0),
                    URDFGeometry("cylinder", radius=link_spec.radius_m, length=link_spec.length_m),
                )
            )
        inertial = URDFInertial(
            mass=body.mass_kg,
            origin_xyz=tuple(float(v) for v in body.com_m),
            origin_rpy=(0.0, 0.0, 0.0),
            ixx=float(body.inertia_tensor[0, 0]),
            ixy=float(body.inertia_tensor[0, 1]),
            ixz=float(body.inertia_tensor[0, 2]),
            iyy=float(body.inertia_tensor[1, 1]),
            iyz=float(body.inertia_tensor[1, 2]),
            izz=float(body.inertia_tensor[2, 2]),
        )
        links.append(
            URDFLink(name=f"link_{i + 1}", inertial=inertial, visuals=tuple(shapes), collisions=tuple(shapes))
        )
        origin = origins[i]
        joints.append(
            URDFJoint(
                name=f"joint_{i + 1}",
                type="revolute",
                parent=BASE_LINK if i == 0 else f"link_{i}",
                child=f"link_{i + 1}",
                origin_xyz=tuple(float(v) for v in origin.translation),
                origin_rpy=matrix_to_rpy(origin.rotation),
                axis=(0.0, 0.0, 1.0),
                limit=URDFLimit(
                    lower=math.radians(unit.joint_limits_deg[0]),
                    upper=math.radians(unit.joint_limits_deg[1]),
                    effort=spec.tau_max_Nm,
                    velocity=spec.speed_rad_s,
                ),
            )
        )

    links.append(URDFLink(name=EE_LINK))
    joints.append(
        URDFJoint(
            name="ee_fixed",
            type="fixed",
            parent=f"link_{comp.n}",
            child=EE_LINK,
            origin_xyz=tuple(float(v) for v in tail.translation),
            origin_rpy=matrix_to_rpy(tail.rotation),
        )
    )
    return URDFDocument(robot_name=robot_name, links=tuple(links), joints=tuple(joints))


# ---------------------------------------------------------------------------
# Serialization: hand-rolled for byte-stable output (two-space indentation,
# fixed attribute order, 9 significant digits).
# ---------------------------------------------------------------------------


def _fmt(value: float) -> str:
    if abs(value) < 1e-12:
        value = 0.0
    return f"{value:.9g}"


def _fmt3(values) -> str:
    return " ".join(_fmt(v) for v in values)


def _geometry_lines(geometry: URDFGeometry, pad: str) -> list[str]:
    if geometry.shape == "cylinder":
        inner = f'{pad}  <cylinder radius="{_fmt(geometry.radius)}" length="{_fmt(geometry.length)}"/>'
    elif geometry.shape == "box":
        inner = f'{pad}  <box size="{_fmt3(geometry.size)}"/>'
    else:
        raise ValueError(f"unsupported geometry shape {geometry.shape!r}")
    return [f"{pad}<geometry>", inner, f"{pad}</geometry>"]


def _shape_lines(tag: str, shape: URDFVisual, pad: str) -> list[str]:
    lines = [f"{pad}<{tag}>"]
    lines.append(f'{pad}  <origin xyz="{_fmt3(shape.origin_xyz)}" rpy="{_fmt3(shape.origin_rpy)}"/>')
    lines.extend(_geometry_lines(shape.geometry, pad + "  "))
    lines.append(f"{pad}</{tag}>")
    return lines


def serialize_urdf(doc: URDFDocument) -> str:
    lines = ['<?xml version="1.0" encoding="utf-8"?>', f'<robot name="{doc.robot_name}">']
    for link in doc.links:
        if link.inertial is None and not link.visuals and not link.collisions:
            lines.append(f'  <link name="{link.name}"/>')
            continue
        lines.append(f'  <link name="{link.name}">')
        if link.inertial is not None:
            inert = link.inertial
            lines.append("    <inertial>")
            lines.append(f'      <origin xyz="{_fmt3(inert.origin_xyz)}" rpy="{_fmt3(inert.origin_rpy)}"/>')
            lines.append(f'      <mass value="{_fmt(inert.mass)}"/>')
            lines.append(
                f'      <inertia ixx="{_fmt(inert.ixx)}" ixy="{_fmt(inert.ixy)}" ixz="{_fmt(inert.ixz)}"'
                f' iyy="{_fmt(inert.iyy)}" iyz="{_fmt(inert.iyz)}" izz="{_fmt(inert.izz)}"/>'
            )
            lines.append("    </inertial>")
        for visual in link.visuals:
            lines.extend(_shape_lines("visual", visual, "    "))
        for collision in link.collisions:
            lines.extend(_shape_lines("collision", collision, "    "))
        lines.append("  </link>")
    for joint in doc.joints:
        lines.append(f'  <joint name="{joint.name}" type="{joint.type}">')
        lines.append(f'    <origin xyz="{_fmt3(joint.origin_xyz)}" rpy="{_fmt3(joint.origin_rpy)}"/>')
        lines.append(f'    <parent link="{joint.parent}"/>')
        lines.append(f'    <child link="{joint.child}"/>')
        if joint.axis is not None:
            lines.append(f'    <axis xyz="{_fmt3(joint.axis)}"/>')
        if joint.limit is not None:
            limit = joint.limit
            lines.append(
                f'    <limit lower="{_fmt(limit.lower)}" upper="{_fmt(limit.upper)}"'
                f' effort="{_fmt(limit.effort)}" velocity="{_fmt(limit.velocity)}"/>'
            )
        lines.append("  </joint>")
    lines.append("</robot>")
    return "\n".join(lines) + "\n"


def _parse_triplet(text: str | None, context: str) -> tuple[float, float, float]:
    if text is None:
        return (0.0, 0.0, 0.0)
    parts = text.split()
    if len(parts) != 3:
        raise ParseError(f"{context}: expected 3 numbers, got {text!r}")
    try:
        x, y, z = (float(p) for p in parts)
    except ValueError:
        raise ParseError(f"{context}: not numeric: {text!r}") from None
    return (x, y, z)


def _parse_shape(element: ET.Element, context: str) -> URDFVisual:
    origin = element.find("origin")
    xyz = _parse_triplet(origin.get("xyz") if origin is not None else None, context)
    rpy = _parse_triplet(origin.get("rpy") if origin is not None else None, context)
    geometry_el = element.find("geometry")
    if geometry_el is None:
        raise ParseError(f"{context}: missing geometry")
    cylinder = geometry_el.find("cylinder")
    box = geometry_el.find("box")
    if cylinder is not None:
        geometry = URDFGeometry(
            "cylinder",
            radius=float(cylinder.get("radius", "0")),
            length=float(cylinder.get("length", "0")),
        )
    elif box is not None:
        geometry = URDFGeometry("box", size=_parse_triplet(box.get("size"), context))
    else:
        raise ParseError(f"{context}: unsupported geometry primitive")
    return URDFVisual(origin_xyz=xyz, origin_rpy=rpy, geometry=geometry)


def parse_urdf(text: str) -> URDFDocument:
    """Parse the URDF subset this package emits back into a document."""
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise ParseError(f"invalid XML: {exc}") from exc
    if root.tag != "robot":
        raise ParseError(f"expected <robot> root element, got <{root.tag}>")
    robot_name = root.get("name")
    if not robot_name:
        raise ParseError("robot element needs a name attribute")

    links = []
    for link_el in root.findall("link"):
        name = link_el.get("name")
        if not name:
            raise ParseError("link element needs a name attribute")
        inertial = None
        inertial_el = link_el.find("inertial")
        if inertial_el is not None:
            origin = inertial_el.find("origin")
            mass_el = inertial_el.find("mass")
            inertia_el = inertial_el.find("inertia")
            if mass_el is None or inertia_el is None:
                raise ParseError(f"link {name}: inertial needs mass and inertia")
            inertial = URDFInertial(
                mass=float(mass_el.get("value", "0")),
                origin_xyz=_parse_triplet(origin.get("xyz") if origin is not None else None, f"link {name}"),
                origin_rpy=_parse_triplet(origin.get("rpy") if origin is not None else None, f"link {name}"),
                **{key: float(inertia_el.get(key, "0")) for key in ("ixx", "ixy", "ixz", "iyy", "iyz", "izz")},
            )
        visuals = tuple(_parse_shape(el, f"link {name} visual") for el in link_el.findall("visual"))
        collisions = tuple(_parse_shape(el, f"link {name} collision") for el in link_el.findall("collision"))
        links.append(URDFLink(name=name, inertial=inertial, visuals=visuals, collisions=collisions))

    joints = []
    for joint_el in root.findall("joint"):
        name = joint_el.get("name")
        joint_type = joint_el.get("type")
        if not name or joint_type not in ("revolute", "fixed"):
            raise ParseError(f"joint {name!r}: needs a name and a revolute/fixed type")
        parent_el = joint_el.find("parent")
        child_el = joint_el.find("child")
        if parent_el is None or child_el is None:
            raise ParseError(f"joint {name}: needs parent and child links")
        origin = joint_el.find("origin")
        axis_el = joint_el.find("axis")
        limit_el = joint_el.find("limit")
        limit = None
        if limit_el is not None:
            limit = URDFLimit(
                lower=float(limit_el.get("lower", "0")),
                upper=float(limit_el.get("upper", "0")),
                effort=float(limit_el.get("effort", "0")),
                velocity=float(limit_el.get("velocity", "0")),
            )
        joints.append(
            URDFJoint(
                name=name,
                type=joint_type,
                parent=parent_el.get("link", ""),
                child=child_el.get("link", ""),
                origin_xyz=_parse_triplet(origin.get("xyz") if origin is not None else None, f"joint {name}"),
                origin_rpy=_parse_triplet(origin.get("rpy") if origin is not None else None, f"joint {name}"),
                axis=_parse_triplet(axis_el.get("xyz"), f"joint {name}") if axis_el is not None else None,
                limit=limit,
            )
        )
    return URDFDocument(robot_name=robot_name, links=tuple(links), joints=tuple(joints))


# ---------------------------------------------------------------------------
# Independent FK oracle: walks the document tree and multiplies 4x4 matrices
# assembled directly from the joint attributes. Deliberately shares no code
# with the kinematics module.
# ---------------------------------------------------------------------------


def _oracle_matrix(xyz, rpy) -> np.ndarray:
    roll, pitch, yaw = rpy
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]], dtype=float)
    ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]], dtype=float)
    rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]], dtype=float)
    m = np.eye(4)
    m[:3, :3] = rz @ ry @ rx
    m[:3, 3] = xyz
    return m


def urdf_fk_oracle(doc: URDFDocument, q) -> np.ndarray:
    """End-effector pose (4x4) from the document's joint chain alone."""
    q = np.asarray(q, dtype=float).reshape(-1)
    revolute_count = len(doc.revolute_joints())
    if q.shape[0] != revolute_count:
        raise DimensionMismatch(f"expected {revolute_count} joint angles, got {q.shape[0]}")

    by_parent: dict[str, list[URDFJoint]] = {}
    for joint in doc.joints:
        by_parent.setdefault(joint.parent, []).append(joint)

    pose = np.eye(4)
    current = doc.root_link()
    joint_index = 0
    while current in by_parent:
        children = by_parent[current]
        if len(children) != 1:
            raise ValueError(f"link {current} branches; the oracle handles serial chains only")
        joint = children[0]
        pose = pose @ _oracle_matrix(joint.origin_xyz, joint.origin_rpy)
        if joint.type == "revolute":
            if joint.axis is None or tuple(joint.axis) != (0.0, 0.0, 1.0):
                raise ValueError(f"joint {joint.name}: oracle expects axis 0 0 1")
            angle = float(q[joint_index])
            c, s = math.cos(angle), math.sin(angle)
            spin = np.eye(4)
            spin[:2, :2] = [[c, -s], [s, c]]
            pose = pose @ spin
            joint_index += 1
        current = joint.child
    return pose
