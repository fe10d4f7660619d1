"""Rigid-body model and joint torques for modular compositions.

Bodies are assembled from primitive shapes: each joint module is a solid
cylinder on its joint axis (radius read off the actuator family's 75/58 mm
casings, length equal to the actuator riser), link modules are slender
x-axis cylinders, and the payload is a point mass on the last body. Joint
torques come from a recursive Newton-Euler sweep over the same joint-origin
chain the kinematics module exposes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .catalog import Catalog, get_catalog
from .composition import Composition
from .errors import DimensionMismatch
from .kinematics import chain_joint_origins
from .transform import rotx, rotz

# Casing radii inferred from the actuator model names (75 mm / 58 mm classes);
# the riser height doubles as the cylinder length. Documented assumptions,
# not measured data.
ACTUATOR_BODY_RADIUS_M = {"H": 0.0375, "L": 0.029}
ACTUATOR_BODY_LENGTH_M = 0.073

GRAVITY = (0.0, 0.0, -9.81)


@dataclass(frozen=True)
class BodyInertia:
    mass_kg: float
    com_m: np.ndarray
    inertia_tensor: np.ndarray  # 3x3 about the com, link-frame axes

    def __post_init__(self):
        com = np.array(self.com_m, dtype=float).reshape(3)
        tensor = np.array(self.inertia_tensor, dtype=float).reshape(3, 3)
        com.flags.writeable = False
        tensor.flags.writeable = False
        object.__setattr__(self, "com_m", com)
        object.__setattr__(self, "inertia_tensor", tensor)


def _cylinder_inertia(mass: float, radius: float, length: float, axis: str) -> np.ndarray:
    """Solid cylinder inertia about its center, symmetry axis x, y or z."""
    i_axis = mass * radius**2 / 2.0
    i_perp = mass * (3.0 * radius**2 + length**2) / 12.0
    diag = {"x": (i_axis, i_perp, i_perp), "y": (i_perp, i_axis, i_perp), "z": (i_perp, i_perp, i_axis)}[axis]
    return np.diag(diag)


def _parallel_axis(inertia_com: np.ndarray, mass: float, offset: np.ndarray) -> np.ndarray:
    d = np.asarray(offset, dtype=float)
    return inertia_com + mass * (np.dot(d, d) * np.eye(3) - np.outer(d, d))


def _combine(parts: list[tuple[float, np.ndarray, np.ndarray]]) -> BodyInertia:
    mass = sum(m for m, _, _ in parts)
    com = sum(m * c for m, c, _ in parts) / mass
    tensor = np.zeros((3, 3))
    for m, c, inertia in parts:
        tensor += _parallel_axis(inertia, m, c - com)
    return BodyInertia(mass_kg=mass, com_m=com, inertia_tensor=tensor)


def build_inertial_model(comp: Composition, catalog: Catalog | None = None) -> list[BodyInertia]:
    """One aggregated body per moving link, expressed in that link's frame.

    The link frame is where the joint rotates: its origin sits one riser
    below the actuator axis center, so the actuator cylinder is centered at
    (0, 0, z12) and a link module spans x in [0, x23] at the same height.
    The payload joins the last body at its offset from the end effector.
    """
    catalog = catalog or get_catalog()
    bodies: list[BodyInertia] = []
    for i, unit in enumerate(comp.units):
        geom = catalog.unit_geometry(unit.kind)
        spec = catalog.actuator(unit.variant)
        radius = ACTUATOR_BODY_RADIUS_M[unit.variant]
        parts = [
            (
                spec.mass_kg,
                np.array([0.0, 0.0, geom.z12_m]),
                _cylinder_inertia(spec.mass_kg, radius, ACTUATOR_BODY_LENGTH_M, "z"),
            )
        ]
        if geom.has_link_module:
            link = catalog.link_module
            parts.append(
                (
                    link.mass_kg,
                    np.array([geom.x23_m / 2.0, 0.0, geom.z12_m]),
                    _cylinder_inertia(link.mass_kg, link.radius_m, link.length_m, "x"),
                )
            )
        if i == comp.n - 1 and comp.payload_mass_kg > 0.0:
            tail_rot = rotx(math.radians(unit.twist1_deg)) if geom.has_link_module else np.eye(3)
            tail_pos = np.array([geom.x23_m, 0.0, geom.z12_m])
            payload_pos = tail_rot @ comp.payload_offset_m + tail_pos
            parts.append((comp.payload_mass_kg, payload_pos, np.zeros((3, 3))))
        bodies.append(_combine(parts))
    return bodies


def inverse_dynamics(
    comp: Composition,
    q,
    qdot,
    qddot,
    gravity=GRAVITY,
    catalog: Catalog | None = None,
    bodies: list[BodyInertia] | None = None,
) -> np.ndarray:
    """Joint torques via a recursive Newton-Euler sweep (world-frame gravity)."""
    catalog = catalog or get_catalog()
    n = comp.n
    q = np.asarray(q, dtype=float).reshape(-1)
    qdot = np.asarray(qdot, dtype=float).reshape(-1)
    qddot = np.asarray(qddot, dtype=float).reshape(-1)
    if not (q.shape[0] == qdot.shape[0] == qddot.shape[0] == n):
        raise DimensionMismatch(f"expected {n} joint values in q, qdot and qddot")
    if bodies is None:
        bodies = build_inertial_model(comp, catalog)
    origins, _ = chain_joint_origins(comp, catalog)
    rotations = [origins[i].rotation @ rotz(q[i]) for i in range(n)]
    offsets = [origins[i].translation for i in range(n)]
    z = np.array([0.0, 0.0, 1.0])

    omega = np.zeros(3)
    omega_dot = np.zeros(3)
    accel = -np.asarray(gravity, dtype=float)
    omegas, omega_dots, com_forces, com_torques = [], [], [], []
    for i in range(n):
        rot_t = rotations[i].T
        omega_prev, omega_dot_prev, accel_prev = omega, omega_dot, accel
        omega = rot_t @ omega_prev + qdot[i] * z
        omega_dot = rot_t @ omega_dot_prev + np.cross(rot_t @ omega_prev, qdot[i] * z) + qddot[i] * z
        accel = rot_t @ (
            accel_prev
            + np.cross(omega_dot_prev, offsets[i])
            + np.cross(omega_prev, np.cross(omega_prev, offsets[i]))
        )
        body = bodies[i]
        accel_com = accel + np.cross(omega_dot, body.com_m) + np.cross(omega, np.cross(omega, body.com_m))
        com_forces.append(body.mass_kg * accel_com)
        com_torques.append(body.inertia_tensor @ omega_dot + np.cross(omega, body.inertia_tensor @ omega))
        omegas.append(omega)
        omega_dots.append(omega_dot)

    torques = np.zeros(n)
    force = np.zeros(3)
    moment = np.zeros(3)
    for i in reversed(range(n)):
        if i < n - 1:
            rot_next = rotations[i + 1]
            passed_force = rot_next @ force
            moment = rot_next @ moment + np.cross(offsets[i + 1], passed_force)
            force = passed_force
        else:
            force = np.zeros(3)
            moment = np.zeros(3)
        moment = moment + com_torques[i] + np.cross(bodies[i].com_m, com_forces[i])
        force = force + com_forces[i]
        torques[i] = moment @ z
    return torques


def mass_matrix(comp: Composition, q, catalog: Catalog | None = None) -> np.ndarray:
    """Joint-space inertia matrix from unit-acceleration inverse dynamics columns."""
    catalog = catalog or get_catalog()
    n = comp.n
    bodies = build_inertial_model(comp, catalog)
    zeros = np.zeros(n)
    columns = []
    for j in range(n):
        e_j = np.zeros(n)
        e_j[j] = 1.0
        columns.append(
            inverse_dynamics(comp, q, zeros, e_j, gravity=(0.0, 0.0, 0.0), catalog=catalog, bodies=bodies)
        )
    return np.column_stack(columns)


def bias_forces(comp: Composition, q, qdot, gravity=GRAVITY, catalog: Catalog | None = None) -> np.ndarray:
    """Coriolis, centrifugal and gravity torques (the zero-acceleration torques)."""
    n = comp.n
    return inverse_dynamics(comp, q, qdot, np.zeros(n), gravity=gravity, catalog=catalog)


@dataclass(frozen=True)
class JointTorque:
    joint: int
    variant: str
    tau_Nm: float
    tau_nom_limit_Nm: float
    tau_max_limit_Nm: float
    nominal_ok: bool
    peak_ok: bool


@dataclass(frozen=True)
class TorqueReport:
    joints: tuple[JointTorque, ...]
    samples: int

    @property
    def all_nominal_ok(self) -> bool:
        return all(j.nominal_ok for j in self.joints)

    @property
    def all_peak_ok(self) -> bool:
        return all(j.peak_ok for j in self.joints)

    def to_csv(self) -> str:
        lines = ["joint,tau_max_observed,tau_nom,tau_max,nominal_ok,peak_ok"]
        for j in self.joints:
            lines.append(
                f"{j.joint},{j.tau_Nm:.9g},{j.tau_nom_limit_Nm:.9g},{j.tau_max_limit_Nm:.9g},"
                f"{str(j.nominal_ok).lower()},{str(j.peak_ok).lower()}"
            )
        return "\n".join(lines) + "\n"


def _report_from_worst(comp: Composition, worst: np.ndarray, samples: int, catalog: Catalog) -> TorqueReport:
    joints = []
    for i, unit in enumerate(comp.units):
        spec = catalog.actuator(unit.variant)
        tau = float(worst[i])
        joints.append(
            JointTorque(
                joint=i + 1,
                variant=unit.variant,
                tau_Nm=tau,
                tau_nom_limit_Nm=spec.tau_nom_Nm,
                tau_max_limit_Nm=spec.tau_max_Nm,
                nominal_ok=tau <= spec.tau_nom_Nm,
                peak_ok=tau <= spec.tau_max_Nm,
            )
        )
    return TorqueReport(joints=tuple(joints), samples=samples)


def _with_payload(comp: Composition, payload_kg: float | None) -> Composition:
    if payload_kg is None:
        return comp
    return replace(comp, payload_mass_kg=float(payload_kg))


def torque_report_at(
    comp: Composition,
    q,
    payload_kg: float | None = None,
    gravity=GRAVITY,
    catalog: Catalog | None = None,
) -> TorqueReport:
    """Static torque report at one configuration."""
    catalog = catalog or get_catalog()
    comp = _with_payload(comp, payload_kg)
    zeros = np.zeros(comp.n)
    tau = np.abs(inverse_dynamics(comp, q, zeros, zeros, gravity=gravity, catalog=catalog))
    return _report_from_worst(comp, tau, samples=1, catalog=catalog)


def feasibility_check(
    comp: Composition,
    q_grid_density: int = 7,
    payload_kg: float | None = None,
    qddot_bound: float = 0.0,
    gravity=GRAVITY,
    catalog: Catalog | None = None,
    seed: int = 0,
    max_samples: int = 100_000,
) -> TorqueReport:
    """Worst static joint torques over a joint-space grid vs. actuator limits.

    The grid has ``q_grid_density`` samples per joint; when the full grid
    exceeds ``max_samples`` points a random subsample of grid points is
    drawn instead. A nonzero ``qddot_bound`` adds a uniform inertial torque
    bound on top of the statics.
    """
    if q_grid_density < 1:
        raise ValueError("q_grid_density must be >= 1")
    catalog = catalog or get_catalog()
    comp = _with_payload(comp, payload_kg)
    n = comp.n
    limits = comp.joint_limits_rad()
    axes = [np.linspace(limits[i, 0], limits[i, 1], q_grid_density) for i in range(n)]

    total = q_grid_density**n
    if total <= max_samples:
        grids = np.meshgrid(*axes, indexing="ij")
        samples = np.stack([g.reshape(-1) for g in grids], axis=1)
    else:
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, q_grid_density, size=(max_samples, n))
        samples = np.stack([axes[i][idx[:, i]] for i in range(n)], axis=1)

    bodies = build_inertial_model(comp, catalog)
    zeros = np.zeros(n)
    worst = np.zeros(n)
    for q in samples:
        tau = np.abs(inverse_dynamics(comp, q, zeros, zeros, gravity=gravity, catalog=catalog, bodies=bodies))
        if qddot_bound > 0.0:
            tau = tau + np.abs(mass_matrix(comp, q, catalog)).sum(axis=1) * qddot_bound
        worst = np.maximum(worst, tau)
    return _report_from_worst(comp, worst, samples=len(samples), catalog=catalog)
