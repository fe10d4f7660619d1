"""Kinematics of modular chains: the three-frame transform per unit.

Each joint module contributes three frames. The twist1 factor carries the
pivot twist (rotation about y) and the fixed port offsets, the joint factor
carries the joint variable (rotation about z) and the actuator riser, and
the twist2 factor carries the port twist (rotation about x) plus the link
module length. Units without a link module (U1/U2) have an identity twist2
factor, so their port twist has no kinematic effect.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .catalog import Catalog, get_catalog
from .composition import Composition, ModularUnit
from .errors import DimensionMismatch
from .transform import Transform, rotation_log, rotx, roty, rotz


def transform_t1(x01_m: float, z01_m: float, alpha_t2_rad: float) -> Transform:
    """Twist1 frame w.r.t. the preceding connection port: Ry(alpha_t2), offset (x01, 0, z01)."""
    return Transform(roty(alpha_t2_rad), np.array([x01_m, 0.0, z01_m]))


def transform_joint(z12_m: float, theta_rad: float) -> Transform:
    """Joint frame w.r.t. the twist1 frame: Rz(theta), offset (0, 0, z12)."""
    return Transform(rotz(theta_rad), np.array([0.0, 0.0, z12_m]))


def transform_t2(x23_m: float, alpha_t1_rad: float) -> Transform:
    """Twist2 frame w.r.t. the joint frame: Rx(alpha_t1), offset (x23, 0, 0)."""
    return Transform(rotx(alpha_t1_rad), np.array([x23_m, 0.0, 0.0]))


def unit_frame_transforms(
    unit: ModularUnit, q_rad: float, catalog: Catalog | None = None
) -> tuple[Transform, Transform, Transform]:
    """The (twist1, joint, twist2) factors of one unit at joint angle ``q_rad``.

    For U1/U2 the twist2 factor is the identity (no link module attached).
    """
    catalog = catalog or get_catalog()
    geom = catalog.unit_geometry(unit.kind)
    a_t1 = transform_t1(geom.x01_m, geom.z01_m, math.radians(unit.twist2_deg))
    a_joint = transform_joint(geom.z12_m, q_rad)
    if geom.has_link_module:
        a_t2 = transform_t2(geom.x23_m, math.radians(unit.twist1_deg))
    else:
        a_t2 = Transform.identity()
    return a_t1, a_joint, a_t2


def unit_transform(unit: ModularUnit, q_rad: float, catalog: Catalog | None = None) -> Transform:
    """Full transform of one modular unit at joint angle ``q_rad``."""
    a_t1, a_joint, a_t2 = unit_frame_transforms(unit, q_rad, catalog)
    return a_t1 @ a_joint @ a_t2


def chain_joint_origins(
    comp: Composition, catalog: Catalog | None = None
) -> tuple[list[Transform], Transform]:
    """Constant joint-to-joint offsets of a composition.

    Returns ``(origins, tail)`` where ``origins[i]`` is the fixed transform
    from joint frame i-1 (post-rotation) to the frame in which joint i
    rotates about z, and ``tail`` maps the last joint frame to the
    end-effector. The actuator riser z12 commutes with the joint rotation,
    so it is folded forward into the successor's origin; this is the same
    folding the URDF emitter uses.
    """
    catalog = catalog or get_catalog()
    origins: list[Transform] = []
    carry = comp.base_pose
    for unit in comp.units:
        geom = catalog.unit_geometry(unit.kind)
        a_t1 = transform_t1(geom.x01_m, geom.z01_m, math.radians(unit.twist2_deg))
        origins.append(carry @ a_t1)
        riser = Transform(np.eye(3), np.array([0.0, 0.0, geom.z12_m]))
        if geom.has_link_module:
            carry = riser @ transform_t2(geom.x23_m, math.radians(unit.twist1_deg))
        else:
            carry = riser
    return origins, carry


@dataclass(frozen=True)
class FramePoses:
    """All per-unit frame poses in base coordinates, plus the end effector."""

    twist1_frames: tuple[Transform, ...]
    joint_frames: tuple[Transform, ...]
    twist2_frames: tuple[Transform, ...]
    end_effector: Transform


def _check_q(comp: Composition, q) -> np.ndarray:
    q = np.asarray(q, dtype=float).reshape(-1)
    if q.shape[0] != comp.n:
        raise DimensionMismatch(f"expected {comp.n} joint angles, got {q.shape[0]}")
    return q


def forward_kinematics(comp: Composition, q, catalog: Catalog | None = None) -> FramePoses:
    """Pose of every unit frame and the end effector at joint angles ``q`` (radians)."""
    catalog = catalog or get_catalog()
    q = _check_q(comp, q)
    twist1_frames = []
    joint_frames = []
    twist2_frames = []
    pose = comp.base_pose
    for unit, q_i in zip(comp.units, q):
        a_t1, a_joint, a_t2 = unit_frame_transforms(unit, float(q_i), catalog)
        pose = pose @ a_t1
        twist1_frames.append(pose)
        pose = pose @ a_joint
        joint_frames.append(pose)
        pose = pose @ a_t2
        twist2_frames.append(pose)
    return FramePoses(
        twist1_frames=tuple(twist1_frames),
        joint_frames=tuple(joint_frames),
        twist2_frames=tuple(twist2_frames),
        end_effector=pose,
    )


def jacobian(comp: Composition, q, catalog: Catalog | None = None) -> np.ndarray:
    """Geometric Jacobian (6 x n): linear rows then angular rows, base frame.

    Every joint is revolute about the z-axis of its own joint frame.
    """
    poses = forward_kinematics(comp, q, catalog)
    p_ee = poses.end_effector.translation
    jac = np.zeros((6, comp.n))
    for i, joint_pose in enumerate(poses.joint_frames):
        z_i = joint_pose.rotation[:, 2]
        p_i = joint_pose.translation
        jac[:3, i] = np.cross(z_i, p_ee - p_i)
        jac[3:, i] = z_i
    return jac


@dataclass(frozen=True)
class IKOptions:
    pos_tol_m: float = 1e-4
    rot_tol_rad: float = 1e-3
    max_iters: int = 500
    restarts: int = 10
    damping: float = 0.05
    seed: int = 0


@dataclass(frozen=True)
class IKResult:
    q: np.ndarray
    pos_err_m: float
    rot_err_rad: float
    converged: bool
    iterations: int


def _pose_error(current: Transform, target: Transform) -> tuple[np.ndarray, float, float]:
    e_pos = target.translation - current.translation
    e_rot = rotation_log(target.rotation @ current.rotation.T)
    return np.concatenate([e_pos, e_rot]), float(np.linalg.norm(e_pos)), float(np.linalg.norm(e_rot))


_STEP_CAP_RAD = 0.7
_PROGRESS_WINDOW = 25
_PROGRESS_FACTOR = 0.5


def inverse_kinematics(
    comp: Composition,
    target: Transform,
    seed_q=None,
    opts: IKOptions | None = None,
    catalog: Catalog | None = None,
) -> IKResult:
    """Damped least-squares IK on the pose-error twist.

    Steps are accepted only when they reduce the combined error; the damping
    factor is halved on acceptance and doubled on rejection. An attempt that
    fails to at least halve its error over a 25-iteration window counts as
    stalled and triggers a random reseed within the joint limits (up to
    ``opts.restarts``). Always returns the best configuration found, with
    ``converged`` reporting whether both tolerances were met.
    """
    opts = opts or IKOptions()
    catalog = catalog or get_catalog()
    if not target.is_orthonormal(1e-8):
        raise ValueError("target rotation must be orthonormal")
    limits = comp.joint_limits_rad()
    rng = np.random.default_rng(opts.seed)

    if seed_q is None:
        start = np.clip(np.zeros(comp.n), limits[:, 0], limits[:, 1])
    else:
        start = np.clip(_check_q(comp, seed_q), limits[:, 0], limits[:, 1])

    best_q = start.copy()
    best_pos, best_rot = math.inf, math.inf
    iterations = 0

    for attempt in range(opts.restarts + 1):
        q = start.copy() if attempt == 0 else rng.uniform(limits[:, 0], limits[:, 1])
        lam = opts.damping
        poses = forward_kinematics(comp, q, catalog)
        err, pos_err, rot_err = _pose_error(poses.end_effector, target)
        total = pos_err + rot_err
        checkpoint = total
        since_check = 0
        budget = opts.max_iters
        while budget > 0:
            if pos_err + rot_err < best_pos + best_rot:
                best_q, best_pos, best_rot = q.copy(), pos_err, rot_err
            if pos_err <= opts.pos_tol_m and rot_err <= opts.rot_tol_rad:
                return IKResult(q=q, pos_err_m=pos_err, rot_err_rad=rot_err, converged=True, iterations=iterations)
            jac = jacobian(comp, q, catalog)
            gram = jac @ jac.T + lam**2 * np.eye(6)
            step = jac.T @ np.linalg.solve(gram, err)
            norm = float(np.linalg.norm(step))
            if norm > _STEP_CAP_RAD:
                step *= _STEP_CAP_RAD / norm
            q_new = np.clip(q + step, limits[:, 0], limits[:, 1])
            poses = forward_kinematics(comp, q_new, catalog)
            err_new, pos_new, rot_new = _pose_error(poses.end_effector, target)
            iterations += 1
            budget -= 1
            since_check += 1
            if pos_new + rot_new < total:
                q, err, pos_err, rot_err = q_new, err_new, pos_new, rot_new
                total = pos_new + rot_new
                lam = max(lam / 2.0, 1e-6)
            else:
                lam = min(lam * 2.0, 1e3)
            if since_check >= _PROGRESS_WINDOW:
                if total > _PROGRESS_FACTOR * checkpoint:
                    break  # stalled in a poor basin; reseed
                checkpoint = total
                since_check = 0
        if pos_err + rot_err < best_pos + best_rot:
            best_q, best_pos, best_rot = q.copy(), pos_err, rot_err

    return IKResult(
        q=best_q,
        pos_err_m=best_pos,
        rot_err_rad=best_rot,
        converged=best_pos <= opts.pos_tol_m and best_rot <= opts.rot_tol_rad,
        iterations=iterations,
    )


def sample_workspace(comp: Composition, samples: int, seed: int = 0, catalog: Catalog | None = None) -> np.ndarray:
    """End-effector positions at uniformly random in-limit joint angles.

    Deterministic for a given seed; returns an (samples, 3) array.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    catalog = catalog or get_catalog()
    limits = comp.joint_limits_rad()
    rng = np.random.default_rng(seed)
    qs = rng.uniform(limits[:, 0], limits[:, 1], size=(samples, comp.n))
    points = np.empty((samples, 3))
    for row, q in enumerate(qs):
        points[row] = forward_kinematics(comp, q, catalog).end_effector.translation
    return points


def workspace_to_csv(points: np.ndarray) -> str:
    """x,y,z per line, 9 significant digits."""
    return "\n".join(f"{p[0]:.9g},{p[1]:.9g},{p[2]:.9g}" for p in np.asarray(points)) + "\n"
