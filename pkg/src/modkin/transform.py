"""Homogeneous rigid-body transforms: the currency of all kinematics here.

A :class:`Transform` is a rotation matrix plus a translation vector, kept
separate (rather than a packed 4x4) so rotations stay exactly orthonormal
under composition checks. RPY follows the URDF convention: fixed-axis
rolls, i.e. ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ORTHONORMAL_TOL = 1e-10


def rotx(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def roty(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotz(angle_rad: float) -> np.ndarray:
    c, s = math.cos(angle_rad), math.sin(angle_rad)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rpy_to_matrix(roll: float, pitch: float, yaw: float) -> np.ndarray:
    return rotz(yaw) @ roty(pitch) @ rotx(roll)


def matrix_to_rpy(rot: np.ndarray) -> tuple[float, float, float]:
    """Inverse of :func:`rpy_to_matrix`; pitch is kept in [-pi/2, pi/2]."""
    pitch = math.atan2(-rot[2, 0], math.hypot(rot[0, 0], rot[1, 0]))
    if abs(abs(pitch) - math.pi / 2) < 1e-9:
        # Gimbal lock: fold everything into roll.
        roll = math.atan2(math.copysign(1.0, math.sin(pitch)) * rot[0, 1], rot[1, 1])
        if abs(roll) < 1e-300:
            roll = 0.0
        return (roll, pitch, 0.0)
    roll = math.atan2(rot[2, 1], rot[2, 2])
    yaw = math.atan2(rot[1, 0], rot[0, 0])
    return (roll, pitch, yaw)


def rotation_angle(rot: np.ndarray) -> float:
    """Angle of the rotation ``rot`` in radians, in [0, pi].

    atan2 of (sin, cos) keeps full precision near the identity, where the
    plain arccos form bottoms out around 1e-8.
    """
    sin_angle = 0.5 * math.sqrt(
        (rot[2, 1] - rot[1, 2]) ** 2 + (rot[0, 2] - rot[2, 0]) ** 2 + (rot[1, 0] - rot[0, 1]) ** 2
    )
    cos_angle = (np.trace(rot) - 1.0) / 2.0
    return math.atan2(sin_angle, cos_angle)


def rotation_log(rot: np.ndarray) -> np.ndarray:
    """Axis-angle vector (so(3) log) of a rotation matrix."""
    angle = rotation_angle(rot)
    if angle < 1e-12:
        return np.zeros(3)
    if math.pi - angle < 1e-6:
        # Near pi the skew part degenerates; recover the axis from R + I.
        axis_mat = (rot + np.eye(3)) / 2.0
        axis = np.sqrt(np.maximum(np.diag(axis_mat), 0.0))
        # Fix signs from the off-diagonal terms.
        k = int(np.argmax(axis))
        for i in range(3):
            if i != k and axis_mat[k, i] < 0:
                axis[i] = -axis[i]
        axis /= np.linalg.norm(axis)
        return axis * angle
    w = np.array([rot[2, 1] - rot[1, 2], rot[0, 2] - rot[2, 0], rot[1, 0] - rot[0, 1]])
    return w * (angle / (2.0 * math.sin(angle)))


@dataclass(frozen=True)
class Transform:
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        rot = np.array(self.rotation, dtype=float).reshape(3, 3)
        trans = np.array(self.translation, dtype=float).reshape(3)
        rot.flags.writeable = False
        trans.flags.writeable = False
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", trans)

    @staticmethod
    def identity() -> "Transform":
        return Transform(np.eye(3), np.zeros(3))

    @staticmethod
    def from_matrix(matrix: np.ndarray) -> "Transform":
        m = np.asarray(matrix, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"expected a 4x4 matrix, got shape {m.shape}")
        return Transform(m[:3, :3], m[:3, 3])

    @staticmethod
    def from_rpy(xyz, rpy) -> "Transform":
        return Transform(rpy_to_matrix(*rpy), np.asarray(xyz, dtype=float))

    def as_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def rpy(self) -> tuple[float, float, float]:
        return matrix_to_rpy(self.rotation)

    def __matmul__(self, other: "Transform") -> "Transform":
        return Transform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "Transform":
        rot_t = self.rotation.T
        return Transform(rot_t, -rot_t @ self.translation)

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Transform one point (3,) or a batch (N, 3)."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation

    def is_orthonormal(self, tol: float = ORTHONORMAL_TOL) -> bool:
        rot = self.rotation
        return (
            np.max(np.abs(rot.T @ rot - np.eye(3))) <= tol
            and abs(np.linalg.det(rot) - 1.0) <= tol
        )


def pose_distance(a: Transform, b: Transform) -> float:
    """Translation gap in meters plus rotation gap in radians."""
    return float(np.linalg.norm(a.translation - b.translation)) + rotation_angle(
        a.rotation.T @ b.rotation
    )
