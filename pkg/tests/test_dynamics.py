import math

import numpy as np
import pytest

from modkin import (
    Composition,
    DimensionMismatch,
    ModularUnit,
    build_inertial_model,
    feasibility_check,
    inverse_dynamics,
    mass_matrix,
)
from modkin.dynamics import bias_forces, torque_report_at
from modkin.kinematics import chain_joint_origins, forward_kinematics
from modkin.transform import rotz

from conftest import random_q

GRAVITY = np.array([0.0, 0.0, -9.81])


# ---------------------------------------------------------------------------
# Oracles, independent of the Newton-Euler sweep: body poses are accumulated
# from the joint-origin chain, and all Jacobians come from finite differences
# of those poses.
# ---------------------------------------------------------------------------


def link_poses(comp, q):
    origins, _ = chain_joint_origins(comp)
    rot, pos = np.eye(3), np.zeros(3)
    poses = []
    for origin, q_i in zip(origins, q):
        step_rot = origin.rotation @ rotz(float(q_i))
        rot, pos = rot @ step_rot, rot @ origin.translation + pos
        poses.append((rot, pos))
    return poses


def com_positions(comp, q, bodies):
    return [rot @ body.com_m + pos for (rot, pos), body in zip(link_poses(comp, q), bodies)]


def statics_by_jacobian_transpose(comp, q, gravity=GRAVITY):
    """tau = -sum_k J_ck^T m_k g, with geometric body Jacobians."""
    bodies = build_inertial_model(comp)
    poses = link_poses(comp, q)
    coms = com_positions(comp, q, bodies)
    tau = np.zeros(comp.n)
    for k, body in enumerate(bodies):
        for i in range(k + 1):
            rot_i, pos_i = poses[i]
            z_i = rot_i[:, 2]
            tau[i] += -body.mass_kg * np.cross(z_i, coms[k] - pos_i) @ gravity
    return tau


def body_jacobians(comp, q, bodies, eps=1e-6):
    """Linear com Jacobians and angular Jacobians by central differences."""
    n = comp.n
    lin = [np.zeros((3, n)) for _ in bodies]
    ang = [np.zeros((3, n)) for _ in bodies]
    for j in range(n):
        dq = np.zeros(n)
        dq[j] = eps
        poses_plus = link_poses(comp, q + dq)
        poses_minus = link_poses(comp, q - dq)
        for k, body in enumerate(bodies):
            rot_p, pos_p = poses_plus[k]
            rot_m, pos_m = poses_minus[k]
            com_p = rot_p @ body.com_m + pos_p
            com_m = rot_m @ body.com_m + pos_m
            lin[k][:, j] = (com_p - com_m) / (2 * eps)
            omega = (rot_p - rot_m) / (2 * eps) @ ((rot_p + rot_m) / 2).T
            ang[k][:, j] = [omega[2, 1], omega[0, 2], omega[1, 0]]
    return lin, ang


def kinetic_energy(comp, q, qdot, bodies):
    lin, ang = body_jacobians(comp, q, bodies)
    poses = link_poses(comp, q)
    energy = 0.0
    for k, body in enumerate(bodies):
        v = lin[k] @ qdot
        w = ang[k] @ qdot
        rot, _ = poses[k]
        inertia_world = rot @ body.inertia_tensor @ rot.T
        energy += 0.5 * body.mass_kg * v @ v + 0.5 * w @ inertia_world @ w
    return energy


def potential_energy(comp, q, bodies, gravity=GRAVITY):
    return -sum(
        body.mass_kg * gravity @ com
        for body, com in zip(bodies, com_positions(comp, q, bodies))
    )


# ---------------------------------------------------------------------------
# Inertial model
# ---------------------------------------------------------------------------


def test_single_heavy_unit_mass():
    comp = Composition(name="one", units=(ModularUnit("H", "U1"),))
    bodies = build_inertial_model(comp)
    assert len(bodies) == 1
    assert bodies[0].mass_kg == pytest.approx(0.57)


def test_link_bearing_light_unit_mass():
    comp = Composition(name="one", units=(ModularUnit("L", "U4"),))
    bodies = build_inertial_model(comp)
    assert bodies[0].mass_kg == pytest.approx(0.357 + 0.15)


def test_zero_payload_leaves_last_body_alone(vertical_farm_3dof):
    import dataclasses

    without = build_inertial_model(vertical_farm_3dof)
    with_zero = build_inertial_model(dataclasses.replace(vertical_farm_3dof, payload_mass_kg=0.0))
    assert without[-1].mass_kg == with_zero[-1].mass_kg
    assert np.allclose(without[-1].com_m, with_zero[-1].com_m)


def test_payload_joins_last_body(vertical_farm_3dof):
    import dataclasses

    loaded = dataclasses.replace(vertical_farm_3dof, payload_mass_kg=0.5)
    bodies = build_inertial_model(loaded)
    plain = build_inertial_model(vertical_farm_3dof)
    assert bodies[-1].mass_kg == pytest.approx(plain[-1].mass_kg + 0.5)
    for a, b in zip(bodies[:-1], plain[:-1]):
        assert a.mass_kg == b.mass_kg
        assert np.array_equal(a.com_m, b.com_m)
        assert np.array_equal(a.inertia_tensor, b.inertia_tensor)


def test_inertia_tensors_are_physical(golden_compositions):
    for comp in golden_compositions.values():
        for body in build_inertial_model(comp):
            tensor = body.inertia_tensor
            assert np.allclose(tensor, tensor.T)
            eigenvalues = np.linalg.eigvalsh(tensor)
            assert np.all(eigenvalues > 0)
            # triangle inequality on the principal moments
            assert eigenvalues[0] + eigenvalues[1] >= eigenvalues[2] - 1e-15


# ---------------------------------------------------------------------------
# Inverse dynamics
# ---------------------------------------------------------------------------


def test_no_loads_no_torques(vertical_farm_3dof, rng):
    q = random_q(vertical_farm_3dof, rng)
    tau = inverse_dynamics(vertical_farm_3dof, q, np.zeros(3), np.zeros(3), gravity=(0, 0, 0))
    assert np.allclose(tau, 0.0, atol=1e-14)


def test_statics_match_jacobian_transpose(golden_compositions, rng):
    for comp in golden_compositions.values():
        zeros = np.zeros(comp.n)
        for _ in range(10):
            q = random_q(comp, rng)
            tau = inverse_dynamics(comp, q, zeros, zeros)
            oracle = statics_by_jacobian_transpose(comp, q)
            assert np.allclose(tau, oracle, atol=1e-8)


def test_dimension_mismatch(planar_2dof):
    with pytest.raises(DimensionMismatch):
        inverse_dynamics(planar_2dof, [0.0], [0.0], [0.0])


def test_mass_matrix_symmetric_positive_definite(golden_compositions, rng):
    checks = 0
    while checks < 100:
        for comp in golden_compositions.values():
            q = random_q(comp, rng)
            m = mass_matrix(comp, q)
            assert np.allclose(m, m.T, atol=1e-9)
            assert np.all(np.linalg.eigvalsh(m) > 0)
            checks += 1


def test_single_joint_mass_matrix_is_positive_scalar():
    comp = Composition(name="one", units=(ModularUnit("H", "U1"),))
    m = mass_matrix(comp, [0.4])
    assert m.shape == (1, 1)
    assert m[0, 0] > 0


def test_newton_euler_equals_mass_matrix_reconstruction(golden_compositions, rng):
    for comp in golden_compositions.values():
        for _ in range(5):
            q = random_q(comp, rng)
            qdot = rng.uniform(-1, 1, comp.n)
            qddot = rng.uniform(-1, 1, comp.n)
            tau = inverse_dynamics(comp, q, qdot, qddot)
            rebuilt = mass_matrix(comp, q) @ qddot + bias_forces(comp, q, qdot)
            scale = max(1.0, np.abs(tau).max())
            assert np.allclose(tau, rebuilt, atol=1e-9 * scale)


def test_mass_matrix_against_lagrangian_oracle(planar_2dof):
    bodies = build_inertial_model(planar_2dof)
    rng = np.random.default_rng(21)
    for _ in range(5):
        q = rng.uniform(-2.0, 2.0, 2)
        oracle = np.zeros((2, 2))
        for i in range(2):
            e_i = np.zeros(2)
            e_i[i] = 1.0
            oracle[i, i] = 2.0 * kinetic_energy(planar_2dof, q, e_i, bodies)
        for i in range(2):
            for j in range(i + 1, 2):
                e_i = np.zeros(2)
                e_j = np.zeros(2)
                e_i[i] = 1.0
                e_j[j] = 1.0
                t_sum = kinetic_energy(planar_2dof, q, e_i + e_j, bodies)
                oracle[i, j] = oracle[j, i] = (
                    t_sum
                    - kinetic_energy(planar_2dof, q, e_i, bodies)
                    - kinetic_energy(planar_2dof, q, e_j, bodies)
                )
        assert np.allclose(mass_matrix(planar_2dof, q), oracle, atol=1e-6)


def test_energy_balance(vertical_farm_3dof):
    comp = vertical_farm_3dof
    bodies = build_inertial_model(comp)
    amplitude = np.array([1.1, 0.8, -0.9])
    omega = np.array([1.3, 0.7, 1.9])
    phase = np.array([0.2, -0.5, 1.0])

    def q_of(t):
        return amplitude * np.sin(omega * t + phase)

    def qd_of(t):
        return amplitude * omega * np.cos(omega * t + phase)

    def qdd_of(t):
        return -amplitude * omega**2 * np.sin(omega * t + phase)

    def energy(t):
        return kinetic_energy(comp, q_of(t), qd_of(t), bodies) + potential_energy(comp, q_of(t), bodies)

    h = 1e-4
    for t in np.linspace(0.1, 2.0, 7):
        de_dt = (energy(t + h) - energy(t - h)) / (2 * h)
        tau = inverse_dynamics(comp, q_of(t), qd_of(t), qdd_of(t))
        power = qd_of(t) @ tau
        assert de_dt == pytest.approx(power, abs=1e-6)


def test_coriolis_skew_symmetry(golden_compositions, rng):
    dt = 1e-6
    for comp in golden_compositions.values():
        for _ in range(5):
            q = random_q(comp, rng)
            qdot = rng.uniform(-1, 1, comp.n)
            m_plus = mass_matrix(comp, q + 0.5 * dt * qdot)
            m_minus = mass_matrix(comp, q - 0.5 * dt * qdot)
            m_dot = (m_plus - m_minus) / dt
            coriolis = bias_forces(comp, q, qdot) - bias_forces(comp, q, np.zeros(comp.n))
            residual = qdot @ m_dot @ qdot - 2.0 * qdot @ coriolis
            assert abs(residual) <= 1e-6


# ---------------------------------------------------------------------------
# Feasibility
# ---------------------------------------------------------------------------


def test_no_gravity_all_ok(vertical_farm_3dof):
    report = feasibility_check(vertical_farm_3dof, q_grid_density=3, gravity=(0, 0, 0))
    assert all(j.tau_Nm == pytest.approx(0.0, abs=1e-12) for j in report.joints)
    assert report.all_nominal_ok and report.all_peak_ok


def test_limits_come_from_datasheet(vertical_farm_3dof):
    report = feasibility_check(vertical_farm_3dof, q_grid_density=3)
    assert report.joints[0].variant == "H"
    assert report.joints[0].tau_nom_limit_Nm == 12.0
    assert report.joints[0].tau_max_limit_Nm == 30.5
    assert report.joints[1].tau_nom_limit_Nm == 3.6
    assert report.joints[1].tau_max_limit_Nm == 6.8


def test_payload_monotonicity(vertical_farm_3dof):
    worst = None
    for payload in (0.0, 0.5, 1.0, 2.0):
        report = feasibility_check(vertical_farm_3dof, q_grid_density=3, payload_kg=payload)
        taus = np.array([j.tau_Nm for j in report.joints])
        if worst is not None:
            assert np.all(taus >= worst - 1e-12)
        worst = taus


def test_grid_subsampling_is_capped():
    units = tuple(
        ModularUnit("H" if i < 3 else "L", "U4") for i in range(6)
    )
    comp = Composition(name="six", units=units)
    report = feasibility_check(comp, q_grid_density=7, max_samples=500)
    assert report.samples == 500


def test_report_csv_shape(vertical_farm_3dof):
    report = torque_report_at(vertical_farm_3dof, np.zeros(3), payload_kg=0.3)
    text = report.to_csv()
    lines = text.strip().split("\n")
    assert lines[0] == "joint,tau_max_observed,tau_nom,tau_max,nominal_ok,peak_ok"
    assert len(lines) == 4


def test_density_must_be_positive(vertical_farm_3dof):
    with pytest.raises(ValueError):
        feasibility_check(vertical_farm_3dof, q_grid_density=0)
