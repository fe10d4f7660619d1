import itertools
import math

import numpy as np
import pytest

from modkin import (
    DHRow,
    DHTable,
    DimensionMismatch,
    ParseError,
    Unconvertible,
    convert,
    dh_forward_kinematics,
    parse_dh_csv,
    validate,
)
from modkin.dh import (
    RULE_LINK,
    RULE_LINK_TWIST,
    RULE_OFFSET,
    RULE_PIVOT_TWIST,
    RULE_PLAIN,
    RULE_UNCONVERTIBLE,
    ConvertOptions,
    classify_dh_row,
    conversion_report_text,
)

PI = math.pi


def example_a_table():
    return DHTable(
        rows=(
            DHRow(0.0, -PI / 2, 0.148),
            DHRow(0.3, 0.26, 0.0),
            DHRow(0.3, 0.0, 0.0),
            DHRow(0.3, 0.26, 0.0),
            DHRow(0.3, PI / 2, 0.0),
            DHRow(0.0, 0.0, 0.075),
        )
    )


def example_b_table():
    return DHTable(
        rows=(
            DHRow(0.0, -PI / 2, 0.148),
            DHRow(0.3, 2.36, 0.0),
            DHRow(0.3, 2.36, 0.0),
            DHRow(0.0, -PI / 2, 0.148),
            DHRow(0.0, -PI / 2, 0.148),
            DHRow(0.0, 0.0, 0.075),
        )
    )


# ---------------------------------------------------------------------------
# Reference DH forward kinematics
# ---------------------------------------------------------------------------


def test_dh_fk_identity_row():
    table = DHTable(rows=(DHRow(0.0, 0.0, 0.0),))
    pose = dh_forward_kinematics(table, [0.0])
    assert np.allclose(pose.as_matrix(), np.eye(4))


def test_dh_fk_pure_link():
    table = DHTable(rows=(DHRow(0.37, 0.0, 0.0),))
    pose = dh_forward_kinematics(table, [0.0])
    assert np.allclose(pose.translation, [0.37, 0.0, 0.0])
    assert np.allclose(pose.rotation, np.eye(3))


def test_dh_fk_wrist_rotation_only():
    # Three zero-length rows: any q gives pure rotation.
    table = DHTable(rows=(DHRow(0, -PI / 2, 0), DHRow(0, PI / 2, 0), DHRow(0, 0, 0)))
    pose = dh_forward_kinematics(table, [0.0, 0.0, 0.0])
    assert np.allclose(pose.translation, 0.0, atol=1e-15)
    pose = dh_forward_kinematics(table, [0.4, -1.0, 2.2])
    assert np.allclose(pose.translation, 0.0, atol=1e-15)
    assert pose.is_orthonormal()


def test_dh_fk_classic_convention():
    # Rz(theta) Tz(d) Tx(a) Rx(alpha), checked entry-wise on one row.
    a, alpha, d, theta = 0.2, 0.3, 0.4, 0.5
    table = DHTable(rows=(DHRow(a, alpha, d, theta_offset_rad=0.0),))
    pose = dh_forward_kinematics(table, [theta])
    ct, st = math.cos(theta), math.sin(theta)
    ca, sa = math.cos(alpha), math.sin(alpha)
    expected = np.array(
        [
            [ct, -st * ca, st * sa, a * ct],
            [st, ct * ca, -ct * sa, a * st],
            [0, sa, ca, d],
            [0, 0, 0, 1],
        ]
    )
    assert np.allclose(pose.as_matrix(), expected, atol=1e-15)


def test_dh_fk_dimension_mismatch():
    table = DHTable(rows=(DHRow(0.0, 0.0, 0.0),))
    with pytest.raises(DimensionMismatch):
        dh_forward_kinematics(table, [0.0, 0.0])


# ---------------------------------------------------------------------------
# CSV parsing
# ---------------------------------------------------------------------------


def test_parse_single_row():
    table = parse_dh_csv("a,alpha,d,theta\n0,-1.5708,0.148,0\n")
    assert table.n == 1
    row = table.rows[0]
    assert row.a_m == 0.0
    assert row.alpha_rad == pytest.approx(-PI / 2, abs=1e-4)
    assert row.d_m == 0.148
    assert row.theta_offset_rad == 0.0


def test_parse_empty_is_error():
    with pytest.raises(ParseError):
        parse_dh_csv("")
    with pytest.raises(ParseError):
        parse_dh_csv("a,alpha,d,theta\n")


def test_parse_degree_annotations():
    table = parse_dh_csv("a,alpha_deg,d,theta_deg\n0,90,0.1,0\n")
    assert table.rows[0].alpha_rad == pytest.approx(PI / 2)
    assert table.angle_unit_in_source == "deg"
    table = parse_dh_csv("a,alpha,d,theta\n0,90,0.1,0\n", degrees=True)
    assert table.rows[0].alpha_rad == pytest.approx(PI / 2)


def test_parse_reports_position():
    with pytest.raises(ParseError) as exc_info:
        parse_dh_csv("a,alpha,d,theta\n0,zzz,0,0\n")
    assert "line 2" in str(exc_info.value)
    with pytest.raises(ParseError):
        parse_dh_csv("a,alpha,d\n0,0,0\n")
    with pytest.raises(ParseError):
        parse_dh_csv("a,alpha,d,bogus\n0,0,0,0\n")


# ---------------------------------------------------------------------------
# Rule classification
# ---------------------------------------------------------------------------


def test_rule_lattice_is_total():
    expected = {
        (False, False, False): RULE_PLAIN,
        (False, False, True): RULE_OFFSET,
        (False, True, False): RULE_PIVOT_TWIST,
        (False, True, True): RULE_PIVOT_TWIST,
        (True, False, False): RULE_LINK,
        (True, False, True): RULE_UNCONVERTIBLE,
        (True, True, False): RULE_LINK_TWIST,
        (True, True, True): RULE_UNCONVERTIBLE,
    }
    for has_a, has_alpha, has_d in itertools.product((False, True), repeat=3):
        row = DHRow(
            a_m=0.25 if has_a else 0.0,
            alpha_rad=0.5 if has_alpha else 0.0,
            d_m=0.1 if has_d else 0.0,
        )
        assert classify_dh_row(row) == expected[(has_a, has_alpha, has_d)]


def test_both_lengths_is_unconvertible():
    table = DHTable(rows=(DHRow(0.2, 0.0, 0.3),))
    with pytest.raises(Unconvertible) as exc_info:
        convert(table)
    assert "row 1" in str(exc_info.value)


def test_too_many_joints_unconvertible():
    table = DHTable(rows=tuple(DHRow(0.0, 0.0, 0.1) for _ in range(7)))
    with pytest.raises(Unconvertible):
        convert(table)


# ---------------------------------------------------------------------------
# Golden conversions
# ---------------------------------------------------------------------------


def test_example_b_sequence():
    result = convert(example_b_table())
    assert result.sequence == "H1-H4-H4-L2-L2-L2"


def test_example_a_sequence_rule_based():
    result = convert(example_a_table())
    assert result.sequence == "H1-H4-H4-L4-L4-L2"
    # row 4 has a = 0.3, so the rules emit a link-bearing unit there
    note = result.per_row_notes[3]
    assert note.rule == RULE_LINK_TWIST
    assert note.unit_code in ("L3", "L4")


def test_twist_clamping_recorded():
    result = convert(example_b_table())
    clamped = [n for n in result.per_row_notes if n.twist_clamped]
    assert [n.row for n in clamped] == [1, 4, 5]
    for note in clamped:
        assert note.quant_residual_deg == pytest.approx(-45.0)
        assert "clamped" in note.detail


def test_conversion_output_validates():
    for table in (example_a_table(), example_b_table()):
        result = convert(table)
        assert validate(result.composition).ok


def test_random_tables_validate(rng):
    # Structural soundness over random convertible tables, default options.
    for _ in range(30):
        n = int(rng.integers(1, 7))
        rows = []
        for _ in range(n):
            shape = rng.integers(0, 4)
            a = 0.3 if shape in (1, 3) else 0.0
            d = 0.12 if shape == 2 else 0.0
            alpha = float(rng.uniform(-1.2, 1.2)) if shape in (0, 3) else 0.0
            rows.append(DHRow(a, alpha, d))
        result = convert(DHTable(rows=tuple(rows)))
        assert validate(result.composition).ok, result.sequence


def test_determinism():
    table = example_a_table()
    first = convert(table)
    second = convert(table)
    assert first.sequence == second.sequence
    assert first.fidelity == second.fidelity
    assert first.per_row_notes == second.per_row_notes


def test_port_heuristic_first_joint_and_first_offset():
    result = convert(example_b_table())
    ports = [n.port for n in result.per_row_notes]
    assert ports == [1, 2, 2, 2, 2, 2]
    # a table whose first d != 0 row is not the first joint
    table = DHTable(rows=(DHRow(0.3, 0.0, 0.0), DHRow(0.0, 0.0, 0.148), DHRow(0.0, 0.0, 0.148)))
    ports = [n.port for n in convert(table).per_row_notes]
    assert ports == [1, 1, 2]


def test_port_override():
    table = DHTable(rows=(DHRow(0.0, 0.0, 0.147), DHRow(0.0, 0.0, 0.147)))
    result = convert(table, ConvertOptions(port_overrides=((2, 1),)))
    assert result.sequence == "H1-L1"


def test_h_count_override():
    table = DHTable(rows=(DHRow(0, -PI / 2, 0), DHRow(0, PI / 2, 0), DHRow(0, 0, 0)))
    assert convert(table).sequence == "H1-H2-L2"
    assert convert(table, ConvertOptions(h_count=0)).sequence == "L1-L2-L2"
    with pytest.raises(Unconvertible):
        convert(table, ConvertOptions(h_count=5))


def test_exact_chain_has_tiny_fidelity():
    # Rows of the form (0, 0, 0.147) are exactly realizable on port-1 units.
    rows = tuple(DHRow(0.0, 0.0, 0.147) for _ in range(3))
    table = DHTable(rows=rows)
    result = convert(table, ConvertOptions(port_overrides=((2, 1), (3, 1))))
    assert result.sequence == "H1-H1-L1"
    assert all(note.exact for note in result.per_row_notes)
    assert result.fidelity <= 1e-9


def test_inexact_rows_leave_residuals():
    # Every approximation source must surface in the per-row bookkeeping.
    result = convert(DHTable(rows=(DHRow(0.0, 0.0, 0.2),)))
    assert result.per_row_notes[0].length_residual_m == pytest.approx(abs(0.2 - 0.147))
    result = convert(DHTable(rows=(DHRow(0.0, math.radians(30.0), 0.147),)))
    note = result.per_row_notes[0]
    assert note.quant_residual_deg == pytest.approx(0.0)
    assert note.axis_gap_deg > 1.0  # pivot acts about y, DH twist about x
    result = convert(DHTable(rows=(DHRow(0.0, 0.0, 0.147, theta_offset_rad=0.5),)))
    assert result.per_row_notes[0].theta_offset_deg == pytest.approx(math.degrees(0.5))
    assert not result.per_row_notes[0].exact


def test_fidelity_measures_pose_deviation():
    from modkin.kinematics import forward_kinematics
    from modkin.transform import pose_distance

    table = example_b_table()
    result = convert(table, ConvertOptions(fidelity_samples=64))
    rng = np.random.default_rng(0)
    limits = result.composition.joint_limits_rad()
    observed = 0.0
    for _ in range(64):
        q = rng.uniform(limits[:, 0], limits[:, 1])
        observed = max(
            observed,
            pose_distance(
                dh_forward_kinematics(table, q),
                forward_kinematics(result.composition, q).end_effector,
            ),
        )
    assert result.fidelity == pytest.approx(observed, rel=0.5)
    assert result.fidelity > 0.1  # example B is far from exactly realizable


def test_continuous_twists_keep_angles():
    table = DHTable(rows=(DHRow(0.3, 0.26, 0.0),))
    result = convert(table, ConvertOptions(continuous_twists=True))
    assert result.composition.units[0].twist1_deg == pytest.approx(math.degrees(0.26))
    assert result.per_row_notes[0].quant_residual_deg == 0.0


def test_report_text_mentions_each_row():
    result = convert(example_a_table())
    text = conversion_report_text(result)
    assert "sequence: H1-H4-H4-L4-L4-L2" in text
    for i in range(1, 7):
        assert f"row {i}:" in text
