import dataclasses

import pytest
from hypothesis import given, strategies as st

from modkin import OutOfRange, get_catalog, load_catalog, quantize_twist
from modkin.catalog import TwistQuantization


def test_actuator_specs_match_datasheet():
    cat = get_catalog()
    assert cat.H.mass_kg == 0.57
    assert cat.H.speed_rpm == 12.2
    assert cat.H.tau_nom_Nm == 12.0
    assert cat.H.tau_max_Nm == 30.5
    assert cat.H.epsilon == 3
    assert cat.L.mass_kg == 0.357
    assert cat.L.speed_rpm == 20.3
    assert cat.L.tau_nom_Nm == 3.6
    assert cat.L.tau_max_Nm == 6.8
    assert cat.L.epsilon == 3
    assert cat.H.tau_max_Nm > cat.H.tau_nom_Nm
    assert cat.L.tau_max_Nm > cat.L.tau_nom_Nm


def test_unit_geometry_constants():
    cat = get_catalog()
    expected = {
        "U1": (0.0, 0.074, 0.073, 0.0),
        "U2": (-0.0297, 0.075, 0.073, 0.0),
        "U3": (0.0, 0.074, 0.073, 0.22),
        "U4": (-0.0297, 0.075, 0.073, 0.22),
    }
    for kind, (x01, z01, z12, x23) in expected.items():
        geom = cat.unit_geometry(kind)
        assert geom.x01_m == x01
        assert geom.z01_m == z01
        assert geom.z12_m == z12
        assert geom.x23_m == x23
    assert cat.link_module.length_m == cat.unit_geometry("U3").x23_m


def test_twist_sets():
    quant = get_catalog().twist_quantization
    assert -45.0 in quant.twist2_allowed_deg
    assert 90.0 in quant.twist2_allowed_deg
    assert 105.0 not in quant.twist2_allowed_deg
    assert min(quant.twist2_allowed_deg) == -45.0
    assert max(quant.twist2_allowed_deg) == 90.0
    assert len(quant.twist1_allowed_deg) == 12
    assert all(m % 30 == 0 for m in quant.twist1_allowed_deg)
    assert all(m % 15 == 0 for m in quant.twist2_allowed_deg)


def test_catalog_is_singleton_and_immutable():
    assert get_catalog() is get_catalog()
    with pytest.raises(dataclasses.FrozenInstanceError):
        get_catalog().H.mass_kg = 1.0  # type: ignore[misc]


def test_quantize_examples():
    snapped, residual = quantize_twist(14.9, "twist2")
    assert snapped == 15.0
    assert residual == pytest.approx(-0.1)
    assert quantize_twist(0.0, "twist1") == (0.0, 0.0)
    # 135 is equidistant from 120 and 150; tie breaks to the smaller magnitude
    snapped, residual = quantize_twist(135.0, "twist1")
    assert snapped == 120.0
    assert residual == pytest.approx(15.0)


def test_quantize_twist1_wraps():
    snapped, residual = quantize_twist(350.0, "twist1")
    assert snapped == 0.0
    assert residual == pytest.approx(-10.0)
    snapped, residual = quantize_twist(-15.0, "twist1")
    assert snapped == 0.0
    assert residual == pytest.approx(-15.0)


def test_quantize_twist2_out_of_range():
    with pytest.raises(OutOfRange):
        quantize_twist(-90.0, "twist2")
    with pytest.raises(OutOfRange):
        quantize_twist(95.0, "twist2")
    quant = TwistQuantization(tolerance_deg=10.0)
    snapped, residual = quantize_twist(95.0, "twist2", quant)
    assert snapped == 90.0
    assert residual == pytest.approx(5.0)


def test_quantize_continuous_mode():
    quant = TwistQuantization(continuous=True)
    assert quantize_twist(37.3, "twist2", quant) == (37.3, 0.0)
    assert quantize_twist(-123.4, "twist1", quant) == (-123.4, 0.0)


def test_quantize_rejects_unknown_selector():
    with pytest.raises(ValueError):
        quantize_twist(0.0, "twist3")


@given(st.floats(min_value=-45.0, max_value=90.0))
def test_quantize_twist2_idempotent_and_bounded(angle):
    snapped, residual = quantize_twist(angle, "twist2")
    assert abs(residual) <= 7.5 + 1e-9
    again, residual2 = quantize_twist(snapped, "twist2")
    assert again == snapped
    assert residual2 == 0.0


@given(st.floats(min_value=-1000.0, max_value=1000.0))
def test_quantize_twist1_idempotent_and_bounded(angle):
    snapped, residual = quantize_twist(angle, "twist1")
    assert snapped in get_catalog().twist_quantization.twist1_allowed_deg
    assert abs(residual) <= 15.0 + 1e-9
    again, residual2 = quantize_twist(snapped, "twist1")
    assert again == snapped
    assert residual2 == 0.0


def test_load_catalog_overrides(tmp_path):
    path = tmp_path / "catalog.toml"
    path.write_text("[link_module]\nmass_kg = 0.2\n\n[twist_quantization]\ntolerance_deg = 5.0\n")
    cat = load_catalog(str(path))
    assert cat.link_module.mass_kg == 0.2
    assert cat.link_module.length_m == 0.22
    assert cat.twist_quantization.tolerance_deg == 5.0
    assert cat.H == get_catalog().H


def test_load_catalog_rejects_unknown_fields(tmp_path):
    from modkin import ParseError

    path = tmp_path / "catalog.toml"
    path.write_text("[link_module]\nbogus = 1\n")
    with pytest.raises(ParseError):
        load_catalog(str(path))


def test_catalog_from_env(tmp_path, monkeypatch):
    from modkin.catalog import catalog_from_env

    path = tmp_path / "catalog.toml"
    path.write_text("[link_module]\nradius_m = 0.05\n")
    monkeypatch.setenv("MODKIN_CATALOG", str(path))
    assert catalog_from_env().link_module.radius_m == 0.05
    monkeypatch.delenv("MODKIN_CATALOG")
    assert catalog_from_env() is get_catalog()
