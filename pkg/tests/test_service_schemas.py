"""Every service response must validate against its checked-in schema fixture."""

import json
import math
from pathlib import Path

import jsonschema
import pytest
from fastapi.testclient import TestClient

from modkin.composition import composition_to_dict
from modkin.service import create_app

SCHEMA_DIR = Path(__file__).parent / "schemas"


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(), raise_server_exceptions=False)


def check(name: str, payload: dict):
    schema = json.loads((SCHEMA_DIR / f"{name}.json").read_text())
    jsonschema.validate(payload, schema)


def test_catalog_schema(client):
    check("catalog", client.get("/catalog").json())


def test_validate_schema(client, vertical_farm_3dof, wrist_3dof):
    for comp in (vertical_farm_3dof, wrist_3dof):
        response = client.post("/validate", json={"composition": composition_to_dict(comp)})
        check("validate", response.json())


def test_fk_schema(client, vertical_farm_3dof):
    body = {"composition": composition_to_dict(vertical_farm_3dof), "q": [0.1, 0.2, 0.3]}
    check("fk", client.post("/fk", json=body).json())


def test_ik_schema(client, vertical_farm_3dof):
    body = {
        "composition": composition_to_dict(vertical_farm_3dof),
        "target_pose": {"xyz_m": [0.3, 0.0, 0.3]},
        "opts": {"max_iters": 50, "restarts": 1},
    }
    check("ik", client.post("/ik", json=body).json())


def test_convert_schema(client):
    rows = [
        {"a_m": 0.0, "alpha_rad": -math.pi / 2, "d_m": 0.148},
        {"a_m": 0.3, "alpha_rad": 2.36, "d_m": 0.0},
        {"a_m": 0.0, "alpha_rad": 0.0, "d_m": 0.075},
    ]
    check("convert", client.post("/convert", json={"dh_table": {"rows": rows}}).json())


def test_torques_schema(client, vertical_farm_3dof):
    comp = composition_to_dict(vertical_farm_3dof)
    check("torques", client.post("/torques", json={"composition": comp, "q": [0, 0.5, 1.0]}).json())
    check(
        "torques",
        client.post("/torques", json={"composition": comp, "payload_kg": 0.2, "q_grid_density": 3}).json(),
    )


def test_workspace_schema(client, vertical_farm_3dof):
    body = {"composition": composition_to_dict(vertical_farm_3dof), "samples": 10, "seed": 0}
    check("workspace", client.post("/workspace", json=body).json())


def test_urdf_schema(client, vertical_farm_3dof):
    body = {"composition": composition_to_dict(vertical_farm_3dof)}
    check("urdf", client.post("/urdf", json=body).json())


def test_error_schemas(client, vertical_farm_3dof, wrist_3dof):
    comp = composition_to_dict(vertical_farm_3dof)
    bad_q = client.post("/fk", json={"composition": comp, "q": [0.0]})
    assert bad_q.status_code == 422
    check("error", bad_q.json())

    missing = client.post("/fk", json={"q": [0.0]})
    assert missing.status_code == 400
    check("error", missing.json())

    invalid = client.post("/urdf", json={"composition": composition_to_dict(wrist_3dof)})
    assert invalid.status_code == 422
    check("error", invalid.json())
