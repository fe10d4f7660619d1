"""Modular compositions: ordered unit sequences plus their assembly rules.

A composition is the central artifact: an ordered list of modular units
(variant H/L, kind U1..U4, twist settings) together with a base pose and an
optional payload. Validation checks the physical assembly rules; violations
are reported as data, never raised.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import UNIT_KINDS, VARIANTS, Catalog, get_catalog, quantize_twist
from .errors import ParseError, ValidationError
from .transform import Transform

FORMAT_VERSION = "modkin-composition/1"

DEFAULT_JOINT_LIMITS_DEG = (-170.0, 170.0)


@dataclass(frozen=True)
class ModularUnit:
    variant: str
    kind: str
    twist1_deg: float = 0.0
    twist2_deg: float = 0.0
    joint_limits_deg: tuple[float, float] = DEFAULT_JOINT_LIMITS_DEG
    label: str = ""

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.kind not in UNIT_KINDS:
            raise ValueError(f"kind must be one of {UNIT_KINDS}, got {self.kind!r}")
        object.__setattr__(self, "joint_limits_deg", tuple(float(v) for v in self.joint_limits_deg))

    @property
    def code(self) -> str:
        """Short label like "H1" or "L4"."""
        return f"{self.variant}{self.kind[1]}"


@dataclass(frozen=True)
class Composition:
    name: str
    units: tuple[ModularUnit, ...]
    base_pose: Transform = field(default_factory=Transform.identity)
    payload_mass_kg: float = 0.0
    payload_offset_m: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        offset = np.array(self.payload_offset_m, dtype=float).reshape(3)
        offset.flags.writeable = False
        object.__setattr__(self, "payload_offset_m", offset)

    @property
    def n(self) -> int:
        return len(self.units)

    def joint_limits_rad(self) -> np.ndarray:
        """(n, 2) lower/upper joint limits in radians."""
        return np.array(
            [[math.radians(u.joint_limits_deg[0]), math.radians(u.joint_limits_deg[1])] for u in self.units]
        )


@dataclass(frozen=True)
class Violation:
    rule: str
    unit_index: int | None
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]


def validate(
    comp: Composition,
    catalog: Catalog | None = None,
    *,
    strict_epsilon: bool = False,
) -> ValidationReport:
    """Check the assembly rules; violations are data, not exceptions.

    Rules: the chain starts with an H module and (for n >= 2) ends with an
    L module; an L module never carries an H module; per-variant counts stay
    within the epsilon load limits (with ``strict_epsilon`` the limit applies
    to the same-variant units distal to each module instead of the totals);
    twists must sit on the quantization sets unless the catalog is in
    continuous mode; joint limits must be ordered.
    """
    catalog = catalog or get_catalog()
    quant = catalog.twist_quantization
    violations: list[Violation] = []

    if comp.n == 0:
        violations.append(Violation("empty-composition", None, "composition has no units"))
        return ValidationReport(ok=False, violations=tuple(violations))

    if comp.units[0].variant != "H":
        violations.append(
            Violation("base-must-be-H", 0, f"unit 1 is {comp.units[0].variant}, the base module must be H")
        )
    if comp.n >= 2 and comp.units[-1].variant != "L":
        violations.append(
            Violation(
                "tip-must-be-L",
                comp.n - 1,
                f"unit {comp.n} is {comp.units[-1].variant}, the tip module must be L",
            )
        )

    seen_l = False
    for i, unit in enumerate(comp.units):
        if unit.variant == "L":
            seen_l = True
        elif seen_l:
            violations.append(
                Violation("no-L-before-H", i, f"unit {i + 1} is H but follows an L module")
            )

    for variant in VARIANTS:
        eps = catalog.actuator(variant).epsilon
        if strict_epsilon:
            for i, unit in enumerate(comp.units):
                distal = sum(1 for u in comp.units[i + 1 :] if u.variant == variant)
                if unit.variant == variant and distal > eps:
                    violations.append(
                        Violation(
                            f"epsilon-{variant}-exceeded",
                            i,
                            f"unit {i + 1} carries {distal} {variant} modules, limit is {eps}",
                        )
                    )
        else:
            count = sum(1 for u in comp.units if u.variant == variant)
            if count > eps:
                violations.append(
                    Violation(
                        f"epsilon-{variant}-exceeded",
                        None,
                        f"{count} {variant} modules exceed the carrying limit of {eps}",
                    )
                )

    for i, unit in enumerate(comp.units):
        lower, upper = unit.joint_limits_deg
        if not lower < upper:
            violations.append(
                Violation("joint-limits-order", i, f"unit {i + 1} joint limits {lower} >= {upper}")
            )
        if not quant.continuous:
            try:
                _, res1 = quantize_twist(unit.twist1_deg, "twist1", quant)
            except Exception:
                res1 = math.inf
            if abs(res1) > 1e-9:
                violations.append(
                    Violation(
                        "twist1-off-grid",
                        i,
                        f"unit {i + 1} twist1 {unit.twist1_deg:g} deg is not on the 30 deg port grid",
                    )
                )
            try:
                _, res2 = quantize_twist(unit.twist2_deg, "twist2", quant)
            except Exception:
                res2 = math.inf
            if abs(res2) > 1e-9:
                violations.append(
                    Violation(
                        "twist2-off-grid",
                        i,
                        f"unit {i + 1} twist2 {unit.twist2_deg:g} deg is not on the 15 deg slot grid",
                    )
                )

    return ValidationReport(ok=not violations, violations=tuple(violations))


def unit_sequence_string(comp: Composition) -> str:
    """Hyphen-joined unit codes, e.g. "H1-H4-L4". Empty composition gives ""."""
    return "-".join(unit.code for unit in comp.units)


# ---------------------------------------------------------------------------
# Serialization. The file format is TOML with a fixed canonical layout; the
# same nested-dict structure is used verbatim as the JSON wire form of a
# composition in the HTTP API.
# ---------------------------------------------------------------------------


def composition_to_dict(comp: Composition) -> dict:
    rpy = comp.base_pose.rpy()
    return {
        "version": FORMAT_VERSION,
        "name": comp.name,
        "base_pose": {
            "xyz_m": [float(v) for v in comp.base_pose.translation],
            # Rounded to absorb ulp dither in the matrix -> rpy extraction so
            # that save(load(text)) reproduces canonical text byte for byte.
            "rpy_deg": [round(math.degrees(v), 12) for v in rpy],
        },
        "payload": {
            "mass_kg": float(comp.payload_mass_kg),
            "offset_m": [float(v) for v in comp.payload_offset_m],
        },
        "units": [
            {
                "variant": u.variant,
                "kind": u.kind,
                "twist1_deg": float(u.twist1_deg),
                "twist2_deg": float(u.twist2_deg),
                "joint_limits_deg": [float(u.joint_limits_deg[0]), float(u.joint_limits_deg[1])],
                "label": u.label,
            }
            for u in comp.units
        ],
    }


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ParseError(f"missing required field in {context}", field=key)
    return mapping[key]


def _number(value, context: str, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{context}: expected a number, got {type(value).__name__}", field=key)
    return float(value)


def _vector3(value, context: str, key: str) -> list[float]:
    if not isinstance(value, (list, tuple)) or len(value) != 3:
        raise ParseError(f"{context}: expected a 3-element list", field=key)
    return [_number(v, context, key) for v in value]


def composition_from_dict(data: dict) -> Composition:
    if not isinstance(data, dict):
        raise ParseError("composition document must be a table/object")
    version = data.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format version {version!r}", field="version")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise ParseError("name must be a string", field="name")

    base = data.get("base_pose", {})
    if not isinstance(base, dict):
        raise ParseError("base_pose must be a table", field="base_pose")
    xyz = _vector3(base.get("xyz_m", [0.0, 0.0, 0.0]), "base_pose", "xyz_m")
    rpy_deg = _vector3(base.get("rpy_deg", [0.0, 0.0, 0.0]), "base_pose", "rpy_deg")
    base_pose = Transform.from_rpy(xyz, [math.radians(v) for v in rpy_deg])

    payload = data.get("payload", {})
    if not isinstance(payload, dict):
        raise ParseError("payload must be a table", field="payload")
    payload_mass = _number(payload.get("mass_kg", 0.0), "payload", "mass_kg")
    if payload_mass < 0:
        raise ParseError("payload mass_kg must be >= 0", field="mass_kg")
    payload_offset = _vector3(payload.get("offset_m", [0.0, 0.0, 0.0]), "payload", "offset_m")

    raw_units = data.get("units")
    if raw_units is None:
        raise ParseError("missing required field", field="units")
    if not isinstance(raw_units, list):
        raise ParseError("units must be an array of tables", field="units")

    units = []
    for idx, raw in enumerate(raw_units):
        context = f"units[{idx}]"
        if not isinstance(raw, dict):
            raise ParseError(f"{context}: expected a table", field="units")
        variant = _require(raw, "variant", context)
        kind = _require(raw, "kind", context)
        if variant not in VARIANTS:
            raise ParseError(f"{context}: variant must be H or L, got {variant!r}", field="variant")
        if kind not in UNIT_KINDS:
            raise ParseError(f"{context}: kind must be one of {UNIT_KINDS}, got {kind!r}", field="kind")
        limits = raw.get("joint_limits_deg", list(DEFAULT_JOINT_LIMITS_DEG))
        if not isinstance(limits, (list, tuple)) or len(limits) != 2:
            raise ParseError(f"{context}: joint_limits_deg must be [lower, upper]", field="joint_limits_deg")
        label = raw.get("label", "")
        if not isinstance(label, str):
            raise ParseError(f"{context}: label must be a string", field="label")
        units.append(
            ModularUnit(
                variant=variant,
                kind=kind,
                twist1_deg=_number(raw.get("twist1_deg", 0.0), context, "twist1_deg"),
                twist2_deg=_number(raw.get("twist2_deg", 0.0), context, "twist2_deg"),
                joint_limits_deg=(
                    _number(limits[0], context, "joint_limits_deg"),
                    _number(limits[1], context, "joint_limits_deg"),
                ),
                label=label,
            )
        )

    if not units:
        raise ValidationError("a composition needs at least one unit")

    return Composition(
        name=name,
        units=tuple(units),
        base_pose=base_pose,
        payload_mass_kg=payload_mass,
        payload_offset_m=np.array(payload_offset),
    )


def _toml_value(value) -> str:
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, list):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def save_composition(comp: Composition) -> str:
    """Canonical TOML text for a composition."""
    doc = composition_to_dict(comp)
    lines = [
        f"version = {_toml_value(doc['version'])}",
        f"name = {_toml_value(doc['name'])}",
        "",
        "[base_pose]",
        f"xyz_m = {_toml_value(doc['base_pose']['xyz_m'])}",
        f"rpy_deg = {_toml_value(doc['base_pose']['rpy_deg'])}",
        "",
        "[payload]",
        f"mass_kg = {_toml_value(doc['payload']['mass_kg'])}",
        f"offset_m = {_toml_value(doc['payload']['offset_m'])}",
    ]
    for unit in doc["units"]:
        lines += [
            "",
            "[[units]]",
            f"variant = {_toml_value(unit['variant'])}",
            f"kind = {_toml_value(unit['kind'])}",
            f"twist1_deg = {_toml_value(unit['twist1_deg'])}",
            f"twist2_deg = {_toml_value(unit['twist2_deg'])}",
            f"joint_limits_deg = {_toml_value(unit['joint_limits_deg'])}",
            f"label = {_toml_value(unit['label'])}",
        ]
    return "\n".join(lines) + "\n"


def load_composition(document: str) -> Composition:
    """Parse composition TOML text; raises ParseError / ValidationError."""
    try:
        import tomllib  # type: ignore[import-not-found]
    except ModuleNotFoundError:
        import tomli as tomllib

    try:
        data = tomllib.loads(document)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML: {exc}") from exc
    return composition_from_dict(data)
