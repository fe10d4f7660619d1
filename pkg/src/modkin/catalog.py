"""Static module library: actuator variants, unit geometry, twist quantization.

All numbers here are the fixed properties of the two joint-module variants
(heavy and light), the passive link module, and the four modular-unit
geometries. They are constants of the hardware family, not tunables; the
only configurable pieces are the link-module inertial defaults and the
quantization tolerance, which can be overridden from a catalog file.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping

from .errors import OutOfRange, ParseError

VARIANTS = ("H", "L")
UNIT_KINDS = ("U1", "U2", "U3", "U4")


@dataclass(frozen=True)
class ActuatorSpec:
    variant: str
    mass_kg: float
    speed_rpm: float
    tau_nom_Nm: float
    tau_max_Nm: float
    epsilon: int

    @property
    def speed_rad_s(self) -> float:
        return self.speed_rpm * 2.0 * 3.141592653589793 / 60.0


@dataclass(frozen=True)
class UnitGeometry:
    kind: str
    x01_m: float
    z01_m: float
    z12_m: float
    x23_m: float

    @property
    def has_link_module(self) -> bool:
        return self.x23_m != 0.0


@dataclass(frozen=True)
class LinkModuleSpec:
    # Mass and radius are modeling defaults, not measured hardware data.
    length_m: float = 0.22
    mass_kg: float = 0.15
    radius_m: float = 0.03


@dataclass(frozen=True)
class TwistQuantization:
    """Allowed twist sets: 30 deg port holes (twist1), 15 deg pivot slot (twist2)."""

    twist1_allowed_deg: tuple[float, ...] = tuple(float(a) for a in range(0, 360, 30))
    twist2_allowed_deg: tuple[float, ...] = tuple(float(a) for a in range(-45, 91, 15))
    tolerance_deg: float = 0.0
    continuous: bool = False


@dataclass(frozen=True)
class Catalog:
    H: ActuatorSpec
    L: ActuatorSpec
    unit_geometries: Mapping[str, UnitGeometry]
    link_module: LinkModuleSpec
    twist_quantization: TwistQuantization

    def actuator(self, variant: str) -> ActuatorSpec:
        if variant == "H":
            return self.H
        if variant == "L":
            return self.L
        raise KeyError(f"unknown actuator variant {variant!r}")

    def unit_geometry(self, kind: str) -> UnitGeometry:
        try:
            return self.unit_geometries[kind]
        except KeyError:
            raise KeyError(f"unknown unit kind {kind!r}") from None


_DEFAULT_CATALOG = Catalog(
    H=ActuatorSpec(variant="H", mass_kg=0.57, speed_rpm=12.2, tau_nom_Nm=12.0, tau_max_Nm=30.5, epsilon=3),
    L=ActuatorSpec(variant="L", mass_kg=0.357, speed_rpm=20.3, tau_nom_Nm=3.6, tau_max_Nm=6.8, epsilon=3),
    unit_geometries=MappingProxyType(
        {
            "U1": UnitGeometry(kind="U1", x01_m=0.0, z01_m=0.074, z12_m=0.073, x23_m=0.0),
            "U2": UnitGeometry(kind="U2", x01_m=-0.0297, z01_m=0.075, z12_m=0.073, x23_m=0.0),
            "U3": UnitGeometry(kind="U3", x01_m=0.0, z01_m=0.074, z12_m=0.073, x23_m=0.22),
            "U4": UnitGeometry(kind="U4", x01_m=-0.0297, z01_m=0.075, z12_m=0.073, x23_m=0.22),
        }
    ),
    link_module=LinkModuleSpec(),
    twist_quantization=TwistQuantization(),
)

ENV_CATALOG_VAR = "MODKIN_CATALOG"


def get_catalog() -> Catalog:
    """The built-in module library. Immutable; repeated calls return the same object."""
    return _DEFAULT_CATALOG


def load_catalog(path: str) -> Catalog:
    """Catalog with overrides from a TOML file layered over the defaults.

    Only the configurable pieces may be overridden: ``[link_module]``
    (length_m/mass_kg/radius_m) and ``[twist_quantization]``
    (tolerance_deg/continuous). Actuator and geometry constants are fixed.
    """
    try:
        import tomllib  # type: ignore[import-not-found]
    except ModuleNotFoundError:
        import tomli as tomllib

    try:
        with open(path, "rb") as fp:
            data = tomllib.load(fp)
    except OSError as exc:
        raise ParseError(f"cannot read catalog file {path!r}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"invalid catalog file {path!r}: {exc}") from exc

    catalog = get_catalog()
    link_overrides = data.get("link_module", {})
    if link_overrides:
        unknown = set(link_overrides) - {"length_m", "mass_kg", "radius_m"}
        if unknown:
            raise ParseError(f"unknown link_module fields: {sorted(unknown)}", field="link_module")
        catalog = replace(catalog, link_module=replace(catalog.link_module, **link_overrides))
    quant_overrides = data.get("twist_quantization", {})
    if quant_overrides:
        unknown = set(quant_overrides) - {"tolerance_deg", "continuous"}
        if unknown:
            raise ParseError(
                f"unknown twist_quantization fields: {sorted(unknown)}", field="twist_quantization"
            )
        catalog = replace(
            catalog, twist_quantization=replace(catalog.twist_quantization, **quant_overrides)
        )
    return catalog


def catalog_from_env() -> Catalog:
    path = os.environ.get(ENV_CATALOG_VAR)
    if path:
        return load_catalog(path)
    return get_catalog()


def _wrap_deg(angle: float) -> float:
    """Wrap to (-180, 180]."""
    wrapped = (angle + 180.0) % 360.0 - 180.0
    if wrapped == -180.0:
        return 180.0
    return wrapped


def quantize_twist(
    angle_deg: float,
    which: str,
    quant: TwistQuantization | None = None,
) -> tuple[float, float]:
    """Snap an angle to the allowed twist set; returns (snapped, residual).

    ``residual = angle - snapped`` (shortest signed arc for the circular
    twist1 set). Ties between two equally distant members break toward the
    member with the smaller magnitude.
    """
    quant = quant or get_catalog().twist_quantization
    if quant.continuous:
        return (angle_deg, 0.0)
    if which == "twist1":
        # The 12 port holes repeat every 360 deg: compare on the circle.
        best = min(
            quant.twist1_allowed_deg,
            key=lambda member: (abs(_wrap_deg(angle_deg - member)), abs(member)),
        )
        return (best, _wrap_deg(angle_deg - best))
    if which == "twist2":
        lo = min(quant.twist2_allowed_deg) - quant.tolerance_deg
        hi = max(quant.twist2_allowed_deg) + quant.tolerance_deg
        if angle_deg < lo or angle_deg > hi:
            raise OutOfRange(
                f"twist2 angle {angle_deg:g} deg outside the slot range "
                f"[{lo:g}, {hi:g}] deg"
            )
        best = min(
            quant.twist2_allowed_deg,
            key=lambda member: (abs(angle_deg - member), abs(member)),
        )
        return (best, angle_deg - best)
    raise ValueError(f"which must be 'twist1' or 'twist2', got {which!r}")
