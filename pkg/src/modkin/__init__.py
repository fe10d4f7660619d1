"""modkin: modeling toolkit for modular reconfigurable serial manipulators.

Compose H/L joint modules and link modules into n-DoF chains, compute
kinematics and joint torques, convert DH tables into modular-unit
sequences, and emit URDF robot descriptions.
"""

__version__ = "0.1.0"

from .catalog import (
    ActuatorSpec,
    Catalog,
    LinkModuleSpec,
    TwistQuantization,
    UnitGeometry,
    get_catalog,
    load_catalog,
    quantize_twist,
)
from .composition import (
    Composition,
    ModularUnit,
    ValidationReport,
    Violation,
    load_composition,
    save_composition,
    unit_sequence_string,
    validate,
)
from .dh import (
    ConversionResult,
    ConvertOptions,
    DHRow,
    DHTable,
    convert,
    dh_forward_kinematics,
    parse_dh_csv,
)
from .dynamics import (
    BodyInertia,
    TorqueReport,
    build_inertial_model,
    feasibility_check,
    inverse_dynamics,
    mass_matrix,
)
from .errors import (
    DimensionMismatch,
    InvalidComposition,
    ModkinError,
    OutOfRange,
    ParseError,
    Unconvertible,
    ValidationError,
)
from .kinematics import (
    FramePoses,
    IKOptions,
    IKResult,
    forward_kinematics,
    inverse_kinematics,
    jacobian,
    sample_workspace,
    transform_joint,
    transform_t1,
    transform_t2,
    unit_transform,
)
from .transform import Transform
from .urdf import (
    URDFDocument,
    generate_urdf,
    parse_urdf,
    serialize_urdf,
    urdf_fk_oracle,
)

__all__ = [name for name in dir() if not name.startswith("_")]
