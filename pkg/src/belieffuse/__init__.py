"""Dempster-rule evidence fusion on a classical oracle and on simulated quantum circuits."""
from .circuits import build_qadrc_circuit, build_qdrc_circuit, export_qasm, parse_qasm, run_fusion
from .evidence import (
    BBA,
    CBBA,
    EXACT,
    Backend,
    FrameMismatchError,
    Frame,
    FusionResult,
    InvalidMassError,
    Mode,
    TotalConflictError,
    combine_cdrc,
    combine_drc,
    decide,
    modulus_mass,
    modulus_normalized,
    validate,
)
from .fusion import combine, fold
from .stateprep import AmplitudeVector, build_angle_tree, lower_to_gates, p_transform

__version__ = "0.1.0"
