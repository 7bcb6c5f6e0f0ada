"""Clauser-Horne nonlocality of qubit-qutrit states."""
from .bell import LOCAL_THRESHOLD, QUANTUM_E_CEILING, MeasurementSettings, e_value, i_ch, i_chsh
from .bounds import singular_spectrum, theorem2_bound, theorem3_certify
from .optimize import OptimizerConfig, classify_nonlocality, maximize_e
from .states import TGX, Example1, Example2, FanoDecomposition, decompose, make_state, reconstruct

__version__ = "0.1.0"

__all__ = [
    "LOCAL_THRESHOLD",
    "QUANTUM_E_CEILING",
    "MeasurementSettings",
    "e_value",
    "i_ch",
    "i_chsh",
    "singular_spectrum",
    "theorem2_bound",
    "theorem3_certify",
    "OptimizerConfig",
    "classify_nonlocality",
    "maximize_e",
    "TGX",
    "Example1",
    "Example2",
    "FanoDecomposition",
    "decompose",
    "make_state",
    "reconstruct",
]
