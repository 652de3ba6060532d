"""Comparative bit-flip resilience of IEEE 754 binary32 and posit(32,2).

Exact codecs for both formats, deterministic SEU/MBU fault injection,
mean-relative-error-distance sweeps, analytic per-bit error weights, and
a small ML benchmark measuring accuracy degradation under input faults.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .decoded import DecodedNumber, NumClass
from .faults import FaultSpec, SeededDraw, draw_second_bit, flip
from .float32 import Float32Fields, float_decode, float_encode
from .posit32 import PositConfig, PositFields, posit_decode, posit_encode, posit_fields

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "DecodedNumber",
    "NumClass",
    "FaultSpec",
    "SeededDraw",
    "draw_second_bit",
    "flip",
    "Float32Fields",
    "float_decode",
    "float_encode",
    "PositConfig",
    "PositFields",
    "posit_decode",
    "posit_encode",
    "posit_fields",
    "__version__",
]
