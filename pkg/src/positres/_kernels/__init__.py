"""Kernel backend selection: compiled extension if built, else pure Python.

Set POSITRES_BACKEND=python to force the fallback (e.g. for the
benchmark comparing both backends).
"""

import os

if os.environ.get("POSITRES_BACKEND", "").lower() == "python":
    from . import _pykernels as kernels
else:
    try:
        from . import _cykernels as kernels  # type: ignore[attr-defined]
    except ImportError:
        from . import _pykernels as kernels

from ._pykernels import (  # noqa: F401  (class codes are backend-independent)
    CLS_FINITE,
    CLS_INF,
    CLS_NAN,
    CLS_NAR,
    CLS_SUB,
    CLS_ZERO,
    TALLY_KEYS,
)

BACKEND = kernels.BACKEND

decode_float_parts = kernels.decode_float_parts
decode_posit_parts = kernels.decode_posit_parts
encode_float_parts = kernels.encode_float_parts
encode_posit_parts = kernels.encode_posit_parts
roundtrip_failures = kernels.roundtrip_failures
second_bit = kernels.second_bit
second_bit_histogram = kernels.second_bit_histogram
sweep_chunk = kernels.sweep_chunk
