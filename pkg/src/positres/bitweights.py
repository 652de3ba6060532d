"""Analytic per-bit error weights for both formats.

Every weight is the exact decode difference |decode(flip(w, i)) - decode(w)|.
For fraction bits whose flip leaves the field layout unchanged this equals
a closed-form power of two times the word's scale; regime/exponent flips can
restructure the posit layout, so only the decode-difference definition is
total.  The report doubles as the oracle for the sweep engine's MRED.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .decoded import check_word
from .float32 import Float32Fields, float_decode
from .posit32 import ES, posit_decode, posit_fields

IEEE_EXP_SIZE = 8

REGION_SIGN = "sign"
REGION_EXPONENT = "exponent"
REGION_REGIME = "regime"
REGION_FRACTION = "fraction"
REGION_TRUNCATED = "truncated"


@dataclass(frozen=True)
class BitWeightReport:
    """Per-bit absolute error when each bit of ``word`` is flipped alone.

    ``per_bit_abs_error[i]`` is None when the flipped pattern decodes to a
    non-value class (NaN/infinity/NaR).  ``per_bit_region`` labels bit i by
    the golden word's field decomposition; ``layout_changed[i]`` marks
    flips that alter that decomposition (regime length, normal/subnormal
    or special-class transitions).
    """

    word: int
    format: str  # "float32" | "posit32"
    per_bit_abs_error: list[Fraction | None]
    per_bit_region: list[str]
    layout_changed: list[bool]


def fraction_headroom(word: int) -> int:
    """Extra fraction bits a posit(32,2) gains over binary32 at this regime.

    Computed as (binary32 exponent size) - k - es; negative when the
    regime run is long.  Rejects zero/NaR patterns.
    """
    fields = posit_fields(word)  # raises on zero/NaR
    return IEEE_EXP_SIZE - fields.k - ES


def _float_regions(word: int) -> list[str]:
    # fixed layout, independent of the word
    return [REGION_FRACTION] * 23 + [REGION_EXPONENT] * 8 + [REGION_SIGN]


def _float_layout_key(word: int):
    f = Float32Fields.from_word(word)
    if f.exponent == 0xFF:
        return "special"
    if f.exponent == 0:
        return "subnormal"
    return "normal"


def _posit_regions(word: int) -> list[str]:
    fields = posit_fields(word)
    run = fields.k + 1 if fields.k >= 0 else -fields.k
    reg_len = min(run + 1, 31)  # run plus terminator, capped at the word
    n_exp = min(ES, 31 - reg_len)
    n_frac = 31 - reg_len - n_exp
    exp_region = REGION_TRUNCATED if n_exp < ES else REGION_EXPONENT
    # bit 31 down to bit 0
    regions = (
        [REGION_SIGN]
        + [REGION_REGIME] * reg_len
        + [exp_region] * n_exp
        + [REGION_FRACTION] * n_frac
    )
    return regions[::-1]  # index by bit position, LSB first


def _posit_layout_key(word: int):
    if word in (0x00000000, 0x80000000):
        return "special"
    f = posit_fields(word)
    return (f.k, len(f.fraction_bits), f.exponent_truncated)


def bit_weight_report(word: int, format: str) -> BitWeightReport:
    """All 32 single-flip absolute errors for ``word`` in ``format``.

    The golden word must decode to a valued class (finite, subnormal or
    zero is rejected only for non-finite specials; zero goldens are legal
    here since absolute error needs no division).
    """
    check_word(word)
    if format == "float32":
        decode = float_decode
        regions = _float_regions(word)
        layout_key = _float_layout_key
    elif format == "posit32":
        decode = posit_decode
        regions = _posit_regions(word)
        layout_key = _posit_layout_key
    else:
        raise ValueError(f"unknown format: {format!r}")
    golden = decode(word)
    if not golden.has_value:
        raise ValueError(f"golden word {word:#010x} is {golden.cls.value}, not finite")
    errors: list[Fraction | None] = []
    changed: list[bool] = []
    for bit in range(32):
        flipped = word ^ (1 << bit)
        corrupted = decode(flipped)
        if corrupted.has_value:
            errors.append(abs(corrupted.value - golden.value))
        else:
            errors.append(None)
        changed.append(_layout_differs(layout_key, word, flipped))
    return BitWeightReport(word, format, errors, regions, changed)


def _layout_differs(layout_key, word: int, flipped: int) -> bool:
    return layout_key(word) != layout_key(flipped)


def float_fraction_weight(word: int, bit: int) -> Fraction:
    """Closed form for a binary32 fraction-bit flip: 2**(e) * 2**(bit-23).

    ``e`` is the unbiased exponent (-126 for subnormals).
    """
    if not 0 <= bit <= 22:
        raise ValueError("not a fraction bit")
    f = Float32Fields.from_word(word)
    if f.exponent == 0xFF:
        raise ValueError("special golden word")
    e = -126 if f.exponent == 0 else f.exponent - 127
    return Fraction(2) ** (e + bit - 23)


def posit_fraction_weight(word: int, bit: int) -> Fraction:
    """Closed form for a posit fraction-bit flip: 16**k * 2**exp * 2**-depth.

    ``depth`` counts positions below the hidden 1 (the highest explicit
    fraction bit has depth 1).  Defined from the golden decomposition;
    exact whenever the flip leaves the layout unchanged, which is always
    the case for fraction bits of a finite posit.
    """
    f = posit_fields(word)
    n_frac = len(f.fraction_bits)
    if not 0 <= bit < n_frac:
        raise ValueError("not a fraction bit of this word")
    depth = n_frac - bit
    return Fraction(16) ** f.k * Fraction(2) ** f.exponent * Fraction(1, 2**depth)


def relative_errors(word: int, format: str) -> list[Fraction | None]:
    """Per-bit |V - V*| / |V|; requires a nonzero golden value."""
    report = bit_weight_report(word, format)
    decode = float_decode if format == "float32" else posit_decode
    golden = decode(word)
    if not golden.is_nonzero_value:
        raise ValueError(f"golden word {word:#010x} has zero value")
    scale = abs(golden.value)
    return [None if e is None else e / scale for e in report.per_bit_abs_error]
