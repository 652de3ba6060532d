"""Exact IEEE 754 binary32 codec.

Decoding is total over all 2**32 patterns and returns exact rationals
(power-of-two denominators), so downstream error metrics carry no secondary
rounding.  Encoding rounds to nearest with ties to even and saturates to
the infinity patterns beyond range.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .decoded import DecodedNumber, NumClass, check_word

EXPONENT_BITS = 8
FRACTION_BITS = 23
BIAS = 127
MIN_NORMAL_EXP = -126  # unbiased exponent of the smallest normal

POS_INF_WORD = 0x7F800000
NEG_INF_WORD = 0xFF800000
CANONICAL_NAN_WORD = 0x7FC00000


@dataclass(frozen=True)
class Float32Fields:
    """Raw sign/exponent/fraction split of a binary32 pattern."""

    sign: int
    exponent: int  # biased, [0, 255]
    fraction: int  # [0, 2**23 - 1]

    @classmethod
    def from_word(cls, word: int) -> "Float32Fields":
        check_word(word)
        return cls(
            sign=(word >> 31) & 1,
            exponent=(word >> FRACTION_BITS) & 0xFF,
            fraction=word & ((1 << FRACTION_BITS) - 1),
        )

    def to_word(self) -> int:
        return (self.sign << 31) | (self.exponent << FRACTION_BITS) | self.fraction


def float_decode(word: int) -> DecodedNumber:
    """Decode a 32-bit pattern as binary32, exactly.

    Special patterns map to a classification, never to an error.
    """
    f = Float32Fields.from_word(word)
    neg = bool(f.sign)
    if f.exponent == 0xFF:
        if f.fraction:
            return DecodedNumber(None, NumClass.NAN, neg)
        return DecodedNumber(None, NumClass.INFINITY, neg)
    if f.exponent == 0:
        if f.fraction == 0:
            return DecodedNumber(Fraction(0), NumClass.ZERO, neg)
        # subnormal: no hidden 1, fixed scale 2**-126
        value = Fraction(f.fraction, 1 << (FRACTION_BITS - MIN_NORMAL_EXP))
        return DecodedNumber(-value if neg else value, NumClass.SUBNORMAL, neg)
    significand = (1 << FRACTION_BITS) | f.fraction
    shift = FRACTION_BITS - (f.exponent - BIAS)
    if shift >= 0:
        value = Fraction(significand, 1 << shift)
    else:
        value = Fraction(significand << -shift)
    return DecodedNumber(-value if neg else value, NumClass.FINITE, neg)


def _round_half_even(x: Fraction) -> int:
    q, r = divmod(x.numerator, x.denominator)
    twice = 2 * r
    if twice > x.denominator or (twice == x.denominator and q & 1):
        q += 1
    return q


def _cmp_pow2(a: Fraction, t: int) -> int:
    """Sign of (a - 2**t) for positive ``a``, without building big Fractions."""
    if t >= 0:
        lhs, rhs = a.numerator, a.denominator << t
    else:
        lhs, rhs = a.numerator << -t, a.denominator
    return (lhs > rhs) - (lhs < rhs)


def floor_log2(a: Fraction) -> int:
    """floor(log2(a)) for a positive rational, exact."""
    s = a.numerator.bit_length() - a.denominator.bit_length()
    if _cmp_pow2(a, s) < 0:
        s -= 1
    elif _cmp_pow2(a, s + 1) >= 0:
        s += 1
    return s


def float_encode(x: Fraction | int, negative_zero: bool = False) -> int:
    """Encode an exact rational to the nearest binary32 pattern.

    Ties go to even; values beyond range saturate to the infinity
    patterns.  ``negative_zero`` selects 0x80000000 when ``x`` is zero.
    """
    x = Fraction(x)
    if x == 0:
        return 0x80000000 if negative_zero else 0x00000000
    neg = x < 0
    a = -x if neg else x
    s = floor_log2(a)
    e = max(s, MIN_NORMAL_EXP)
    q = _round_half_even(a * Fraction(2) ** (FRACTION_BITS - e))
    if q >= 1 << (FRACTION_BITS + 1):
        q >>= 1
        e += 1
    if e > BIAS or (e == BIAS and q > (1 << (FRACTION_BITS + 1)) - 1):
        return NEG_INF_WORD if neg else POS_INF_WORD
    if q < 1 << FRACTION_BITS:
        fields = Float32Fields(int(neg), 0, q)  # subnormal (or zero after rounding)
    else:
        fields = Float32Fields(int(neg), e + BIAS, q - (1 << FRACTION_BITS))
    return fields.to_word()


def float_encode_decoded(d: DecodedNumber) -> int:
    """Re-encode a decode result, preserving the sign of zero."""
    if d.cls is NumClass.INFINITY:
        return NEG_INF_WORD if d.negative else POS_INF_WORD
    if d.cls is NumClass.NAN:
        return CANONICAL_NAN_WORD
    if d.cls is NumClass.NAR:
        raise ValueError("NaR is not representable in binary32")
    return float_encode(d.value, negative_zero=d.negative and d.value == 0)
