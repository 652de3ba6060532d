"""Exact posit(32, 2) codec.

Values decode per the run-length regime scheme: the magnitude of a finite
posit is useed**k * 2**exp * (1.fraction) with useed = 2**(2**es) = 16.
Negative patterns are the two's complement of their positive counterpart.
The only non-value patterns are zero (0x00000000) and NaR (0x80000000).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .decoded import DecodedNumber, NumClass, check_word
from .float32 import floor_log2

N_BITS = 32
ES = 2
USEED = 1 << (1 << ES)  # 16

ZERO_WORD = 0x00000000
NAR_WORD = 0x80000000
MAX_POS_WORD = 0x7FFFFFFF  # 16**30
MIN_POS_WORD = 0x00000001  # 16**-30

MAX_SCALE = 120  # log2(16**30)
MIN_SCALE = -120


@dataclass(frozen=True)
class PositConfig:
    n: int = N_BITS
    es: int = ES

    @property
    def useed(self) -> int:
        return 1 << (1 << self.es)


@dataclass(frozen=True)
class PositFields:
    """Field decomposition of a finite posit pattern.

    ``fraction_bits`` is the explicit fraction as a '0'/'1' string (may be
    empty); ``exponent_truncated`` is set when the regime leaves fewer than
    es bits for the exponent field (missing low bits read as zero).
    """

    sign: int
    k: int
    exponent: int
    fraction_bits: str
    exponent_truncated: bool

    @property
    def fn(self) -> int:
        """Significand width including the hidden 1."""
        return len(self.fraction_bits) + 1


def _magnitude_fields(pattern: int) -> tuple[int, int, bool, str]:
    """(k, exponent, truncated, fraction_bits) for a positive pattern."""
    bits = format(pattern & 0x7FFFFFFF, "031b")
    lead = bits[0]
    run = 1
    while run < 31 and bits[run] == lead:
        run += 1
    k = run - 1 if lead == "1" else -run
    rest = bits[run + 1 :]  # skip the regime terminator (may be absent)
    exp_bits = rest[:ES]
    truncated = len(exp_bits) < ES
    exponent = int(exp_bits, 2) << (ES - len(exp_bits)) if exp_bits else 0
    return k, exponent, truncated, rest[ES:]


def posit_decode(word: int) -> DecodedNumber:
    """Decode a 32-bit pattern as posit(32, 2), exactly."""
    check_word(word)
    if word == ZERO_WORD:
        return DecodedNumber(Fraction(0), NumClass.ZERO, False)
    if word == NAR_WORD:
        return DecodedNumber(None, NumClass.NAR, False)
    neg = bool(word >> 31)
    pattern = (-word) & 0xFFFFFFFF if neg else word
    k, exponent, _, frac_bits = _magnitude_fields(pattern)
    w = len(frac_bits)
    significand = (1 << w) | (int(frac_bits, 2) if frac_bits else 0)
    scale = (1 << ES) * k + exponent - w  # value = significand * 2**scale
    if scale >= 0:
        value = Fraction(significand << scale)
    else:
        value = Fraction(significand, 1 << -scale)
    return DecodedNumber(-value if neg else value, NumClass.FINITE, neg)


def posit_fields(word: int) -> PositFields:
    """Field split of a finite posit pattern; rejects zero and NaR."""
    check_word(word)
    if word in (ZERO_WORD, NAR_WORD):
        raise ValueError("zero/NaR patterns have no field decomposition")
    neg = bool(word >> 31)
    pattern = (-word) & 0xFFFFFFFF if neg else word
    k, exponent, truncated, frac_bits = _magnitude_fields(pattern)
    return PositFields(int(neg), k, exponent, frac_bits, truncated)


def _encode_magnitude(a: Fraction) -> int:
    """Positive pattern nearest to positive rational ``a``.

    Rounds the regime|exp|fraction bit string to 31 bits with ties to
    even; saturates at the extreme patterns and never rounds to zero.
    """
    s = floor_log2(a)
    if s > MAX_SCALE:
        return MAX_POS_WORD
    if s < MIN_SCALE:
        return MIN_POS_WORD
    k, exp = s >> ES, s & ((1 << ES) - 1)
    if k >= 0:
        reg_len = k + 2
        regime = ((1 << (k + 1)) - 1) << 1
    else:
        reg_len = -k + 1
        regime = 1
    # 34 explicit fraction bits is more than any 31-bit body can keep;
    # everything below folds into the sticky bit.
    fw = 34
    t = a * Fraction(1 << fw, 1) / Fraction(2) ** s  # (1.f) * 2**fw
    frac_full, rem = divmod(t.numerator, t.denominator)
    sticky_tail = rem != 0
    frac = frac_full - (1 << fw)  # drop hidden 1
    body_len = reg_len + ES + fw
    body = ((regime << ES | exp) << fw) | frac
    shift = body_len - 31  # >= 5 since reg_len >= 2
    pattern = body >> shift
    guard = (body >> (shift - 1)) & 1
    sticky = (body & ((1 << (shift - 1)) - 1)) != 0 or sticky_tail
    if guard and (sticky or pattern & 1):
        pattern += 1
    if pattern >= NAR_WORD:
        return MAX_POS_WORD
    return max(pattern, MIN_POS_WORD)


def posit_encode(x: Fraction | int) -> int:
    """Encode an exact rational to the nearest posit(32, 2) pattern.

    Nonzero magnitudes below the minimum posit round up to it (never to
    zero) and magnitudes above the maximum saturate to it (never to NaR).
    """
    x = Fraction(x)
    if x == 0:
        return ZERO_WORD
    if x > 0:
        return _encode_magnitude(x)
    return (-_encode_magnitude(-x)) & 0xFFFFFFFF


def posit_encode_decoded(d: DecodedNumber) -> int:
    """Re-encode a decode result, including the NaR class."""
    if d.cls is NumClass.NAR:
        return NAR_WORD
    if d.cls in (NumClass.NAN, NumClass.INFINITY):
        raise ValueError(f"{d.cls.value} is not representable as a posit")
    return posit_encode(d.value)
