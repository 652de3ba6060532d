"""Shared decode result types for the two 32-bit codecs."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction


class NumClass(enum.Enum):
    FINITE = "finite"
    ZERO = "zero"
    SUBNORMAL = "subnormal"
    INFINITY = "infinity"
    NAN = "nan"
    NAR = "nar"


#: Classes for which DecodedNumber.value carries an exact numeric value.
VALUED_CLASSES = frozenset({NumClass.FINITE, NumClass.ZERO, NumClass.SUBNORMAL})


@dataclass(frozen=True)
class DecodedNumber:
    """Exact decode result: a rational value plus a classification.

    ``value`` is meaningful only when ``cls`` is in :data:`VALUED_CLASSES`;
    for infinity/NaN/NaR it is ``None`` and comparisons must go through
    ``cls``.  ``negative`` records the sign bit even for zero, so that a
    negative zero can be re-encoded faithfully.
    """

    value: Fraction | None
    cls: NumClass
    negative: bool = False

    @property
    def has_value(self) -> bool:
        return self.cls in VALUED_CLASSES

    @property
    def is_nonzero_value(self) -> bool:
        return self.has_value and self.value != 0


def mask32(word: int) -> int:
    return word & 0xFFFFFFFF


def check_word(word: int) -> int:
    if not isinstance(word, int) or word < 0 or word > 0xFFFFFFFF:
        raise ValueError(f"not a 32-bit word: {word!r}")
    return word
