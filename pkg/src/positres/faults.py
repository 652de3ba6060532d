"""Deterministic single/double bit-flip injection on 32-bit words.

All randomness is counter-based: the second bit of an MBU is a pure
function of (seed, word_index, first_bit), so any partitioning of a word
corpus across workers reproduces the exact same fault sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

from .decoded import check_word

MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(state: int) -> int:
    """SplitMix64 finalizer; a well-mixed pure function of its input."""
    z = state & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class SeededDraw:
    """Key for counter-based draws: a seed plus the word's corpus index."""

    seed: int
    word_index: int


@dataclass(frozen=True)
class FaultSpec:
    """One or two bit positions to invert; mode follows from arity."""

    first_bit: int
    second_bit: int | None = None

    def __post_init__(self):
        if not 0 <= self.first_bit <= 31:
            raise ValueError(f"first_bit out of range: {self.first_bit}")
        if self.second_bit is not None:
            if not 0 <= self.second_bit <= 31:
                raise ValueError(f"second_bit out of range: {self.second_bit}")
            if self.second_bit == self.first_bit:
                raise ValueError("second_bit must differ from first_bit")

    @property
    def mode(self) -> str:
        return "seu" if self.second_bit is None else "mbu"

    @property
    def mask(self) -> int:
        m = 1 << self.first_bit
        if self.second_bit is not None:
            m |= 1 << self.second_bit
        return m


def flip(word: int, spec: FaultSpec) -> int:
    """Invert the bit(s) named by ``spec``; involutive."""
    check_word(word)
    return word ^ spec.mask


def draw_second_bit(draw: SeededDraw, first_bit: int) -> int:
    """Uniformly pick a bit index in [0, 31] distinct from ``first_bit``.

    Deterministic per (seed, word_index, first_bit); identical across
    runs and across any worker partitioning.
    """
    if not 0 <= first_bit <= 31:
        raise ValueError(f"first_bit out of range: {first_bit}")
    counter = (draw.word_index * 32 + first_bit) & MASK64
    u = splitmix64((draw.seed + counter * _GAMMA) & MASK64)
    r = u % 31
    return r + 1 if r >= first_bit else r


def mbu_spec(draw: SeededDraw, first_bit: int) -> FaultSpec:
    return FaultSpec(first_bit, draw_second_bit(draw, first_bit))
