"""Fault-injection sweeps: per-word MRED for both formats plus corpus
aggregation.

The per-word mean relative error distance is the average of
|V - V*| / |V| over the injections whose corrupted decode still carries a
value; NaN/NaR/infinity outcomes are tallied separately.  All per-word
accumulation is exact rational arithmetic, so results are independent of
worker partitioning; decimal conversion happens only at output.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterator
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import _kernels as kernels
from .decoded import check_word
from .faults import SeededDraw, mbu_spec
from .float32 import float_decode
from .posit32 import posit_decode

CHUNK_WORDS = 1 << 16  # fixed so chunking never depends on worker count

FORMATS = ("float32", "posit32")
MODES = ("seu", "mbu")


@dataclass(frozen=True)
class WordCorpus:
    """A reproducible stream of 32-bit words.

    kind is one of "uniform" (count, seed), "seq" (start, count),
    "exhaustive", or "file" (path).  Zero-golden handling (the guard for
    the division by the golden value): with ``excludes_zero_golden`` set
    (the default) such words carry no MRED but their injections still
    count in the special-value tallies; ``drop_zero_golden`` additionally
    removes them from the tallies; with the guard off they raise.
    """

    kind: str
    count: int = 0
    seed: int = 0
    start: int = 0
    path: str | None = None
    excludes_zero_golden: bool = True
    drop_zero_golden: bool = False

    @property
    def zero_policy(self) -> int:
        if not self.excludes_zero_golden:
            return 0
        return 2 if self.drop_zero_golden else 1

    @classmethod
    def uniform_random(cls, count: int, seed: int, **kw) -> "WordCorpus":
        return cls("uniform", count=count, seed=seed, **kw)

    @classmethod
    def sequential(cls, start: int, count: int, **kw) -> "WordCorpus":
        check_word(start)
        return cls("seq", count=count, start=start, **kw)

    @classmethod
    def exhaustive(cls, **kw) -> "WordCorpus":
        return cls("exhaustive", count=1 << 32, **kw)

    @classmethod
    def from_file(cls, path: str | Path, **kw) -> "WordCorpus":
        words = _read_word_file(path)
        return cls("file", count=len(words), path=str(path), **kw)

    @classmethod
    def from_words(cls, words, **kw) -> "WordCorpus":
        corpus = cls("file", count=len(words), path=None, **kw)
        object.__setattr__(corpus, "_words", [check_word(int(w)) for w in words])
        return corpus

    @classmethod
    def parse(cls, spec: str, **kw) -> "WordCorpus":
        """Parse a CLI corpus spec: uniform:N[:SEED] | seq:START:N | exhaustive | file:PATH."""
        head, _, rest = spec.partition(":")
        try:
            if head == "uniform":
                parts = rest.split(":")
                count = int(parts[0])
                seed = int(parts[1]) if len(parts) > 1 else 0
                return cls.uniform_random(count, seed, **kw)
            if head == "seq":
                start_s, count_s = rest.split(":")
                return cls.sequential(int(start_s, 0), int(count_s), **kw)
            if head == "exhaustive" and not rest:
                return cls.exhaustive(**kw)
            if head == "file":
                return cls.from_file(rest, **kw)
        except (ValueError, IndexError) as exc:
            if isinstance(exc, CorpusFileError):
                raise
            raise ValueError(f"malformed corpus spec {spec!r}") from exc
        raise ValueError(f"unknown corpus kind {spec!r}")

    def describe(self) -> str:
        if self.kind == "uniform":
            return f"uniform:{self.count}:{self.seed}"
        if self.kind == "seq":
            return f"seq:{self.start:#010x}:{self.count}"
        if self.kind == "exhaustive":
            return "exhaustive"
        return f"file:{self.path or '<words>'}"

    def chunks(self) -> Iterator[tuple[int, np.ndarray]]:
        """Yield (base_index, words) in fixed-size chunks."""
        if self.kind == "uniform":
            rng = np.random.default_rng(self.seed)
            base = 0
            remaining = self.count
            while remaining > 0:
                n = min(CHUNK_WORDS, remaining)
                yield base, rng.integers(0, 1 << 32, size=n, dtype=np.uint32)
                base += n
                remaining -= n
        elif self.kind in ("seq", "exhaustive"):
            start = self.start if self.kind == "seq" else 0
            for base in range(0, self.count, CHUNK_WORDS):
                n = min(CHUNK_WORDS, self.count - base)
                lo = (start + base) & 0xFFFFFFFF
                yield base, (lo + np.arange(n, dtype=np.int64)).astype(np.uint32)
        else:
            words = getattr(self, "_words", None)
            if words is None:
                words = _read_word_file(self.path)
            arr = np.asarray(words, dtype=np.uint32)
            for base in range(0, len(arr), CHUNK_WORDS):
                yield base, arr[base : base + CHUNK_WORDS]


class CorpusFileError(ValueError):
    pass


def _read_word_file(path: str | Path) -> list[int]:
    """Read one hex word per line; '#' comments and blank lines allowed."""
    words = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            try:
                word = int(text, 16)
            except ValueError:
                raise CorpusFileError(f"{path}:{lineno}: not a hex word: {text!r}") from None
            if word >> 32:
                raise CorpusFileError(f"{path}:{lineno}: wider than 32 bits: {text!r}")
            words.append(word)
    return words


@dataclass(frozen=True)
class MredRecord:
    word: int
    format: str
    mode: str
    mred: Fraction | None
    n_valid_bits: int
    n_special_outcomes: int


class RecordRow(NamedTuple):
    """Lightweight per-(word, format) sweep result for streaming output."""

    word: int
    format: str
    mred_num: int | None
    mred_den: int | None
    n_valid_bits: int
    n_special_outcomes: int


@dataclass
class SweepSummary:
    mode: str
    n_words: int = 0
    trials: int = 0
    posit_win_count: int = 0
    float_win_count: int = 0
    tie_count: int = 0
    incomparable_count: int = 0
    float_nan_created: int = 0
    float_inf_created: int = 0
    posit_nar_created: int = 0
    float_zero_golden_skipped: int = 0
    posit_zero_golden_skipped: int = 0
    float_injections: int = 0
    posit_injections: int = 0
    histogram: dict[str, dict[int, int]] = field(
        default_factory=lambda: {fmt: {} for fmt in FORMATS}
    )
    _log2_sum: dict[str, float] = field(
        default_factory=lambda: {fmt: 0.0 for fmt in FORMATS}, repr=False
    )
    _log2_count: dict[str, int] = field(
        default_factory=lambda: {fmt: 0 for fmt in FORMATS}, repr=False
    )

    @property
    def comparable_count(self) -> int:
        return self.posit_win_count + self.float_win_count + self.tie_count

    @property
    def posit_win_rate(self) -> float:
        return self.posit_win_count / self.comparable_count if self.comparable_count else math.nan

    def mred_geomean(self, format: str) -> float | None:
        n = self._log2_count[format]
        if n == 0:
            return None
        return 2.0 ** (self._log2_sum[format] / n)

    def total_injections(self, format: str) -> int:
        return self.float_injections if format == "float32" else self.posit_injections


def _log2_bucket(num: int, den: int) -> int:
    b = num.bit_length() - den.bit_length()
    if b >= 0:
        if num < den << b:
            b -= 1
    else:
        if num << -b < den:
            b -= 1
    return b


def mred_for_word(
    word: int,
    format: str,
    mode: str = "seu",
    draw: SeededDraw | None = None,
    exclude_zero_golden: bool = True,
) -> MredRecord:
    """Exact per-word MRED via the codec-level reference path.

    For MBU mode a ``draw`` is required so the second bit positions are
    reproducible.  A word whose golden value is zero raises unless the
    exclusion flag is set (then the record carries no mean).
    """
    check_word(word)
    if format not in FORMATS:
        raise ValueError(f"unknown format: {format!r}")
    if mode not in MODES:
        raise ValueError(f"unknown mode: {mode!r}")
    if mode == "mbu" and draw is None:
        raise ValueError("mbu mode needs a SeededDraw for the second bit")
    decode = float_decode if format == "float32" else posit_decode
    golden = decode(word)
    golden_nonzero = golden.is_nonzero_value
    if golden.has_value and not golden_nonzero and not exclude_zero_golden:
        raise ValueError(
            f"word {word:#010x} has a zero golden value; its relative "
            "error is undefined (enable the zero-golden exclusion)"
        )
    rel_sum = Fraction(0)
    n_valid = 0
    n_special = 0
    for bit in range(32):
        mask = 1 << bit
        if mode == "mbu":
            mask = mbu_spec(draw, bit).mask
        corrupted = decode(word ^ mask)
        if not corrupted.has_value:
            n_special += 1
            continue
        if golden_nonzero:
            rel_sum += abs(golden.value - corrupted.value) / abs(golden.value)
            n_valid += 1
    mred = rel_sum / n_valid if n_valid else None
    return MredRecord(word, format, mode, mred, n_valid, n_special)


def _sweep_chunk_worker(args):
    words, base_index, mbu, seed, exclude_zero = args
    return kernels.sweep_chunk(words, base_index, mbu, seed, exclude_zero)


def _ordered_parallel(executor: ProcessPoolExecutor, fn, args_iter, window: int):
    """imap with bounded prefetch, yielding results in submission order."""
    from collections import deque

    pending = deque()
    args_iter = iter(args_iter)
    try:
        for args in args_iter:
            pending.append(executor.submit(fn, args))
            if len(pending) >= window:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()
    finally:
        for fut in pending:
            fut.cancel()


def run_sweep(
    corpus: WordCorpus,
    mode: str = "seu",
    seed: int = 0,
    workers: int = 1,
    record_sink: Callable[[RecordRow], None] | None = None,
) -> SweepSummary:
    """Sweep every corpus word through both codecs under ``mode``.

    Records stream to ``record_sink`` in corpus order (float32 row then
    posit32 row per word); the returned summary is identical for any
    ``workers`` count because randomness is keyed by word index and
    chunk boundaries are fixed.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode: {mode!r}")
    mbu = mode == "mbu"
    summary = SweepSummary(mode=mode)
    args = (
        (words, base, mbu, seed, corpus.zero_policy)
        for base, words in corpus.chunks()
    )
    if workers <= 1:
        results = map(_sweep_chunk_worker, args)
        _consume(results, summary, record_sink, corpus)
    else:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = _ordered_parallel(executor, _sweep_chunk_worker, args, 2 * workers)
            _consume(results, summary, record_sink, corpus)
    return summary


def _consume(results, summary: SweepSummary, record_sink, corpus):
    chunk_iter = corpus.chunks()
    for (records, tallies), (_, words) in zip(results, chunk_iter):
        summary.n_words += len(words)
        summary.trials += tallies["trials"]
        summary.posit_win_count += tallies["posit_wins"]
        summary.float_win_count += tallies["float_wins"]
        summary.tie_count += tallies["ties"]
        summary.incomparable_count += tallies["incomparable"]
        summary.float_nan_created += tallies["float_nan_created"]
        summary.float_inf_created += tallies["float_inf_created"]
        summary.posit_nar_created += tallies["posit_nar_created"]
        summary.float_zero_golden_skipped += tallies["float_zero_golden_skipped"]
        summary.posit_zero_golden_skipped += tallies["posit_zero_golden_skipped"]
        summary.float_injections += tallies["float_injections"]
        summary.posit_injections += tallies["posit_injections"]
        for rec, word in zip(records, words.tolist()):
            nf, numf, denf, nspf, npst, nump, denp, nspp = rec
            for fmt, n_valid, num, den, n_special in (
                ("float32", nf, numf, denf, nspf),
                ("posit32", npst, nump, denp, nspp),
            ):
                if num is not None:
                    bucket = _log2_bucket(num, den)
                    hist = summary.histogram[fmt]
                    hist[bucket] = hist.get(bucket, 0) + 1
                    summary._log2_sum[fmt] += math.log2(num) - math.log2(den)
                    summary._log2_count[fmt] += 1
                if record_sink is not None:
                    record_sink(RecordRow(word, fmt, num, den, n_valid, n_special))


def record_to_mred(row: RecordRow, mode: str) -> MredRecord:
    mred = None if row.mred_num is None else Fraction(row.mred_num, row.mred_den)
    return MredRecord(row.word, row.format, mode, mred, row.n_valid_bits, row.n_special_outcomes)


@dataclass(frozen=True)
class NanCreationOracle:
    """Exact single-flip special-value creation probabilities.

    Model: a uniformly random 32-bit word and a uniformly chosen flipped
    bit.  ``float_nan`` is the probability the corrupted pattern is
    NaN-class binary32 (golden-NaN words whose fraction stays nonzero
    included); ``posit_nar`` the probability the corrupted pattern is NaR.
    """

    sign_term: Fraction
    exponent_term: Fraction
    fraction_term: Fraction
    posit_nar: Fraction

    @property
    def float_nan(self) -> Fraction:
        return self.sign_term + self.exponent_term + self.fraction_term


def nan_creation_oracle() -> NanCreationOracle:
    """Closed-form combinatorics for single-flip NaN/NaR creation."""
    frac_nonzero = 1 - Fraction(1, 1 << 23)
    exp_all_ones = Fraction(1, 1 << 8)
    # sign flip: NaN iff the golden word already is NaN
    sign_term = Fraction(1, 32) * exp_all_ones * frac_nonzero
    # exponent bit j: golden exponent must be 255 with only bit j clear
    exponent_term = Fraction(8, 32) * exp_all_ones * frac_nonzero
    # fraction bit: golden exponent 255 and the flip must not zero the fraction
    fraction_term = Fraction(23, 32) * exp_all_ones * frac_nonzero
    # posit: only the 32 Hamming-1 neighbors of NaR can flip to it,
    # and only via their single differing bit
    posit_nar = Fraction(32, 1 << 32) * Fraction(1, 32)
    return NanCreationOracle(sign_term, exponent_term, fraction_term, posit_nar)
