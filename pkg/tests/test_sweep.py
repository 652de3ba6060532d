"""Sweep engine: corpora, per-word MRED, aggregation, determinism."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from positres import SeededDraw, draw_second_bit
from positres.sweep import (
    CHUNK_WORDS,
    CorpusFileError,
    WordCorpus,
    mred_for_word,
    nan_creation_oracle,
    record_to_mred,
    run_sweep,
)

from oracle_decoders import oracle_float_decode, oracle_posit_decode

words = st.integers(min_value=0, max_value=0xFFFFFFFF)


def brute_mred(word, format, mode="seu", draw=None):
    """Textbook Eq. 3 mean over valued outcomes, via the test-only oracle."""
    decode = oracle_float_decode if format == "float32" else oracle_posit_decode
    _, golden, _ = decode(word)
    total = Fraction(0)
    n_valid = 0
    n_special = 0
    for bit in range(32):
        mask = 1 << bit
        if mode == "mbu":
            mask |= 1 << draw_second_bit(draw, bit)
        _, corrupted, _ = decode(word ^ mask)
        if corrupted is None:
            n_special += 1
        elif golden:
            total += abs(golden - corrupted) / abs(golden)
            n_valid += 1
    return (total / n_valid if n_valid else None), n_valid, n_special


@settings(max_examples=40)
@given(words, st.sampled_from(["float32", "posit32"]))
def test_mred_matches_brute_force_seu(word, format):
    expected, n_valid, n_special = brute_mred(word, format)
    record = mred_for_word(word, format)
    assert record.mred == expected
    assert record.n_valid_bits == n_valid
    assert record.n_special_outcomes == n_special


@settings(max_examples=20)
@given(words, st.sampled_from(["float32", "posit32"]), st.integers(0, 2**32))
def test_mred_matches_brute_force_mbu(word, format, seed):
    draw = SeededDraw(seed, word_index=word % 1000)
    expected, n_valid, n_special = brute_mred(word, format, "mbu", draw)
    record = mred_for_word(word, format, mode="mbu", draw=draw)
    assert record.mred == expected
    assert (record.n_valid_bits, record.n_special_outcomes) == (n_valid, n_special)


def test_mred_zero_golden_policy():
    record = mred_for_word(0x00000000, "posit32")
    assert record.mred is None
    assert record.n_valid_bits == 0
    with pytest.raises(ValueError):
        mred_for_word(0x00000000, "posit32", exclude_zero_golden=False)
    with pytest.raises(ValueError):
        mred_for_word(0, "float32", mode="mbu")  # draw required


def test_mred_input_validation():
    with pytest.raises(ValueError):
        mred_for_word(0, "float64")
    with pytest.raises(ValueError):
        mred_for_word(0, "float32", mode="triple")


class TestWordCorpus:
    def test_parse_specs(self):
        c = WordCorpus.parse("uniform:100:7")
        assert (c.kind, c.count, c.seed) == ("uniform", 100, 7)
        c = WordCorpus.parse("seq:0x10:5")
        assert (c.kind, c.start, c.count) == ("seq", 16, 5)
        assert WordCorpus.parse("exhaustive").count == 1 << 32
        with pytest.raises(ValueError):
            WordCorpus.parse("uniform:not-a-number")
        with pytest.raises(ValueError):
            WordCorpus.parse("banana:17")

    def test_uniform_is_reproducible(self):
        a = list(WordCorpus.uniform_random(1000, 9).chunks())
        b = list(WordCorpus.uniform_random(1000, 9).chunks())
        assert all(np.array_equal(x[1], y[1]) for x, y in zip(a, b))

    def test_sequential_wraps(self):
        corpus = WordCorpus.sequential(0xFFFFFFFE, 4)
        (_, chunk), = corpus.chunks()
        assert chunk.tolist() == [0xFFFFFFFE, 0xFFFFFFFF, 0, 1]

    def test_chunk_boundaries_are_fixed(self):
        corpus = WordCorpus.uniform_random(CHUNK_WORDS + 10, 0)
        sizes = [len(words_) for _, words_ in corpus.chunks()]
        assert sizes == [CHUNK_WORDS, 10]

    def test_file_corpus(self, tmp_path):
        path = tmp_path / "words.txt"
        path.write_text("# comment\n3F800000\n  80000000  # NaR\n\nDEADBEEF\n")
        corpus = WordCorpus.from_file(path)
        (_, chunk), = corpus.chunks()
        assert chunk.tolist() == [0x3F800000, 0x80000000, 0xDEADBEEF]

    def test_file_corpus_diagnostics_name_the_line(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3F800000\nzzz\n")
        with pytest.raises(CorpusFileError, match=r"bad\.txt:2"):
            WordCorpus.from_file(path)
        path.write_text("123456789\n")
        with pytest.raises(CorpusFileError, match=r"bad\.txt:1"):
            WordCorpus.from_file(path)


def collect_rows(corpus, **kw):
    rows = []
    summary = run_sweep(corpus, record_sink=rows.append, **kw)
    return summary, rows


def test_sweep_records_match_reference_path():
    corpus = WordCorpus.from_words([0x3F800000, 0x40000000, 0xDEADBEEF, 0x00000001])
    summary, rows = collect_rows(corpus, mode="seu")
    assert summary.n_words == 4
    assert len(rows) == 8  # float32 + posit32 per word
    for row in rows:
        reference = mred_for_word(row.word, row.format)
        assert record_to_mred(row, "seu").mred == reference.mred
        assert row.n_valid_bits == reference.n_valid_bits
        assert row.n_special_outcomes == reference.n_special_outcomes


def test_sweep_mbu_uses_word_index_keyed_draws():
    corpus = WordCorpus.from_words([0x3F800000, 0x40000000])
    summary, rows = collect_rows(corpus, mode="mbu", seed=99)
    for index, word in enumerate([0x3F800000, 0x40000000]):
        draw = SeededDraw(99, index)
        for fmt in ("float32", "posit32"):
            reference = mred_for_word(word, fmt, mode="mbu", draw=draw)
            row = next(r for r in rows if r.word == word and r.format == fmt)
            assert record_to_mred(row, "mbu").mred == reference.mred


def test_sweep_zero_golden_policies():
    corpus = WordCorpus.from_words([0x00000000, 0x3F800000])
    summary, _ = collect_rows(corpus)
    assert summary.float_zero_golden_skipped == 1
    assert summary.posit_zero_golden_skipped == 1
    assert summary.float_injections == summary.posit_injections == 64

    dropped = WordCorpus.from_words(
        [0x00000000, 0x3F800000], drop_zero_golden=True
    )
    summary_drop, _ = collect_rows(dropped)
    assert summary_drop.float_injections == summary_drop.posit_injections == 32

    strict = WordCorpus.from_words([0x00000000], excludes_zero_golden=False)
    with pytest.raises(ValueError, match="zero golden"):
        run_sweep(strict)


def test_sweep_parallel_workers_agree():
    corpus = WordCorpus.uniform_random(3000, 11)
    summary1, rows1 = collect_rows(corpus, mode="mbu", seed=5, workers=1)
    summary4, rows4 = collect_rows(corpus, mode="mbu", seed=5, workers=4)
    assert rows1 == rows4
    assert summary1 == summary4


def test_summary_statistics():
    corpus = WordCorpus.uniform_random(500, 3)
    summary, rows = collect_rows(corpus)
    assert summary.trials == 500 * 32
    assert (
        summary.posit_win_count + summary.float_win_count + summary.tie_count
    ) == summary.comparable_count
    assert summary.comparable_count + summary.incomparable_count == summary.trials
    assert 0.0 <= summary.posit_win_rate <= 1.0
    # geomean equals the mean of log2 MREDs over recorded words
    for fmt in ("float32", "posit32"):
        logs = [
            math.log2(r.mred_num) - math.log2(r.mred_den)
            for r in rows
            if r.format == fmt and r.mred_num is not None
        ]
        assert summary.mred_geomean(fmt) == pytest.approx(2.0 ** (sum(logs) / len(logs)))
    # histogram counts every recorded word once
    for fmt in ("float32", "posit32"):
        n_recorded = sum(1 for r in rows if r.format == fmt and r.mred_num is not None)
        assert sum(summary.histogram[fmt].values()) == n_recorded


def test_nan_creation_oracle_closed_forms():
    oracle = nan_creation_oracle()
    # [DERIVED] P(corrupted float is NaN) = 2**-8 * (1 - 2**-23)
    assert oracle.float_nan == Fraction(1, 256) * (1 - Fraction(1, 1 << 23))
    assert oracle.float_nan == Fraction(8388607, 2147483648)
    # [DERIVED] only NaR's 32 unit neighbors can flip to NaR
    assert oracle.posit_nar == Fraction(1, 1 << 32)
    assert oracle.float_nan / oracle.posit_nar > 10**3


def test_nan_oracle_matches_empirical_rate():
    corpus = WordCorpus.uniform_random(20000, 123)
    summary, _ = collect_rows(corpus)
    oracle = nan_creation_oracle()
    rate = summary.float_nan_created / summary.float_injections
    assert rate == pytest.approx(float(oracle.float_nan), rel=0.15)
