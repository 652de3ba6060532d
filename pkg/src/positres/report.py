"""CSV emission for sweeps, weight reports and the ML benchmark.

Every file starts with one comment line carrying the serialized run
configuration and artifact version, so outputs are self-describing and
byte-reproducible from that line alone.
"""

from __future__ import annotations

import csv
from typing import IO

from . import __version__
from .bitweights import BitWeightReport
from .sweep import FORMATS, RecordRow, SweepSummary

RECORD_COLUMNS = ["word_hex", "format", "mode", "mred_decimal", "n_valid_bits", "n_special_outcomes"]
SUMMARY_COLUMNS = [
    "format",
    "mode",
    "total_injections",
    "win_count",
    "tie_count",
    "incomparable_count",
    "nan_created",
    "nar_created",
    "inf_created",
    "mred_geomean",
]
HISTOGRAM_COLUMNS = ["format", "mode", "log2_bucket", "count"]
WEIGHT_COLUMNS = ["bit", "region", "abs_error_decimal", "layout_changed"]
BENCH_COLUMNS = [
    "classifier",
    "feature_set",
    "format",
    "baseline_accuracy",
    "faulted_accuracy",
    "accuracy_drop",
    "nan_or_nar_substitutions",
    "seed",
]


def config_line(serialized_config: str) -> str:
    return f"# positres {__version__} | {serialized_config}"


def decimal(num: int | None, den: int | None = None) -> str:
    """Shortest decimal for an exact ratio (correctly rounded binary64)."""
    if num is None:
        return ""
    return repr(num / den if den is not None else float(num))


class RecordWriter:
    """Streams sweep records as CSV rows in corpus order."""

    def __init__(self, fh: IO[str], serialized_config: str, mode: str):
        fh.write(config_line(serialized_config) + "\n")
        self._writer = csv.writer(fh, lineterminator="\n")
        self._writer.writerow(RECORD_COLUMNS)
        self._mode = mode

    def __call__(self, row: RecordRow) -> None:
        self._writer.writerow(
            [
                f"{row.word:08X}",
                row.format,
                self._mode,
                decimal(row.mred_num, row.mred_den),
                row.n_valid_bits,
                row.n_special_outcomes,
            ]
        )


def write_summary(fh: IO[str], serialized_config: str, summary: SweepSummary) -> None:
    fh.write(config_line(serialized_config) + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(SUMMARY_COLUMNS)
    per_format = {
        "float32": (summary.float_win_count, summary.float_nan_created, 0, summary.float_inf_created),
        "posit32": (summary.posit_win_count, 0, summary.posit_nar_created, 0),
    }
    for fmt in FORMATS:
        wins, nan_created, nar_created, inf_created = per_format[fmt]
        geomean = summary.mred_geomean(fmt)
        writer.writerow(
            [
                fmt,
                summary.mode,
                summary.total_injections(fmt),
                wins,
                summary.tie_count,
                summary.incomparable_count,
                nan_created,
                nar_created,
                inf_created,
                "" if geomean is None else repr(geomean),
            ]
        )


def write_histogram(fh: IO[str], serialized_config: str, summary: SweepSummary) -> None:
    fh.write(config_line(serialized_config) + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(HISTOGRAM_COLUMNS)
    for fmt in FORMATS:
        for bucket in sorted(summary.histogram[fmt]):
            writer.writerow([fmt, summary.mode, bucket, summary.histogram[fmt][bucket]])


def write_weights(fh: IO[str], serialized_config: str, report: BitWeightReport) -> None:
    fh.write(config_line(serialized_config) + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(WEIGHT_COLUMNS)
    for bit in range(31, -1, -1):
        err = report.per_bit_abs_error[bit]
        writer.writerow(
            [
                bit,
                report.per_bit_region[bit],
                "" if err is None else decimal(err.numerator, err.denominator),
                int(report.layout_changed[bit]),
            ]
        )


def write_bench(fh: IO[str], serialized_config: str, rows) -> None:
    fh.write(config_line(serialized_config) + "\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(BENCH_COLUMNS)
    for row in rows:
        writer.writerow(
            [
                row.classifier,
                row.feature_set,
                row.format,
                repr(row.baseline_accuracy),
                repr(row.faulted_accuracy),
                repr(row.accuracy_drop),
                row.nan_or_nar_substitutions,
                row.seed,
            ]
        )
