"""Command-line interface: sweep, weights, mlbench and oracle subcommands.

Every artifact starts with one comment line carrying the package version
and the full run configuration; re-running with that configuration
reproduces the file byte for byte.  Exit code 2 marks configuration
errors (one-line diagnostic), exit code 1 marks I/O failures.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import __version__
from .bitweights import bit_weight_report
from .mlbench import (
    DatasetFormatError,
    FaultPolicy,
    generate_synthetic,
    load_csv,
    run_full_bench,
)
from .report import (
    RecordWriter,
    write_bench,
    write_histogram,
    write_summary,
    write_weights,
)
from .sweep import MODES, CorpusFileError, WordCorpus, nan_creation_oracle, run_sweep

_U64_MAX = (1 << 64) - 1


def _config_string(command: str, **params) -> str:
    """Stable key=value serialization of a run configuration."""
    body = " ".join(f"{key}={value}" for key, value in params.items())
    return f"cmd={command} {body}" if body else f"cmd={command}"


def _config_fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _io_fail(exc: OSError):
    click.echo(f"error: {exc}", err=True)
    sys.exit(1)


@click.group()
@click.version_option(__version__, prog_name="positres")
def main():
    """Bit-flip resilience analysis for binary32 and posit(32,2)."""


@main.command()
@click.option("--mode", type=click.Choice(MODES), default="seu", show_default=True)
@click.option(
    "--corpus",
    required=True,
    help="uniform:N[:SEED] | seq:START:N | exhaustive | file:PATH",
)
@click.option("--seed", type=click.IntRange(0, _U64_MAX), default=0, show_default=True)
@click.option(
    "--exclude-zero-golden/--no-exclude-zero-golden",
    default=True,
    show_default=True,
    help="Zero-golden words carry no MRED instead of raising.",
)
@click.option(
    "--drop-zero-golden",
    is_flag=True,
    help="Additionally remove zero-golden words from that format's tallies.",
)
@click.option("--workers", type=click.IntRange(1, None), default=1, show_default=True)
@click.option(
    "--out",
    required=True,
    type=click.Path(file_okay=False, path_type=Path),
    help="Directory for records.csv, summary.csv and histogram.csv.",
)
def sweep(mode, corpus, seed, exclude_zero_golden, drop_zero_golden, workers, out):
    """Inject faults into every bit of every corpus word, both formats."""
    try:
        corpus_obj = WordCorpus.parse(
            corpus,
            excludes_zero_golden=exclude_zero_golden,
            drop_zero_golden=drop_zero_golden,
        )
    except OSError as exc:
        _io_fail(exc)
    except (CorpusFileError, ValueError) as exc:
        _config_fail(str(exc))
    zero_golden = {0: "error", 1: "skip", 2: "drop"}[corpus_obj.zero_policy]
    config = _config_string(
        "sweep",
        mode=mode,
        corpus=corpus_obj.describe(),
        seed=seed,
        zero_golden=zero_golden,
    )
    try:
        out.mkdir(parents=True, exist_ok=True)
        with (
            open(out / "records.csv", "w") as records_fh,
            open(out / "summary.csv", "w") as summary_fh,
            open(out / "histogram.csv", "w") as histogram_fh,
        ):
            sink = RecordWriter(records_fh, config, mode)
            try:
                summary = run_sweep(
                    corpus_obj, mode=mode, seed=seed, workers=workers, record_sink=sink
                )
            except ValueError as exc:
                _config_fail(str(exc))
            write_summary(summary_fh, config, summary)
            write_histogram(histogram_fh, config, summary)
    except OSError as exc:
        _io_fail(exc)
    click.echo(
        f"words={summary.n_words} trials={summary.trials} "
        f"posit_wins={summary.posit_win_count} float_wins={summary.float_win_count} "
        f"ties={summary.tie_count} incomparable={summary.incomparable_count}"
    )
    click.echo(
        f"float32: injections={summary.float_injections} "
        f"nan_created={summary.float_nan_created} "
        f"inf_created={summary.float_inf_created} "
        f"zero_golden={summary.float_zero_golden_skipped}"
    )
    click.echo(
        f"posit32: injections={summary.posit_injections} "
        f"nar_created={summary.posit_nar_created} "
        f"zero_golden={summary.posit_zero_golden_skipped}"
    )
    rate = summary.posit_win_rate
    click.echo(
        "posit win rate: "
        + (f"{rate:.6f}" if rate == rate else "n/a")
        + f" ({summary.posit_win_count}/{summary.comparable_count} comparable)"
    )


@main.command()
@click.argument("word_hex")
@click.argument("format", type=click.Choice(["float", "posit"]))
def weights(word_hex, format):
    """Per-bit absolute error weights for WORD_HEX, 32 CSV rows to stdout."""
    try:
        word = int(word_hex, 16)
    except ValueError:
        _config_fail(f"not a hex word: {word_hex!r}")
    if word >> 32:
        _config_fail(f"wider than 32 bits: {word_hex!r}")
    fmt = "float32" if format == "float" else "posit32"
    if fmt == "posit32" and word == 0x80000000:
        _config_fail("NaR has no field decomposition")
    try:
        report = bit_weight_report(word, fmt)
    except ValueError as exc:
        _config_fail(str(exc))
    config = _config_string("weights", word=f"{word:08X}", format=fmt)
    write_weights(sys.stdout, config, report)


@main.command()
@click.option(
    "--synthetic",
    default="classes=4,per=200,len=256",
    show_default=True,
    help="Synthetic dataset spec: classes=C,per=N,len=L.",
)
@click.option(
    "--data",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="CSV dataset (label,s0,s1,...) instead of the synthetic corpus.",
)
@click.option("--seed", type=click.IntRange(0, _U64_MAX), default=7, show_default=True)
@click.option(
    "--fault-fraction",
    type=click.FloatRange(0.0, 1.0),
    default=1.0,
    show_default=True,
    help="Fraction of test vectors that receive one bit flip.",
)
def mlbench(synthetic, data, seed, fault_fraction):
    """Classifier accuracy under stored-input bit flips, CSV to stdout."""
    if data is not None:
        try:
            dataset = load_csv(data)
        except OSError as exc:
            _io_fail(exc)
        except (DatasetFormatError, ValueError) as exc:
            _config_fail(str(exc))
        source = f"file:{data}"
    else:
        try:
            params = _parse_synthetic(synthetic)
            dataset = generate_synthetic(
                params["classes"], params["per"], params["len"], seed
            )
        except ValueError as exc:
            _config_fail(str(exc))
        source = f"synthetic:classes={params['classes']},per={params['per']},len={params['len']}"
    policy = FaultPolicy(enabled=fault_fraction > 0.0, vector_fraction=fault_fraction)
    try:
        rows = run_full_bench(dataset, seed, fault_policy=policy)
    except ValueError as exc:
        _config_fail(str(exc))
    config = _config_string(
        "mlbench", data=source, seed=seed, fault_fraction=fault_fraction
    )
    write_bench(sys.stdout, config, rows)


def _parse_synthetic(spec: str) -> dict[str, int]:
    params = {"classes": 4, "per": 200, "len": 256}
    for item in spec.split(","):
        if not item.strip():
            continue
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in params:
            raise ValueError(f"malformed synthetic spec {spec!r}")
        try:
            params[key] = int(value)
        except ValueError:
            raise ValueError(f"malformed synthetic spec {spec!r}") from None
        if params[key] < 1:
            raise ValueError(f"synthetic spec values must be positive: {spec!r}")
    return params


@main.command()
def oracle():
    """Exact single-flip NaN/NaR creation probabilities (uniform words)."""
    o = nan_creation_oracle()
    click.echo(f"# positres {__version__} | {_config_string('oracle')}")
    click.echo(f"float_nan_exact={o.float_nan}")
    click.echo(f"float_nan={float(o.float_nan)!r}")
    click.echo(f"float_nan_sign_term={o.sign_term}")
    click.echo(f"float_nan_exponent_term={o.exponent_term}")
    click.echo(f"float_nan_fraction_term={o.fraction_term}")
    click.echo(f"posit_nar_exact={o.posit_nar}")
    click.echo(f"posit_nar={float(o.posit_nar)!r}")


if __name__ == "__main__":
    main()
