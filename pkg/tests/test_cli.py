"""CLI contract: artifacts, config headers, exit codes, reproducibility."""

from click.testing import CliRunner

from positres import __version__
from positres.cli import main


def invoke(*args):
    return CliRunner().invoke(main, list(args))


def test_version():
    result = invoke("--version")
    assert result.exit_code == 0
    assert __version__ in result.output


class TestSweep:
    def test_writes_artifacts(self, tmp_path):
        out = tmp_path / "run"
        result = invoke(
            "sweep", "--corpus", "uniform:300:42", "--seed", "9", "--out", str(out)
        )
        assert result.exit_code == 0, result.output
        for name in ("records.csv", "summary.csv", "histogram.csv"):
            text = (out / name).read_text()
            first = text.splitlines()[0]
            assert first.startswith(f"# positres {__version__} | cmd=sweep")
            assert "corpus=uniform:300:42" in first
            assert "seed=9" in first
        records = (out / "records.csv").read_text().splitlines()
        assert records[1].split(",")[0] == "word_hex"
        assert len(records) == 2 + 2 * 300  # header lines + one row per format
        assert "posit win rate:" in result.output

    def test_rerun_is_byte_identical(self, tmp_path):
        args = ["sweep", "--corpus", "seq:0x3F000000:64", "--mode", "mbu", "--seed", "4"]
        a, b = tmp_path / "a", tmp_path / "b"
        assert invoke(*args, "--out", str(a)).exit_code == 0
        assert invoke(*args, "--out", str(b), "--workers", "2").exit_code == 0
        for name in ("records.csv", "summary.csv", "histogram.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_bad_corpus_spec_exits_2(self, tmp_path):
        result = invoke("sweep", "--corpus", "nope:1", "--out", str(tmp_path / "x"))
        assert result.exit_code == 2
        assert "error:" in result.output

    def test_bad_corpus_file_exits_2_and_names_line(self, tmp_path):
        bad = tmp_path / "bad.words"
        bad.write_text("3F800000\nQQ\n")
        result = invoke(
            "sweep", "--corpus", f"file:{bad}", "--out", str(tmp_path / "x")
        )
        assert result.exit_code == 2
        assert f"{bad}:2" in result.output

    def test_missing_corpus_file_exits_1(self, tmp_path):
        result = invoke(
            "sweep", "--corpus", "file:/no/such/file", "--out", str(tmp_path / "x")
        )
        assert result.exit_code == 1

    def test_zero_golden_error_policy_exits_2(self, tmp_path):
        words = tmp_path / "zero.words"
        words.write_text("00000000\n")
        result = invoke(
            "sweep",
            "--corpus",
            f"file:{words}",
            "--no-exclude-zero-golden",
            "--out",
            str(tmp_path / "x"),
        )
        assert result.exit_code == 2
        assert "zero golden" in result.output


class TestWeights:
    def test_32_rows(self):
        result = invoke("weights", "3F800000", "float")
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0].startswith(f"# positres {__version__} | cmd=weights")
        assert lines[1] == "bit,region,abs_error_decimal,layout_changed"
        assert len(lines) == 2 + 32
        assert lines[2].startswith("31,sign,")
        # bit 22 row carries the analytic 0.5 weight
        bit22 = next(line for line in lines if line.startswith("22,"))
        assert bit22 == "22,fraction,0.5,0"

    def test_posit_format(self):
        result = invoke("weights", "40000000", "posit")
        assert result.exit_code == 0
        assert len(result.output.splitlines()) == 2 + 32

    def test_nar_exits_2(self):
        result = invoke("weights", "80000000", "posit")
        assert result.exit_code == 2
        assert "NaR has no field decomposition" in result.output

    def test_non_hex_exits_2(self):
        assert invoke("weights", "xyz", "float").exit_code == 2
        assert invoke("weights", "123456789", "float").exit_code == 2

    def test_float_special_golden_exits_2(self):
        assert invoke("weights", "7FC00000", "float").exit_code == 2


class TestMlbench:
    def test_synthetic_report(self):
        result = invoke(
            "mlbench", "--synthetic", "classes=2,per=10,len=64", "--seed", "3"
        )
        assert result.exit_code == 0, result.output
        lines = result.output.splitlines()
        assert lines[0].startswith(f"# positres {__version__} | cmd=mlbench")
        assert "seed=3" in lines[0]
        assert lines[1].startswith("classifier,feature_set,format,")
        assert len(lines) == 2 + 16

    def test_rerun_is_byte_identical(self):
        args = ("mlbench", "--synthetic", "classes=2,per=10,len=64", "--seed", "3")
        assert invoke(*args).output == invoke(*args).output

    def test_csv_dataset(self, tmp_path):
        import numpy as np

        rng = np.random.default_rng(0)
        rows = []
        for label, base in ((0, 0.0), (1, 4.0)):
            for _ in range(12):
                samples = base + rng.standard_normal(64)
                rows.append(",".join([str(label)] + [f"{s:.6f}" for s in samples]))
        data = tmp_path / "series.csv"
        data.write_text("\n".join(rows) + "\n")
        result = invoke("mlbench", "--data", str(data), "--seed", "1")
        assert result.exit_code == 0, result.output
        assert len(result.output.splitlines()) == 2 + 16

    def test_single_class_exits_2(self, tmp_path):
        data = tmp_path / "one.csv"
        data.write_text("0," + ",".join(["1.0"] * 64) + "\n0," + ",".join(["2.0"] * 64) + "\n")
        result = invoke("mlbench", "--data", str(data))
        assert result.exit_code == 2
        assert "2 classes" in result.output

    def test_bad_synthetic_spec_exits_2(self):
        assert invoke("mlbench", "--synthetic", "classes=zero").exit_code == 2
        assert invoke("mlbench", "--synthetic", "banana=2").exit_code == 2


class TestOracle:
    def test_exact_probabilities(self):
        result = invoke("oracle")
        assert result.exit_code == 0
        assert "float_nan_exact=8388607/2147483648" in result.output
        assert "posit_nar_exact=1/4294967296" in result.output

    def test_reproducible(self):
        assert invoke("oracle").output == invoke("oracle").output
