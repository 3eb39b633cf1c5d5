"""
Integration tests for the renewal-lab command line.
Every subcommand is run end to end through run(argv) into a temporary
output directory.
"""

import csv
import json

import pytest

from renewal_lab import __version__, uniformity_and_span
from renewal_lab.cli import run

EXPONENTIAL = '{"kind":"exponential","rate":1}'
UNIFORM = '{"kind":"uniform_interval","a":0.5,"b":1.5}'
BIMODAL = '{"kind":"discrete_atoms","atoms":[[0,0.5],[20,0.5]]}'
LARGE_UNIFORM = '{"kind":"large_uniform","theta":1000}'


@pytest.fixture
def cli(capsys):
    """Run the CLI and return (exit code, stdout, stderr)."""
    def invoke(*argv):
        code = run([str(a) for a in argv])
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return invoke


def read_rows(path):
    with path.open() as handle:
        return list(csv.DictReader(handle))


def error_payload(stderr: str) -> dict:
    """The ErrorResponse JSON is the last stderr line."""
    return json.loads(stderr.strip().splitlines()[-1])


class TestListings:
    """Test the two listing reproductions."""

    def test_listing1(self, cli, out_dir):
        """Test the bimodal 0/20 reproduction at reduced trials."""
        code, out, _ = cli("listing1", "--seed", 7, "--n-trials", 5000, "--out-dir", out_dir)
        assert code == 0
        assert out.startswith("listing1: estimate=")
        assert out.rstrip().endswith("PASS")
        (row,) = read_rows(out_dir / "listing1.csv")
        assert float(row["target"]) == pytest.approx(0.1)
        assert float(row["u"]) == 1.0

    def test_listing2(self, cli, out_dir):
        """Test E[floor(3.2 - U)] with the listing defaults."""
        code, out, _ = cli("listing2", "--seed", 7, "--out-dir", out_dir)
        assert code == 0
        (row,) = read_rows(out_dir / "listing2.csv")
        assert 2.17 <= float(row["estimate"]) <= 2.23
        assert float(row["exact"]) == pytest.approx(2.2)
        assert int(row["n"]) == 10000
        assert "PASS" in out


class TestBlackwell:
    """Test window-count runs."""

    def test_sweep_with_plot(self, cli, out_dir):
        """Test a u-list sweep writing CSV and SVG."""
        code, out, _ = cli("blackwell", "--dist", EXPONENTIAL, "--strategy", LARGE_UNIFORM,
                           "--u-list", "0.5,1,2", "--n-trials", 1000, "--seed", 3,
                           "--out-dir", out_dir, "--plot")
        assert code == 0
        assert "3/3 window lengths" in out
        rows = read_rows(out_dir / "blackwell.csv")
        assert [float(r["u"]) for r in rows] == [0.5, 1.0, 2.0]
        assert list(rows[0]) == ["dist", "strategy", "u", "n_trials", "mean", "stderr",
                                 "ci_lo", "ci_hi", "target"]
        assert (out_dir / "blackwell.svg").read_text().lstrip().startswith("<?xml")

    def test_thread_count_does_not_change_output(self, cli, tmp_path, test_config):
        """Test byte-identical CSV output for one and many threads."""
        outputs = []
        for threads in (1, test_config.parallel_threads):
            out_dir = tmp_path / f"threads{threads}"
            code, _, _ = cli("blackwell", "--dist", BIMODAL, "--strategy", LARGE_UNIFORM, "--u", 1,
                             "--n-trials", 2000, "--seed", 11, "--threads", threads, "--out-dir", out_dir)
            assert code == 0
            outputs.append((out_dir / "blackwell.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_config_file_overlaid_by_flags(self, cli, out_dir, tmp_path):
        """Test that explicit flags win over the config file."""
        config = tmp_path / "experiment.json"
        config.write_text(json.dumps({
            "seed": 5,
            "dist": {"kind": "deterministic", "t": 10},
            "strategy": {"kind": "large_uniform", "theta": 1000},
            "u": 10,
            "n_trials": 100,
        }))
        code, out, _ = cli("blackwell", "--config", config, "--u", 20, "--out-dir", out_dir)
        assert code == 0
        (row,) = read_rows(out_dir / "blackwell.csv")
        assert float(row["u"]) == 20.0
        assert float(row["mean"]) == 2.0
        assert float(row["stderr"]) == 0.0
        assert "PASS" in out

    def test_fixed_start_lattice_fails(self, cli, out_dir):
        """Test that a FAIL verdict still exits 0."""
        code, out, _ = cli("blackwell", "--dist", '{"kind":"deterministic","t":10}',
                           "--strategy", '{"kind":"fixed_start","m":0}', "--u", 9,
                           "--n-trials", 100, "--seed", 1, "--out-dir", out_dir)
        assert code == 0
        assert out.rstrip().endswith("FAIL")

    def test_dump_realization(self, cli, out_dir):
        """Test that the trial-0 realization is written and covers its window plus the margin."""
        code, _, _ = cli("blackwell", "--dist", '{"kind":"deterministic","t":10}',
                         "--strategy", '{"kind":"fixed_start","m":0}', "--u", 25,
                         "--n-trials", 10, "--seed", 1, "--out-dir", out_dir, "--dump-realization")
        assert code == 0
        rows = read_rows(out_dir / "realization.csv")
        assert list(rows[0]) == ["index", "event_time", "inter_arrival"]
        assert [int(r["index"]) for r in rows] == list(range(1, len(rows) + 1))
        assert all(float(r["inter_arrival"]) == 10.0 for r in rows)
        assert float(rows[-2]["event_time"]) <= 125.0 < float(rows[-1]["event_time"])

    def test_no_realization_without_flag(self, cli, out_dir):
        code, _, _ = cli("blackwell", "--dist", EXPONENTIAL, "--strategy", LARGE_UNIFORM, "--u", 1,
                         "--n-trials", 10, "--seed", 1, "--out-dir", out_dir)
        assert code == 0
        assert not (out_dir / "realization.csv").exists()


class TestOtherCommands:
    """Test the remaining subcommands end to end."""

    def test_mu(self, cli, out_dir):
        code, out, _ = cli("mu", "--dist", EXPONENTIAL, "--s", 20, "--n-trials", 1000, "--seed", 2,
                           "--out-dir", out_dir)
        assert code == 0
        (row,) = read_rows(out_dir / "mu.csv")
        assert float(row["target"]) == 20.0

    def test_residual(self, cli, out_dir):
        code, out, _ = cli("residual", "--dist", EXPONENTIAL, "--strategy", LARGE_UNIFORM,
                           "--n-trials", 2000, "--seed", 4, "--bucket-width", 0.5,
                           "--out-dir", out_dir, "--plot")
        assert code == 0
        assert len(read_rows(out_dir / "residuals.csv")) == 2000
        report = json.loads((out_dir / "residual_ks.json").read_text())
        assert set(report) == {"residuals", "ages", "conditional_uniformity"}
        assert (out_dir / "residuals.svg").exists()

    def test_lengthbias_continuous_with_plot(self, cli, out_dir):
        code, out, _ = cli("lengthbias", "--dist", UNIFORM, "--strategy", LARGE_UNIFORM,
                           "--n-trials", 2000, "--seed", 4, "--out-dir", out_dir, "--plot")
        assert code == 0
        assert "pass" in json.loads((out_dir / "lengthbias.json").read_text())
        assert (out_dir / "lengthbias.svg").exists()

    def test_lengthbias_atoms(self, cli, out_dir):
        code, out, _ = cli("lengthbias", "--dist", '{"kind":"discrete_atoms","atoms":[[1,0.5],[3,0.5]]}',
                           "--strategy", LARGE_UNIFORM, "--n-trials", 2000, "--seed", 4, "--out-dir", out_dir)
        assert code == 0
        frequencies = json.loads((out_dir / "lengthbias.json").read_text())
        assert [f["expected"] for f in frequencies] == pytest.approx([0.25, 0.75])

    def test_mod1(self, cli, out_dir):
        code, out, _ = cli("mod1", "--dist", EXPONENTIAL, "--n", 10, "--n-trials", 1000, "--seed", 6,
                           "--out-dir", out_dir)
        assert code == 0
        assert len(read_rows(out_dir / "mod1.csv")) == 1000

    def test_span(self, cli, out_dir):
        code, out, _ = cli("span", "--dist", BIMODAL, "--m-max", 8, "--seed", 1, "--out-dir", out_dir)
        assert code == 0
        report = json.loads((out_dir / "span.json").read_text())
        assert report["is_arithmetic"] is True
        assert report["span"] == 20.0
        assert len(read_rows(out_dir / "gamma_scan.csv")) == 8
        assert out.startswith("span: is_arithmetic=True")

    def test_span_scans_once(self, cli, out_dir, monkeypatch):
        calls = []
        original = uniformity_and_span.gamma_scan

        def counting(*args, **kwargs):
            calls.append(args)
            return original(*args, **kwargs)

        monkeypatch.setattr(uniformity_and_span, "gamma_scan", counting)
        code, _, _ = cli("span", "--dist", EXPONENTIAL, "--m-max", 5, "--seed", 1, "--out-dir", out_dir)
        assert code == 0
        assert len(calls) == 1
        assert len(read_rows(out_dir / "gamma_scan.csv")) == 5

    def test_zm(self, cli, out_dir):
        code, out, _ = cli("zm", "--m-list", "1.5,3,1000.5", "--n", 5000, "--seed", 8, "--out-dir", out_dir)
        assert code == 0
        rows = read_rows(out_dir / "zm.csv")
        assert [float(r["m"]) for r in rows] == [1.5, 3.0, 1000.5]
        assert rows[0]["pass"] == "False"

    def test_gauss_mod1(self, cli, out_dir):
        code, out, _ = cli("gauss-mod1", "--sigma", 0.05, "--n", 2000, "--seed", 9, "--out-dir", out_dir)
        assert code == 0
        (row,) = read_rows(out_dir / "gauss_mod1.csv")
        assert row["pass"] == "False"
        assert out.rstrip().endswith("FAIL")

    def test_transform(self, cli, out_dir):
        code, out, _ = cli("transform", "--dist", EXPONENTIAL, "--strategy", LARGE_UNIFORM, "--u", 2,
                           "--n-trials", 1000, "--seed", 10, "--out-dir", out_dir, "--plot")
        assert code == 0
        summary = json.loads((out_dir / "transform_summary.json").read_text())
        assert summary["identity_violations"] == 0
        assert len(read_rows(out_dir / "transform.csv")) == 1000
        assert (out_dir / "transform.svg").exists()

    def test_floor_converse(self, cli, out_dir):
        code, out, _ = cli("floor", "--converse", "beta22", "--seed", 1, "--out-dir", out_dir)
        assert code == 0
        assert len(read_rows(out_dir / "converse.csv")) == 99
        assert "violation(s)" in out

    def test_floor_noisy(self, cli, out_dir):
        code, out, _ = cli("floor", "--c", 0.7, "--noise", '{"kind":"gaussian_noise","sigma":1}',
                           "--n", 20000, "--seed", 12, "--out-dir", out_dir)
        assert code == 0
        (row,) = read_rows(out_dir / "floor.csv")
        assert float(row["exact"]) == pytest.approx(-0.3)

    def test_perturbed(self, cli, out_dir):
        code, out, _ = cli("perturbed", "--t", 10, "--theta", 10000, "--u", 25,
                           "--noise", '{"kind":"discrete_noise","atoms":[[-0.5,0.5],[0.5,0.5]]}',
                           "--noise-end", '{"kind":"gaussian_noise","sigma":2}',
                           "--n-trials", 2000, "--seed", 13, "--out-dir", out_dir)
        assert code == 0
        (row,) = read_rows(out_dir / "perturbed.csv")
        assert float(row["target"]) == 2.5


class TestExitCodes:
    """Test the exit code contract and error output."""

    def test_version(self, cli):
        code, out, _ = cli("--version")
        assert code == 0
        assert __version__ in out

    def test_unknown_command(self, cli):
        code, _, _ = cli("nonsense")
        assert code == 2

    def test_missing_seed(self, cli, out_dir):
        code, _, err = cli("mu", "--dist", EXPONENTIAL, "--s", 5, "--out-dir", out_dir)
        assert code == 2
        payload = error_payload(err)
        assert payload["code"] == "INVALID_PARAMETER"
        assert payload["details"].startswith("--seed")

    def test_invalid_distribution(self, cli, out_dir):
        code, _, err = cli("mu", "--dist", '{"kind":"exponential","rate":0}', "--s", 5, "--seed", 1,
                           "--out-dir", out_dir)
        assert code == 2
        assert error_payload(err)["code"] == "INVALID_DISTRIBUTION"

    def test_non_positive_window_length(self, cli, out_dir):
        code, _, err = cli("blackwell", "--dist", EXPONENTIAL, "--strategy", LARGE_UNIFORM, "--u", 0,
                           "--seed", 1, "--out-dir", out_dir)
        assert code == 2
        assert error_payload(err)["details"].startswith("--u: ")

    def test_missing_required_field(self, cli, out_dir):
        code, _, err = cli("blackwell", "--dist", EXPONENTIAL, "--u", 1, "--seed", 1, "--out-dir", out_dir)
        assert code == 2
        assert "--strategy" in error_payload(err)["details"]

    def test_non_zero_mean_noise(self, cli, out_dir):
        code, _, err = cli("floor", "--c", 0.5, "--noise", '{"kind":"gaussian_noise","mu":1,"sigma":1}',
                           "--n", 1000, "--seed", 1, "--out-dir", out_dir)
        assert code == 2
        assert error_payload(err)["code"] == "NON_ZERO_MEAN_NOISE"

    def test_malformed_config(self, cli, out_dir, tmp_path):
        config = tmp_path / "bad.json"
        config.write_text("[]")
        code, _, err = cli("mu", "--config", config, "--out-dir", out_dir)
        assert code == 2
        assert error_payload(err)["code"] == "MALFORMED_CONFIG"

    def test_event_cap_is_runtime_error(self, cli, out_dir, monkeypatch):
        monkeypatch.setenv("RENEWAL_LAB_MAX_EVENTS", "5")
        code, _, err = cli("blackwell", "--dist", EXPONENTIAL, "--strategy", LARGE_UNIFORM, "--u", 1,
                           "--n-trials", 10, "--seed", 1, "--out-dir", out_dir)
        assert code == 3
        assert error_payload(err)["code"] == "HORIZON_OVERFLOW"

    def test_undetectable_span_is_runtime_error(self, cli, out_dir):
        code, _, err = cli("span", "--dist", '{"kind":"discrete_atoms","atoms":[[2.5e-7,0.5],[1,0.5]]}',
                           "--m-max", 4, "--seed", 1, "--out-dir", out_dir)
        assert code == 3
        assert error_payload(err)["code"] == "SPAN_UNDETECTABLE"
