import json
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from trendlab import SizeHistogram, read_histogram, write_histogram
from trendlab.cli import (
    EXIT_CHECK_FAILED,
    EXIT_ESTIMATOR,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    main,
    thread_limit,
)


def files(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_exit_codes_are_distinct():
    assert len({EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CHECK_FAILED, EXIT_ESTIMATOR}) == 5


def test_simulate_zero_steps(tmp_path):
    out = tmp_path / "run"
    assert main(["simulate", "--lambda", "0.3333333", "--p", "0.8", "--steps", "0",
                 "--replications", "3", "--out", str(out)]) == EXIT_OK
    for r in range(3):
        hist, header = read_histogram(out / f"hist_r{r:03d}.tsv")
        assert hist == SizeHistogram({1: 1})
        assert header["replication"] == str(r) and header["lambda"] == "0.3333333"
        assert header["artifact"].startswith("trendlab ")
    summary = json.loads((out / "summary.json").read_text())
    assert len(summary["replications"]) == 3
    assert summary["aggregate"]["predicted_exponent"] == pytest.approx(1 + 1.3333333 / 0.8)
    assert all(r["alpha_hat"] is None and r["lcc_fraction"] == 1.0 for r in summary["replications"])


def test_simulate_is_byte_identical(tmp_path):
    args = ["simulate", "--lambda-ratio", "1/3", "--p", "0.8", "--q", "0.9", "--steps", "3000",
            "--seed", "42", "--replications", "2", "--emit-events"]
    assert main(args + ["--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(args + ["--out", str(tmp_path / "b")]) == EXIT_OK
    a, b = files(tmp_path / "a"), files(tmp_path / "b")
    assert a == b
    assert "events_r001.jsonl" in a and "hist_r000.tsv" in a
    # different replications get different seeds
    assert a["hist_r000.tsv"].split(b"# seed")[1] != a["hist_r001.tsv"].split(b"# seed")[1]


def test_event_log_format(tmp_path):
    out = tmp_path / "ev"
    main(["simulate", "--lambda", "0.5", "--p", "0.5", "--steps", "50", "--out", str(out), "--emit-events"])
    lines = (out / "events_r000.jsonl").read_text().splitlines()
    assert lines[0].startswith("# ") and json.loads(lines[0][2:])["steps"] == 50
    records = [json.loads(line) for line in lines[1:]]
    assert [r["t"] for r in records] == list(range(1, 51))
    assert {r["kind"] for r in records} <= {"T1", "T2", "T3"}
    for r in records:
        assert ("new_node" in r) == (r["kind"] != "T3")


def test_simulate_thread_bound_does_not_change_output(tmp_path, monkeypatch):
    args = ["simulate", "--lambda", "0.3333333", "--p", "1", "--steps", "2000", "--seed", "5",
            "--replications", "3"]
    monkeypatch.setenv("TRENDLAB_THREADS", "1")
    main(args + ["--out", str(tmp_path / "serial")])
    monkeypatch.setenv("TRENDLAB_THREADS", "2")
    assert thread_limit() == 2
    main(args + ["--out", str(tmp_path / "pool")])
    assert files(tmp_path / "serial") == files(tmp_path / "pool")


def test_bad_thread_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("TRENDLAB_THREADS", "many")
    code = main(["simulate", "--lambda", "1", "--p", "1", "--steps", "1", "--replications", "2",
                 "--out", str(tmp_path)])
    assert code == EXIT_USAGE and "TRENDLAB_THREADS" in capsys.readouterr().err


def test_unwritable_output(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(["simulate", "--lambda", "1", "--p", "1", "--steps", "1", "--out", str(blocker / "sub")])
    assert code == EXIT_IO
    assert "cannot write" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["simulate", "--p", "1"],
    ["simulate", "--lambda", "1", "--lambda-ratio", "1/2", "--p", "1"],
    ["simulate", "--lambda", "nan", "--p", "1"],
    ["simulate", "--lambda-ratio", "x/y", "--p", "1"],
    ["bogus"],
])
def test_invalid_flags_are_usage_errors(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    ["simulate", "--lambda", "-1", "--p", "1"],
    ["simulate", "--lambda", "1", "--p", "1.5"],
    ["simulate", "--lambda", "1", "--p", "1", "--replications", "0"],
    ["urn", "--p-bar", "2"],
])
def test_invalid_values_are_usage_errors(argv, tmp_path, capsys):
    assert main(argv + ["--out", str(tmp_path)]) == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def _yule_file(path, n=20_000, seed=1, header=None):
    sample = stats.yulesimon.rvs(4 / 3, size=n, random_state=np.random.default_rng(seed))
    write_histogram(path, SizeHistogram.from_sizes(sample), header)
    return path


def _table(text):
    return [line.split("\t") for line in text.splitlines() if line and not line.startswith("#")]


def test_fit_yule_sample(tmp_path, capsys):
    f = _yule_file(tmp_path / "y.tsv")
    assert main(["fit", str(f), "--lambda-ratio", "1/3", "--p", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    rows = _table(out)
    assert float(rows[0][1]) == pytest.approx(7 / 3, abs=0.05)
    assert rows[0][3] == "false"
    assert "# predicted_exponent: 2.333" in out
    # the overplot table lists the observed support with the model pdf
    pdf_rows = rows[1:]
    assert int(pdf_rows[0][0]) == 1 and float(pdf_rows[0][2]) == pytest.approx(4 / 7, abs=1e-12)


def test_fit_reports_predicted_exponent_from_header(tmp_path, capsys):
    f = _yule_file(tmp_path / "y.tsv", header={"lambda": "1/3", "p": "0.8"})
    assert main(["fit", str(f)]) == EXIT_OK
    out = capsys.readouterr().out
    line = next(l for l in out.splitlines() if l.startswith("# predicted_exponent:"))
    assert float(line.split(":")[1]) == pytest.approx(8 / 3, abs=1e-12)
    assert _table(out)[0][3] == "true"  # p < 1 drops the largest component by default


def test_fit_all_singletons(tmp_path, capsys):
    f = tmp_path / "ones.tsv"
    write_histogram(f, SizeHistogram({1: 500}))
    assert main(["fit", str(f)]) == EXIT_ESTIMATOR
    assert "identifiable" in capsys.readouterr().err


def test_fit_malformed_file_names_line(tmp_path, capsys):
    f = tmp_path / "bad.tsv"
    f.write_text("# size\tcount\tfraction\n1\t10\t0.5\n2\tten\t0.5\n")
    assert main(["fit", str(f)]) == EXIT_IO
    assert f"{f}:3:" in capsys.readouterr().err


def test_fit_missing_file(tmp_path):
    assert main(["fit", str(tmp_path / "nope.tsv")]) == EXIT_IO


def test_oracle_check_passes(capsys):
    assert main(["oracle-check", "--lambda-ratio", "1/3", "--t-max", "5"]) == EXIT_OK
    out = capsys.readouterr().out
    tvs = [line for line in out.splitlines() if line.startswith("t=")]
    assert len(tvs) == 5 and all("tv=0.0\tok" in line for line in tvs)
    rg = next(line for line in out.splitlines() if line.startswith("# rg t=2:"))
    urn = next(line for line in out.splitlines() if line.startswith("# urn t=2:"))
    assert rg.count("{") == 3 and urn.count("{") == 3
    assert rg.split(":", 1)[1] == urn.split(":", 1)[1]


def test_oracle_check_decimal_lambda():
    assert main(["oracle-check", "--lambda", "1", "--t-max", "3"]) == EXIT_OK


def test_oracle_check_refuses_large_horizon(capsys):
    assert main(["oracle-check", "--lambda-ratio", "1/3", "--t-max", "7"]) == EXIT_USAGE
    assert "limit" in capsys.readouterr().err


def test_urn_all_new_bins(tmp_path):
    assert main(["urn", "--p-bar", "1", "--steps", "500", "--out", str(tmp_path)]) == EXIT_OK
    hist, header = read_histogram(tmp_path / "hist_r000.tsv")
    assert hist == SizeHistogram({1: 501}) and header["command"] == "urn"


def test_urn_exponent_and_determinism(tmp_path):
    args = ["urn", "--p-bar", "0.25", "--steps", "100000", "--seed", "7"]
    assert main(args + ["--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(args + ["--out", str(tmp_path / "b")]) == EXIT_OK
    assert files(tmp_path / "a") == files(tmp_path / "b")
    summary = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert summary["aggregate"]["predicted_exponent"] == pytest.approx(7 / 3)
    assert summary["aggregate"]["alpha_hat_mean"] == pytest.approx(7 / 3, abs=0.1)


def test_sweep(tmp_path):
    assert main(["sweep", "--lambda", "0.5", "1", "--p", "1", "0.5", "--steps", "500",
                 "--out", str(tmp_path)]) == EXIT_OK
    index = json.loads((tmp_path / "sweep.json").read_text())
    assert len(index["runs"]) == 4
    for run in index["runs"]:
        sub = tmp_path / run["dir"]
        assert (sub / "hist_r000.tsv").exists() and (sub / "summary.json").exists()
        assert run["predicted_exponent"] == pytest.approx(1 + (run["lambda"] + 1) / run["p"])


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "trendlab.cli", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("trendlab ")
