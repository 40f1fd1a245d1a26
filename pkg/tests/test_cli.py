"""CLI behavior: schemas, formats, exit codes, determinism, report files."""

import json
import subprocess
import sys

import pytest

from ccoal.cli import main


def _run(*argv):
    return subprocess.run(
        [sys.executable, "-m", "ccoal", *argv],
        capture_output=True,
        timeout=300,
    )


def test_exact_table_headline(capsys):
    assert main(["exact", "--n", "5", "--x", "0.5", "--start", "2,3"]) == 0
    out = capsys.readouterr().out
    header, row = out.strip().splitlines()
    assert header.split()[:5] == ["n", "n1", "n2", "x", "p_white_root"]
    values = row.split()
    assert values[4] == "0.5"
    assert values[6].startswith("2.6")


def test_exact_frozen_even_start(capsys):
    assert main(["exact", "--n", "3", "--x", "0.3", "--start", "2,1",
                 "--format", "csv"]) == 0
    out = capsys.readouterr().out
    row = dict(zip(*[line.split(",") for line in out.strip().splitlines()]))
    assert float(row["p_white_root"]) == pytest.approx(0.58)
    assert float(row["resid_absorb"]) < 1e-12
    assert float(row["resid_time_white"]) < 1e-10


def test_exact_usage_errors(capsys):
    assert main(["exact", "--n", "1", "--x", "0.5", "--start", "0,1"]) == 2
    assert main(["exact", "--n", "5", "--x", "0.5", "--start", "2,2"]) == 2
    assert main(["exact", "--n", "5", "--x", "1.5", "--start", "2,3"]) == 2
    assert "error" in capsys.readouterr().err


def test_ccdf_rows_and_oracle_agreement(capsys):
    assert main(["ccdf", "--n", "3", "--x", "0.5", "--start-parity", "even",
                 "--target-parity", "even", "--t-grid", "0:2:1",
                 "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "t,ccdf_closed_form,ccdf_matrix_oracle,abs_diff"
    assert len(lines) == 4
    first = lines[1].split(",")
    assert float(first[0]) == 0.0
    assert float(first[1]) == 1.0
    second = lines[2].split(",")
    assert float(second[1]) == pytest.approx(0.7178793779815873)
    for line in lines[1:]:
        assert float(line.split(",")[3]) <= 1e-9


def test_ccdf_rejects_malformed_grid(capsys):
    base = ["ccdf", "--n", "3", "--x", "0.5", "--start-parity", "even",
            "--target-parity", "even"]
    assert main([*base, "--t-grid", "0:2"]) == 2
    assert main([*base, "--t-grid", "2:0:1"]) == 2
    assert main([*base, "--t-grid", "0:2:0"]) == 2
    assert main([*base, "--t-grid", "a:b:c"]) == 2
    capsys.readouterr()


def test_ccdf_rejects_bad_parity(capsys):
    assert main(["ccdf", "--n", "3", "--x", "0.5", "--start-parity", "both",
                 "--target-parity", "even", "--t-grid", "0:1:1"]) == 2
    capsys.readouterr()


def test_simulate_same_seed_is_byte_identical():
    argv = ["simulate", "--n", "6", "--start", "3,3", "--x", "0.3",
            "--reps", "2000", "--seed", "42", "--format", "csv"]
    first = _run(*argv)
    second = _run(*argv)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    assert first.stdout.startswith(b"n,n1,x,mode,")


def test_simulate_json_schema(capsys):
    assert main(["simulate", "--n", "4", "--start", "2,2", "--x", "0.5",
                 "--reps", "50", "--seed", "9", "--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["schema_version"] == 1
    assert document["params"]["command"] == "simulate"
    assert len(document["rows"]) == 1
    row = document["rows"][0]
    assert row["freq_white_root"] + row["freq_black_root"] == pytest.approx(1.0)


def test_simulate_single_replicate_nan_becomes_null(capsys):
    assert main(["simulate", "--n", "4", "--start", "2,2", "--x", "0.5",
                 "--reps", "1", "--seed", "9", "--format", "json"]) == 0
    row = json.loads(capsys.readouterr().out)["rows"][0]
    assert row["stderr_time_any"] is None


def test_simulate_usage_errors(capsys):
    base = ["simulate", "--n", "4", "--start", "2,2", "--x", "0.5"]
    assert main([*base, "--reps", "0", "--seed", "1"]) == 2
    assert main([*base, "--reps", "10"]) == 2  # --seed is required
    assert main([*base, "--reps", "10", "--seed", "1",
                 "--mode", "conditional"]) == 2
    capsys.readouterr()


def test_simulate_conditional_mode(capsys):
    assert main(["simulate", "--n", "5", "--start", "1,4", "--x", "0.4",
                 "--reps", "200", "--seed", "3", "--mode", "conditional",
                 "--target", "odd", "--format", "json"]) == 0
    row = json.loads(capsys.readouterr().out)["rows"][0]
    assert row["freq_black_root"] == 1.0
    assert row["target"] == "odd"


def test_lump_check_rows(capsys):
    assert main(["lump-check", "--n", "6", "--x", "0.3", "--t", "0.5,1.0",
                 "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,x,check,t,residual"
    checks = [line.split(",")[2] for line in lines[1:]]
    assert checks == [
        "generator_lumpability", "semigroup", "semigroup",
        "jump_commutes_with_lump",
    ]
    for line in lines[1:]:
        assert float(line.split(",")[4]) <= 1e-9


def test_lump_check_t_zero(capsys):
    assert main(["lump-check", "--n", "2", "--x", "0.5", "--t", "0",
                 "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    semigroup = [l for l in lines if l.split(",")[2] == "semigroup"]
    assert len(semigroup) == 1
    assert float(semigroup[0].split(",")[4]) <= 1e-14


def test_lump_check_rejects_bad_x(capsys):
    assert main(["lump-check", "--n", "4", "--x", "1.0"]) == 2
    capsys.readouterr()


def test_wf_row_and_usage(capsys):
    assert main(["wf", "--pop", "60", "--n", "4", "--x", "0.5",
                 "--reps", "40", "--seed", "5", "--format", "json"]) == 0
    row = json.loads(capsys.readouterr().out)["rows"][0]
    assert row["freq_root_black"] + row["freq_root_white"] == pytest.approx(1.0)
    assert row["ref_time_any"] == pytest.approx(1.5)
    assert main(["wf", "--pop", "5", "--n", "10", "--x", "0.5",
                 "--reps", "10", "--seed", "1"]) == 2
    capsys.readouterr()


def test_wf_colors_flag(capsys):
    assert main(["wf", "--pop", "50", "--n", "3", "--x", "0.3",
                 "--reps", "5", "--seed", "2", "--colors", "bbw",
                 "--format", "json"]) == 0
    row = json.loads(capsys.readouterr().out)["rows"][0]
    assert row["colors"] == "BBW"
    assert main(["wf", "--pop", "50", "--n", "3", "--x", "0.3",
                 "--reps", "5", "--seed", "2", "--colors", "BQW"]) == 2
    capsys.readouterr()


def test_sweep_expected_time_column(capsys):
    assert main(["sweep", "--n-range", "2:6", "--x", "0.5",
                 "--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    header = lines[0].split(",")
    index = header.index("e_time_any")
    values = [float(line.split(",")[index]) for line in lines[1:]]
    assert values == pytest.approx([1.0, 4.0 / 3.0, 1.5, 1.6, 5.0 / 3.0])
    for line in lines[1:]:
        parts = line.split(",")
        total = float(parts[header.index("p_white_root")]) + float(
            parts[header.index("p_black_root")]
        )
        assert total == pytest.approx(1.0)


def test_sweep_usage_errors(capsys):
    assert main(["sweep", "--n-range", "6:2", "--x", "0.5"]) == 2
    assert main(["sweep", "--n-range", "1:4", "--x", "0.5"]) == 2
    assert main(["sweep", "--n-range", "2:4", "--x", "0.5,nope"]) == 2
    capsys.readouterr()


def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "result.csv"
    assert main(["exact", "--n", "4", "--x", "0.25", "--start", "2,2",
                 "--format", "csv", "--out", str(target)]) == 0
    assert capsys.readouterr().out == ""
    content = target.read_text(encoding="utf-8")
    assert content.startswith("n,n1,n2,x,")


def test_report_writes_figure_bundle(tmp_path, capsys):
    assert main(["report", "--n", "5", "--x", "0.3", "--out-dir",
                 str(tmp_path), "--t-max", "4", "--t-step", "0.5",
                 "--seed", "3", "--reps", "500"]) == 0
    out = capsys.readouterr().out
    for name in ("ccdf.csv", "ccdf.png", "expected_times.csv",
                 "expected_times.png"):
        assert (tmp_path / name).exists()
        assert name in out
    header = (tmp_path / "ccdf.csv").read_text().splitlines()[0]
    assert "ccdf_white_empirical" in header
    assert (tmp_path / "ccdf.png").stat().st_size > 1000


def test_console_script_entry_point():
    result = _run("exact", "--n", "2", "--x", "0.5", "--start", "1,1",
                  "--format", "json")
    assert result.returncode == 0
    document = json.loads(result.stdout)
    assert document["rows"][0]["e_time_any"] == 1.0


def test_missing_subcommand_is_usage_error():
    result = _run()
    assert result.returncode == 2
