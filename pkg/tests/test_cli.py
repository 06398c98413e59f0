import csv
import dataclasses
import io
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from walshgreedy import cli
from walshgreedy.cli import fraction_str, parse_coeff, parse_expansion, run
from walshgreedy.greedy import Explicit, Symbolic


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fraction_str():
    assert fraction_str(Fraction(17, 8)) == "17/8"
    assert fraction_str(3) == "3/1"
    big = Fraction(1, 1 << 20000)
    assert fraction_str(big).startswith("1/")


def test_parse_coeff():
    assert parse_coeff("sym:2,9") == Symbolic(2, 9)
    assert parse_coeff("-3/4") == Explicit(Fraction(-3, 4))
    assert parse_coeff("0.5") == Explicit(Fraction(1, 2))
    with pytest.raises(ValueError):
        parse_coeff("sym:2")


def test_parse_expansion():
    e = parse_expansion("# header\n5\t1/2\n\n2\tsym:1,3\n")
    assert [t.index for t in e] == [2, 5]
    for bad in ("1\t1\n1\t2\n", "-1\t1\n", "", "3 1\n", "x\t1\n"):
        with pytest.raises(ValueError):
            parse_expansion(bad)


def test_verify_is_deterministic(capsys):
    code1, out1, _ = invoke(capsys, "verify", "--blocks", "3")
    code2, out2, _ = invoke(capsys, "verify", "--blocks", "3")
    assert code1 == code2 == 0
    assert out1 == out2
    payload = json.loads(out1)
    assert payload["all_passed"] is True
    assert payload["k_sequence"] == [2, 3, 6]
    first = payload["records"][0]
    assert (first["nu"], first["m_nu"], first["lebesgue"]) == (2, 11, "17/8")
    assert Fraction(first["gap_lower"]) >= Fraction(1, 2)


def test_verify_csv(capsys):
    code, out, _ = invoke(capsys, "verify", "--blocks", "2", "--format", "csv")
    assert code == 0
    (row,) = list(csv.DictReader(io.StringIO(out)))
    assert row["gap_lower"] == "137217/262144"
    assert row["passed"] == "True"


def test_verify_rejects_single_block(capsys):
    code, out, err = invoke(capsys, "verify", "--blocks", "1")
    assert code == 1 and out == ""
    assert "V" in err


def test_failed_bound_exit_code(capsys, monkeypatch):
    real = cli.verify_theorem

    def failing(cfg):
        return dataclasses.replace(real(cfg), all_passed=False)

    monkeypatch.setattr(cli, "verify_theorem", failing)
    code, out, _ = invoke(capsys, "verify", "--blocks", "2")
    assert code == 2
    assert json.loads(out)["all_passed"] is False


def test_resource_limit_exit_code(capsys):
    code, out, err = invoke(capsys, "verify", "--blocks", "6", "--level-cap", "20")
    assert code == 1 and out == ""
    assert "largest feasible V is 5" in err


def test_usage_errors(capsys):
    assert invoke(capsys, "verify", "--bogus")[0] == 1
    assert invoke(capsys, "lebesgue")[0] == 1
    assert invoke(capsys, "lebesgue", "--max-k", "0")[0] == 1
    assert invoke(capsys, "kernel", "--m", "5", "--level", "1")[0] == 1
    assert invoke(capsys)[0] == 1


def test_lebesgue_csv(capsys):
    code, out, _ = invoke(capsys, "lebesgue", "--max-k", "4", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["k"], r["m"], r["lebesgue"]) for r in rows] == [
        ("1", "1", "1/1"), ("2", "3", "3/2"), ("3", "5", "7/4"), ("4", "11", "17/8"),
    ]
    assert all(r["log_bound_holds"] == "True" for r in rows)


def test_kernel_json(capsys):
    code, out, _ = invoke(capsys, "kernel", "--m", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["level"] == 2
    assert [c["value"] for c in payload["cells"]] == ["3/1", "1/1", "1/1", "-1/1"]


def test_build_formats(capsys):
    code, tsv, _ = invoke(capsys, "build", "--blocks", "2", "--format", "tsv")
    assert code == 0
    e = parse_expansion(tsv)
    assert [t.index for t in e] == list(range(4, 16))
    code, out, _ = invoke(capsys, "build", "--blocks", "2")
    payload = json.loads(out)
    assert [b["k_nu"] for b in payload["blocks"]] == [2, 3]
    assert payload["terms"][0]["coeff"] == "sym:1,4"
    code, out, _ = invoke(capsys, "build", "--blocks", "2", "--format", "csv")
    assert len(list(csv.DictReader(io.StringIO(out)))) == 12


def test_greedy_run_round_trip(capsys, tmp_path):
    path = tmp_path / "f.tsv"
    assert run(["build", "--blocks", "2", "--format", "tsv", "-o", str(path)]) == 0
    code, out, _ = invoke(capsys, "greedy-run", "--input", str(path), "--m", "4")
    assert code == 0
    payload = json.loads(out)
    assert payload["selected_indices"] == [4, 5, 6, 7]
    assert payload["level"] == 4
    assert payload["remainder"] == "0/1"
    code, out, _ = invoke(capsys, "greedy-run", "--input", str(path), "--m", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 16


def test_greedy_run_bad_inputs(capsys, tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("4\t1\n4\t2\n")
    assert invoke(capsys, "greedy-run", "--input", str(bad), "--m", "1")[0] == 1
    assert invoke(capsys, "greedy-run", "--input", str(tmp_path / "missing"), "--m", "1")[0] == 1
    good = tmp_path / "good.tsv"
    good.write_text("4\t1\n")
    assert invoke(capsys, "greedy-run", "--input", str(good), "--m", "2")[0] == 1
    assert invoke(capsys, "greedy-run", "--input", str(good), "--m", "1", "--level", "2")[0] == 1


def test_output_file_is_written_whole(capsys, tmp_path):
    target = tmp_path / "report.json"
    target.write_text("stale")
    assert run(["verify", "--blocks", "2", "-o", str(target)]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["all_passed"] is True
    assert [p.name for p in tmp_path.iterdir()] == ["report.json"]


def test_failed_run_leaves_existing_output(tmp_path):
    target = tmp_path / "report.json"
    target.write_text("keep")
    assert run(["verify", "--blocks", "6", "--level-cap", "20", "-o", str(target)]) == 1
    assert target.read_text() == "keep"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "walshgreedy", "lebesgue", "--max-k", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[1]["lebesgue"] == "3/2"
