import json
import subprocess
import sys

import pytest

from qtails.catalog import export_qid, get_identity
from qtails.cli import run
from qtails.dsl import format_identity_file
from qtails.verify import REPORT_FIELDS, reports_from_json

MUTANT = (
    format_identity_file([get_identity("S_8_7")])
    .replace('"S_8_7"', '"S_8_7_mutant"')
    .replace("== h(5);", "== h(4);")
)


def test_verify_7_2(capsys):
    assert run(["verify", "--id", "7_2", "--order", "15"]) == 0
    out = capsys.readouterr().out
    assert "7_2" in out and "verified" in out


def test_verify_s87(capsys, tmp_path):
    path = tmp_path / "r.json"
    assert run(["verify", "--id", "S_8_7", "--order", "20", "--report", str(path)]) == 0
    (rep,) = reports_from_json(path.read_text())
    assert (rep.name, rep.order, rep.status) == ("S_8_7", 20, "verified")
    assert rep.first_mismatch is None


def test_eval_h4(capsys):
    assert run(["eval", "h(4)", "--order", "6"]) == 0
    assert capsys.readouterr().out.strip() == "1 - q + q^3 - q^6"


def test_check_mutant(tmp_path, capsys):
    assert "h(4)" in MUTANT
    src = tmp_path / "mutant.qid"
    src.write_text(MUTANT)
    report = tmp_path / "r.json"
    assert run(["check", str(src), "--order", "20", "--report", str(report)]) == 1
    (rep,) = json.loads(report.read_text())
    assert rep["status"] == "mismatch"
    assert rep["first_mismatch"] == 3
    assert isinstance(rep["lhs_coefficient"], str) and isinstance(rep["rhs_coefficient"], str)
    assert int(rep["lhs_coefficient"]) != int(rep["rhs_coefficient"])


def test_report_schema(tmp_path):
    report = tmp_path / "r.json"
    assert run(["verify", "--id", "S_5_1", "--report", str(report)]) == 0
    (rep,) = json.loads(report.read_text(encoding="utf-8"))
    assert list(rep) == list(REPORT_FIELDS)
    assert set(rep) == {
        "name", "order", "status", "first_mismatch", "lhs_coefficient",
        "rhs_coefficient", "points_visited", "elapsed_ms",
    }
    assert rep["order"] == 30 and rep["points_visited"] > 0


def test_syntax_error_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.qid"
    bad.write_text('identity "x": h(3) * == h(3);')
    assert run(["check", str(bad)]) == 2
    err = capsys.readouterr().err
    assert err.startswith("qtails: error:") and "line 1" in err


def test_eval_syntax_error(capsys):
    assert run(["eval", "h(0)", "--order", "3"]) == 2
    assert "qtails: error:" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "--id", "S_11_7"],
        ["hunt", "--id", "12_1", "--order", "10"],
        ["check", "/nonexistent/file.qid"],
        ["verify"],
        ["bogus"],
        ["eval", "h(3)"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert run(argv) == 2
    assert capsys.readouterr().err


def test_hunt_output(capsys):
    assert run(["hunt", "--expr", "h(3) * h(4)", "--order", "25", "--max-factors", "2", "--eta-min", "0", "--eta-max", "0"]) == 0
    assert capsys.readouterr().out.split("\n")[0] == "h(3) * h(4)"


def test_hunt_no_match(capsys):
    assert run(["hunt", "--id", "8_5", "--order", "30"]) == 0
    assert capsys.readouterr().out.strip() == "no product match"


def test_list(capsys):
    assert run(["list"]) == 0
    out = capsys.readouterr().out
    assert "S_10_19" in out and "[corrected]" in out
    assert run(["list", "--knots"]) == 0
    out = capsys.readouterr().out
    assert "10_45" in out and "9_24" in out


def test_check_exported_catalog_subset(tmp_path, capsys):
    src = tmp_path / "some.qid"
    src.write_text(export_qid([get_identity(n) for n in ("double", "triple", "e1(j=2)")]))
    assert run(["check", str(src)]) == 0


def test_verify_all_deterministic_across_jobs(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    # small orders keep this quick; the full run is covered by the acceptance suite
    assert run(["verify", "--all", "--order", "12", "--report", str(a)]) == 0
    assert run(["verify", "--all", "--order", "12", "--report", str(b), "--jobs", "2"]) == 0
    ra, rb = reports_from_json(a.read_text()), reports_from_json(b.read_text())
    assert [r.comparable() for r in ra] == [r.comparable() for r in rb]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qtails", "eval", "eta^-1", "--order", "5"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "1 + q + 2*q^2 + 3*q^3 + 5*q^4 + 7*q^5"
