import json
import subprocess
import sys

import pytest

from qtails.cli import main
from qtails.dsl import shipped_scripts


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_pass_and_fail(capsys):
    assert run(capsys, "verify", "--id", "2.12", "--order", "40")[0] == 0
    code, out, _ = run(capsys, "verify", "--id", "2.13", "--order", "40")
    assert code == 1 and "first mismatch q^1" in out


def test_diagnose_names_sign_flip(capsys):
    code, out, _ = run(capsys, "diagnose", "--id", "2.13", "--order", "40")
    assert code == 1
    assert "flip the sign of the right-side term 'E2 error series'" in out


def test_json_report(tmp_path, capsys):
    path = tmp_path / "r.json"
    run(capsys, "diagnose", "--id", "3.4", "--order", "30", "--json", str(path))
    d = json.loads(path.read_text())
    assert d == {
        "id": "3.4",
        "order": 30,
        "status": "fail",
        "first_mismatch": 0,
        "residual": ["1/4", "1/4", "1/2", "3/4", "5/4", "7/4", "11/4", "15/4"],
        "correction": "add (1/4)*1/(q)_inf to the right side",
    }


def test_script_json_is_list(tmp_path, capsys):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "--script", str(shipped_scripts()["2.10"]), "--order", "20",
                     "--json", str(path))
    d = json.loads(path.read_text())
    assert code == 1
    assert [x["status"] for x in d] == ["fail", "pass"]


def test_seq_csv(capsys):
    code, out, _ = run(capsys, "seq", "--name", "theta", "--n", "2", "--order", "10", "--format", "csv")
    assert code == 0 and out == "1,2,1,1,0,0,0,0,0,0\n"
    _, out, _ = run(capsys, "seq", "--name", "omega", "--n", "0:2", "--order", "4")
    assert out.splitlines() == ["1,0,0,0", "1,1,0,0", "1,1,2,1"]


def test_seq_json(capsys):
    _, out, _ = run(capsys, "seq", "--name", "j", "--n", "4", "--order", "6", "--format", "json")
    assert json.loads(out)["polynomials"]["4"] == ["1", "1", "2", "3", "1", "0"]


def test_partitions_and_ideals(capsys):
    assert run(capsys, "partitions", "--identity", "2.22", "--max", "20")[0] == 0
    code, out, _ = run(capsys, "ideals", "--max-norm", "9")
    assert code == 0
    assert out.splitlines()[1:] == ["1,1", "2,1", "3,0", "4,1", "5,0", "6,0", "7,2", "8,1", "9,1"]


def test_lvalues(capsys):
    code, out, _ = run(capsys, "lvalues", "--nmax", "2", "--digits", "40")
    assert code == 0 and "matching sign: +1" in out


def test_lvalues_numeric_instability(capsys):
    assert run(capsys, "lvalues", "--source", "coeffs", "--qorder", "100")[0] == 3


def test_usage_errors(capsys, tmp_path):
    with pytest.raises(SystemExit) as ei:
        main(["verify", "--bogus"])
    assert ei.value.code == 2
    assert run(capsys, "verify", "--id", "9.9")[0] == 2
    bad = tmp_path / "bad.qid"
    bad.write_text("let x = poch(\n")
    code, _, err = run(capsys, "verify", "--script", str(bad))
    assert code == 2 and "line 1" in err
    assert run(capsys, "verify", "--script", str(tmp_path / "missing.qid"))[0] == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "qtails", "seq", "--name", "v", "--n", "0", "--order", "7"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "1,1,0,1,0,0,1"
