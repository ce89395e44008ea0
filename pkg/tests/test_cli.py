import contextlib
import io
import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from f1kgw.cli import main

GOLDEN = Path(__file__).parent / "golden"
FIXTURES = Path(__file__).parent / "fixtures"
COMMANDS = json.loads((GOLDEN / "commands.json").read_text())


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(argv)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", list(COMMANDS))
def test_golden(name):
    code, out, _ = run(COMMANDS[name])
    assert f"exit {code}\n{out}" == (GOLDEN / f"{name}.out").read_text()


@pytest.mark.parametrize("name", ["bundle_split_p2", "gw0_p2_o0_json", "forms_classify_z4"])
def test_byte_identical_reruns(name):
    assert run(COMMANDS[name]) == run(COMMANDS[name])


def test_worked_example_strings():
    assert run(["scheme", "pic", "--builtin", "P2"])[1] == "Pic = Z, generator O(1)\n"
    code, out, _ = run(["bundle", "split", "--scheme", "triangle", "--bundle", str(FIXTURES / "triangle_F.json")])
    assert code == 0 and out == "OBSTRUCTED: 1 component of 6 sheets\n"


def test_json_format_tag():
    code, out, _ = run(["monoid", "info", "F1Z3", "--json"])
    data = json.loads(out)
    assert code == 0 and data["format"] == "f1kgw/1" and data["command"] == "monoid info"


def test_usage_errors_exit_2():
    assert run(["scheme", "pic"])[0] == 2
    assert run(["bogus"])[0] == 2
    assert run(["scheme", "pic", "--builtin", "P2", "--frobnicate"])[0] == 2


def test_parse_error_is_structured():
    code, _, err = run(["scheme", "pic", "--builtin", "P9x"])
    assert code == 2
    assert json.loads(err)["error"] == "ParseError"


def test_domain_error_exit_1():
    code, _, err = run(["k0", "--scheme", "triangle"])
    assert code == 1
    assert json.loads(err)["error"] == "NotIntegral"
    code, _, err = run(["bundle", "split", "--scheme", "triangle", "--bundle", "O(1)"])
    assert code == 1 and json.loads(err)["error"] == "UnsupportedBase"


def test_invalid_bundle_exit_1(tmp_path):
    bad = {"rank": 2, "transitions": [{"pair": [0, 1], "perm": [1, 0], "units": [[0, 0], [0, 0]]},
                                      {"pair": [0, 2], "perm": [0, 1], "units": [[0, 0], [0, 0]]},
                                      {"pair": [1, 2], "perm": [0, 1], "units": [[0, 0], [0, 0]]}]}
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(bad))
    code, out, _ = run(["bundle", "validate", "--scheme", "P2", "--bundle", str(p), "--json"])
    assert code == 1
    assert json.loads(out)["violations"] == [{"kind": "cocycle", "triple": [0, 1, 2]}]


def test_verify_exit_3_on_failure(monkeypatch):
    import f1kgw.cli as cli
    monkeypatch.setattr(cli, "run_suite", lambda seed=0: [("forced", False, "negative control")])
    code, out, _ = run(["verify-all"])
    assert code == 3 and out.startswith("FAIL")


def test_projbundle_build_then_verify(tmp_path):
    target = tmp_path / "pe.json"
    code, out, _ = run(["projbundle", "build", "--base", "P1", "--bundle", "O+O(2)", "-o", str(target)])
    assert code == 0 and out == "P(E): 4 charts, 9 points, Pic = Z^2\n"
    doc = json.loads(target.read_text())
    assert doc["format"] == "f1kgw/1" and len(doc["total"]["charts"]) == 4
    code, out, _ = run(["projbundle", "verify", "--input", str(target), "--twist", "O(2)"])
    assert code == 0 and out.endswith("8/8 checks passed\n")


def test_scheme_from_file(tmp_path):
    p = tmp_path / "x.json"
    p.write_text(json.dumps({"ambient": {"free_rank": 1, "torsion": []}, "charts": [[[1]], [[-1]]]}))
    code, out, _ = run(["scheme", "pic", "--file", str(p)])
    assert code == 0 and out.startswith("Pic = Z")


def test_seed_changes_random_checks_only_through_seed():
    a = run(["verify-all", "--seed", "3", "--json"])[1]
    b = run(["verify-all", "--seed", "3", "--json"])[1]
    assert a == b and json.loads(a)["seed"] == 3


@pytest.mark.skipif(shutil.which("f1kgw") is None, reason="console script not installed")
def test_console_script():
    r = subprocess.run(["f1kgw", "scheme", "pic", "--builtin", "P1"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "Pic = Z, generator O(1)\n"


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "f1kgw.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("f1kgw ")
