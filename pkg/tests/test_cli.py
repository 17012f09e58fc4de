import io
import json
import subprocess
import sys

import pytest

from aspolylog.cli import cli_main


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli_main(list(argv), stdout=out, stderr=err)
    doc = json.loads(out.getvalue()) if out.getvalue().strip().startswith("{") else None
    return code, doc, err.getvalue()


def test_pi():
    code, doc, _ = run("pi", "--q", "3")
    assert code == 0 and doc["norm_exponent"] == "3/2" and doc["schema"] == 1


def test_omega_small():
    code, doc, _ = run("omega", "--q", "2", "--T", "8", "--P", "16")
    assert code == 0 and doc["ok"]


def test_polylog_eval_and_out_of_region():
    code, doc, _ = run("polylog", "eval", "--q", "3", "--weight", "1,2", "--z", "θ, θ+1")
    assert code == 0 and doc["region"] == "inside_D_prime"
    code, doc, _ = run("polylog", "eval", "--q", "3", "--weight", "1", "--z", "θ^3")
    assert code == 1 and doc["error"] == "OutOfRegion"


def test_polylog_continue_and_monodromy():
    code, doc, _ = run("polylog", "continue", "--q", "2", "--weight", "1,1", "--z", "θ^2, θ", "--star")
    assert code == 0 and len(doc["values"]) == 2
    code, doc, _ = run("polylog", "monodromy", "--q", "2", "--weight", "1,1", "--z", "θ, 1")
    assert code == 0 and len(doc["evaluated"]) == 2


def test_tmodule_commands():
    code, doc, _ = run("tmodule", "log", "--q", "2", "--z", "θ, 1")
    assert code == 0 and doc["n"] == 2
    code, doc, _ = run("tmodule", "check-inverse", "--q", "3", "--n", "2", "--R", "8")
    assert code == 0


def test_relations_commands():
    code, doc, _ = run("relations", "orthogonality", "--q", "2", "--weight", "1,2", "--z", "θ, 1")
    assert code == 0 and doc["verdict"]
    code, doc, _ = run("relations", "chang-mishiba", "--q", "3", "--weight", "2,1", "--z", "1, θ")
    assert code == 0 and doc["verdict"]
    code, doc, _ = run("relations", "eulerian", "--q", "3", "--weight", "2", "--z", "1", "--shift", "1+t")
    assert code == 0 and doc["verdicts"] == [True, True]


def test_zeta_brute():
    code, doc, _ = run("zeta", "brute", "--q", "3", "--n", "2", "--deg", "4")
    assert code == 0 and doc["deg"] == 4 and doc["value"]["j_hi"] == 0


def test_usage_errors():
    assert run("bogus")[0] == 2
    assert run("pi", "--q", "6")[0] == 2
    code, _, err = run("polylog", "eval", "--q", "3", "--weight", "1,2", "--z", "θ+")
    assert code == 2 and "error" in err
    code, _, err = run("polylog", "eval", "--q", "3", "--weight", "1,2", "--z", "θ")
    assert code == 2


def test_text_format():
    out = io.StringIO()
    assert cli_main(["pi", "--q", "2", "--format", "text"], stdout=out) == 0
    assert "norm_exponent: 2" in out.getvalue()


def test_selftest_is_byte_identical():
    a = subprocess.run([sys.executable, "-m", "aspolylog", "selftest", "--q", "2"], capture_output=True)
    b = subprocess.run([sys.executable, "-m", "aspolylog", "selftest", "--q", "2"], capture_output=True)
    assert a.returncode == 0 and a.stdout == b.stdout
