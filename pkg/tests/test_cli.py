import json
import subprocess
import sys

import pytest

from cdgkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate(capsys):
    code, out, _ = run(capsys, "validate", "counterexample")
    assert code == 0
    code, out, _ = run(capsys, "validate", "broken-leibniz")
    assert code == 1 and "FAIL Leibniz rule" in out
    code, _, err = run(capsys, "validate", "/nonexistent/file.json")
    assert code == 2 and err


@pytest.mark.parametrize("field", [[], ["--field", "Fp:5"]])
@pytest.mark.parametrize("variant", ["homology", "cohomology"])
def test_hh_counterexample(capsys, tmp_path, field, variant):
    path = tmp_path / "hh.json"
    code, out, _ = run(capsys, "hh", "counterexample", "--kind", "second", "--variant", variant,
                       "--json", str(path), *field)
    assert code == 0 and "even: 1" in out
    assert json.loads(path.read_text())["table"] == {"even": 1, "odd": 0}


def test_unsupported_exit_code(capsys):
    code, _, err = run(capsys, "hh", "counterexample", "--kind", "first")
    assert code == 3 and "acyclic" in err
    code, _, _ = run(capsys, "hh", "exterior")
    assert code == 3


def test_usage_errors(capsys):
    assert main(["hh"]) == 2
    capsys.readouterr()
    code, _, _ = run(capsys, "hh", "no-such-fixture")
    assert code == 2


def test_json_round_trip_through_show(capsys, tmp_path):
    path = tmp_path / "report.json"
    code, text, _ = run(capsys, "hh", "endalgebra", "--kind", "first", "--truncate", "3",
                        "--json", str(path))
    assert code == 0
    code, shown, _ = run(capsys, "show", str(path))
    # the report lines reprint identically (the header names the input)
    assert code == 0 and shown == text.split("\n", 1)[1]


def test_compare(capsys):
    code, out, _ = run(capsys, "compare", "BvsC", "counterexample", "--objects", "free1")
    assert code == 0 and "EQUAL: k vs k" in out
    code, out, _ = run(capsys, "compare", "curvature-shift", "matrix2", "--c", "1", "--c", "-1", "--c", "2")
    assert code == 0 and "UNEQUAL" not in out
    code, out, _ = run(capsys, "compare", "delta-probe", "point", "--c", "1")
    assert code == 0
    code, out, _ = run(capsys, "compare", "delta-probe", "point")
    assert code == 1


def test_tor_resolve_and_check(capsys, tmp_path):
    path = tmp_path / "tor.json"
    code, out, _ = run(capsys, "tor", "k-over-exterior-z-right", "k-over-exterior-z", "--kind", "first",
                       "--json", str(path))
    assert code == 0
    assert json.loads(path.read_text())["table"] == {str(n): 1 for n in range(5)}
    code, out, _ = run(capsys, "resolve", "k-over-exterior")
    assert code == 0 and "incomplete at depth 20" in out
    code, out, _ = run(capsys, "check", "bicomplex-identities", "--cases", "3", "--truncate", "3")
    assert code == 0 and "pass" in out


def test_dump(capsys, tmp_path):
    code, _, _ = run(capsys, "dump", "hochschild", "counterexample", "--out", str(tmp_path))
    assert code == 0
    assert (tmp_path / "manifest.json").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cdgkit", "fixtures"], capture_output=True, text=True)
    assert proc.returncode == 0 and "counterexample" in proc.stdout
