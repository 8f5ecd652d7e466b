import json
import math
import subprocess
import sys

import pytest

from thetabody import cli
from thetabody import graph as G


@pytest.fixture
def files(tmp_path):
    out = {}
    for name, g in [("c5", G.cycle(5)), ("k4", G.complete(4)), ("k3", G.complete(3)),
                    ("petersen", G.petersen()), ("e3", G.empty(3))]:
        p = tmp_path / f"{name}.col"
        p.write_text(G.to_dimacs(g))
        out[name] = str(p)
    return out


def run(argv, capsys):
    code = cli.main(argv)
    return code, capsys.readouterr()


def report(argv, capsys):
    code, cap = run(argv, capsys)
    return code, json.loads(cap.out)


@pytest.mark.parametrize("name,value", [("c5", math.sqrt(5)), ("k4", 1.0), ("petersen", 4.0)])
def test_theta_command(files, capsys, name, value):
    code, rep = report(["theta", "--graph", files[name]], capsys)
    assert code == 0
    assert rep["schema_version"] == cli.SCHEMA_VERSION
    assert rep["values"]["theta"] == pytest.approx(value, abs=1e-5)
    assert all(c["status"] == "pass" for c in rep["checks"].values())
    assert "timings" not in rep


def test_chain_command(files, capsys):
    code, rep = report(["chain", "--graph", files["k3"]], capsys)
    assert code == 0
    vals = rep["values"]
    got = [vals[k] for k in ("alpha", "theta_prime", "theta", "theta_plus", "qstab", "frac")]
    assert got == pytest.approx([1, 1, 1, 1, 1, 1.5], abs=1e-6)
    code, rep = report(["chain", "--graph", files["e3"]], capsys)
    assert code == 0


def test_other_commands(files, capsys):
    for cmd in ("duality", "hoffman", "luz", "frac", "chifrac"):
        code, rep = report([cmd, "--graph", files["c5"], "--samples", "9"], capsys)
        assert code == 0, (cmd, rep["checks"])
        assert rep["command"] == cmd
    _, rep = report(["luz", "--graph", files["c5"]], capsys)
    assert rep["values"]["upsilon"] == pytest.approx(math.sqrt(5), abs=1e-5)
    _, rep = report(["chifrac", "--graph", files["c5"]], capsys)
    assert rep["values"]["chi_fractional"] == pytest.approx(2.5, abs=1e-9)


def test_reports_are_reproducible(files, tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        assert cli.main(["duality", "--graph", files["c5"], "--variant", "thp",
                         "--samples", "9", "--out", str(p)]) == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_weights_file(files, tmp_path, capsys):
    w = tmp_path / "w.txt"
    w.write_text("1\n1\n1\n1\n0\n")
    code, rep = report(["theta", "--graph", files["c5"], "--weights", str(w)], capsys)
    assert code == 0
    assert rep["values"]["theta"] == pytest.approx(2, abs=1e-6)


def test_errors_exit_2(files, tmp_path, capsys):
    bad = tmp_path / "bad.col"
    bad.write_text("p edge 2 1\ne 1 3\n")
    code, cap = run(["theta", "--graph", str(bad)], capsys)
    assert code == 2 and "line 2" in cap.err
    code, _ = run(["theta", "--graph", str(tmp_path / "missing.col")], capsys)
    assert code == 2
    w = tmp_path / "w.txt"
    w.write_text("1\n-1\n1\n1\n1\n")
    code, _ = run(["theta", "--graph", files["c5"], "--weights", str(w)], capsys)
    assert code == 2
    with pytest.raises(SystemExit):
        cli.main(["theta", "--graph", files["c5"], "--tol", "0.5"])


def test_module_entry_point(files):
    r = subprocess.run([sys.executable, "-m", "thetabody", "theta", "--graph", files["k4"]],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert json.loads(r.stdout)["values"]["theta"] == pytest.approx(1, abs=1e-6)
