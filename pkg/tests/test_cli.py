from __future__ import annotations

import json
import subprocess
import sys

import pytest

from randassign.cli import main
from randassign.core import parse_instance


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_expost_member(capsys, data_dir):
    code, out, _ = run(capsys, "check", "expost", data_dir / "example1.txt")
    assert code == 0
    assert out.startswith("expost: holds")
    assert "1/3: " in out


def test_expost_counterexample(capsys, data_dir):
    code, out, _ = run(capsys, "check", "expost", data_dir / "example1_q.txt")
    assert code == 1
    assert "LP infeasible over 12 PO generators" in out


@pytest.mark.parametrize("algorithm", ["exhaustive", "types", "auto"])
def test_robust_fails(capsys, data_dir, algorithm):
    code, out, _ = run(capsys, "check", "robust", data_dir / "example1.txt", "--algorithm", algorithm)
    assert code == 1
    assert "witness:" in out


def test_sd_json(capsys, data_dir):
    code, out, _ = run(capsys, "check", "sd", data_dir / "example1.txt", "--json")
    assert code == 1
    doc = json.loads(out)
    assert doc["property"] == "sd" and doc["result"] == "fails"
    assert doc["witness"] == "1 —holds o2, wants o1→ 3 —holds o1, wants o2→ 1"


def test_pareto_on_deterministic(capsys, tmp_path):
    path = tmp_path / "d.txt"
    path.write_text("agents: 2\nobjects: a b\nprefs:\n1: a b\n2: b a\nassignment:\n0 1\n1 0\n")
    code, out, _ = run(capsys, "check", "pareto", path, "--json")
    assert code == 1
    assert json.loads(out)["cycle"] == [["1", "b"], ["2", "a"]]
    path.write_text("agents: 2\nobjects: a b\nprefs:\n1: a b\n2: b a\nassignment:\n1 0\n0 1\n")
    assert run(capsys, "check", "pareto", path)[0] == 0


def test_pareto_needs_deterministic(capsys, data_dir):
    code, _, err = run(capsys, "check", "pareto", data_dir / "example1.txt")
    assert code == 2 and "0/1" in err


def test_decompose(capsys, data_dir):
    code, out, _ = run(capsys, "decompose", data_dir / "example3.txt", "--json")
    assert code == 0
    doc = json.loads(out)
    assert [t["coefficient"] for t in doc["decomposition"]] == ["1/3"] * 3
    code, out, _ = run(capsys, "decompose", data_dir / "example1.txt", "--pareto")
    assert code == 0


def test_input_errors(capsys, data_dir, tmp_path):
    assert run(capsys, "check", "sd", tmp_path / "missing.txt")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("agents: 2\nobjects: a b\nprefs:\n1: a b\n2: a c\n")
    code, _, err = run(capsys, "check", "sd", bad)
    assert code == 2 and "line 5" in err
    assert run(capsys, "check", "sd", data_dir / "example1_prefs.txt")[0] == 2
    assert run(capsys, "frobnicate")[0] == 2


def test_max_agents_flag(capsys, data_dir, tmp_path):
    assert run(capsys, "check", "sd", data_dir / "example1.txt", "--max-agents", "3")[0] == 2


def test_guard_makes_expost_fall_back(capsys, data_dir):
    code, out, _ = run(capsys, "check", "expost", data_dir / "example1_q.txt", "--guard", "2")
    assert code == 1
    code, out, _ = run(capsys, "check", "robust", data_dir / "example1.txt",
                       "--algorithm", "exhaustive", "--guard", "2")
    assert code == 3


def test_deterministic_output(capsys, data_dir):
    first = run(capsys, "check", "expost", data_dir / "example1.txt", "--json")
    second = run(capsys, "check", "expost", data_dir / "example1.txt", "--json")
    assert first == second


def test_timings_opt_in(capsys, data_dir):
    _, out, _ = run(capsys, "check", "sd", data_dir / "example1.txt", "--json", "--timings")
    assert "elapsed_ms" in json.loads(out)["stats"]


def test_gen_rsd_and_uniform(capsys, data_dir):
    code, out, _ = run(capsys, "gen", "rsd", "--prefs", data_dir / "example1_prefs.txt")
    assert code == 0
    _, p = parse_instance(out)
    _, expected = parse_instance((data_dir / "example1.txt").read_text())
    assert p == expected
    code, out, _ = run(capsys, "gen", "uniform", "--prefs", data_dir / "unanimous3.txt", "--n", "3")
    assert code == 0 and "1/3 1/3 1/3" in out
    assert run(capsys, "gen", "uniform", "--prefs", data_dir / "unanimous3.txt", "--n", "4")[0] == 2


def test_gen_sat(capsys, data_dir):
    code, out, _ = run(capsys, "gen", "sat", "--cnf", data_dir / "two_clause.cnf")
    assert code == 0
    profile, p = parse_instance(out)
    assert profile.n == 36 and p is not None


def test_gen_random_reproducible(capsys):
    a = run(capsys, "gen", "random", "--n", 5, "--seed", 9)
    b = run(capsys, "gen", "random", "--n", 5, "--seed", 9)
    c = run(capsys, "gen", "random", "--n", 5, "--seed", 10)
    assert a == b and a[1] != c[1]
    assert run(capsys, "gen", "random", "--n", 0, "--seed", 1)[0] == 2


def test_module_entry_point(data_dir):
    proc = subprocess.run([sys.executable, "-m", "randassign", "check", "sd", str(data_dir / "example3.txt")],
                          capture_output=True, text=True)
    assert proc.returncode in (0, 1)
    assert proc.stdout.startswith("sd: ")
