import csv
import io
import json
import subprocess
import sys

import pytest

from activefriending.cli import main


@pytest.fixture
def aug_file(tmp_path):
    p = tmp_path / "aug.txt"
    p.write_text("# s=0 a=1 b=2 t=3\n0 1\n1 2\n2 3\n1 3\n")
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def one_row(text):
    (row,) = csv.DictReader(io.StringIO(text))
    return row


def test_vmax(capsys, aug_file):
    code, out, _ = run(capsys, "vmax", "--graph", aug_file, "--s", "0", "--t", "3")
    assert code == 0
    assert one_row(out)["nodes"] == "2 3"


def test_exact_f(capsys, aug_file):
    code, out, _ = run(capsys, "exact-f", "--graph", aug_file, "--s", "0", "--t", "3", "--invite", "2,3")
    assert code == 0 and float(one_row(out)["f"]) == 0.75


def test_solve_json(capsys, aug_file):
    code, out, _ = run(capsys, "solve", "--graph", aug_file, "--s", "0", "--t", "3", "--alpha", "0.9",
                       "--epsilon", "0.05", "--big-n", "10", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)
    assert row["invitation"] in ([2, 3], [3])
    assert row["covered"] >= row["p"]


def test_baseline_and_pmax(capsys, aug_file):
    code, out, _ = run(capsys, "baseline", "--graph", aug_file, "--s", "0", "--t", "3",
                       "--strategy", "sp", "--k", "2", "--samples", "0")
    assert code == 0 and one_row(out)["invitation"] == "3 2"
    code, out, _ = run(capsys, "estimate-pmax", "--graph", aug_file, "--s", "0", "--t", "3", "--big-n", "10")
    assert code == 0 and abs(float(one_row(out)["p_star"]) - 0.75) < 0.2


def test_exit_codes(capsys, aug_file, tmp_path):
    base = ["--graph", aug_file, "--s", "0"]
    assert run(capsys, "solve", *base, "--t", "1")[0] == 1
    assert run(capsys, "solve", *base, "--t", "3", "--alpha", "1.5")[0] == 3
    assert run(capsys, "vmax", "--graph", str(tmp_path / "missing"), "--s", "0", "--t", "3")[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 zz\n")
    code, _, err = run(capsys, "vmax", "--graph", str(bad), "--s", "0", "--t", "3")
    assert code == 2 and "line 2" in err
    assert run(capsys, "exact-f", *base, "--t", "3", "--invite", "1,3")[0] == 3
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--graph", aug_file])
    assert exc.value.code == 3


def test_unreachable_is_infeasible(capsys, tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("0 1\n1 2\n3 4\n")
    assert run(capsys, "solve", "--graph", str(p), "--s", "0", "--t", "3")[0] == 1


def test_experiment_deterministic_across_workers(tmp_path, aug_file):
    outs = []
    for workers in ("1", "3"):
        out = tmp_path / f"w{workers}.csv"
        code = main(["experiment", "--graph", aug_file, "--pair", "0", "3", "--pair", "2", "0",
                     "--big-n", "10", "--alpha", "0.5", "--epsilon", "0.05", "--realizations", "5000",
                     "--samples", "2000", "--seed", "4", "--workers", workers, "--out", str(out)])
        assert code == 0
        outs.append(out.read_text())
        assert json.loads(out.with_suffix(".json").read_text())["seeds"]["master"] == 4
    assert outs[0] == outs[1]


def test_module_entry_point(aug_file):
    proc = subprocess.run([sys.executable, "-m", "activefriending", "vmax", "--graph", aug_file,
                           "--s", "0", "--t", "3"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert one_row(proc.stdout)["size"] == "2"
