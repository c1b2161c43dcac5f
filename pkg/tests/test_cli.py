import json
import subprocess
import sys

import pytest

from padicspectral.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def nu_pair(tmp_path, capsys):
    m, s = tmp_path / "m.json", tmp_path / "s.json"
    _, out, _ = run(capsys, "nu", "construct", "--p", "3", "--I", "0,2", "--gamma", "3")
    m.write_text(out)
    _, out, _ = run(capsys, "nu", "spectrum", "--p", "3", "--I", "0,2", "--gamma", "3")
    s.write_text(out)
    return str(m), str(s)


def test_tree_recover(capsys):
    code, data = run_json(capsys, "tree", "recover", "--p", "3", "--gamma", "3", "--set", "0,4,8,9,13,17,18,22,26")
    assert code == 0 and data["I"] == [0, 2] and data["J"] == [1]
    code, data = run_json(capsys, "tree", "recover", "--p", "3", "--gamma", "2", "--set", "0,1,4")
    assert code == 1 and data == {"homogeneous": False}
    code, data = run_json(capsys, "tree", "recover", "--p", "2", "--set", "0,1/2")
    assert code == 0 and data["n"] == 1 and data["I"] == [0]


def test_tree_build_and_dot(capsys):
    code, data = run_json(capsys, "tree", "build", "--p", "2", "--gamma", "3", "--I", "0,2")
    assert code == 0 and data["leaves"] == [0, 1, 4, 5]
    code, out, _ = run(capsys, "tree", "build", "--p", "2", "--gamma", "2", "--I", "0", "--dot")
    assert out.startswith("digraph") and '"r.1.0"' in out
    code, out, _ = run(capsys, "tree", "dot", "--p", "2", "--gamma", "2", "--set", "0,1")
    assert code == 0 and '"r.0" -> "r.0.0"' in out
    tree = json.dumps({"p": 3, "gamma": 2, "I": [1], "choice": {"": 2}})
    code, data = run_json(capsys, "tree", "build", "--p", "3", "--gamma", "2", "--tree", tree)
    assert data["leaves"] == [2, 5, 8]


def test_spectrum_commands(capsys):
    code, data = run_json(capsys, "spectrum", "search", "--p", "2", "--gamma", "2", "--set", "0,1")
    assert code == 0 and data["spectrum"] == [0, 2]
    code, data = run_json(capsys, "spectrum", "search", "--p", "2", "--gamma", "2", "--set", "0,1,3")
    assert code == 1 and data["spectrum"] is None
    code, data = run_json(capsys, "spectrum", "for-homogeneous", "--p", "3", "--gamma", "2", "--set", "0,3,6")
    assert code == 0 and data["spectrum"] == [0, 1, 2]


def test_scale_guard_exit_code(capsys):
    code, out, err = run(capsys, "spectrum", "search", "--p", "2", "--gamma", "7", "--set", "0,1")
    assert code == 2 and "81" in err and "--max-scale" in err
    code, data = run_json(capsys, "spectrum", "search", "--p", "2", "--gamma", "7", "--set", "0,1",
                          "--max-scale", "128")
    assert code == 0 and data["spectrum"] == [0, 64]


def test_pair_commands(capsys, nu_pair):
    m, s = nu_pair
    code, data = run_json(capsys, "pair", "hadamard", "--p", "2", "--gamma", "2", "--set", "0,1", "--dual", "0,2")
    assert code == 0 and data["hadamard"] is True
    code, data = run_json(capsys, "pair", "hadamard", "--p", "2", "--set", "0,1", "--dual", "0,1/2")
    assert code == 0 and data["hadamard"] is True
    code, data = run_json(capsys, "pair", "hadamard", "--p", "2", "--gamma", "2", "--set", "0,1", "--dual", "0,1")
    assert code == 1
    code, data = run_json(capsys, "pair", "orthobasis", "--measure", m, "--spectrum", s)
    assert code == 0 and data["orthobasis"] is True
    code, data = run_json(capsys, "pair", "functional-eq", "--measure", m, "--spectrum", s)
    assert code == 0 and data["passed"] and data["checked"] == 81


def test_recover_pipeline(capsys, nu_pair):
    m, s = nu_pair
    code, data = run_json(capsys, "recover", "pipeline", "--measure", m, "--spectrum", s)
    assert code == 0 and data["passed"]
    bad = json.loads(open(s).read())
    bad["elements"][1] = "4/3^3"
    code, data = run_json(capsys, "recover", "pipeline", "--measure", m, "--spectrum", json.dumps(bad))
    assert code == 1 and not data["passed"]


def test_zeros_and_autocorr(capsys, nu_pair):
    m, s = nu_pair
    code, data = run_json(capsys, "zeros", "discrete", "--spectrum", s, "--window=-1,2")
    assert code == 0 and data["zero_spheres"] == [0, 2]
    code, out, _ = run(capsys, "zeros", "autocorr", "--measure", m, "--window=-1,2", "--tsv")
    rows = [line.split("\t") for line in out.splitlines()]
    assert rows[0] == ["n", "tag", "witness"] and [r[0] for r in rows[1:]] == ["-1", "0", "1", "2"]
    code, data = run_json(capsys, "nu", "autocorr", "--measure", m)
    assert code == 0 and data["p"] == 3


def test_dims_commands(capsys):
    code, data = run_json(capsys, "dims", "entropy", "--I", "even", "--k-range", "1:4")
    assert data["values"] == [[1, "1"], [2, "1/2"], [3, "2/3"], [4, "1/2"]]
    code, out, _ = run(capsys, "dims", "entropy", "--I", "even", "--k-range", "1:2", "--tsv")
    assert out == "k\tvalue\n1\t1\n2\t1/2\n"
    code, data = run_json(capsys, "dims", "local", "--p", "2", "--I", "even", "--k-range", "1:4")
    assert [v for _, v in data["values"]] == ["1", "1/2", "2/3", "1/2"]
    code, data = run_json(capsys, "dims", "density", "--p", "2", "--I", "even", "--k-range", "1:3")
    assert [d["density"] for d in data["values"]] == ["1", "1/2", "1/2"]
    code, data = run_json(capsys, "dims", "beurling", "--p", "2", "--gamma", "4", "--I", "even",
                          "--h", "1,2,4", "--r", "1/2")
    assert code == 0 and len(data["upper"]) == 3


def test_fuglede_commands(capsys):
    code, data = run_json(capsys, "fuglede", "tile", "--p", "2", "--gamma", "2", "--set", "0,1")
    assert code == 0 and data["complement"] == [0, 2]
    code, data = run_json(capsys, "fuglede", "tile", "--p", "2", "--gamma", "2", "--set", "0,1,2")
    assert code == 1 and "divide" in data["reason"]
    code, data = run_json(capsys, "fuglede", "spectral", "--p", "3", "--gamma", "2", "--set", "0,1,4")
    assert code == 1 and data["spectrum"] is None
    code, data = run_json(capsys, "fuglede", "scan", "--p", "2", "--gamma", "2", "--exhaustive")
    assert code == 0 and data["all_agree"] and data["total"] == 16
    code, out, _ = run(capsys, "fuglede", "scan", "--p", "2", "--gamma", "2", "--exhaustive", "--tsv")
    assert len(out.splitlines()) == 17
    a = run(capsys, "fuglede", "scan", "--p", "2", "--gamma", "3", "--random", "50", "--seed", "3")[1]
    b = run(capsys, "fuglede", "scan", "--p", "2", "--gamma", "3", "--random", "50", "--seed", "3",
            "--jobs", "2")[1]
    assert a == b
    code, _, err = run(capsys, "fuglede", "scan", "--p", "2", "--gamma", "2")
    assert code == 2 and "exactly one" in err


def test_validation_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"p": 3, "gamma": 1, "masses": {"7": "1"}}))
    code, _, err = run(capsys, "nu", "autocorr", "--measure", str(bad))
    assert code == 2 and "masses/7" in err
    code, _, err = run(capsys, "tree", "recover", "--p", "4", "--gamma", "1", "--set", "0")
    assert code == 2 and "--p" in err
    code, _, err = run(capsys, "tree", "recover", "--p", "2", "--gamma", "2", "--set", "0,9")
    assert code == 2 and "--set[1]" in err
    code, _, err = run(capsys, "tree", "recover", "--p", "2", "--gamma", "2", "--set", "0," * 3000)
    assert code == 2 and "4096" in err
    with pytest.raises(SystemExit) as info:
        main(["tree", "bogus"])
    assert info.value.code == 2


def test_output_is_byte_stable(capsys):
    args = ("nu", "construct", "--p", "2", "--I", "0,2", "--gamma", "4", "--choice-seed", "5")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "padicspectral", "fuglede", "tile", "--p", "2", "--gamma", "2",
                        "--set", "0,2"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["complement"] == [0, 1]
