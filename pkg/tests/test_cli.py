import json

import pytest

from folialab.cli import free_quotient_pair, load_rep, main
from folialab.surface_rep import bolza, twist

ROT = "builtin:rotation:0.3,0.7,1.1,0.2"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_euler_bolza(capsys):
    code, out, _ = run(capsys, "euler", "--rep", "builtin:bolza")
    assert code == 0
    assert abs(json.loads(out)["euler"]) == 2


def test_dominate_rotation(capsys):
    code, out, _ = run(capsys, "dominate", "--rho", "builtin:bolza", "--hol", ROT, "--max-len", "4")
    doc = json.loads(out)
    assert code == 0
    assert doc["kappa_hat"] == 0 and doc["verdict"] == "DominatedAtCensus"


def test_json_byte_identical(capsys):
    argv = ("exponent", "--rho", "builtin:bolza", "--hol", "builtin:twist:bolza,1", "--T", "200",
            "--seed", "3", "--replicas", "2")
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    doc = json.loads(a)
    assert [e["provenance"]["seed"] for e in doc["estimates"]] == [3, 4]
    assert doc["provenance_cli"]["config"]["seed"] == 3


def test_threaded_replicas_keep_seed_order(capsys, monkeypatch):
    argv = ("exponent", "--rho", "builtin:bolza", "--hol", "builtin:bolza", "--T", "200", "--replicas", "3")
    _, serial, _ = run(capsys, *argv)
    monkeypatch.setenv("FOLIALAB_WORKERS", "3")
    _, threaded, _ = run(capsys, *argv)
    assert serial == threaded


def test_csv_no_meta(capsys):
    argv = ("spectrum", "--rep", "builtin:bolza", "--max-len", "2", "--format", "csv")
    _, with_meta, _ = run(capsys, *argv)
    assert with_meta.startswith("# generated ")
    _, a, _ = run(capsys, *argv, "--no-meta")
    _, b, _ = run(capsys, *argv, "--no-meta")
    assert a == b
    lines = a.splitlines()
    assert lines[0].startswith("# provenance ")
    assert lines[1] == "class,word_length,length"


def test_rep_file_round_trip(tmp_path, capsys):
    path = tmp_path / "t.json"
    path.write_text(twist(bolza(), 1).to_json())
    assert load_rep(str(path)).gens == twist(bolza(), 1).gens
    code, out, _ = run(capsys, "euler", "--rep", str(path), "--out", str(tmp_path / "e.json"))
    assert code == 0 and out == ""
    assert abs(json.loads((tmp_path / "e.json").read_text())["euler"]) == 2


def test_builtins():
    assert load_rep("builtin:trivial").genus == 2
    assert load_rep("builtin:trivial:3").genus == 3
    g1, g2 = free_quotient_pair(0.5, 0.4)
    assert load_rep("builtin:free_quotient:0.5,0.4").gens[:2] == (g1, g2)


@pytest.mark.parametrize("argv", [
    ("euler", "--rep", "builtin:nonsense"),
    ("euler", "--rep", "/no/such/file.json"),
    ("exponent", "--rho", "builtin:bolza", "--hol", "builtin:bolza", "--T", "-5"),
    ("exponent", "--rho", "builtin:bolza", "--hol", "builtin:bolza", "--dt", "3"),
    ("spectrum", "--rep", "builtin:bolza", "--max-len", "40"),
    ("dominate", "--rho", "builtin:bolza", "--hol", "builtin:trivial:3"),
    ("frobnicate",),
])
def test_validation_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out == ""


def test_numerical_guard_exits_2(capsys):
    code, out, err = run(capsys, "sections", "--rho", "builtin:bolza", "--hol", ROT, "--grid", "1")
    assert code == 2
    assert "non-contraction" in err and out == ""


def test_detect_and_srb(capsys):
    code, out, _ = run(capsys, "detect", "--hol", ROT)
    assert code == 0 and json.loads(out)["witness"] != "NoneDetected"
    code, out, _ = run(capsys, "srb", "--rho", "builtin:bolza", "--hol", "builtin:trivial",
                       "--T", "100", "--n-orbits", "2", "--bins", "4", "--chart", "frame")
    assert code == 0
