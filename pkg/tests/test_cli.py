import json

import pytest

from spinorigami.__main__ import build_parser, cli, main
from spinorigami.origami import parse_origami, stratum
from spinorigami.report import SCHEMA_VERSION


def run(*argv: str) -> int:
    return main(build_parser().parse_args(list(argv)))


def run_json(capsys, *argv: str):
    code = run("--json", *argv)
    return code, json.loads(capsys.readouterr().out)


def test_count(capsys):
    code, report = run_json(capsys, "count", "--g", "3", "--r", "4")
    assert code == 0
    assert report["schema"] == SCHEMA_VERSION
    assert report["command"] == "count"
    assert report["inputs"] == {"g": 3, "r": 4, "seed": 0}
    assert report["outputs"] == {"total": 4096, "even": 2304, "odd": 1792}
    assert report["passed"]
    assert set(report["timing"]) == {"started", "elapsed"}


def test_count_odd_modulus(capsys):
    code, report = run_json(capsys, "count", "--g", "4", "--r", "3")
    assert code == 0
    assert report["outputs"] == {"total": 6561}
    assert report["checks"] == {}


def test_bad_modulus(capsys):
    assert run("count", "--g", "3", "--r", "3") == 1
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.startswith("Error: ")


def test_text_report(capsys):
    assert run("count", "--g", "2", "--r", "2") == 0
    out = capsys.readouterr().out
    assert out.startswith("count\n")
    assert "  total = 16\n" in out
    assert "[PASS] even + odd = total" in out
    assert "PASSED in " in out


def test_prototype_writes_origami(tmp_path, capsys):
    path = tmp_path / "proto.txt"
    code, report = run_json(capsys, "prototype", "--kappa", "2,2", "--out", str(path))
    assert code == 0
    assert report["outputs"]["stratum"] == [2, 2]
    assert report["outputs"]["genus"] == 3
    assert report["outputs"]["arf"] == 1
    assert all(report["checks"].values())
    assert stratum(parse_origami(path.read_text())) == [2, 2]


def test_prototype_rejections(capsys):
    assert run("prototype", "--kappa", "4", "--arf", "0") == 1
    assert "Arf 1" in capsys.readouterr().err
    assert run("prototype", "--kappa", "3") == 1
    assert run("prototype", "--kappa", "4", "--g", "4") == 1


def test_prototype_bad_kappa():
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["prototype", "--kappa", "a,b"])
    assert excinfo.value.code == 2


def test_orbit_partition(capsys):
    code, report = run_json(capsys, "orbit", "--g", "2", "--r", "2", "--all")
    assert code == 0
    assert report["outputs"]["orbits"] == 2
    assert sorted(report["outputs"]["sizes"]) == [6, 10]
    assert report["checks"] == {"one orbit per arf invariant": True}

    code, report = run_json(capsys, "orbit", "--g", "3", "--r", "1", "--all")
    assert code == 0
    assert report["outputs"]["sizes"] == [1]


def test_orbit_of_one_state(capsys):
    code, report = run_json(capsys, "orbit", "--g", "2", "--r", "2", "--start", "0,0,0,0")
    assert code == 0
    assert report["outputs"]["size"] in (6, 10)
    assert report["checks"]["arf constant on orbit"]


def test_stratum_and_winding(tmp_path, capsys):
    origami = tmp_path / "l.txt"
    origami.write_text("# L shape\n3\n(1 2)\n(1 3)\n")
    curve = tmp_path / "core.txt"
    curve.write_text("(1:L:R) (2:L:R)\n")

    code, report = run_json(capsys, "stratum", str(origami))
    assert code == 0
    assert report["outputs"] == {"squares": 3, "stratum": [2], "genus": 2, "modulus": 2}

    code, report = run_json(capsys, "winding", str(origami), str(curve))
    assert code == 0
    assert report["outputs"]["turning"] == 0
    assert report["outputs"]["winding"] == 0
    assert report["outputs"]["modulus"] == 2


def test_invalid_curve_file(tmp_path, capsys):
    origami = tmp_path / "l.txt"
    origami.write_text("3\n(1 2)\n(1 3)\n")
    curve = tmp_path / "bad.txt"
    curve.write_text("(1:L:R) (3:L:R)\n")
    assert run("winding", str(origami), str(curve)) == 1
    assert "Error: " in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    assert run("stratum", str(tmp_path / "missing.txt")) == 1
    assert "Cannot read input" in capsys.readouterr().err


def test_verify_johnson(capsys):
    code, report = run_json(capsys, "--seed", "3", "verify", "johnson", "--g", "3")
    assert code == 0
    assert report["inputs"] == {"suite": "johnson", "seed": 3, "g": 3, "s": None}
    assert set(report["outputs"]) == {"g=3 s=1", "g=3 s=2"}
    assert all(report["checks"].values())


def test_verify_johnson_bad_modulus(capsys):
    assert run("verify", "johnson", "--g", "4", "--s", "2") == 1
    assert "does not divide" in capsys.readouterr().err


def test_cli_exit_code(capsys):
    with pytest.raises(SystemExit) as excinfo:
        cli(["count", "--g", "3", "--r", "2"])
    assert excinfo.value.code == 0
    with pytest.raises(SystemExit) as excinfo:
        cli(["count", "--g", "3", "--r", "5"])
    assert excinfo.value.code == 1
