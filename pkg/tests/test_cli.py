import json

import pytest

from cartier_lab.cli import main

FILTERED = {
    "algebra": {"field": {"kind": "Rationals"}, "gens": ["x", "y"], "rels": ["x^2", "y^3"]},
    "chain": {"1": ["x", "y"], "2": ["x*y", "y^2"], "3": ["x*y^2"], "4": []},
    "N_top": 3,
    "ideal": ["x", "y"],
}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fgl_check_and_rejection(capsys):
    code, out, _ = run(capsys, "fgl", "check", "--inline", '{"coeffs": [[1, 1, "1"]], "N": 8}')
    assert code == 0 and "valid" in out
    code, out, _ = run(capsys, "fgl", "check", "--format", "json", "--inline",
                       '{"coeffs": [[2, 1, "1"]], "N": 4}')
    doc = json.loads(out)
    assert code == 1 and doc["report"]["axiom"] == "commutativity"


def test_nseries_json_has_manifest(capsys):
    code, out, err = run(capsys, "fgl", "nseries", "mult", "-n", "3", "--N", "4", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["series"] == "3*X + 3*X^2 + X^3"
    assert doc["manifest"]["ring"] == "Z" and doc["manifest"]["N"] == 4
    assert "wall time" in err


def test_csv_and_table_formats(capsys):
    _, out, _ = run(capsys, "fgl", "nseries", "mult", "-n", "2", "--N", "3", "--format", "csv")
    assert out.splitlines()[0] == "key,value"
    _, out, _ = run(capsys, "fgl", "nseries", "mult", "-n", "2", "--N", "3", "--format", "table")
    assert out.startswith("# tool: cartier-lab")


def test_height_of_honda_law(capsys):
    code, out, _ = run(capsys, "fgl", "height", "honda:2:2", "-p", "2", "--N", "8", "--ring", "GF(2)",
                       "--format", "json")
    assert code == 0 and json.loads(out)["result"]["height"] == 2


def test_usage_errors(capsys):
    assert run(capsys, "fgl", "check", "mult", "--N", "99")[0] == 2
    assert run(capsys, "fgl", "frobnicate")[0] == 2
    assert run(capsys, "fgl", "check", "mult", "--ring", "nonsense")[0] == 2


def test_witt_commands(capsys):
    code, out, _ = run(capsys, "witt", "sum-poly", "-p", "2", "-n", "2")
    assert code == 0 and "X1 + Y1 - X0*Y0" in out
    code, out, _ = run(capsys, "witt", "fix", "-p", "2", "-n", "3", "--ring", "GF(2)", "--format", "json")
    assert code == 0 and len(json.loads(out)["result"]["points"]) == 8


def test_filtration_and_rees(capsys, tmp_path):
    path = tmp_path / "filt.json"
    path.write_text(json.dumps(FILTERED))
    code, out, _ = run(capsys, "filtration", "unicity", str(path), "--format", "json")
    assert code == 0 and json.loads(out)["result"]["status"] == "certificate"
    code, out, _ = run(capsys, "filtration", "unicity", str(path), "--ideal", "x", "--format", "json")
    assert code == 1 and json.loads(out)["report"]["failed_hypothesis"] == "a"
    for at in ("0", "1"):
        code, out, _ = run(capsys, "rees", "fiber", str(path), "--at", at, "--format", "json")
        assert code == 0 and json.loads(out)["result"]["isomorphism_verified"]
    assert run(capsys, "filtration", "s0fil", "--char", "2")[0] == 1
    assert run(capsys, "filtration", "s0fil", "--char", "3")[0] == 0


def test_dual_commands(capsys):
    assert run(capsys, "dual", "weights", "mult", "--N", "4")[0] == 1
    assert run(capsys, "dual", "weights", "mult", "--N", "4", "--deform")[0] == 0
    code, out, _ = run(capsys, "dual", "grouplikes", "mult", "--N", "8", "--ring", "GF(2)",
                       "--base", "GF(2)[eps^4]", "--format", "json")
    assert code == 0 and json.loads(out)["result"]["count"] == 8


def test_out_file_is_deterministic(capsys, tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        target = tmp_path / name
        assert main(["dual", "build", "mult", "--N", "5", "--format", "json", "--out", str(target)]) == 0
        assert (tmp_path / (name + ".timing.json")).exists()
        outs.append(target.read_bytes())
    capsys.readouterr()
    assert outs[0] == outs[1]
