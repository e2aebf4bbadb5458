import io
import json

import pytest

from cbfourier.cli import run_command


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_command([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def run_json(*argv):
    code, out, err = run(*argv)
    return code, json.loads(out), err


def test_idempotent_scan_z4(tmp_path):
    code, rep, err = run_json("idempotent-scan", "Z4")
    assert code == 0 and rep["passed"]
    g = rep["results"]["groups"][0]
    assert (g["subsets"], g["cosets"], g["norm_one"]) == (15, 7, 7)
    assert "[PASS]" in err
    out = tmp_path / "scan.json"
    code, stdout, _ = run("idempotent-scan", "Z4", "--out", out)
    assert code == 0 and "[PASS]" in stdout
    figs = json.loads(out.read_text())["figures"]
    assert figs and all((tmp_path / f).exists() for f in figs)


def test_norm_formats():
    for fn, want in [("{0,1}", 1.2071067811865475), ("delta:3", 1.0), ("1,1,1,1", 1.0)]:
        code, rep, _ = run_json("norm", "Z4", fn)
        assert code == 0
        assert abs(rep["results"]["a_norm"] - want) < 1e-9


def test_theorem_scan_z2():
    code, rep, err = run_json("theorem-scan", "Z2", "Z2")
    r = rep["results"]
    assert code == 0 and r["total"] == 9 and r["consistent"]
    assert (r["affine"], r["cc"], r["subgroup_hom"], r["cp"]) == (8, 9, 3, 4)


def test_budget_exit_code():
    code, _, err = run("theorem-scan", "Z12", "Z12")
    assert code == 2 and "BudgetExceeded" in err


def test_map_commands(tmp_path):
    good = tmp_path / "dbl.map"
    good.write_text("Z2 -> Z4\ndomain: all\n0 -> 0\n1 -> 2\n")
    code, rep, _ = run_json("classify", good)
    assert code == 0 and rep["passed"]
    code, rep, _ = run_json("cbnorm", good)
    assert code == 0
    code, rep, _ = run_json("phi", good)
    assert code == 0
    bad = tmp_path / "bad.map"
    bad.write_text("Z2 -> Z2\nmatrix:\n1 1\n1 1\n")
    code, _, err = run("classify", bad)
    assert code == 2 and "NotAHomomorphism" in err
    broken = tmp_path / "broken.map"
    broken.write_text("Z2 -> Z4\ndomain: 0\n0 -> 9\n")
    code, _, err = run("phi", broken)
    assert code == 2 and "ParseError" in err


def test_input_errors():
    assert run("norm", "NoSuchGroup", "delta:0")[0] == 2
    assert run("norm", "Z4", "1,2")[0] == 2
    assert run("no-such-command")[0] == 2
    assert run("cbnorm", "/nonexistent/file.map")[0] == 2


def test_lattice_commands(tmp_path):
    f = tmp_path / "eo.lat"
    f.write_text("dim 2\nsplit 1\na := (0, 0) + span{(2, 2)}\nb := (1, 2) + span{(2, 2)}\n")
    code, rep, _ = run_json("lattice", "decompose", f)
    assert code == 0 and rep["passed"]
    v = tmp_path / "vert.lat"
    v.write_text("dim 2\nsplit 1\na := (0, 0) + span{(1, 0); (0, 3)}\n")
    code, _, err = run("lattice", "decompose", v)
    assert code == 2 and "NotAGraph" in err
    c = tmp_path / "cov.lat"
    c.write_text("dim 1\na := (0) + span{(2)}\nb := (1) + span{(4)}\n")
    code, rep, _ = run_json("lattice", "cover", c)
    assert code == 0


@pytest.mark.parametrize("argv", [("diagonal", "S3"), ("theorem-scan", "Z3", "Z2")])
def test_output_is_deterministic(tmp_path, argv):
    texts, pngs = [], []
    for d in ("a", "b"):
        (tmp_path / d).mkdir()
        out = tmp_path / d / "r.json"
        assert run(*argv, "--out", out)[0] == 0
        texts.append(out.read_bytes())
        pngs.append(sorted((p.name, p.read_bytes()) for p in (tmp_path / d).glob("*.png")))
    assert texts[0] == texts[1]
    assert pngs[0] == pngs[1]
