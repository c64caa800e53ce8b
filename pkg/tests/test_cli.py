import json

import pytest

from hypolab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out else None), out.err


def test_algebra_info(capsys):
    code, rep, _ = run(capsys, "algebra", "info", "builtin:heisenberg:2")
    assert code == 0
    assert rep["results"]["lower_central_series_dims"] == [5, 1, 0]
    _, rep, _ = run(capsys, "algebra", "info", "builtin:g23")
    assert rep["results"]["lower_central_series_dims"] == [5, 3, 2, 0]


def test_algebra_classify(capsys):
    _, rep, _ = run(capsys, "algebra", "classify", "builtin:filiform:3")
    assert rep["results"]["codim1_abelian"]["verdict"] == "filiform"
    _, rep, _ = run(capsys, "algebra", "classify", "builtin:heisenberg:3")
    assert rep["results"]["two_step_dim1"]["heisenberg_g"] == 3


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    code, rep, err = run(capsys, "algebra", "info", str(bad))
    assert code == 2 and rep is None and "line 1" in err
    assert run(capsys, "algebra", "info", "builtin:nothing")[0] == 2
    assert run(capsys, "algebra", "info", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "cohomology", "trivial", "builtin:heisenberg:1", "--degree", "9")[0] == 2
    assert run(capsys, "bogus")[0] == 2


def test_jacobi_failure_aborts(capsys, tmp_path):
    f = tmp_path / "alg.json"
    f.write_text(json.dumps({"dim": 3, "basis": ["a", "b", "c"], "brackets": [
        {"i": 0, "j": 1, "coeffs": {"1": 1}}, {"i": 1, "j": 2, "coeffs": {"0": 1}}]}))
    code, _, err = run(capsys, "algebra", "info", str(f))
    assert code == 2 and "(a, b, c)" in err


@pytest.mark.parametrize(
    "argv,dim_h",
    [
        (("builtin:heisenberg:1", "--degree", "1"), 2),
        (("builtin:abelian:3", "--degree", "2"), 3),
    ],
)
def test_cohomology_trivial(capsys, argv, dim_h):
    _, rep, _ = run(capsys, "cohomology", "trivial", *argv)
    assert rep["results"]["dim_H"] == dim_h


def test_cohomology_adjoint(capsys):
    _, rep, _ = run(capsys, "cohomology", "adjoint", "builtin:heisenberg:1", "--degree", "0")
    assert rep["results"]["dim_H"] == 1


def test_torus_commands(capsys):
    code, rep, _ = run(capsys, "torus", "scan", "builtin:golden", "--tau", "1", "--radius", "1000")
    assert code == 0 and rep["results"]["scan"]["k_hat"] >= 0.8
    code, rep, _ = run(capsys, "torus", "solve", "builtin:rational-half", "builtin:mode:1,-2")
    assert code == 3 and rep["results"]["resonance"] == [1, -2]
    code, rep, _ = run(capsys, "torus", "solve", "builtin:golden", "builtin:mode:5,-3")
    assert code == 0 and rep["residuals"]["forward_apply"] <= 1e-12
    code, rep, _ = run(capsys, "torus", "tame", "builtin:golden", "--radius", "30", "--trials", "3")
    assert code == 0 and rep["results"]["tame"][0]["mode_sweep_C_r"] <= rep["results"]["tame"][0]["analytic_bound"]


def test_torus_solve_from_file(capsys, tmp_path):
    f = tmp_path / "v.json"
    f.write_text(json.dumps([{"n": [1, 1], "re": 1.0, "im": 0.0}, {"n": [0, 0], "re": 2.0, "im": 0.0}]))
    code, rep, _ = run(capsys, "torus", "solve", "builtin:golden-2d", str(f))
    assert code == 0 and rep["results"]["obstruction_mean"] == {"re": 2.0, "im": 0.0}
    assert len(rep["inputs"][1]["sha256"]) == 64


def test_cochain_commands(capsys, tmp_path):
    code, rep, _ = run(capsys, "cochain", "hodge", "builtin:golden-2d", "--seed", "3")
    assert code == 0 and rep["results"]["harmonic_dims"] == [1, 2, 1]
    assert rep["residuals"]["reconstruction"] <= 1e-11
    code, rep, _ = run(capsys, "cochain", "roundtrip", "builtin:golden-2d", "--seed", "3")
    assert code == 0 and rep["residuals"]["roundtrip"] <= 1e-8
    f = tmp_path / "w.json"
    f.write_text(json.dumps({"k": 2, "degree": 1, "components": [{"index": [1], "series": [{"n": [0, 1], "re": 1, "im": 0}]}]}))
    code, rep, _ = run(capsys, "cochain", "roundtrip", "builtin:golden-2d", str(f))
    assert code == 3 and rep["verdicts"][0].startswith("not closed")


def test_heisenberg_commands(capsys):
    code, rep, _ = run(capsys, "heisenberg", "check", "builtin:heis-xy", "--radius", "50")
    assert code == 3 and "center test: FAIL" in rep["verdicts"]
    code, rep, _ = run(capsys, "heisenberg", "check", "builtin:heis-golden")
    assert code == 0 and any(v.startswith("passes necessary conditions") for v in rep["verdicts"])
    code, rep, _ = run(capsys, "heisenberg", "witness")
    assert code == 3 and "obstruction: v(0)=1" in rep["verdicts"]


@pytest.mark.parametrize("beta,text", [("1", "Y1 + Y2"), ("0", "Y1"), ("-2/3", "Y1 - (2/3)Y2")])
def test_counterexample(capsys, beta, text):
    code, rep, _ = run(capsys, "counterexample", f"--beta={beta}")
    assert code == 0 and rep["results"]["bracket"] == text
    assert rep["results"]["center"] == ["Y1", "Y2"]


def test_reports_are_byte_stable(capsys, tmp_path):
    outs = []
    for _ in range(2):
        main(["cochain", "hodge", "builtin:golden-type:3", "--seed", "9", "--out", str(tmp_path / "r.json")])
        outs.append((tmp_path / "r.json").read_bytes())
    assert outs[0] == outs[1]
    _, rep, _ = run(capsys, "counterexample", "--timing")
    assert "wall_clock_s" in rep
