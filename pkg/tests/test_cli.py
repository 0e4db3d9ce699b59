import io
import json
import math
import pathlib

import numpy as np
import pytest

from gaugedual.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from gaugedual.problem_io import ParseError, dump_report, load_report, parse_problem, parse_set

PROBLEMS = pathlib.Path(__file__).resolve().parent.parent / "problems"


def run(*argv):
    out = io.StringIO()
    code = main([str(a) for a in argv], out=out)
    text = out.getvalue()
    return code, (load_report(text) if text.strip() else None), text


# ---------------------------------------------------------------------------
# parsing


def test_parse_min_norm():
    p, meta = parse_problem((PROBLEMS / "min_norm.txt").read_text())
    assert p.n == 2 and p.m == 1 and p.sigma == 0
    assert meta["interior_declared"]


def test_parse_weighted_norm_and_cone():
    p, _ = parse_problem("kappa: norm inf | 1 2\nA: 1 1\nb: 1\nrho: norm one\nsigma: 0\ncone: orthant\n")
    assert p.kappa.weights.tolist() == [1.0, 2.0]
    assert p.cone is not None


def test_parse_lovasz_and_atomic():
    p, _ = parse_problem("kappa: lovasz 2 | 0 1 1 1\nA: 1 1\nb: 1\nrho: norm one\nsigma: 0\n")
    assert p.kappa([1.0, 2.0]) == pytest.approx(2.0)
    q, _ = parse_problem("kappa: atomic 1 0; 0 1; -1 0; 0 -1\nA: 1 1\nb: 1\nrho: norm one\nsigma: 0\n")
    assert q.kappa([0.5, 0.5]) == pytest.approx(1.0)


@pytest.mark.parametrize("text, line, col", [
    ("kappa: norm one\nA: 1 x\nb: 2\nrho: norm one\nsigma: 0\n", 2, 6),
    ("kappa: norm four\nA: 1 1\nb: 2\nrho: norm one\nsigma: 0\n", 1, 13),
    ("kappa norm one\n", 1, 1),
    ("kappa: norm one\nA: 1 1; 1\nb: 2\nrho: norm one\nsigma: 0\n", 2, 4),
    ("kappa: norm one\nkappa: norm two\n", 2, 1),
    ("# only a comment\nkappa: norm one\n", 3, 1),
])
def test_parse_errors_are_located(text, line, col):
    with pytest.raises(ParseError) as exc:
        parse_problem(text)
    assert (exc.value.line, exc.value.col) == (line, col)
    assert str(exc.value).startswith("line %d, column %d:" % (line, col))


def test_parse_set_errors():
    with pytest.raises(ParseError) as exc:
        parse_set("A: halfspace 1 1 | 1\nset: union A B\n")
    assert exc.value.line == 2
    with pytest.raises(ParseError):
        parse_set("A: halfspace 1 1 | 1\n")


def test_parse_set_counterexample():
    target, named = parse_set((PROBLEMS / "counterexample.txt").read_text())
    assert set(named) == {"H1", "H2", "C1", "C2"}
    assert target.contains(np.array([1.0, 0.0]))


def test_report_round_trip():
    rep = {"a": 1.5, "b": [1, 2], "c": math.inf, "d": {"x": None, "y": True}, "e": np.float64(2.0)}
    text = dump_report(rep)
    back = load_report(text)
    assert back == {"a": 1.5, "b": [1, 2], "c": "inf", "d": {"x": None, "y": True}, "e": 2.0}
    assert dump_report(back) == text


# ---------------------------------------------------------------------------
# dual


def test_dual_min_norm():
    code, rep, _ = run("dual", PROBLEMS / "min_norm.txt", "--kind", "gauge")
    assert code == EXIT_OK
    assert rep["problem"] == "min ‖A*y‖_∞ s.t. ⟨b,y⟩ ≥ 1"
    assert rep["strong_duality"] == "gauge pair with polyhedral misfit set"


def test_dual_bpdn_lagrange():
    code, rep, _ = run("dual", PROBLEMS / "bpdn.txt", "--kind", "lagrange")
    assert code == EXIT_OK
    assert rep["kind"] == "lagrange_dual" and rep["sense"] == "max"
    assert "κ°" in rep["problem"] or "‖A*y‖_∞ ≤ 1" in rep["problem"]


def test_dual_bidual():
    code, rep, _ = run("dual", PROBLEMS / "min_norm.txt", "--kind", "bidual")
    assert code == EXIT_OK and rep["kind"] == "bidual"


def test_dual_trivial_problem(capsys):
    code, rep, _ = run("dual", PROBLEMS / "trivial.txt")
    assert code == EXIT_USAGE and rep is None
    assert "origin feasible: trivial optimum" in capsys.readouterr().err


def test_missing_file(capsys):
    code, _, _ = run("dual", PROBLEMS / "no_such_file.txt")
    assert code == EXIT_USAGE


def test_parse_error_exit(tmp_path, capsys):
    f = tmp_path / "bad.txt"
    f.write_text("kappa: norm one\nA: 1 x\nb: 2\nrho: norm one\nsigma: 0\n")
    code, _, _ = run("dual", f)
    assert code == EXIT_USAGE
    assert "line 2, column 6" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# solve


def test_solve_min_norm():
    code, rep, _ = run("solve", PROBLEMS / "min_norm.txt")
    assert code == EXIT_OK
    assert rep["product"] == pytest.approx(1.0, abs=1e-6)
    assert rep["v_l"] == pytest.approx(2.0, abs=1e-6)
    assert rep["oracle_method"] == "lp"


def test_solve_bpdn():
    code, rep, _ = run("solve", PROBLEMS / "bpdn.txt")
    assert code == EXIT_OK
    assert rep["v_p"] == pytest.approx(7.0 - math.sqrt(2.0), abs=1e-8)


def test_solve_k3():
    code, rep, _ = run("solve", PROBLEMS / "maxcut_k3.txt")
    assert code == EXIT_OK
    assert rep["maxcut"]["relaxation_value"] == pytest.approx(2.25, abs=1e-3)
    assert rep["maxcut"]["degree_pairing"] == pytest.approx(6.0, abs=1e-9)
    assert rep["product"] == pytest.approx(1.0, abs=1e-3)


def test_solve_infeasible():
    code, rep, _ = run("solve", PROBLEMS / "infeasible.txt")
    assert code == EXIT_FAIL
    assert rep["product"] is None and "error" in rep


def test_solve_unsupported_family(tmp_path, capsys):
    f = tmp_path / "two.txt"
    f.write_text("kappa: norm two\nA: 1 2\nb: 1\nrho: norm two\nsigma: 0\n")
    code, _, _ = run("solve", f)
    assert code == EXIT_USAGE
    assert "unsupported family" in capsys.readouterr().err


def test_solve_tolerance_flag_gates_exit():
    code, rep, _ = run("solve", PROBLEMS / "phase_toy.txt", "--tol", "1e-30")
    assert rep["tolerance"] == 1e-30
    assert code in (EXIT_OK, EXIT_FAIL)
    if abs(rep["product"] - 1.0) > 1e-30:
        assert code == EXIT_FAIL


def test_solve_is_deterministic():
    _, _, a = run("solve", PROBLEMS / "bpdn.txt", "--seed", "3", "--max-iters", "500", "--step-c", "0.5")
    _, _, b = run("solve", PROBLEMS / "bpdn.txt", "--seed", "3", "--max-iters", "500", "--step-c", "0.5")
    assert a == b


# ---------------------------------------------------------------------------
# antipolar


def test_antipolar_counterexample(capsys):
    code, rep, _ = run("antipolar", PROBLEMS / "counterexample.txt", "--point", "1", "1.5")
    assert code == EXIT_FAIL
    assert rep["in_antipolar"] is True
    assert rep["in_hull_of_part_antipolars"] is False
    assert rep["parts_raylike"] == ["yes", "no"]
    assert "ray-like" in capsys.readouterr().err


def test_antipolar_membership_needs_point():
    code, _, _ = run("antipolar", PROBLEMS / "halfspace.txt")
    assert code == EXIT_USAGE


def test_antipolar_halfspace_biantipolar():
    code, rep, _ = run("antipolar", PROBLEMS / "halfspace.txt", "--check", "biantipolar",
                       "--samples", "100")
    assert code == EXIT_OK
    assert rep["message"] == "C'' = C confirmed"


def test_antipolar_affine_recession():
    code, rep, _ = run("antipolar", PROBLEMS / "affine.txt", "--check", "recession", "--samples", "100")
    assert code == EXIT_OK
    assert rep["recession"]["agreement"] == 1.0


def test_antipolar_ball_biantipolar_not_confirmed():
    code, rep, _ = run("antipolar", PROBLEMS / "ball.txt", "--check", "biantipolar", "--samples", "100")
    assert code == EXIT_OK
    assert "message" not in rep
    assert rep["biantipolar"]["raylike"] != "yes"


# ---------------------------------------------------------------------------
# sensitivity


def test_sensitivity_min_norm():
    code, rep, _ = run("sensitivity", PROBLEMS / "min_norm.txt")
    assert code == EXIT_OK
    assert rep["pass_rate"] == 1.0
    assert rep["route_gap"] <= 1e-6


def test_sensitivity_zero_grid_gives_equality_row():
    code, rep, _ = run("sensitivity", PROBLEMS / "min_norm.txt", "--grid", "1")
    assert code == EXIT_OK
    (row,) = rep["grid"]
    assert row["value"] == pytest.approx(row["bound"], abs=1e-12)


def test_sensitivity_bpdn_sweep_is_monotone():
    code, rep, _ = run("sensitivity", PROBLEMS / "bpdn.txt", "--grid", "5")
    assert code == EXIT_OK
    assert rep["sigma_sweep"]["nonincreasing"]
    vals = rep["sigma_sweep"]["value"]
    assert len(vals) == 5 and vals == sorted(vals, reverse=True)


def test_sensitivity_requires_interior_declaration(capsys):
    code, _, _ = run("sensitivity", PROBLEMS / "conic_orthant.txt")
    assert code == EXIT_USAGE
    assert "interior: declared" in capsys.readouterr().err


def test_reports_are_json():
    _, _, text = run("dual", PROBLEMS / "bpdn.txt")
    assert json.loads(text)["kind"] == "gauge_dual"
