import json
import sys

import pytest
from loguru import logger

from app.main import main


@pytest.fixture(autouse=True)
def _restore_logging():
    yield
    logger.remove()
    logger.add(sys.__stderr__, level="WARNING")


def run_json(capsys, *argv):
    code = main([*argv, "--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def write_polytope(tmp_path, data, name="input.json"):
    path = tmp_path / name
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


DET_TWO = {
    "dim": 2,
    "kahler_params": 1,
    "facets": [
        {"normal": [1, 0], "q_exponent": [0]},
        {"normal": [0, 1], "q_exponent": [0]},
        {"normal": [-1, -2], "q_exponent": [1]},
    ],
    "maximal_cones": [[1, 2], [2, 3], [1, 3]],
}


def test_mirror_cp2(capsys):
    code, report = run_json(capsys, "mirror", "--preset", "CP2")
    assert code == 0
    assert report["status"] == "ok"
    assert report["payload"]["superpotential"] == "z1 + z2 + q1*z1^-1*z2^-1"


def test_json_output_is_sorted_and_stable(capsys):
    main(["mirror", "--preset", "CP1", "--format", "json"])
    first = capsys.readouterr().out
    main(["mirror", "--preset", "CP1", "--format", "json"])
    second = capsys.readouterr().out
    assert first == second
    assert list(json.loads(first)) == ["command", "payload", "status"]


def test_validate_presets(capsys):
    code, report = run_json(capsys, "validate", "--preset", "Bl1CP2")
    assert code == 0
    assert report["payload"]["passed"] is True


def test_validation_failure_exits_with_one(capsys, tmp_path):
    code, report = run_json(capsys, "validate", "--file", write_polytope(tmp_path, DET_TWO))
    assert code == 1
    assert report["status"] == "fail"
    unimodular = next(c for c in report["payload"]["checks"] if c["name"] == "unimodular")
    assert unimodular["witness"] == {"cone": [1, 3], "det": -2}


def test_commands_refuse_invalid_polytopes(capsys, tmp_path):
    code, report = run_json(capsys, "jacobian", "--file", write_polytope(tmp_path, DET_TWO))
    assert code == 1
    assert report["payload"]["validation"]["passed"] is False


def test_file_name_becomes_polytope_name(capsys, tmp_path):
    data = dict(DET_TWO, facets=[
        {"normal": [1, 0], "q_exponent": [0]},
        {"normal": [0, 1], "q_exponent": [0]},
        {"normal": [-1, -1], "q_exponent": [1]},
    ])
    code, report = run_json(capsys, "mirror", "--file", write_polytope(tmp_path, data, "plane.json"))
    assert code == 0
    assert report["payload"]["polytope"] == "plane"


@pytest.mark.parametrize("argv", [
    ["mirror", "--preset", "CP9"],
    ["mirror", "--file", "/nonexistent/polytope.json"],
    ["critical", "--preset", "CP1", "--q", "q1=-1"],
    ["critical", "--preset", "CP1", "--q", "q2=1"],
    ["critical", "--preset", "CP1", "--q", "q1"],
    ["critical", "--preset", "CP1", "--q", "q1=abc"],
    ["syz-check", "--preset", "CP1", "--cutoff", "-1"],
    ["mirror", "--preset", "CP1", "--file", "x.json"],
    ["mirror"],
    ["frobnicate", "--preset", "CP1"],
])
def test_input_errors_exit_with_two(capsys, argv):
    assert main(argv) == 2


def test_malformed_json_exits_with_two(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["validate", "--file", str(path)]) == 2


def test_dimension_mismatch_exits_with_two(capsys, tmp_path):
    data = dict(DET_TWO, facets=[
        {"normal": [1, 0], "q_exponent": [0]},
        {"normal": [0, 1], "q_exponent": [0]},
        {"normal": [-1], "q_exponent": [1]},
    ])
    assert main(["validate", "--file", write_polytope(tmp_path, data)]) == 2


def test_jacobian_cp2(capsys):
    code, report = run_json(capsys, "jacobian", "--preset", "CP2")
    assert code == 0
    payload = report["payload"]
    assert payload["dimension"] == 3
    assert payload["relations_hold"] is True
    assert payload["multiplicative_relations"] == ["Z1*Z2*Z3 = q1"]
    assert len(payload["standard_monomials"]) == 3


def test_qh_cp2(capsys):
    code, report = run_json(capsys, "qh", "--preset", "CP2")
    assert code == 0
    assert report["payload"]["linear_relations"] == ["Psi1 - Psi3", "Psi2 - Psi3"]
    assert report["payload"]["dimension"] == 3


def test_verify_iso(capsys):
    code, report = run_json(capsys, "verify-iso", "--preset", "CP1xCP1")
    assert code == 0
    assert report["payload"]["passed"] is True
    assert report["payload"]["jacobian_dimension"] == 4


def test_syz_check(capsys):
    code, report = run_json(capsys, "syz-check", "--preset", "CP1", "--cutoff", "2")
    assert code == 0
    assert report["payload"]["cutoff"] == 2
    assert report["payload"]["passed"] is True


def test_semiflat_check(capsys):
    code, report = run_json(capsys, "semiflat-check", "--preset", "CP2")
    assert code == 0
    assert report["payload"]["dims"] == [2]
    assert report["payload"]["passed"] is True


def test_critical_cp1(capsys):
    code, report = run_json(capsys, "critical", "--preset", "CP1", "--q", "q1=1")
    assert code == 0
    payload = report["payload"]
    assert payload["count"] == 2
    assert payload["jacobian_dimension"] == 2
    assert [p["coordinates"] for p in payload["points"]] == [[[-1.0, 0.0]], [[1.0, 0.0]]]
    assert all(p["residual"] <= 1e-10 for p in payload["points"])


def test_critical_with_rational_q(capsys):
    code, report = run_json(capsys, "critical", "--preset", "CP1", "--q", "q1=1/4")
    assert code == 0
    assert report["payload"]["q"] == {"q1": 0.25}
    assert [p["coordinates"] for p in report["payload"]["points"]] == [[[-0.5, 0.0]], [[0.5, 0.0]]]


def test_clifford_cp2(capsys):
    code, report = run_json(capsys, "clifford", "--preset", "CP2")
    assert code == 0
    points = report["payload"]["points"]
    assert len(points) == 3
    assert all(p["endomorphism_dim"] == 4 and p["nontrivial"] for p in points)
    real_point = next(p for p in points if p["coordinates"][0] == [1.0, 0.0])
    assert real_point["clifford_form"] == [[[2.0, 0.0], [1.0, 0.0]], [[1.0, 0.0], [2.0, 0.0]]]


def test_text_format(capsys):
    code = main(["mirror", "--preset", "CP2"])
    out = capsys.readouterr().out
    assert code == 0
    assert "status: ok" in out
    assert "superpotential: z1 + z2 + q1*z1^-1*z2^-1" in out


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code = main(["mirror", "--preset", "CP1", "--format", "json", "--out", str(target)])
    assert code == 0
    assert capsys.readouterr().out == ""
    assert json.loads(target.read_text())["payload"]["superpotential"] == "z1 + q1*z1^-1"


@pytest.mark.parametrize("command", ["critical", "clifford"])
def test_cp3_solves_without_input_errors(capsys, command):
    code, report = run_json(capsys, command, "--preset", "CP3")
    assert code == 0
    assert report["status"] == "ok"
    assert len(report["payload"]["points"]) == 4


def test_small_coordinates_keep_significant_digits(capsys):
    code, report = run_json(capsys, "critical", "--preset", "CP1", "--q", "q1=1/10000000000000000000000000000")
    assert code == 0
    coordinates = sorted(p["coordinates"][0][0] for p in report["payload"]["points"])
    assert coordinates == pytest.approx([-1e-14, 1e-14], rel=1e-9)


def test_report_digits_follow_the_environment(capsys, monkeypatch):
    monkeypatch.setenv("SYZ_REPORT_DIGITS", "3")
    code, report = run_json(capsys, "critical", "--preset", "CP2")
    assert code == 0
    firsts = [p["coordinates"][0] for p in report["payload"]["points"]]
    assert [-0.5, 0.866] in firsts
    assert [-0.5, -0.866] in firsts
