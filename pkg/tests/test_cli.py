import json
import logging

import pytest

from crossratio.db.file_store import dump_json
from crossratio.main import main

from .conftest import G2_PAIRING, G2_SYMMETRIC

FREE_LABELS = ["e2", "e3", "e4", "e5", "e7", "e8"]


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def pattern_file(tmp_path):
    path = tmp_path / "pattern.json"
    path.write_text(dump_json({"genus": 2, "sides": 18, "pairing": [list(p) for p in G2_PAIRING]}))
    return path


@pytest.fixture
def params_file(tmp_path, pattern_file, capsys):
    free = tmp_path / "free.json"
    free.write_text(dump_json({"values": {label: G2_SYMMETRIC for label in FREE_LABELS}}))
    out = tmp_path / "params.json"
    code, _, _ = run(capsys, "solve", "--pattern", str(pattern_file), "--free", str(free), "--out", str(out))
    assert code == 0
    return out


@pytest.fixture
def perturbed_params(tmp_path, params_file):
    document = json.loads(params_file.read_text())
    document["values"]["e1"] += 0.01
    path = tmp_path / "perturbed.json"
    path.write_text(dump_json(document))
    return path


@pytest.mark.parametrize("genus, count", [(1, 1), (2, 8)])
def test_patterns_census(capsys, genus, count):
    code, out, _ = run(capsys, "patterns", "--genus", str(genus))
    assert code == 0
    first, rest = out.split("\n", 1)
    assert first == f"count: {count}"
    assert len(json.loads(rest)) == count


def test_patterns_written_to_file(capsys, tmp_path):
    target = tmp_path / "census.json"
    code, out, _ = run(capsys, "patterns", "--genus", "1", "--out", str(target))
    assert code == 0
    assert out == "count: 1\n"
    assert json.loads(target.read_text())[0]["pairing"] == [[1, 4], [2, 5], [3, 6]]


def test_admissible_boundary_within_acceptance_band(capsys):
    code, out, _ = run(capsys, "admissible", "--vector", "1.4142135624,1.4142135624,1.4142135624")
    assert code == 0
    assert out.splitlines()[0] == "boundary"


def test_admissible_with_tight_band_is_strict(capsys):
    vector = "1.4142135624,1.4142135624,1.4142135624"
    code, out, _ = run(capsys, "admissible", "--vector", vector, "--eps", "1e-12")
    assert code == 0
    assert out.splitlines()[0] == "strict"


def test_admissible_threshold(capsys):
    code, out, _ = run(capsys, "admissible", "--vector", "2,2", "--threshold", "both")
    assert code == 0
    report = json.loads(out.split("\n", 1)[1])
    assert report["kind"] == "strict"
    assert report["threshold"] == pytest.approx(1.0)


def test_inadmissible_vector_exits_two(capsys):
    code, out, err = run(capsys, "admissible", "--vector", ",".join(["1.41421356237"] * 5))
    assert code == 2
    assert out.splitlines()[0] == "inadmissible"
    assert json.loads(err.strip().splitlines()[-1])["error"] == "inadmissible"


@pytest.mark.parametrize("vector", ["1,a", "1,-2", ""])
def test_malformed_vector_exits_one(capsys, vector):
    code, _, err = run(capsys, "admissible", "--vector", vector)
    assert code == 1
    assert err


def test_torus_solves_third_value(capsys):
    code, out, _ = run(capsys, "torus", "--x", "2", "--y", "1", "--traces")
    assert code == 0
    report = json.loads(out)
    assert report["z"] == pytest.approx(3.0)
    assert report["verification"]["verdict"] == "in-space"
    assert report["traces"] == [pytest.approx([5.0, -1.0]), pytest.approx([1.0, -1.0])]


def test_torus_outside_convex_image(capsys):
    code, _, err = run(capsys, "torus", "--x", "0.5", "--y", "1")
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["error"] == "outside-convex-image"


def test_torus_development(capsys, tmp_path):
    svg = tmp_path / "torus.svg"
    scene = tmp_path / "torus.json"
    code, _, _ = run(
        capsys, "torus", "--x", "1.7320508075688772", "--y", "1.7320508075688772",
        "--develop", "2", "--svg", str(svg), "--json", str(scene),
    )
    assert code == 0
    assert svg.read_text().startswith("<svg")
    assert json.loads(scene.read_text())["audit"]["passed"]


def test_solve_then_verify(capsys, params_file):
    document = json.loads(params_file.read_text())
    assert document["dependent"] == ["e1", "e6", "e9"]
    assert document["values"]["e1"] == pytest.approx(G2_SYMMETRIC, abs=1e-9)
    code, out, _ = run(capsys, "verify", "--params", str(params_file))
    assert code == 0
    assert json.loads(out)["verdict"] == "in-space"


def test_verify_perturbed_point(capsys, perturbed_params):
    code, out, err = run(capsys, "verify", "--params", str(perturbed_params))
    assert code == 2
    assert json.loads(out)["verdict"] == "out"
    assert "not-in-space" in err


def test_solve_rejects_inadmissible_free_values(capsys, tmp_path, pattern_file):
    free = tmp_path / "free.json"
    free.write_text(dump_json({"values": {label: 1.1 for label in FREE_LABELS}}))
    out = tmp_path / "params.json"
    code, _, err = run(capsys, "solve", "--pattern", str(pattern_file), "--free", str(free), "--out", str(out))
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["details"]["word"] == "T"
    assert not out.exists()


def test_develop_writes_svg(capsys, tmp_path, params_file):
    svg = tmp_path / "packing.svg"
    code, out, _ = run(capsys, "develop", "--params", str(params_file), "--depth", "2", "--svg", str(svg))
    assert code == 0
    assert json.loads(out)["passed"]
    assert svg.read_text().rstrip().endswith("</svg>")


def test_failed_develop_writes_nothing(capsys, tmp_path, perturbed_params):
    svg = tmp_path / "packing.svg"
    code, _, _ = run(capsys, "develop", "--params", str(perturbed_params), "--depth", "2", "--svg", str(svg))
    assert code == 2
    assert not svg.exists()


def test_holonomy_self_comparison(capsys, params_file):
    code, out, _ = run(capsys, "holonomy", "--params", str(params_file), "--compare", str(params_file))
    assert code == 0
    assert json.loads(out)["verdict"] == "equal"


def test_missing_params_file_exits_one(capsys, tmp_path):
    code, _, err = run(capsys, "verify", "--params", str(tmp_path / "missing.json"))
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["error"] == "invalid-input"


def test_config_overrides(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(dump_json({"acceptance_tolerance": 1e-15}))
    vector = "1.4142135624,1.4142135624,1.4142135624"
    code, out, _ = run(capsys, "admissible", "--vector", vector, "--config", str(config))
    assert code == 0
    assert out.splitlines()[0] == "strict"


def test_invalid_config_exits_one(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text("{not json")
    code, _, _ = run(capsys, "admissible", "--vector", "2,2", "--config", str(config))
    assert code == 1


def test_unknown_config_field_exits_one(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(dump_json({"dead_bnad": 1e-6}))
    code, _, _ = run(capsys, "admissible", "--vector", "2,2", "--config", str(config))
    assert code == 1


def test_malformed_option_exits_one_with_reason(capsys):
    code, out, err = run(capsys, "torus", "--x", "abc", "--y", "1")
    assert code == 1
    assert out == ""
    reason = json.loads(err.strip().splitlines()[-1])
    assert reason["error"] == "invalid-input"
    assert "--x" in reason["message"]
    assert reason["details"]["usage"].startswith("usage:")


@pytest.mark.parametrize("argv", [[], ["nope"], ["torus", "--y", "1"]])
def test_usage_errors_exit_one(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1])["error"] == "invalid-input"


@pytest.mark.parametrize(
    "extra",
    [
        ["--half-width", "0"],
        ["--half-width", "-1"],
        ["--center", "1;2"],
        ["--center", "nan,0"],
        ["--min-radius", "-0.5"],
        ["--develop", "-1"],
    ],
)
def test_bad_viewport_is_rejected_before_developing(capsys, tmp_path, extra):
    svg = tmp_path / "torus.svg"
    argv = ["torus", "--x", "1.7320508075688772", "--y", "1.7320508075688772", "--svg", str(svg)]
    if "--develop" not in extra:
        argv += ["--develop", "1"]
    code, out, err = run(capsys, *argv, *extra)
    assert code == 1
    assert out == ""
    assert json.loads(err.strip().splitlines()[-1])["error"] == "invalid-input"
    assert not svg.exists()


@pytest.mark.parametrize("option", ["--svg", "--json"])
def test_torus_output_files_need_develop(capsys, tmp_path, option):
    target = tmp_path / "torus.out"
    code, _, err = run(capsys, "torus", "--x", "2", "--y", "1", option, str(target))
    assert code == 1
    assert "needs --develop" in json.loads(err.strip().splitlines()[-1])["message"]
    assert not target.exists()


def test_config_log_level_is_applied(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(dump_json({"log_level": "DEBUG"}))
    root = logging.getLogger()
    previous = root.level
    try:
        code, _, _ = run(capsys, "admissible", "--vector", "2,2", "--config", str(config))
        assert code == 0
        assert root.level == logging.DEBUG
        code, _, _ = run(capsys, "admissible", "--vector", "2,2", "--config", str(config), "--log-level", "ERROR")
        assert code == 0
        assert root.level == logging.ERROR
    finally:
        root.setLevel(previous)


def test_invalid_config_log_level_exits_one(capsys, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(dump_json({"log_level": "LOUD"}))
    code, _, _ = run(capsys, "admissible", "--vector", "2,2", "--config", str(config))
    assert code == 1
