import json

from pytest import raises

from app.cli import EXIT_ERROR, EXIT_FAILED, EXIT_PASSED, main


def _write_config(tmp_path, data):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_print_schema(capsys):
    assert main(["--print-schema"]) == EXIT_PASSED
    schema = json.loads(capsys.readouterr().out)
    assert "command" in schema["properties"]


def test_command_writes_reports(tmp_path):
    out = tmp_path / "out"
    assert main(["rectangle-demo", "--out", str(out)]) == EXIT_PASSED
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert report["command"] == "rectangle-demo"
    assert report["passed"] is True
    lines = (out / "report.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 4
    assert lines[0].startswith("delta,count,")


def test_config_file_with_overrides(tmp_path):
    config = _write_config(tmp_path, {
        "command": "check-inequality",
        "field": {"family": "quadratic", "params": {"n": 2}},
        "c": 1e-3,
    })
    out = tmp_path / "out"
    assert main(["--config", config, "--p", "2", "inf", "--resolution", "64", "--out", str(out)]) == EXIT_PASSED
    report = json.loads((out / "report.json").read_text(encoding="utf-8"))
    assert [row["p"] for row in report["rows"]] == [2.0, "inf"]
    assert report["details"]["config"]["resolution"] == 64


def test_failed_verdict_exit_code(tmp_path):
    config = _write_config(tmp_path, {
        "command": "check-inequality",
        "field": {"family": "quadratic", "params": {"n": 2}},
        "c": 10.0,
    })
    assert main(["--config", config, "--resolution", "32", "--out", str(tmp_path / "out")]) == EXIT_FAILED


def test_invalid_config_exit_code(tmp_path):
    config = _write_config(tmp_path, {"command": "check-inequality", "p": [0.5]})
    assert main(["--config", config]) == EXIT_ERROR


def test_missing_config_file(tmp_path):
    assert main(["--config", str(tmp_path / "missing.json")]) == EXIT_ERROR


def test_hypothesis_violation_exit_code(tmp_path):
    config = _write_config(tmp_path, {
        "command": "check-inequality",
        "field": {"family": "gressman", "params": {"N": 3}},
    })
    assert main(["--config", config, "--out", str(tmp_path / "out")]) == EXIT_ERROR
    assert not (tmp_path / "out").exists()


def test_runs_are_byte_identical(tmp_path):
    config = _write_config(tmp_path, {
        "command": "check-inequality",
        "field": {"family": "quadratic", "params": {"n": 2}},
        "c": 1e-3,
        "resolution": 64,
    })
    first, second = tmp_path / "first", tmp_path / "second"
    assert main(["--config", config, "--out", str(first)]) == EXIT_PASSED
    assert main(["--config", config, "--out", str(second)]) == EXIT_PASSED
    assert (first / "report.csv").read_bytes() == (second / "report.csv").read_bytes()


def test_requires_command_or_config():
    with raises(SystemExit):
        main([])
