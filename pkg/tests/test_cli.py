import pytest
from helpers import minimal_doc

from fogmig import emit_scenario, load_preset
from fogmig.cli import main


@pytest.fixture()
def tiny_path(tmp_path):
    path = tmp_path / "tiny.scenario"
    path.write_text(emit_scenario(load_preset("tiny")), encoding="utf-8")
    return str(path)


@pytest.fixture()
def app1_path(tmp_path):
    path = tmp_path / "app1.scenario"
    path.write_text(emit_scenario(load_preset("app1")), encoding="utf-8")
    return str(path)


def test_run_writes_results_csv(tiny_path, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["run", "--scenario", tiny_path, "--planner", "acm",
                 "--seed", "3", "--out", str(out)])
    assert code == 0
    assert (out / "results.csv").exists()
    stdout = capsys.readouterr().out
    assert "makespan=" in stdout
    assert "planner=acm" in stdout


def test_run_check_emits_feasibility_csv(tiny_path, tmp_path):
    out = tmp_path / "out"
    code = main(["run", "--scenario", tiny_path, "--planner", "random",
                 "--seed", "1", "--check", "--out", str(out)])
    assert code == 0
    text = (out / "feasibility.csv").read_text()
    assert text.splitlines()[0] == "slot,constraint,entities,load,limit"


def test_run_is_deterministic(tiny_path, tmp_path):
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    for out in (out_a, out_b):
        assert main(["run", "--scenario", tiny_path, "--planner", "acm",
                     "--seed", "9", "--out", str(out)]) == 0
    assert (out_a / "results.csv").read_bytes() == \
        (out_b / "results.csv").read_bytes()


def test_sweep_command_end_to_end(app1_path, tmp_path, capsys):
    out = tmp_path / "sweepout"
    code = main(["sweep", "--scenario", app1_path,
                 "--param", "user-connections", "--values", "1,2",
                 "--planners", "acm,none", "--reps", "2",
                 "--seed", "0", "--out", str(out)])
    assert code == 0
    lines = (out / "results.csv").read_text().strip().splitlines()
    assert len(lines) == 1 + 2 * 2 * 2
    assert (out / "makespan.png").exists()
    assert (out / "migrations.png").exists()
    assert "user-connections=1" in capsys.readouterr().out


def test_oracle_command_agrees_on_tiny(tiny_path, capsys):
    code = main(["oracle", "--scenario", tiny_path, "--seed", "5"])
    assert code == 0
    assert "0 differ" in capsys.readouterr().out


def test_oracle_command_rejects_large_scenario(app1_path, capsys):
    code = main(["oracle", "--scenario", app1_path])
    assert code == 2
    assert "limited to" in capsys.readouterr().err


def test_missing_scenario_file_exits_nonzero(capsys):
    code = main(["run", "--scenario", "/does/not/exist.scenario"])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_invalid_scenario_document_exits_nonzero(tmp_path, capsys):
    doc = minimal_doc()
    doc["catalog"][0]["processing_capacity"] = -1.0
    path = tmp_path / "bad.scenario"
    import json
    path.write_text(json.dumps(doc), encoding="utf-8")
    code = main(["run", "--scenario", str(path)])
    assert code == 2
    assert "processing_capacity" in capsys.readouterr().err


def test_unknown_planner_rejected_by_argparse(tiny_path):
    with pytest.raises(SystemExit):
        main(["run", "--scenario", tiny_path, "--planner", "genetic"])


def test_feasibility_failure_exits_nonzero(tiny_path, monkeypatch, capsys):
    from fogmig import FeasibilityReport, Violation
    from fogmig.harness import FeasibilityError

    def boom(config):
        raise FeasibilityError(3, FeasibilityReport(
            (Violation(3, "node-capacity", ("fog-1",), 5.0, 4.0),)))

    monkeypatch.setattr("fogmig.cli.run_simulation", boom)
    code = main(["run", "--scenario", tiny_path])
    assert code == 3
    assert "infeasible schedule at slot 3" in capsys.readouterr().err
