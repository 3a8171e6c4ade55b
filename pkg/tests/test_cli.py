# -*- coding: utf-8 -*-

import json

import pytest

from config import settings
from scripts.main import main
from utils.trace_io import INTERACTION_LOG_HEADER, read_table, write_table


def _run(*argv) -> int:
    return main(list(argv))


def test_run_writes_result_bundle(scenario_path, tmp_path):
    code = _run("run", "--scenario", scenario_path("basketball_test"), "--duration", "0.05", "--out", str(tmp_path))
    assert code == settings.EXIT_OK
    for name in (settings.PRIMARY_TRACE_FILENAME, settings.SECONDARY_TRACE_FILENAME,
                 settings.INTERACTION_LOG_FILENAME, settings.STATS_REPORT_FILENAME,
                 settings.STATS_TABLE_FILENAME, settings.SCENARIO_RESOLVED_FILENAME):
        assert (tmp_path / name).exists(), name
    status = json.loads((tmp_path / settings.STATUS_FILENAME).read_text(encoding="utf-8"))
    assert status["status"] == "completed"
    assert status["steps"] == 500
    assert "primary_mass: 0.68" in (tmp_path / settings.STATS_REPORT_FILENAME).read_text(encoding="utf-8")


def test_syntax_error_exits_with_parse_code(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind": "flag",', encoding="utf-8")
    assert _run("run", "--scenario", str(bad), "--out", str(tmp_path / "out")) == settings.EXIT_PARSE_ERROR
    assert _run("run", "--scenario", str(tmp_path / "missing.json")) == settings.EXIT_PARSE_ERROR


def test_bad_override_exits_with_parse_code(scenario_path, tmp_path):
    code = _run("run", "--scenario", scenario_path("bungee"), "--set", "time.duration", "--out", str(tmp_path))
    assert code == settings.EXIT_PARSE_ERROR


def test_invalid_config_exits_with_validation_code(scenario_path, tmp_path, capsys):
    code = _run("run", "--scenario", scenario_path("basketball_test"), "--set", "time.duration=0.00015",
                "--out", str(tmp_path))
    assert code == settings.EXIT_VALIDATION_ERROR
    assert "time.duration" in capsys.readouterr().err


def test_instability_exits_with_code_five_and_keeps_partial_traces(scenario_path, tmp_path):
    code = _run("run", "--scenario", scenario_path("basketball_two_way"), "--dt", "0.01", "--out", str(tmp_path))
    assert code == settings.EXIT_INSTABILITY
    status = json.loads((tmp_path / settings.STATUS_FILENAME).read_text(encoding="utf-8"))
    assert status["status"] == "unstable"
    assert status["entity"] == "secondary"
    assert (tmp_path / settings.PRIMARY_TRACE_FILENAME).exists()
    assert (tmp_path / settings.SECONDARY_TRACE_FILENAME).exists()


def test_saved_drive_trace_replays_identically(scenario_path, tmp_path):
    scenario = scenario_path("basketball_test")
    first = tmp_path / "first"
    assert _run("run", "--scenario", scenario, "--set", "mode=\"one_way\"", "--duration", "0.05",
                "--save-drive-trace", "--out", str(first)) == settings.EXIT_OK
    drive = first / settings.DRIVE_TRACE_FILENAME
    assert drive.exists()

    second = tmp_path / "second"
    assert _run("run", "--scenario", scenario, "--set", "mode=one_way", "--duration", "0.05",
                "--trace", str(drive), "--out", str(second)) == settings.EXIT_OK
    name = settings.SECONDARY_TRACE_FILENAME
    assert (second / name).read_bytes() == (first / name).read_bytes()

    code = _run("run", "--scenario", scenario, "--duration", "0.05", "--trace", str(drive), "--out", str(second))
    assert code == settings.EXIT_VALIDATION_ERROR


def test_malformed_drive_trace_is_a_parse_error(scenario_path, tmp_path):
    drive = tmp_path / "drive.csv"
    drive.write_text("t,x\n0.0,1.0\n", encoding="utf-8")
    code = _run("run", "--scenario", scenario_path("basketball_test"), "--set", "mode=one_way",
                "--trace", str(drive), "--out", str(tmp_path / "out"))
    assert code == settings.EXIT_PARSE_ERROR


def _write_log(path, force: float, samples: int = 10) -> None:
    write_table(path, INTERACTION_LOG_HEADER, [[k * 0.01, 0.0, force, 0.0, 1] for k in range(samples)])


def test_advise_recommends_one_way_for_negligible_force(tmp_path, capsys):
    log = tmp_path / "interaction_log.csv"
    _write_log(log, 6.9)
    assert _run("advise", str(log), "--mass", "46.56") == settings.EXIT_OK
    out = capsys.readouterr().out
    assert "Gợi ý: one_way" in out
    assert "accel_mean" in out


def test_advise_recommends_hybrid_when_two_way_is_too_costly(tmp_path, capsys):
    log = tmp_path / "interaction_log.csv"
    _write_log(log, 15.7)
    code = _run("advise", str(log), "--mass", "0.68", "--stand-in-available", "--two-way-too-costly")
    assert code == settings.EXIT_OK
    assert "Gợi ý: hybrid" in capsys.readouterr().out


def test_advise_rejects_bad_inputs(tmp_path):
    empty = tmp_path / "empty.csv"
    write_table(empty, INTERACTION_LOG_HEADER, [])
    assert _run("advise", str(empty), "--mass", "1.0") == settings.EXIT_PARSE_ERROR
    assert _run("advise", str(tmp_path / "missing.csv"), "--mass", "1.0") == settings.EXIT_PARSE_ERROR

    log = tmp_path / "interaction_log.csv"
    _write_log(log, 1.0)
    assert _run("advise", str(log), "--mass", "0") == settings.EXIT_VALIDATION_ERROR


def test_dump_mesh_writes_rest_configuration(scenario_path, tmp_path, capsys):
    assert _run("dump-mesh", "--scenario", scenario_path("flag"), "--out", str(tmp_path)) == settings.EXIT_OK
    particles = read_table(tmp_path / "mesh_particles.csv")
    assert particles.shape == (96, 6)
    assert particles[:, 5].sum() == 8
    assert read_table(tmp_path / "mesh_triangles.csv").shape[1] == 3
    assert "96" in capsys.readouterr().out

    assert _run("dump-mesh", "--scenario", scenario_path("water_entry"),
                "--out", str(tmp_path / "none")) == settings.EXIT_VALIDATION_ERROR


def test_compare_writes_summary_and_trajectories(scenario_path, tmp_path):
    code = _run("compare", "--scenario", scenario_path("basketball_test"), "--duration", "0.05",
                "--out", str(tmp_path))
    assert code == settings.EXIT_OK
    summary = (tmp_path / settings.COMPARE_SUMMARY_FILENAME).read_text(encoding="utf-8").splitlines()
    assert summary[0].split(",") == ["mode", "exit_speed", "max_displacement", "wall_primary",
                                     "wall_secondary", "wall_total", "status"]
    assert [line.split(",")[0] for line in summary[1:]] == ["two_way", "one_way", "hybrid"]
    assert (tmp_path / "trajectories.csv").exists()


def test_compare_needs_stand_in(scenario_path, tmp_path):
    code = _run("compare", "--scenario", scenario_path("bungee"), "--duration", "0.1", "--out", str(tmp_path))
    assert code == settings.EXIT_VALIDATION_ERROR


def test_missing_subcommand_is_an_argparse_error():
    with pytest.raises(SystemExit):
        main([])
