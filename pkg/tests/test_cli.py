import json

import pytest

from vqdbench.cli import (
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_TRANSPORT,
    EXIT_VIOLATIONS,
    main,
)
from vqdbench.report import load_report

WORLD = "fixtures/world.json"
DATASET = "fixtures/scene_vqa.jsonl"


def run_cli(*args):
    return main(list(args))


def test_run_writes_report_and_csv(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = run_cli(
        "run",
        "--method", "e2e",
        "--dataset", DATASET,
        "--backends", f"mock:{WORLD}",
        "--out", str(out),
    )
    assert code == EXIT_OK
    report = load_report(out)
    assert report["aggregates"]["instances"] == 13
    assert out.with_suffix(".csv").exists()
    printed = capsys.readouterr().out
    assert "vqa_accuracy" in printed


def test_run_viper_prints_outcome_summary(tmp_path, capsys):
    code = run_cli(
        "run",
        "--method", "viper",
        "--dataset", DATASET,
        "--backends", f"mock:{WORLD}",
        "--limit", "4",
    )
    assert code == EXIT_OK
    printed = capsys.readouterr().out
    assert "No Exception" in printed


def test_run_successive_answers_every_demo_question(tmp_path, capsys):
    # exercises every scripted conversation; q04 carries a "dark green"
    # annotation, so its soft accuracy is 2/3 and the rest are exact
    out = tmp_path / "report.json"
    code = run_cli(
        "run",
        "--method", "successive",
        "--dataset", DATASET,
        "--backends", f"mock:{WORLD}",
        "--out", str(out),
    )
    assert code == EXIT_OK
    report = load_report(out)
    assert report["aggregates"]["instances"] == 13
    assert report["aggregates"]["exact_match"] == 1.0
    assert abs(report["aggregates"]["vqa_accuracy"] - (12 + 2 / 3) / 13) < 1e-9
    capsys.readouterr()


def test_run_successive_multiple_choice_hits_both_choices(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = run_cli(
        "run",
        "--method", "successive",
        "--setting", "mc",
        "--dataset", "fixtures/scene_mc.jsonl",
        "--backends", f"mock:{WORLD}",
        "--out", str(out),
    )
    assert code == EXIT_OK
    report = load_report(out)
    assert report["aggregates"]["mc_correct"] == 1.0
    capsys.readouterr()


def test_run_unknown_method_is_a_config_error(capsys):
    with pytest.raises(SystemExit) as exc_info:
        run_cli("run", "--method", "nope", "--dataset", DATASET)
    assert exc_info.value.code == 2


def test_run_missing_dataset_file_is_a_config_error(capsys):
    code = run_cli(
        "run", "--method", "e2e", "--dataset", "no-such-file.jsonl",
        "--backends", f"mock:{WORLD}",
    )
    assert code == EXIT_CONFIG
    assert "no-such-file" in capsys.readouterr().err


def test_run_bad_backend_selector_is_a_config_error(capsys):
    code = run_cli(
        "run", "--method", "e2e", "--dataset", DATASET, "--backends", "banana"
    )
    assert code == EXIT_CONFIG


def test_run_unreachable_remote_is_a_transport_error(capsys):
    code = run_cli(
        "run",
        "--method", "e2e",
        "--dataset", DATASET,
        "--backends", "remote:http://127.0.0.1:1",
        "--limit", "1",
    )
    assert code == EXIT_TRANSPORT


def test_config_file_merges_under_flags(tmp_path):
    config = tmp_path / "run.json"
    config.write_text(
        json.dumps(
            {
                "method": "e2e",
                "dataset": DATASET,
                "backends": f"mock:{WORLD}",
                "limit": 2,
                "seed": 5,
            }
        ),
        encoding="utf-8",
    )
    out = tmp_path / "r.json"
    code = run_cli("run", "--config", str(config), "--limit", "3", "--out", str(out))
    assert code == EXIT_OK
    report = load_report(out)
    assert report["aggregates"]["instances"] == 3  # flag wins over file
    assert report["config"]["seed"] == 5  # file wins over default


def test_config_file_unknown_key_is_rejected(tmp_path, capsys):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"methd": "e2e"}), encoding="utf-8")
    code = run_cli("run", "--config", str(config))
    assert code == EXIT_CONFIG
    assert "methd" in capsys.readouterr().err


def test_validate_clean_dataset(capsys):
    assert run_cli("validate", "--dataset", DATASET) == EXIT_OK
    assert "0 violation(s)" in capsys.readouterr().out


def test_validate_reports_violations(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text(
        json.dumps({"id": "x1", "image_ref": "img", "question": "", "answers": ["y"]})
        + "\n",
        encoding="utf-8",
    )
    code = run_cli("validate", "--dataset", str(bad))
    assert code == EXIT_VIOLATIONS
    printed = capsys.readouterr().out
    assert "violation:" in printed


def test_validate_missing_file_is_a_config_error(capsys):
    assert run_cli("validate", "--dataset", "missing.jsonl") == EXIT_CONFIG


def test_report_views(tmp_path, capsys):
    out = tmp_path / "report.json"
    run_cli(
        "run",
        "--method", "viper",
        "--dataset", DATASET,
        "--backends", f"mock:{WORLD}",
        "--out", str(out),
    )
    capsys.readouterr()
    assert run_cli("report", "--in", str(out), "--view", "aggregates") == EXIT_OK
    assert "vqa_accuracy" in capsys.readouterr().out
    assert run_cli("report", "--in", str(out), "--view", "summary") == EXIT_OK
    assert "No Exception" in capsys.readouterr().out
    assert run_cli("report", "--in", str(out), "--view", "runtime") == EXIT_OK
    capsys.readouterr()
    assert run_cli("report", "--in", str(out), "--view", "types") == EXIT_OK
    capsys.readouterr()


def test_report_on_e2e_run_has_no_failure_tables(tmp_path, capsys):
    out = tmp_path / "report.json"
    run_cli(
        "run",
        "--method", "e2e",
        "--dataset", DATASET,
        "--backends", f"mock:{WORLD}",
        "--out", str(out),
    )
    capsys.readouterr()
    code = run_cli("report", "--in", str(out), "--view", "summary")
    assert code == EXIT_OK
    assert "no execution outcomes" in capsys.readouterr().out


def test_cached_rerun_reuses_responses(tmp_path):
    cache = tmp_path / "cache"
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    for out in (out1, out2):
        code = run_cli(
            "run",
            "--method", "e2e",
            "--dataset", DATASET,
            "--backends", f"mock:{WORLD}",
            "--cache", str(cache),
            "--out", str(out),
        )
        assert code == EXIT_OK
    first, second = load_report(out1), load_report(out2)
    assert second["meta"]["cache"]["misses"] == 0
    assert first["instances"] == second["instances"]
