import json

from gamesight.cli import main
from gamesight.jsonutil import canonical_dumps
from gamesight.observer import ImpairmentProfile


def test_simulate_fit_replay_roundtrip(tmp_path, capsys):
    profile_path = tmp_path / "profile.json"
    profile_path.write_text(canonical_dumps(ImpairmentProfile(sphere_d=-2.0).to_json()))
    log_path = tmp_path / "log.jsonl"
    report_path = tmp_path / "report.json"

    assert main([
        "simulate",
        "--profile", str(profile_path),
        "--trials", "200",
        "--seed", "3",
        "--out", str(log_path),
    ]) == 0
    lines = log_path.read_text().splitlines()
    assert len(lines) > 150
    assert all(json.loads(line)["v"] == 1 for line in lines)

    assert main(["fit", "--in", str(log_path), "--out", str(report_path)]) == 0
    report = json.loads(report_path.read_text())
    assert report["v"] == 1 and report["child_id"] == "sim"

    assert main(["replay", "--in", str(log_path), "--check"]) == 0
    out = capsys.readouterr().out
    assert "replay check ok" in out


def test_replay_rejects_corrupt_log(tmp_path, capsys):
    log_path = tmp_path / "log.jsonl"
    log_path.write_text('{"v": 1, "trial_id": "t0"\n')
    assert main(["replay", "--in", str(log_path), "--check"]) == 1
    assert "line 1" in capsys.readouterr().err


def test_unknown_child_report_exits_with_error(tmp_path, capsys):
    cfg_path = tmp_path / "cfg.json"
    from gamesight.config import AppConfig, save_config

    save_config(AppConfig(data_dir=str(tmp_path / "data")), str(cfg_path))
    assert main(["report", "--child", "nobody", "--config", str(cfg_path)]) == 2
    assert "error:" in capsys.readouterr().err


def test_report_prints_registered_child_document(tmp_path, capsys):
    from gamesight.config import AppConfig, save_config

    cfg_path = tmp_path / "cfg.json"
    data_dir = tmp_path / "data"
    data_dir.mkdir()
    save_config(
        AppConfig(data_dir=str(data_dir), children={"kim": "Kim"}), str(cfg_path)
    )
    assert main([
        "simulate", "--trials", "80", "--seed", "2",
        "--out", str(data_dir / "kim.jsonl"),
    ]) == 0
    assert main(["report", "--child", "kim", "--config", str(cfg_path)]) == 0
    out = capsys.readouterr().out
    report = json.loads(out.splitlines()[-1])
    assert report["child_id"] == "kim"
    assert sum(report["trial_counts"].values()) > 0
