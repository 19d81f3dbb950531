import json

import pytest
from fastapi.testclient import TestClient

from gamesight.config import AppConfig
from gamesight.errors import BadRequest, NotFound, ReplayError
from gamesight.jsonutil import canonical_dumps
from gamesight.observer import FIXTURE_PROFILES, run_session
from gamesight.service import create_app
from gamesight.store import EventStore, read_log, replay_log


@pytest.fixture
def config(tmp_path, screen):
    return AppConfig(
        screen=screen,
        data_dir=str(tmp_path / "data"),
        children={"kim": "Kim", "ada": "Ada"},
    )


@pytest.fixture
def store(config):
    return EventStore(config)


def simulated_trials(screen, n=80, seed=0, session_id="s1"):
    return [
        r.to_json()
        for r in run_session(
            FIXTURE_PROFILES["emmetrope"], screen, n, seed=seed, session_id=session_id
        )
    ]


# -- store ------------------------------------------------------------------


def test_ingest_appends_exactly_once(store, screen):
    trials = simulated_trials(screen, 40)
    for t in trials:
        ack = store.ingest_trial("kim", "s1", t)
        assert ack == {"v": 1, "acknowledged": True, "duplicate": False}
    assert store.log_length("kim") == len(trials)


def test_duplicate_delivery_acknowledged_not_reappended(store, screen):
    trials = simulated_trials(screen, 40)
    for t in trials:
        store.ingest_trial("kim", "s1", t)
    ack = store.ingest_trial("kim", "s1", trials[3])
    assert ack["duplicate"] is True
    assert store.log_length("kim") == len(trials)


def test_malformed_trial_rejected_log_unchanged(store, screen):
    trials = simulated_trials(screen, 10)
    store.ingest_trial("kim", "s1", trials[0])
    bad = json.loads(canonical_dumps(trials[1]))
    bad["spec"]["intensity"] = "very bright"
    with pytest.raises(BadRequest):
        store.ingest_trial("kim", "s1", bad)
    missing = {k: v for k, v in trials[2].items() if k != "response"}
    with pytest.raises(BadRequest):
        store.ingest_trial("kim", "s1", missing)
    with pytest.raises(BadRequest):
        store.ingest_trial("kim", "s2", trials[3])  # body/path session mismatch
    assert store.log_length("kim") == 1


def test_unknown_child_not_found(store, screen):
    with pytest.raises(NotFound):
        store.ingest_trial("zoe", "s1", simulated_trials(screen, 5)[0])
    with pytest.raises(NotFound):
        store.report("zoe")


def test_replay_matches_incremental_bytes(store, screen):
    for t in simulated_trials(screen, 120, seed=4):
        store.ingest_trial("kim", "s1", t)
    live = canonical_dumps(store.report("kim"))
    replayed = canonical_dumps(store.replay("kim"))
    assert live == replayed


def test_cold_start_reload_matches(config, screen):
    store = EventStore(config)
    for t in simulated_trials(screen, 100, seed=5):
        store.ingest_trial("kim", "s1", t)
    live = canonical_dumps(store.report("kim"))
    rebooted = EventStore(config)
    assert canonical_dumps(rebooted.report("kim")) == live
    # dedupe state survives the reload
    ack = rebooted.ingest_trial("kim", "s1", simulated_trials(screen, 100, seed=5)[0])
    assert ack["duplicate"] is True


def test_truncated_line_raises_replay_error_with_line_number(tmp_path, screen):
    trials = simulated_trials(screen, 30)
    path = tmp_path / "log.jsonl"
    lines = [canonical_dumps(t) for t in trials]
    lines[-1] = lines[-1][: len(lines[-1]) // 2]  # truncated final line
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(ReplayError) as excinfo:
        read_log(str(path))
    assert excinfo.value.line_number == len(lines)


def test_log_prefix_is_always_valid(tmp_path, store, screen):
    for t in simulated_trials(screen, 50, seed=6):
        store.ingest_trial("kim", "s1", t)
    path = store._log_path("kim")
    full = open(path, "r", encoding="utf-8").read().splitlines()
    for k in (1, 10, 25, 49):
        prefix_path = tmp_path / f"prefix{k}.jsonl"
        prefix_path.write_text("\n".join(full[:k]) + "\n")
        assert len(read_log(str(prefix_path))) == k


def test_empty_log_empty_state(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("")
    report = replay_log(str(path))
    assert report["trial_counts"] == {}
    assert report["alerts"] == []


# -- HTTP API ---------------------------------------------------------------


@pytest.fixture
def client(config):
    return TestClient(create_app(config))


def test_healthz(client):
    resp = client.get("/v1/healthz")
    assert resp.status_code == 200
    assert resp.json()["status"] == "ok"


def test_trial_roundtrip_over_http(client, screen):
    trials = simulated_trials(screen, 60, seed=7)
    for t in trials:
        resp = client.post("/v1/children/kim/sessions/s1/trials", json=t)
        assert resp.status_code == 200
        assert resp.json()["duplicate"] is False
    resp = client.post("/v1/children/kim/sessions/s1/trials", json=trials[0])
    assert resp.json()["duplicate"] is True
    report = client.get("/v1/children/kim/report")
    assert report.status_code == 200
    body = report.json()
    assert body["child_id"] == "kim"
    assert sum(body["trial_counts"].values()) == len(trials)


def test_http_error_bodies(client, screen):
    resp = client.get("/v1/children/zoe/report")
    assert resp.status_code == 404
    assert resp.json()["code"] == "not_found"
    resp = client.post("/v1/children/kim/sessions/s1/trials", json={"v": 2})
    assert resp.status_code == 400
    assert resp.json()["code"] == "bad_request"
    resp = client.post(
        "/v1/children/kim/sessions/s1/trials",
        content=b"{not json",
        headers={"content-type": "application/json"},
    )
    assert resp.status_code == 400


def test_alert_endpoint_filters_by_since(client, screen):
    for t in simulated_trials(screen, 60, seed=8):
        client.post("/v1/children/ada/sessions/s1/trials", json=t)
    all_alerts = client.get("/v1/children/ada/alerts", params={"since": 0}).json()
    future = client.get(
        "/v1/children/ada/alerts", params={"since": 10**18}
    ).json()
    assert future["alerts"] == []
    assert all_alerts["v"] == 1
    times = [a["window"][1] for a in all_alerts["alerts"]]
    assert times == sorted(times)


def test_report_bytes_stable_across_requests(client, screen):
    for t in simulated_trials(screen, 80, seed=9):
        client.post("/v1/children/kim/sessions/s1/trials", json=t)
    a = client.get("/v1/children/kim/report").content
    b = client.get("/v1/children/kim/report").content
    assert a == b
