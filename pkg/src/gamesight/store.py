"""Append-only per-child event logs with idempotent ingestion and replay.

Each child owns one JSON Lines file; every line is a self-contained
TrialRecord document, so any prefix of a log is itself a valid log.
Duplicate deliveries (same session and trial id) are acknowledged without
appending. Replay parses the file back into records and hands them to the
same pure derivation the live path uses.
"""

import json
import os

from .config import AppConfig
from .errors import BadRequest, NotFound, ReplayError
from .jsonutil import canonical_dumps
from .pipeline import derive_state
from .session import RESPONSES, TrialRecord

REQUIRED_TRIAL_FIELDS = (
    "v",
    "trial_id",
    "session_id",
    "spec",
    "view",
    "response",
    "response_time_ms",
    "credit_awarded",
)


def validate_trial_json(obj) -> TrialRecord:
    """Schema-check one trial document; BadRequest on any violation."""
    if not isinstance(obj, dict):
        raise BadRequest("trial must be a JSON object")
    missing = [k for k in REQUIRED_TRIAL_FIELDS if k not in obj]
    if missing:
        raise BadRequest(f"missing fields: {missing}")
    if obj["v"] != 1:
        raise BadRequest(f"unsupported schema version: {obj['v']!r}")
    if obj["response"] not in RESPONSES:
        raise BadRequest(f"bad response value: {obj['response']!r}")
    spec = obj["spec"]
    if not isinstance(spec, dict) or not isinstance(spec.get("intensity"), (int, float)):
        raise BadRequest("spec.intensity must be a number")
    if not isinstance(spec.get("channel"), dict):
        raise BadRequest("spec.channel must be an object")
    try:
        return TrialRecord.from_json(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise BadRequest(f"malformed trial: {exc}") from exc


def parse_log_line(line: str, line_number: int) -> TrialRecord:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ReplayError(line_number, f"invalid JSON: {exc.msg}") from exc
    try:
        return validate_trial_json(obj)
    except BadRequest as exc:
        raise ReplayError(line_number, str(exc)) from exc


def read_log(path: str) -> list:
    """Parse a JSONL event log; ReplayError names the offending line."""
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            if line.strip() == "":
                continue
            records.append(parse_log_line(line, i))
    return records


class EventStore:
    """Single-writer, per-child append-only persistence."""

    def __init__(self, config: AppConfig):
        self.config = config
        self.data_dir = config.data_dir
        os.makedirs(self.data_dir, exist_ok=True)
        self._records: dict = {}   # child_id -> list of TrialRecord
        self._seen: dict = {}      # child_id -> set of (session_id, trial_id)
        for child_id in config.children:
            self._load_child(child_id)

    def _log_path(self, child_id: str) -> str:
        return os.path.join(self.data_dir, f"{child_id}.jsonl")

    def _load_child(self, child_id: str) -> None:
        self._records[child_id] = []
        self._seen[child_id] = set()
        path = self._log_path(child_id)
        if os.path.exists(path):
            for rec in read_log(path):
                self._records[child_id].append(rec)
                self._seen[child_id].add((rec.session_id, rec.trial_id))

    def _require_child(self, child_id: str) -> None:
        if child_id not in self._records:
            raise NotFound(f"unknown child: {child_id}")

    def children(self) -> list:
        return sorted(self._records)

    def ingest_trial(self, child_id: str, session_id: str, trial_json: dict) -> dict:
        """Append exactly once; duplicates are acknowledged, not re-appended.

        Sessions are implicitly registered under a known child on first
        delivery; the trial body's session_id must match the addressed one.
        """
        self._require_child(child_id)
        record = validate_trial_json(trial_json)
        if record.session_id != session_id:
            raise BadRequest(
                f"session mismatch: body {record.session_id!r} vs path {session_id!r}"
            )
        key = (record.session_id, record.trial_id)
        if key in self._seen[child_id]:
            return {"v": 1, "acknowledged": True, "duplicate": True}
        with open(self._log_path(child_id), "a", encoding="utf-8") as fh:
            fh.write(canonical_dumps(record.to_json()) + "\n")
        self._records[child_id].append(record)
        self._seen[child_id].add(key)
        return {"v": 1, "acknowledged": True, "duplicate": False}

    def log_length(self, child_id: str) -> int:
        self._require_child(child_id)
        return len(self._records[child_id])

    def report(self, child_id: str) -> dict:
        """Report from the incrementally maintained in-memory log."""
        self._require_child(child_id)
        return derive_state(child_id, self._records[child_id], self.config)

    def alerts(self, child_id: str, since_ms: int = 0) -> list:
        report = self.report(child_id)
        return [a for a in report["alerts"] if a["window"][1] >= since_ms]

    def replay(self, child_id: str) -> dict:
        """Rebuild the report from the on-disk log alone."""
        self._require_child(child_id)
        path = self._log_path(child_id)
        records = read_log(path) if os.path.exists(path) else []
        return derive_state(child_id, records, self.config)


def replay_log(path: str, child_id: str = "replay", cfg: AppConfig | None = None) -> dict:
    """Standalone replay of an arbitrary log file."""
    return derive_state(child_id, read_log(path), cfg or AppConfig())
