"""Durable per-session storage: append-only event log plus a model snapshot.

The event log is the source of truth; model.json is a cache rebuilt on load
by replaying the log. Commits append the event line first (flush + fsync),
then atomically replace the snapshot, so a crash at any point leaves either
the previous committed state or the new one, never a blend. A final log line
without its newline is a torn write: it is dropped and truncated away.

Fault injection: set DRAFTSMITH_FAULT to "<point>" or "<point>:<n>" (points:
torn_event, after_event, after_model) and the process hard-exits at the nth
hit of that commit step. Used by the crash-safety harness.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Optional

from ..model import ObjectModel, encode_model
from .actions import replay_events
from .errors import CorruptLog, SessionNotFound

FAULT_ENV = "DRAFTSMITH_FAULT"
FAULT_POINTS = ("torn_event", "after_event", "after_model")
FAULT_EXIT_CODE = 23


class FaultPlan:
    """Hard-exit the process at the nth hit of one named commit point."""

    def __init__(self, point: str, nth: int = 1):
        if point not in FAULT_POINTS:
            raise ValueError(f"unknown fault point {point!r}")
        self.point = point
        self.remaining = nth

    @classmethod
    def from_env(cls) -> Optional["FaultPlan"]:
        raw = os.environ.get(FAULT_ENV, "").strip()
        if not raw:
            return None
        point, _, nth = raw.partition(":")
        return cls(point, int(nth) if nth else 1)

    def hit(self, point: str) -> bool:
        if point != self.point:
            return False
        self.remaining -= 1
        return self.remaining <= 0


def _fsync_dir(path: Path) -> None:
    fd = os.open(path, os.O_RDONLY)
    try:
        os.fsync(fd)
    finally:
        os.close(fd)


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
        f.flush()
        os.fsync(f.fileno())
    tmp.replace(path)
    _fsync_dir(path.parent)


@dataclass
class SessionRecord:
    id: str
    prompt: str
    cohort: str
    created_at_ms: int
    finished_at_ms: Optional[int]
    model: ObjectModel
    events: list[dict] = dc_field(default_factory=list)

    @property
    def last_event_t(self) -> int:
        return self.events[-1]["t"] if self.events else 0


class SessionStore:
    def __init__(self, root: str | Path, fault: Optional[FaultPlan] = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.fault = fault if fault is not None else FaultPlan.from_env()

    # -- paths -----------------------------------------------------------------

    def session_dir(self, sid: str) -> Path:
        return self.root / sid

    def events_path(self, sid: str) -> Path:
        return self.session_dir(sid) / "events.jsonl"

    def model_path(self, sid: str) -> Path:
        return self.session_dir(sid) / "model.json"

    def meta_path(self, sid: str) -> Path:
        return self.session_dir(sid) / "meta.json"

    def list_ids(self) -> list[str]:
        if not self.root.exists():
            return []
        return sorted(p.name for p in self.root.iterdir() if (p / "meta.json").exists())

    # -- fault plumbing ----------------------------------------------------------

    def _boom(self) -> None:
        os._exit(FAULT_EXIT_CODE)

    def _maybe_fault(self, point: str) -> None:
        if self.fault is not None and self.fault.hit(point):
            self._boom()

    # -- writes ------------------------------------------------------------------

    def create(self, record: SessionRecord) -> None:
        d = self.session_dir(record.id)
        d.mkdir(parents=True, exist_ok=False)
        meta = {
            "id": record.id,
            "prompt": record.prompt,
            "cohort": record.cohort,
            "createdAtMs": record.created_at_ms,
            "finishedAtMs": record.finished_at_ms,
        }
        _write_atomic(self.meta_path(record.id), json.dumps(meta, indent=2) + "\n")
        assert record.events, "create() expects the initial create event"
        with open(self.events_path(record.id), "w", encoding="utf-8") as f:
            for ev in record.events:
                f.write(json.dumps(ev, ensure_ascii=False) + "\n")
            f.flush()
            os.fsync(f.fileno())
        _write_atomic(self.model_path(record.id), encode_model(record.model))
        _fsync_dir(d)

    def append(
        self,
        sid: str,
        event: dict,
        model: ObjectModel,
        finished_at_ms: Optional[int] = None,
    ) -> None:
        """Commit one action: event line first, then the snapshot."""
        line = json.dumps(event, ensure_ascii=False) + "\n"
        with open(self.events_path(sid), "a", encoding="utf-8") as f:
            if self.fault is not None and self.fault.hit("torn_event"):
                f.write(line[: max(1, len(line) // 2)])
                f.flush()
                os.fsync(f.fileno())
                self._boom()
            f.write(line)
            f.flush()
            os.fsync(f.fileno())
        self._maybe_fault("after_event")
        _write_atomic(self.model_path(sid), encode_model(model))
        self._maybe_fault("after_model")
        if finished_at_ms is not None:
            meta = json.loads(self.meta_path(sid).read_text(encoding="utf-8"))
            meta["finishedAtMs"] = finished_at_ms
            _write_atomic(self.meta_path(sid), json.dumps(meta, indent=2) + "\n")

    # -- reads -------------------------------------------------------------------

    def read_events(self, sid: str, repair: bool = True) -> list[dict]:
        """Parse the event log, dropping (and truncating, when repair is set)
        a torn final line. A bad line anywhere else is corruption."""
        path = self.events_path(sid)
        if not path.exists():
            raise SessionNotFound(f"no event log for session {sid!r}")
        raw = path.read_bytes()
        keep = len(raw)
        torn = raw and not raw.endswith(b"\n")
        lines = raw.split(b"\n")
        if lines and lines[-1] == b"":
            lines.pop()
        if torn:
            keep -= len(lines.pop())
        events: list[dict] = []
        for i, line in enumerate(lines):
            try:
                events.append(json.loads(line.decode("utf-8")))
            except (ValueError, UnicodeDecodeError):
                if i == len(lines) - 1:
                    # a flush cut mid-line that still got its newline
                    keep -= len(line) + 1
                    torn = True
                    break
                raise CorruptLog(f"session {sid!r}: event line {i + 1} is not valid JSON")
        if torn and repair:
            with open(path, "r+b") as f:
                f.truncate(keep)
                f.flush()
                os.fsync(f.fileno())
        return events

    def load(self, sid: str) -> SessionRecord:
        """Recover a session from disk. The log is replayed to rebuild the
        model, and a stale snapshot cache is rewritten."""
        meta_path = self.meta_path(sid)
        if not meta_path.exists():
            raise SessionNotFound(f"no session {sid!r}")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        events = self.read_events(sid)
        model = replay_events(events)
        text = encode_model(model)
        snapshot = self.model_path(sid)
        if not snapshot.exists() or snapshot.read_text(encoding="utf-8") != text:
            _write_atomic(snapshot, text)
        finished = meta.get("finishedAtMs")
        if finished is None and any(ev.get("action") == "finish" for ev in events):
            # crash landed between the finish event and the meta update
            finished = meta["createdAtMs"] + events[-1]["t"]
            meta["finishedAtMs"] = finished
            _write_atomic(meta_path, json.dumps(meta, indent=2) + "\n")
        return SessionRecord(
            id=meta["id"],
            prompt=meta["prompt"],
            cohort=meta["cohort"],
            created_at_ms=meta["createdAtMs"],
            finished_at_ms=finished,
            model=model,
            events=events,
        )
