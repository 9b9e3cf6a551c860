"""Session lifecycle: create, apply actions, finish, read state.

Writes to one session are serialized by a non-blocking per-session lock
(contention answers Busy rather than queueing); different sessions proceed in
parallel. Actions run against a copy of the model and commit to disk before
the in-memory state is swapped, so readers always see the last committed
state and a failed action changes nothing.
"""

from __future__ import annotations

import copy
import threading
import time
import uuid
from typing import Callable, Optional

from ..llm import Backend
from ..model import ObjectModel, Phase, encode_model
from ..synthesis import ActionDelta
from .actions import Actor, Cohort, apply_wire_action
from .errors import Busy, EmptyPrompt, ProtocolError, SessionFinished, SessionNotFound
from .store import SessionRecord, SessionStore


class _Live:
    def __init__(self, record: SessionRecord):
        self.record = record
        self.lock = threading.Lock()
        self.last_diagnostics: list[dict] = []


def _now_ms() -> int:
    return time.time_ns() // 1_000_000


class SessionService:
    def __init__(
        self,
        data_dir,
        backend: Optional[Backend] = None,
        clock: Callable[[], int] = _now_ms,
    ):
        self.store = SessionStore(data_dir)
        self.backend = backend
        self.clock = clock
        self._sessions: dict[str, _Live] = {}
        self._registry_lock = threading.Lock()

    # -- lookup -----------------------------------------------------------------

    def _live(self, sid: str) -> _Live:
        with self._registry_lock:
            live = self._sessions.get(sid)
            if live is None:
                live = _Live(self.store.load(sid))  # raises SessionNotFound
                self._sessions[sid] = live
            return live

    # -- operations ---------------------------------------------------------------

    def create_session(self, prompt: str, cohort: str | Cohort = Cohort.FULL) -> dict:
        if not isinstance(prompt, str) or not prompt.strip():
            raise EmptyPrompt("a session needs a non-empty prompt")
        try:
            cohort = Cohort(cohort)
        except ValueError:
            raise ProtocolError("bad_field", f"unknown cohort {cohort!r}") from None
        sid = uuid.uuid4().hex
        created = self.clock()
        record = SessionRecord(
            id=sid,
            prompt=prompt,
            cohort=cohort.value,
            created_at_ms=created,
            finished_at_ms=None,
            model=ObjectModel(prompt=prompt),
            events=[
                {
                    "t": 0,
                    "actor": Actor.USER.value,
                    "action": "create",
                    "payload": {"prompt": prompt, "cohort": cohort.value},
                    "componentCountAfter": 0,
                }
            ],
        )
        self.store.create(record)
        with self._registry_lock:
            self._sessions[sid] = _Live(record)
        return self.get_state(sid)

    def apply_action(self, sid: str, action: str, payload: Optional[dict] = None) -> dict:
        if not isinstance(action, str):
            raise ProtocolError("bad_field", "action must be a string")
        if payload is None:
            payload = {}
        if not isinstance(payload, dict):
            raise ProtocolError("bad_field", "payload must be an object")
        live = self._live(sid)
        if not live.lock.acquire(blocking=False):
            raise Busy(f"session {sid!r} has an action in flight")
        try:
            record = live.record
            if record.finished_at_ms is not None:
                raise SessionFinished(f"session {sid!r} is finished")
            model = copy.deepcopy(record.model)
            delta, actor = apply_wire_action(
                model, Cohort(record.cohort), action, payload, self.backend
            )
            event = {
                "t": max(self.clock() - record.created_at_ms, record.last_event_t + 1),
                "actor": actor.value,
                "action": action,
                "payload": payload,
                "componentCountAfter": model.component_count(),
            }
            if delta is not None:
                doc = delta.to_document()
                event["additions"] = doc["additions"]
                event["diagnostics"] = doc["diagnostics"]
                event["exchanges"] = doc["exchanges"]
            self.store.append(sid, event, model)
            record.model = model
            record.events.append(event)
            live.last_diagnostics = event.get("diagnostics", [])
            return self._view(live, delta)
        finally:
            live.lock.release()

    def finish_session(self, sid: str) -> str:
        """Returns the exported model document text; idempotent."""
        live = self._live(sid)
        if not live.lock.acquire(blocking=False):
            raise Busy(f"session {sid!r} has an action in flight")
        try:
            record = live.record
            if record.finished_at_ms is not None:
                return encode_model(record.model)
            model = copy.deepcopy(record.model)
            model.phase = Phase.FINISHED
            finished = self.clock()
            event = {
                "t": max(finished - record.created_at_ms, record.last_event_t + 1),
                "actor": Actor.USER.value,
                "action": "finish",
                "payload": {},
                "componentCountAfter": model.component_count(),
            }
            self.store.append(sid, event, model, finished_at_ms=finished)
            record.model = model
            record.events.append(event)
            record.finished_at_ms = finished
            return encode_model(record.model)
        finally:
            live.lock.release()

    # -- reads (lock-free snapshots) -----------------------------------------------

    def get_state(self, sid: str) -> dict:
        return self._view(self._live(sid), None)

    def export_text(self, sid: str) -> str:
        return encode_model(self._live(sid).record.model)

    def log_lines(self, sid: str) -> str:
        import json

        record = self._live(sid).record
        return "".join(json.dumps(ev, ensure_ascii=False) + "\n" for ev in record.events)

    def _view(self, live: _Live, delta: Optional[ActionDelta]) -> dict:
        record = live.record
        view = {
            "id": record.id,
            "prompt": record.prompt,
            "cohort": record.cohort,
            "phase": record.model.phase.value,
            "finished": record.finished_at_ms is not None,
            "createdAtMs": record.created_at_ms,
            "finishedAtMs": record.finished_at_ms,
            "componentCount": record.model.component_count(),
            "model": record.model.to_document(),
            "diagnostics": list(live.last_diagnostics),
        }
        if delta is not None:
            view["delta"] = delta.to_document()
        return view
