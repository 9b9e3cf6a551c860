"""Wire protocol: action names, payload dispatch, and event-log replay.

Live requests and log replay run through the same apply_wire_action so a
replayed log reconstructs exactly the state the live service committed.
Automation events embed their prompt exchanges, which makes a session log
self-contained: replay serves those completions back to the orchestrator
instead of calling any backend.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional

from ..llm import Backend, CompletionRequest, CompletionResponse, ReplayMiss, request_digest
from ..model import (
    ComponentPath,
    FieldType,
    InvalidType,
    Multiplicity,
    ObjectModel,
    Phase,
)
from ..synthesis import ActionDelta, ButtonAction, Orchestrator, PreconditionFailed
from .errors import CohortForbidden, CorruptLog, ProtocolError


class Cohort(str, Enum):
    FULL = "full"
    CONTROL_NO_SYNTHESIS = "controlNoSynthesis"


class Actor(str, Enum):
    USER = "user"
    AUTOMATION = "automation"


BUTTON_ACTIONS = {a.value: a for a in ButtonAction}
EDIT_ACTIONS = (
    "addObject",
    "renameObject",
    "deleteComponent",
    "restoreComponent",
    "addField",
    "toggleMultiplicity",
    "toggleTwoWay",
    "addMethod",
    "editField",
)
WIRE_ACTIONS = tuple(BUTTON_ACTIONS) + EDIT_ACTIONS


def _need(payload: dict, key: str, kind=str):
    try:
        value = payload[key]
    except (KeyError, TypeError):
        raise ProtocolError("missing_field", f"payload needs {key!r}") from None
    if not isinstance(value, kind):
        raise ProtocolError("bad_field", f"payload field {key!r} must be {kind.__name__}")
    return value


def _parse_type(doc) -> FieldType:
    if not isinstance(doc, dict):
        raise ProtocolError("bad_field", "type must be an object")
    kind = _need(doc, "kind")
    try:
        if kind == "primitive":
            return FieldType.prim(_need(doc, "primitive"))
        if kind == "object":
            return FieldType.ref(_need(doc, "target"))
    except InvalidType as e:
        raise ProtocolError("invalid_type", str(e)) from None
    raise ProtocolError("invalid_type", f"unknown type kind {kind!r}")


def _parse_multiplicity(raw) -> Multiplicity:
    try:
        return Multiplicity(raw)
    except ValueError:
        raise ProtocolError("bad_field", f"unknown multiplicity {raw!r}") from None


def _component_path(payload: dict) -> ComponentPath:
    kind = _need(payload, "kind")
    name = payload.get("name")
    if name is not None and not isinstance(name, str):
        raise ProtocolError("bad_field", "payload field 'name' must be str")
    return ComponentPath(kind, _need(payload, "object"), name)


def _apply_edit(model: ObjectModel, action: str, payload: dict) -> None:
    if action == "addObject":
        model.add_object(_need(payload, "name"))
    elif action == "renameObject":
        model.rename_object(_need(payload, "name"), _need(payload, "newName"))
    elif action == "deleteComponent":
        model.soft_delete(_component_path(payload))
    elif action == "restoreComponent":
        model.restore(_component_path(payload))
    elif action == "addField":
        model.add_field(
            _need(payload, "object"),
            _need(payload, "name"),
            _parse_type(payload.get("type")),
            multiplicity=_parse_multiplicity(payload.get("multiplicity", "one")),
        )
    elif action == "toggleMultiplicity":
        model.toggle_multiplicity(_need(payload, "object"), _need(payload, "field"))
    elif action == "toggleTwoWay":
        model.toggle_two_way(_need(payload, "object"), _need(payload, "field"))
    elif action == "addMethod":
        model.add_method(_need(payload, "object"), _need(payload, "name"))
    else:  # editField
        new_type = _parse_type(payload["type"]) if "type" in payload else None
        new_mult = (
            _parse_multiplicity(payload["multiplicity"]) if "multiplicity" in payload else None
        )
        new_name = payload.get("newName")
        if new_name is not None and not isinstance(new_name, str):
            raise ProtocolError("bad_field", "payload field 'newName' must be str")
        model.edit_field(
            _need(payload, "object"),
            _need(payload, "field"),
            new_name=new_name,
            ftype=new_type,
            multiplicity=new_mult,
        )


def apply_wire_action(
    model: ObjectModel,
    cohort: Cohort,
    action: str,
    payload: dict,
    backend: Optional[Backend] = None,
) -> tuple[Optional[ActionDelta], Actor]:
    """Apply one wire action to the model; returns the synthesis delta (None
    for plain edits) and who performed it."""
    if action in BUTTON_ACTIONS:
        button = BUTTON_ACTIONS[action]
        if cohort is Cohort.CONTROL_NO_SYNTHESIS:
            if button is not ButtonAction.BEGIN:
                raise CohortForbidden(f"{action} is a synthesis action; this session has none")
            # the control arm starts straight in the full editor, no drafting
            if model.phase is not Phase.DRAFTING_NAMES:
                raise PreconditionFailed("begin is only valid once")
            model.phase = Phase.FULL_MODEL
            return None, Actor.USER
        if backend is None:
            raise ProtocolError("no_backend", "synthesis actions need a completion backend")
        delta = Orchestrator(backend).run(model, button, payload.get("object", ""))
        return delta, Actor.AUTOMATION
    if action in EDIT_ACTIONS:
        _apply_edit(model, action, payload)
        return None, Actor.USER
    raise ProtocolError("unknown_action", f"unknown action {action!r}")


class EmbeddedBackend:
    """Serves the completions a log event recorded, keyed by rendered prompt."""

    provider = "embedded"

    def __init__(self, exchanges: list[dict]):
        self.by_prompt = {ex["rendered"]: ex["completion"] for ex in exchanges}

    def complete(self, req: CompletionRequest) -> CompletionResponse:
        if req.prompt not in self.by_prompt:
            raise ReplayMiss(request_digest(req), "prompt not embedded in the event log")
        return CompletionResponse(
            text=self.by_prompt[req.prompt], latency=0.0, provider=self.provider
        )


def replay_events(events: list[dict], verify_counts: bool = True) -> ObjectModel:
    """Rebuild a session's model from its event log alone."""
    if not events or events[0].get("action") != "create":
        raise CorruptLog("event log must start with a create event")
    payload = events[0].get("payload") or {}
    model = ObjectModel(prompt=payload.get("prompt", ""))
    try:
        cohort = Cohort(payload.get("cohort", Cohort.FULL.value))
    except ValueError:
        raise CorruptLog(f"unknown cohort {payload.get('cohort')!r}") from None
    for i, ev in enumerate(events[1:], start=1):
        action = ev.get("action")
        if action == "finish":
            model.phase = Phase.FINISHED
        else:
            backend = EmbeddedBackend(ev.get("exchanges") or [])
            apply_wire_action(model, cohort, action, ev.get("payload") or {}, backend)
        if verify_counts:
            expected = ev.get("componentCountAfter")
            got = model.component_count()
            if expected is not None and expected != got:
                raise CorruptLog(
                    f"event {i} ({action}) claims {expected} components, replay gives {got}"
                )
    return model


def replay_component_counts(events: list[dict]) -> list[int]:
    """Recompute the component count after each event by replaying the log,
    independently of the recorded componentCountAfter values."""
    if not events or events[0].get("action") != "create":
        raise CorruptLog("event log must start with a create event")
    payload = events[0].get("payload") or {}
    model = ObjectModel(prompt=payload.get("prompt", ""))
    cohort = Cohort(payload.get("cohort", Cohort.FULL.value))
    counts = [model.component_count()]
    for ev in events[1:]:
        action = ev.get("action")
        if action == "finish":
            model.phase = Phase.FINISHED
        else:
            apply_wire_action(
                model, cohort, action, ev.get("payload") or {}, EmbeddedBackend(ev.get("exchanges") or [])
            )
        counts.append(model.component_count())
    return counts
