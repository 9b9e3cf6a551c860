"""Session HTTP service: durable sessions, serialized edits, action log."""

from .actions import (
    Actor,
    BUTTON_ACTIONS,
    Cohort,
    EDIT_ACTIONS,
    EmbeddedBackend,
    WIRE_ACTIONS,
    apply_wire_action,
    replay_component_counts,
    replay_events,
)
from .core import SessionService
from .errors import (
    Busy,
    CohortForbidden,
    CorruptLog,
    EmptyPrompt,
    ProtocolError,
    ServiceError,
    SessionFinished,
    SessionNotFound,
)
from .http import build_app
from .store import FAULT_ENV, FAULT_EXIT_CODE, FaultPlan, SessionRecord, SessionStore

__all__ = [
    "Actor",
    "BUTTON_ACTIONS",
    "Busy",
    "Cohort",
    "CohortForbidden",
    "CorruptLog",
    "EDIT_ACTIONS",
    "EmbeddedBackend",
    "EmptyPrompt",
    "FAULT_ENV",
    "FAULT_EXIT_CODE",
    "FaultPlan",
    "ProtocolError",
    "ServiceError",
    "SessionFinished",
    "SessionNotFound",
    "SessionRecord",
    "SessionService",
    "SessionStore",
    "WIRE_ACTIONS",
    "apply_wire_action",
    "build_app",
    "replay_component_counts",
    "replay_events",
]
