"""Service-level errors with wire codes and HTTP status hints."""


class ServiceError(Exception):
    code = "service_error"
    status = 400


class SessionNotFound(ServiceError):
    code = "session_not_found"
    status = 404


class SessionFinished(ServiceError):
    code = "finished"
    status = 409


class Busy(ServiceError):
    code = "busy"
    status = 409


class CohortForbidden(ServiceError):
    code = "cohort_forbidden"
    status = 403


class EmptyPrompt(ServiceError):
    code = "empty_prompt"
    status = 400


class ProtocolError(ServiceError):
    """Malformed request body: unknown action, missing or mistyped payload."""

    status = 400

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class CorruptLog(ServiceError):
    code = "corrupt_log"
    status = 500
