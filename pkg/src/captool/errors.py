"""Domain error hierarchy shared by the engine, registry, governance and I/O layers.

Every error carries a stable ``code`` (snake_case, used verbatim in API error
bodies and CLI ``--json`` output) and an optional ``details`` mapping.
"""

from __future__ import annotations

from typing import Any


class CapError(Exception):
    """Base class for all domain errors."""

    code = "cap_error"

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "details": self.details}


# -- scoring ---------------------------------------------------------------

class EmptyAnswerSet(CapError):
    code = "empty_answer_set"


class OutOfRangeScore(CapError):
    code = "out_of_range_score"

    def __init__(self, value: float):
        super().__init__(f"score {value!r} outside the canonical range [1.0, 4.0]", value=value)


class InvalidAnswerForScale(CapError):
    code = "invalid_answer_for_scale"


class UnknownQuestion(CapError):
    code = "unknown_question"


class AssessmentNotFinalized(CapError):
    code = "assessment_not_finalized"


class IncompleteParticipantAnswers(CapError):
    code = "incomplete_participant_answers"

    def __init__(self, missing: list[str]):
        super().__init__(
            "no participant answer recorded for: " + ", ".join(missing),
            missing=missing,
        )
        self.missing = missing


# -- registry --------------------------------------------------------------

class MalformedRecord(CapError):
    code = "malformed_record"

    def __init__(self, field: str, message: str | None = None):
        super().__init__(message or f"invalid value for field {field!r}", field=field)
        self.field = field


class UnknownContribution(CapError):
    code = "unknown_contribution"


class UnknownFeature(CapError):
    code = "unknown_feature"


class UnknownPatch(CapError):
    code = "unknown_patch"


# -- governance ------------------------------------------------------------

class IllegalTransition(CapError):
    code = "illegal_transition"

    def __init__(self, state: str, event: str):
        super().__init__(f"event {event!r} is not legal from state {state!r}", state=state, event=event)


class NoPriorDecision(CapError):
    code = "no_prior_decision"


class UnknownRequest(CapError):
    code = "unknown_request"


# -- persistence -----------------------------------------------------------

class IoFailure(CapError):
    code = "io_failure"


class ParseError(CapError):
    code = "parse_error"

    def __init__(self, message: str, location: str = ""):
        super().__init__(message, location=location)
        self.location = location


class UnsupportedVersion(CapError):
    code = "unsupported_version"


class ValidationError(CapError):
    code = "validation_error"

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems) or "validation failed", problems=problems)
        self.problems = problems


class HeaderMismatch(CapError):
    code = "header_mismatch"

    def __init__(self, expected: list[str], found: list[str]):
        super().__init__(
            f"CSV header {found} does not cover required columns {expected}",
            expected=expected,
            found=found,
        )


class RowError(CapError):
    code = "row_error"

    def __init__(self, line: int, field: str, message: str):
        super().__init__(f"line {line}, field {field!r}: {message}", line=line, field=field)
        self.line = line
        self.field = field


# -- sessions / API --------------------------------------------------------

class UnknownSession(CapError):
    code = "unknown_session"


class UnknownArtifact(CapError):
    code = "unknown_artifact"


class DuplicateSession(CapError):
    code = "duplicate_session"


class StaleVersion(CapError):
    code = "stale_version"

    def __init__(self, expected: int, got: int):
        super().__init__(f"session version is {expected}, request carried {got}", expected=expected, got=got)
