"""Execution outcomes and the failure-label taxonomy."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

# Runtime failure labels, in reporting order. IndentationError appears here
# because indentation faults get their own row in the fine-grained view even
# though they are detected while parsing; Other absorbs everything that has
# no dedicated label (budget exhaustion, backend faults, size guards).
ERROR_LABELS = (
    "NameError",
    "AttributeError",
    "IndexError",
    "TypeError",
    "IndentationError",
    "ValueError",
    "KeyError",
    "ZeroDivisionError",
    "Other",
)

PARSE_LABELS = ("SyntaxError", "IndentationError")


class OutcomeStatus(str, Enum):
    OK = "ok"
    PARSE_ERROR = "parse_error"
    RUNTIME_ERROR = "runtime_error"


@dataclass(frozen=True, slots=True)
class ExecutionOutcome:
    """What happened when one generated program ran.

    error_label is present exactly when status is RUNTIME_ERROR, and
    parse_label exactly when status is PARSE_ERROR; result carries the
    rendered answer only for OK runs.
    """

    status: OutcomeStatus
    result: str | None = None
    error_label: str | None = None
    parse_label: str | None = None
    detail: str | None = None
    steps_used: int = 0

    def __post_init__(self) -> None:
        if (self.status is OutcomeStatus.RUNTIME_ERROR) != (self.error_label is not None):
            raise ValueError("error_label must be present exactly for runtime errors")
        if (self.status is OutcomeStatus.PARSE_ERROR) != (self.parse_label is not None):
            raise ValueError("parse_label must be present exactly for parse errors")
        if self.status is not OutcomeStatus.OK and self.result is not None:
            raise ValueError("failed executions carry no result")
        if self.error_label is not None and self.error_label not in ERROR_LABELS:
            raise ValueError(f"unknown error label {self.error_label!r}")
        if self.parse_label is not None and self.parse_label not in PARSE_LABELS:
            raise ValueError(f"unknown parse label {self.parse_label!r}")

    def to_record(self) -> dict[str, Any]:
        return {
            "status": self.status.value,
            "result": self.result,
            "error_label": self.error_label,
            "parse_label": self.parse_label,
            "detail": self.detail,
            "steps_used": self.steps_used,
        }

    @classmethod
    def from_record(cls, record: dict) -> "ExecutionOutcome":
        return cls(
            status=OutcomeStatus(record["status"]),
            result=record.get("result"),
            error_label=record.get("error_label"),
            parse_label=record.get("parse_label"),
            detail=record.get("detail"),
            steps_used=record.get("steps_used", 0),
        )
