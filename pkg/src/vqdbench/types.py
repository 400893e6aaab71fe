"""Shared datatypes for benchmark instances, run configuration, and traces."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Iterable


class EvaluationSetting(str, Enum):
    """How predictions are elicited and scored."""

    DIRECT_ANSWER = "direct"
    MULTIPLE_CHOICE = "mc"


class Method(str, Enum):
    """The three answering strategies under comparison."""

    END_TO_END = "e2e"
    MODULAR = "viper"
    SUCCESSIVE = "successive"


class DatasetError(ValueError):
    """Raised for malformed dataset files; carries a 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


MAX_ANSWER_ANNOTATIONS = 10


@dataclass(frozen=True, slots=True)
class BenchmarkInstance:
    """One question about one image, with ground truth."""

    id: str
    image_ref: str
    question: str
    answers: tuple[str, ...]
    choices: tuple[str, ...] | None = None
    question_type: str | None = None
    split: str = ""

    def violations(self, setting: EvaluationSetting | None = None) -> list[str]:
        """Invariant violations for this record, empty when well formed."""
        problems = []
        if not self.id:
            problems.append("id must be non-empty")
        if not self.image_ref:
            problems.append("image_ref must be non-empty")
        if not self.question:
            problems.append("question must be non-empty")
        if len(self.answers) > MAX_ANSWER_ANNOTATIONS:
            problems.append(
                f"at most {MAX_ANSWER_ANNOTATIONS} answer annotations allowed, got {len(self.answers)}"
            )
        if any(not isinstance(a, str) for a in self.answers):
            problems.append("answers must be strings")
        if setting is EvaluationSetting.DIRECT_ANSWER and not self.answers:
            problems.append("direct-answer evaluation requires at least one answer")
        if self.choices is not None:
            if len(self.choices) < 2:
                problems.append("choices must hold at least 2 options")
            if len(set(self.choices)) != len(self.choices):
                problems.append("choices must be pairwise distinct")
            if any(not c for c in self.choices):
                problems.append("choices must be non-empty strings")
        if setting is EvaluationSetting.MULTIPLE_CHOICE and self.choices is None:
            problems.append("multiple-choice evaluation requires choices")
        return problems

    def to_record(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "id": self.id,
            "image_ref": self.image_ref,
            "question": self.question,
            "answers": list(self.answers),
        }
        if self.choices is not None:
            record["choices"] = list(self.choices)
        if self.question_type is not None:
            record["question_type"] = self.question_type
        if self.split:
            record["split"] = self.split
        return record


class TraceKind(str, Enum):
    BACKEND_CALL = "backend_call"
    PARSER_EVENT = "parser_event"
    INTERPRETER_STEP = "interpreter_step"
    ENGINE_DECISION = "engine_decision"


@dataclass(frozen=True, slots=True)
class TraceEvent:
    seq: int
    kind: TraceKind
    payload: dict[str, Any]

    def to_record(self) -> dict[str, Any]:
        return {"seq": self.seq, "kind": self.kind.value, "payload": self.payload}


class Trace:
    """Ordered event log for a single prediction; seq is strictly increasing."""

    def __init__(self) -> None:
        self.events: list[TraceEvent] = []
        self._counter = itertools.count()

    def record(self, kind: TraceKind, **payload: Any) -> TraceEvent:
        payload.setdefault("t", time.time())
        event = TraceEvent(seq=next(self._counter), kind=kind, payload=payload)
        self.events.append(event)
        return event

    def of_kind(self, kind: TraceKind) -> list[TraceEvent]:
        return [e for e in self.events if e.kind is kind]


@dataclass(slots=True)
class Prediction:
    """A produced answer plus enough context to audit how it was made."""

    instance_id: str
    answer_text: str
    method: Method
    variant: str
    trace: list[TraceEvent] = field(default_factory=list)
    outcome_class: str | None = None
    # Engine-specific artifacts ride along for reporting; not part of the
    # minimal contract above.
    outcome: Any = None

    def to_record(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "instance_id": self.instance_id,
            "answer_text": self.answer_text,
            "method": self.method.value,
            "variant": self.variant,
            "trace": [e.to_record() for e in self.trace],
        }
        if self.outcome_class is not None:
            record["outcome_class"] = self.outcome_class
        return record


@dataclass(frozen=True, slots=True)
class DecodingParams:
    """Decoding controls forwarded to text generation backends.

    Beam width 5 and length penalty -1 are the end-to-end VLM defaults;
    backends that cannot honor beams treat them as advisory.
    """

    beam_width: int = 5
    length_penalty: float = -1.0
    max_tokens: int = 256
    stop: tuple[str, ...] = ()

    def with_stop(self, *stop: str) -> "DecodingParams":
        return replace(self, stop=tuple(stop))


@dataclass(slots=True)
class RunConfig:
    """Everything a benchmark run needs beyond the dataset itself."""

    method: Method
    dataset: Path
    backends: str = "mock:fixtures/world.json"
    setting: EvaluationSetting = EvaluationSetting.DIRECT_ANSWER
    variant: str = "task-agnostic"
    seed: int = 0
    sample_size: int | None = None
    cache_dir: Path | None = None
    jobs: int = 1
    out: Path | None = None
    decoding: DecodingParams = field(default_factory=DecodingParams)
    max_steps: int = 8
    step_budget: int = 100_000
    property_threshold: float = 0.5
    judge: bool = False
    # Prompt material overrides; None selects the packaged defaults.
    code_demos: tuple[tuple[str, str], ...] | None = None
    successive_instruction: str | None = None
    successive_demos: tuple[str, ...] | None = None

    def to_record(self) -> dict[str, Any]:
        return {
            "method": self.method.value,
            "dataset": str(self.dataset),
            "backends": self.backends,
            "setting": self.setting.value,
            "variant": self.variant,
            "seed": self.seed,
            "sample_size": self.sample_size,
            "cache_dir": str(self.cache_dir) if self.cache_dir else None,
            "jobs": self.jobs,
            "decoding": {
                "beam_width": self.decoding.beam_width,
                "length_penalty": self.decoding.length_penalty,
                "max_tokens": self.decoding.max_tokens,
                "stop": list(self.decoding.stop),
            },
            "max_steps": self.max_steps,
            "step_budget": self.step_budget,
            "property_threshold": self.property_threshold,
            "judge": self.judge,
        }


def ordered_unique(items: Iterable[str]) -> list[str]:
    """Deduplicate preserving first-occurrence order."""
    seen: set[str] = set()
    out: list[str] = []
    for item in items:
        if item not in seen:
            seen.add(item)
            out.append(item)
    return out
