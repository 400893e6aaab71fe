"""Backend protocol: every neural model sits behind one call interface.

A backend handles named operations (complete, score, vqa, detect, depth,
similarity) with JSON-shaped request/response dicts that mirror the HTTP
wire protocol one-to-one, so mocks, caches, and remote servers are
interchangeable. The typed helpers in this module build requests, validate
responses, and record trace events.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from typing import Any, Callable, Protocol, Sequence, runtime_checkable

from ..types import DecodingParams, Trace, TraceKind

OP_COMPLETE = "complete"
OP_SCORE = "score"
OP_VQA = "vqa"
OP_DETECT = "detect"
OP_DEPTH = "depth"
OP_SIMILARITY = "similarity"

ALL_OPS = frozenset(
    {OP_COMPLETE, OP_SCORE, OP_VQA, OP_DETECT, OP_DEPTH, OP_SIMILARITY}
)

Box = tuple[float, float, float, float]


class BackendError(Exception):
    """Base class for backend failures."""


class TransportError(BackendError):
    """Network or server failure talking to a remote backend.

    Unlike other backend errors this is infrastructure trouble, and it
    propagates out of engines instead of being folded into outcomes.
    """


class FixtureError(BackendError):
    """A mock had no scripted behavior for the request it received."""


class UnsupportedOperationError(BackendError):
    """The operation is not in the backend's advertised set."""


class ProtocolError(BackendError):
    """A response did not match the documented shape."""


@dataclass(frozen=True, slots=True)
class TokenScore:
    """One scored token: its text, natural-log probability, byte length."""

    text: str
    logprob: float
    byte_length: int


def token(text: str, logprob: float) -> TokenScore:
    """TokenScore whose byte_length is the text's UTF-8 length."""
    return TokenScore(text=text, logprob=logprob, byte_length=len(text.encode("utf-8")))


@dataclass(frozen=True)
class Completion:
    """Generated text with per-token scores; token texts concatenate to text."""

    text: str
    tokens: tuple[TokenScore, ...]
    finish_reason: str = "stop"

    def __post_init__(self) -> None:
        joined = "".join(t.text for t in self.tokens)
        if joined != self.text:
            raise ValueError(
                f"token texts concatenate to {joined!r}, not completion text {self.text!r}"
            )
        if self.finish_reason not in ("stop", "length"):
            raise ValueError(f"finish_reason must be stop or length, got {self.finish_reason!r}")


def canonical_json(obj: Any) -> str:
    """Deterministic JSON rendering used for digests and cache payloads."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def digest(obj: Any) -> str:
    return hashlib.sha256(canonical_json(obj).encode("utf-8")).hexdigest()


@runtime_checkable
class Backend(Protocol):
    """What every backend implementation provides."""

    backend_id: str
    ops: frozenset[str]

    def call(self, op: str, request: dict) -> dict: ...


class BaseBackend:
    """Shared plumbing: op gating and thread-safe invocation counting."""

    backend_id: str
    ops: frozenset[str]

    def __init__(self, backend_id: str, ops: frozenset[str]):
        self.backend_id = backend_id
        self.ops = ops
        self._lock = threading.Lock()
        self._call_counts: dict[str, int] = {}

    def call(self, op: str, request: dict) -> dict:
        if op not in self.ops:
            raise UnsupportedOperationError(
                f"backend {self.backend_id!r} does not support op {op!r} "
                f"(supported: {sorted(self.ops)})"
            )
        with self._lock:
            self._call_counts[op] = self._call_counts.get(op, 0) + 1
        return self._serve(op, request)

    def _serve(self, op: str, request: dict) -> dict:
        raise NotImplementedError

    @property
    def call_counts(self) -> dict[str, int]:
        with self._lock:
            return dict(self._call_counts)

    @property
    def total_calls(self) -> int:
        with self._lock:
            return sum(self._call_counts.values())

    def reset_counts(self) -> None:
        with self._lock:
            self._call_counts.clear()


def _trace_call(trace: Trace | None, backend: Backend, op: str, request: dict, response: dict) -> None:
    if trace is None:
        return
    trace.record(
        TraceKind.BACKEND_CALL,
        backend=backend.backend_id,
        op=op,
        request_digest=digest(request),
        response_digest=digest(response),
    )


def _parse_tokens(raw: Any, context: str) -> tuple[TokenScore, ...]:
    if not isinstance(raw, list):
        raise ProtocolError(f"{context}: tokens must be a list, got {type(raw).__name__}")
    out = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ProtocolError(f"{context}: token {i} must be an object")
        try:
            text = item["t"]
            logprob = item["logprob"]
            byte_length = item["bytes"]
        except KeyError as exc:
            raise ProtocolError(f"{context}: token {i} missing key {exc}") from exc
        if not isinstance(text, str):
            raise ProtocolError(f"{context}: token {i} field 't' must be a string")
        if not isinstance(logprob, (int, float)) or isinstance(logprob, bool):
            raise ProtocolError(f"{context}: token {i} field 'logprob' must be a number")
        if not isinstance(byte_length, int) or isinstance(byte_length, bool):
            raise ProtocolError(f"{context}: token {i} field 'bytes' must be an integer")
        out.append(TokenScore(text=text, logprob=float(logprob), byte_length=byte_length))
    return tuple(out)


def tokens_to_wire(tokens: Sequence[TokenScore]) -> list[dict]:
    return [{"t": t.text, "logprob": t.logprob, "bytes": t.byte_length} for t in tokens]


def complete(
    backend: Backend,
    prompt: str,
    params: DecodingParams | None = None,
    *,
    image_ref: str | None = None,
    trace: Trace | None = None,
) -> Completion:
    """Generate a continuation of prompt under the given decoding params."""
    if not prompt:
        raise ValueError("prompt must be non-empty")
    params = params or DecodingParams()
    request: dict[str, Any] = {
        "prompt": prompt,
        "max_tokens": params.max_tokens,
        "beam_width": params.beam_width,
        "length_penalty": params.length_penalty,
    }
    if params.stop:
        request["stop"] = list(params.stop)
    if image_ref is not None:
        request["image_ref"] = image_ref
    response = backend.call(OP_COMPLETE, request)
    _trace_call(trace, backend, OP_COMPLETE, request, response)
    try:
        text = response["text"]
        finish_reason = response.get("finish_reason", "stop")
        tokens_raw = response.get("tokens")
    except TypeError as exc:
        raise ProtocolError(f"complete: malformed response {response!r}") from exc
    if not isinstance(text, str):
        raise ProtocolError("complete: response field 'text' must be a string")
    if tokens_raw is None:
        parsed = (token(text, 0.0),) if text else ()
    else:
        parsed = _parse_tokens(tokens_raw, "complete")
    try:
        return Completion(text=text, tokens=parsed, finish_reason=finish_reason)
    except ValueError as exc:
        raise ProtocolError(f"complete: {exc}") from exc


def score_continuations(
    backend: Backend,
    prompt: str,
    continuations: Sequence[str],
    *,
    image_ref: str | None = None,
    trace: Trace | None = None,
) -> list[tuple[TokenScore, ...]]:
    """Per-token scores for each continuation appended to prompt.

    The empty continuation scores as an empty token sequence without
    consulting the backend's tables; how to treat its score is the
    caller's business.
    """
    if not prompt:
        raise ValueError("prompt must be non-empty")
    if len(continuations) == 0:
        raise ValueError("need at least one continuation")
    request: dict[str, Any] = {"prompt": prompt, "continuations": list(continuations)}
    if image_ref is not None:
        request["image_ref"] = image_ref
    response = backend.call(OP_SCORE, request)
    _trace_call(trace, backend, OP_SCORE, request, response)
    raw_scores = response.get("scores") if isinstance(response, dict) else None
    if not isinstance(raw_scores, list) or len(raw_scores) != len(continuations):
        raise ProtocolError(
            f"score: expected {len(continuations)} token lists, got {raw_scores!r}"
        )
    out: list[tuple[TokenScore, ...]] = []
    for continuation, raw in zip(continuations, raw_scores):
        parsed = _parse_tokens(raw, "score")
        if continuation == "" and parsed:
            raise ProtocolError("score: empty continuation must score as an empty token list")
        out.append(parsed)
    return out


def vqa(
    backend: Backend,
    image_ref: str,
    question: str,
    *,
    box: Box | None = None,
    trace: Trace | None = None,
) -> str:
    """Free-form answer to a question about an image or a region of it."""
    if not image_ref:
        raise ValueError("image_ref must be non-empty")
    request: dict[str, Any] = {"image_ref": image_ref, "question": question}
    if box is not None:
        request["box"] = list(box)
    response = backend.call(OP_VQA, request)
    _trace_call(trace, backend, OP_VQA, request, response)
    answer = response.get("answer") if isinstance(response, dict) else None
    if not isinstance(answer, str):
        raise ProtocolError(f"vqa: response field 'answer' must be a string, got {response!r}")
    return answer


def _parse_box(raw: Any, context: str) -> Box:
    if (
        not isinstance(raw, (list, tuple))
        or len(raw) != 4
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw)
    ):
        raise ProtocolError(f"{context}: box must be four numbers, got {raw!r}")
    left, lower, right, upper = (float(v) for v in raw)
    return (left, lower, right, upper)


def detect(
    backend: Backend,
    image_ref: str,
    category: str,
    *,
    trace: Trace | None = None,
) -> list[Box]:
    """Boxes of detected instances of a category, deterministic order."""
    if not image_ref:
        raise ValueError("image_ref must be non-empty")
    if not category:
        raise ValueError("category must be non-empty")
    request = {"image_ref": image_ref, "category": category}
    response = backend.call(OP_DETECT, request)
    _trace_call(trace, backend, OP_DETECT, request, response)
    raw_boxes = response.get("boxes") if isinstance(response, dict) else None
    if not isinstance(raw_boxes, list):
        raise ProtocolError(f"detect: response field 'boxes' must be a list, got {response!r}")
    return [_parse_box(b, "detect") for b in raw_boxes]


def depth_at(
    backend: Backend,
    image_ref: str,
    box: Box | None,
    *,
    trace: Trace | None = None,
) -> float:
    """Representative depth of a region (whole image when box is None)."""
    if not image_ref:
        raise ValueError("image_ref must be non-empty")
    request: dict[str, Any] = {"image_ref": image_ref}
    if box is not None:
        request["box"] = list(box)
    response = backend.call(OP_DEPTH, request)
    _trace_call(trace, backend, OP_DEPTH, request, response)
    value = response.get("depth") if isinstance(response, dict) else None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ProtocolError(f"depth: response field 'depth' must be a number, got {response!r}")
    return float(value)


def similarity(
    backend: Backend,
    image_ref: str,
    box: Box | None,
    texts: Sequence[str],
    *,
    trace: Trace | None = None,
) -> list[float]:
    """Image-text similarity of a region against each text, same order."""
    if not image_ref:
        raise ValueError("image_ref must be non-empty")
    if len(texts) == 0:
        raise ValueError("need at least one text")
    request: dict[str, Any] = {"image_ref": image_ref, "texts": list(texts)}
    if box is not None:
        request["box"] = list(box)
    response = backend.call(OP_SIMILARITY, request)
    _trace_call(trace, backend, OP_SIMILARITY, request, response)
    raw = response.get("scores") if isinstance(response, dict) else None
    if (
        not isinstance(raw, list)
        or len(raw) != len(texts)
        or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in raw)
    ):
        raise ProtocolError(
            f"similarity: expected {len(texts)} numeric scores, got {response!r}"
        )
    return [float(v) for v in raw]


ExtentFn = Callable[[str], tuple[float, float] | None]


def image_extent(backend: Backend, image_ref: str) -> tuple[float, float] | None:
    """Side channel: mocks that know image dimensions expose extent_of."""
    probe = getattr(backend, "extent_of", None)
    if probe is None:
        return None
    return probe(image_ref)


@dataclass
class BackendSuite:
    """The full set of model roles a run needs, one backend per role.

    Roles may share a backend object (the scene oracle typically serves
    detect, depth, and similarity at once).
    """

    code_lm: Backend
    instruct_lm: Backend
    vlm: Backend
    detector: Backend
    depth: Backend
    similarity: Backend

    def unique_backends(self) -> list[Backend]:
        seen: dict[int, Backend] = {}
        for backend in (
            self.code_lm,
            self.instruct_lm,
            self.vlm,
            self.detector,
            self.depth,
            self.similarity,
        ):
            seen.setdefault(id(backend), backend)
        return list(seen.values())

    def total_calls(self) -> int:
        return sum(
            b.total_calls for b in self.unique_backends() if isinstance(b, BaseBackend)
        )

    def call_counts(self) -> dict[str, dict[str, int]]:
        return {
            b.backend_id: b.call_counts
            for b in self.unique_backends()
            if isinstance(b, BaseBackend)
        }

    def reset_counts(self) -> None:
        for backend in self.unique_backends():
            if isinstance(backend, BaseBackend):
                backend.reset_counts()

    def image_extent(self, image_ref: str) -> tuple[float, float] | None:
        for backend in self.unique_backends():
            extent = image_extent(backend, image_ref)
            if extent is not None:
                return extent
        return None
