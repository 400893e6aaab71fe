"""Black-box protocol conformance checks for any backend transport.

The same checks validate in-process mocks and HTTP gateways: response
shapes, token accounting (concatenation, byte lengths, log-probability
sign), and determinism under repetition. A transport is any callable
taking (op, request) and returning the response dict.

Checks verify protocol obligations, not model quality, so they apply to
fixture mocks and real model servers alike. Fixture-backed transports
must be loaded with the probe world (see conformance_world) so every
probe request has scripted behavior.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .base import Backend

Transport = Callable[[str, dict], dict]

_LOGPROB_TOLERANCE = 1e-9

CONFORMANCE_IMAGE = "conformance-image"
COMPLETE_PROMPT = "Conformance probe: name an animal.\nAnswer:"
SCORE_PROMPT = "Conformance probe: is the sky blue? "


@dataclass(frozen=True)
class Probes:
    """Requests the transport under test must be able to serve."""

    complete_prompt: str = COMPLETE_PROMPT
    score_prompt: str = SCORE_PROMPT
    continuations: tuple[str, ...] = ("yes", "no")
    image_ref: str = CONFORMANCE_IMAGE
    vqa_question: str = "What is shown?"
    box: tuple[float, float, float, float] = (10.0, 10.0, 60.0, 60.0)
    category: str = "cat"
    texts: tuple[str, ...] = ("black", "striped")
    max_tokens: int = 16
    ops: frozenset[str] = field(
        default_factory=lambda: frozenset(
            {"complete", "score", "vqa", "detect", "depth", "similarity"}
        )
    )


def conformance_world() -> dict:
    """A mock world fixture that satisfies the default probes."""
    return {
        "scenes": [
            {
                "image_ref": CONFORMANCE_IMAGE,
                "width": 100,
                "height": 100,
                "objects": [
                    {
                        "id": 0,
                        "category": "cat",
                        "box": [10, 10, 60, 60],
                        "attributes": ["black"],
                        "depth": 2.5,
                    },
                    {
                        "id": 1,
                        "category": "dog",
                        "box": [65, 20, 95, 70],
                        "attributes": ["brown"],
                        "depth": 4.0,
                    },
                ],
                "scene_qa": {"What is shown?": "a cat and a dog"},
                "patch_qa": [
                    {"object_id": 0, "question": "What is shown?", "answer": "a black cat"}
                ],
                "caption": "a black cat sitting beside a brown dog",
            }
        ],
        "code_lm": {
            "rules": [
                {
                    "match": {"prefix": "Conformance probe:"},
                    "text": " a cat",
                    "finish_reason": "stop",
                }
            ],
            "scores": [
                {
                    "match": {"prefix": "Conformance probe:"},
                    "continuations": {"yes": -0.3, "no": -1.7},
                }
            ],
        },
        "instruct_lm": {
            "rules": [
                {
                    "match": {"prefix": "Conformance probe:"},
                    "text": " a cat",
                    "finish_reason": "stop",
                }
            ],
            "scores": [
                {
                    "match": {"prefix": "Conformance probe:"},
                    "continuations": {"yes": -0.3, "no": -1.7},
                }
            ],
        },
        "vlm_scores": [
            {
                "match": {"prefix": "Conformance probe:"},
                "continuations": {"yes": -0.3, "no": -1.7},
            }
        ],
    }


def backend_transport(backend: Backend) -> Transport:
    return backend.call


class _Checker:
    def __init__(self) -> None:
        self.failures: list[str] = []

    def require(self, check: str, condition: bool, problem: str) -> bool:
        if not condition:
            self.failures.append(f"{check}: {problem}")
        return condition


def _check_tokens(c: _Checker, check: str, tokens: Any, expect_text: str | None) -> None:
    if not c.require(check, isinstance(tokens, list), f"tokens must be a list, got {tokens!r}"):
        return
    concat = ""
    for i, item in enumerate(tokens):
        if not c.require(check, isinstance(item, dict), f"token {i} must be an object"):
            return
        keys_ok = c.require(
            check,
            {"t", "logprob", "bytes"} <= set(item),
            f"token {i} must carry t, logprob, bytes; got keys {sorted(item)}",
        )
        if not keys_ok:
            return
        c.require(check, isinstance(item["t"], str), f"token {i} 't' must be a string")
        c.require(
            check,
            isinstance(item["logprob"], (int, float)) and not isinstance(item["logprob"], bool),
            f"token {i} 'logprob' must be a number",
        )
        c.require(
            check,
            item["logprob"] <= _LOGPROB_TOLERANCE,
            f"token {i} logprob {item['logprob']} is positive; natural-log probabilities cannot be",
        )
        c.require(
            check,
            isinstance(item["bytes"], int) and not isinstance(item["bytes"], bool),
            f"token {i} 'bytes' must be an integer",
        )
        if isinstance(item["t"], str):
            c.require(
                check,
                item["bytes"] == len(item["t"].encode("utf-8")),
                f"token {i} bytes {item['bytes']} != UTF-8 length of {item['t']!r}",
            )
            concat += item["t"]
    if expect_text is not None:
        c.require(
            check,
            concat == expect_text,
            f"token texts concatenate to {concat!r}, expected {expect_text!r}",
        )


def _check_determinism(c: _Checker, check: str, call: Transport, op: str, request: dict) -> None:
    first = call(op, dict(request))
    second = call(op, dict(request))
    c.require(check, first == second, f"same request gave differing responses: {first!r} vs {second!r}")


def _check_complete(c: _Checker, call: Transport, probes: Probes) -> None:
    request = {"prompt": probes.complete_prompt, "max_tokens": probes.max_tokens}
    response = call("complete", dict(request))
    if not c.require("complete", isinstance(response, dict), f"response must be an object, got {response!r}"):
        return
    text = response.get("text")
    c.require("complete", isinstance(text, str), f"'text' must be a string, got {text!r}")
    c.require(
        "complete",
        response.get("finish_reason") in ("stop", "length"),
        f"'finish_reason' must be stop or length, got {response.get('finish_reason')!r}",
    )
    _check_tokens(c, "complete", response.get("tokens"), text if isinstance(text, str) else None)
    _check_determinism(c, "complete determinism", call, "complete", request)

    stopped = call("complete", {**request, "stop": ["\n"]})
    if isinstance(stopped, dict) and isinstance(stopped.get("text"), str):
        c.require(
            "complete stop",
            "\n" not in stopped["text"],
            f"text {stopped['text']!r} contains the stop sequence",
        )


def _check_score(c: _Checker, call: Transport, probes: Probes) -> None:
    continuations = list(probes.continuations) + [""]
    request = {"prompt": probes.score_prompt, "continuations": continuations}
    response = call("score", dict(request))
    if not c.require("score", isinstance(response, dict), f"response must be an object, got {response!r}"):
        return
    scores = response.get("scores")
    if not c.require(
        "score",
        isinstance(scores, list) and len(scores) == len(continuations),
        f"'scores' must hold {len(continuations)} token lists, got {scores!r}",
    ):
        return
    for continuation, tokens in zip(continuations, scores):
        _check_tokens(c, f"score[{continuation!r}]", tokens, continuation)
        if continuation == "":
            c.require(
                "score",
                tokens == [],
                f"empty continuation must score as an empty token list, got {tokens!r}",
            )
        else:
            c.require(
                "score",
                isinstance(tokens, list) and len(tokens) >= 1,
                f"non-empty continuation {continuation!r} must have at least one token",
            )
    _check_determinism(c, "score determinism", call, "score", request)


def _check_vqa(c: _Checker, call: Transport, probes: Probes) -> None:
    request = {"image_ref": probes.image_ref, "question": probes.vqa_question}
    response = call("vqa", dict(request))
    c.require(
        "vqa",
        isinstance(response, dict) and isinstance(response.get("answer"), str),
        f"'answer' must be a string, got {response!r}",
    )
    boxed = call("vqa", {**request, "box": list(probes.box)})
    c.require(
        "vqa box",
        isinstance(boxed, dict) and isinstance(boxed.get("answer"), str),
        f"'answer' must be a string for region queries, got {boxed!r}",
    )
    _check_determinism(c, "vqa determinism", call, "vqa", request)


def _check_detect(c: _Checker, call: Transport, probes: Probes) -> None:
    request = {"image_ref": probes.image_ref, "category": probes.category}
    response = call("detect", dict(request))
    if not c.require("detect", isinstance(response, dict), f"response must be an object, got {response!r}"):
        return
    boxes = response.get("boxes")
    if not c.require("detect", isinstance(boxes, list), f"'boxes' must be a list, got {boxes!r}"):
        return
    for i, box in enumerate(boxes):
        ok = c.require(
            "detect",
            isinstance(box, list)
            and len(box) == 4
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in box),
            f"box {i} must be four numbers, got {box!r}",
        )
        if ok:
            c.require(
                "detect",
                box[0] < box[2] and box[1] < box[3],
                f"box {i} {box!r} must have positive area",
            )
    _check_determinism(c, "detect determinism", call, "detect", request)


def _check_depth(c: _Checker, call: Transport, probes: Probes) -> None:
    request = {"image_ref": probes.image_ref, "box": list(probes.box)}
    response = call("depth", dict(request))
    c.require(
        "depth",
        isinstance(response, dict)
        and isinstance(response.get("depth"), (int, float))
        and not isinstance(response.get("depth"), bool)
        and response.get("depth") >= 0,
        f"'depth' must be a non-negative number, got {response!r}",
    )
    _check_determinism(c, "depth determinism", call, "depth", request)


def _check_similarity(c: _Checker, call: Transport, probes: Probes) -> None:
    request = {
        "image_ref": probes.image_ref,
        "box": list(probes.box),
        "texts": list(probes.texts),
    }
    response = call("similarity", dict(request))
    c.require(
        "similarity",
        isinstance(response, dict)
        and isinstance(response.get("scores"), list)
        and len(response.get("scores", ())) == len(probes.texts)
        and all(
            isinstance(v, (int, float)) and not isinstance(v, bool)
            for v in response.get("scores", ())
        ),
        f"'scores' must be {len(probes.texts)} numbers, got {response!r}",
    )
    _check_determinism(c, "similarity determinism", call, "similarity", request)


_CHECKS: dict[str, Callable[[_Checker, Transport, Probes], None]] = {
    "complete": _check_complete,
    "score": _check_score,
    "vqa": _check_vqa,
    "detect": _check_detect,
    "depth": _check_depth,
    "similarity": _check_similarity,
}


def run_protocol_checks(
    call: Transport,
    probes: Probes | None = None,
    ops: Sequence[str] | None = None,
) -> list[str]:
    """Run every applicable check; returns failure messages, empty on pass."""
    probes = probes or Probes()
    checker = _Checker()
    selected = probes.ops if ops is None else frozenset(ops)
    for op, check in _CHECKS.items():
        if op not in selected:
            continue
        try:
            check(checker, call, probes)
        except Exception as exc:  # a raising transport is itself a failure
            checker.failures.append(f"{op}: transport raised {type(exc).__name__}: {exc}")
    return checker.failures
