"""Likelihood scoring and selection over scored continuations.

Comparing continuations of different lengths uses a byte-length-weighted
mean of token log-probabilities: with token byte lengths L_1..L_n and
log-probabilities logp_1..logp_n,

    score = sum_j logp_j * (L_j / sum_k L_k)

so longer tokens carry proportionally more weight and the score stays on
the per-token log scale regardless of tokenization granularity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .backends import Backend, TokenScore, score_continuations
from .types import Trace, TraceKind


def normalized_loglikelihood(tokens: Sequence[TokenScore]) -> float:
    """Byte-length-weighted mean log-probability of a token sequence."""
    if len(tokens) == 0:
        raise ValueError("cannot normalize an empty token sequence")
    total_bytes = 0
    for t in tokens:
        if t.byte_length <= 0:
            raise ValueError(f"token {t.text!r} has non-positive byte length {t.byte_length}")
        total_bytes += t.byte_length
    return sum(t.logprob * t.byte_length for t in tokens) / total_bytes


@dataclass(frozen=True, slots=True)
class ContinuationScore:
    continuation: str
    tokens: tuple[TokenScore, ...]
    normalized: float


def _score_all(
    backend: Backend,
    prompt: str,
    continuations: Sequence[str],
    *,
    image_ref: str | None,
    trace: Trace | None,
) -> list[ContinuationScore]:
    scored = score_continuations(
        backend, prompt, continuations, image_ref=image_ref, trace=trace
    )
    out = []
    for continuation, tokens in zip(continuations, scored):
        normalized = normalized_loglikelihood(tokens) if tokens else float("-inf")
        out.append(ContinuationScore(continuation, tuple(tokens), normalized))
    return out


def select_prefix(
    backend: Backend,
    prompt: str,
    prefixes: tuple[str, str],
    *,
    image_ref: str | None = None,
    trace: Trace | None = None,
) -> int:
    """Index of the likelier of two continuations; ties pick index 0."""
    scored = _score_all(backend, prompt, list(prefixes), image_ref=image_ref, trace=trace)
    chosen = 1 if scored[1].normalized > scored[0].normalized else 0
    if trace is not None:
        trace.record(
            TraceKind.ENGINE_DECISION,
            decision="select_prefix",
            scores=[s.normalized for s in scored],
            chosen=chosen,
        )
    return chosen


def select_choice(
    backend: Backend,
    prompt: str,
    choices: Sequence[str],
    *,
    image_ref: str | None = None,
    trace: Trace | None = None,
) -> tuple[str, list[ContinuationScore]]:
    """Highest-scoring choice; ties pick the lowest index."""
    if len(choices) < 2:
        raise ValueError("select_choice needs at least two choices")
    scored = _score_all(backend, prompt, choices, image_ref=image_ref, trace=trace)
    best = max(range(len(scored)), key=lambda i: (scored[i].normalized, -i))
    if trace is not None:
        trace.record(
            TraceKind.ENGINE_DECISION,
            decision="select_choice",
            scores=[s.normalized for s in scored],
            chosen=best,
        )
    return choices[best], scored


NEAREST_CHOICE_TEMPLATE = "Choices: {} Candidate: {} Most similar choice: "


def render_choice_list(choices: Sequence[str]) -> str:
    """Bracketed, single-quoted choice list, e.g. ['dog', 'cat']."""
    quoted = ", ".join(
        "'" + c.replace("\\", "\\\\").replace("'", "\\'") + "'" for c in choices
    )
    return f"[{quoted}]"


def map_to_nearest_choice(
    backend: Backend,
    candidate: str,
    choices: Sequence[str],
    *,
    image_ref: str | None = None,
    trace: Trace | None = None,
) -> str:
    """Map free-form text onto the fixed choice list.

    A candidate that already equals a choice after whitespace trimming is
    returned as-is with no model call; otherwise the model scores each
    choice as the completion of a nearest-choice prompt.
    """
    if len(choices) < 2:
        raise ValueError("map_to_nearest_choice needs at least two choices")
    trimmed = candidate.strip()
    for choice in choices:
        if trimmed == choice.strip():
            if trace is not None:
                trace.record(
                    TraceKind.ENGINE_DECISION,
                    decision="map_to_nearest_choice",
                    exact=True,
                    chosen=choice,
                )
            return choice
    prompt = NEAREST_CHOICE_TEMPLATE.format(render_choice_list(choices), candidate)
    chosen, _ = select_choice(backend, prompt, choices, image_ref=image_ref, trace=trace)
    return chosen
