"""Scripted language model: ordered prompt-matching rules, no fallbacks.

Completion rules pair a prompt matcher with a canned completion; scoring
rules pair a matcher with per-continuation token scores. The first matching
rule wins. A prompt that matches nothing is a fixture error, never a silent
default, so miswired prompts fail loudly in tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping, Sequence

from .base import (
    BaseBackend,
    Completion,
    FixtureError,
    OP_COMPLETE,
    OP_SCORE,
    TokenScore,
    token,
    tokens_to_wire,
)


@dataclass(frozen=True, slots=True)
class MatchRule:
    """Prompt predicate: the conjunction of all conditions present.

    contains may hold several substrings; all of them must appear. A rule
    with no conditions matches every prompt, which is handy as a trailing
    catch-all.
    """

    exact: str | None = None
    prefix: str | None = None
    suffix: str | None = None
    contains: tuple[str, ...] = ()

    def matches(self, prompt: str) -> bool:
        if self.exact is not None and prompt != self.exact:
            return False
        if self.prefix is not None and not prompt.startswith(self.prefix):
            return False
        if self.suffix is not None and not prompt.endswith(self.suffix):
            return False
        return all(needle in prompt for needle in self.contains)

    def describe(self) -> str:
        parts = []
        for name in ("exact", "prefix", "suffix"):
            value = getattr(self, name)
            if value is not None:
                parts.append(f"{name}={value!r}")
        for needle in self.contains:
            parts.append(f"contains={needle!r}")
        return " and ".join(parts) if parts else "<match-all>"

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "MatchRule":
        known = {"exact", "prefix", "suffix", "contains"}
        unknown = set(record) - known
        if unknown:
            raise ValueError(f"unknown match conditions: {sorted(unknown)}")
        fields = {k: record[k] for k in ("exact", "prefix", "suffix") if k in record}
        raw = record.get("contains")
        if raw is None:
            contains: tuple[str, ...] = ()
        elif isinstance(raw, str):
            contains = (raw,)
        else:
            contains = tuple(str(needle) for needle in raw)
        return cls(contains=contains, **fields)


def _tokens_from_value(continuation: str, value: Any) -> tuple[TokenScore, ...]:
    """A scoring-table value is either one number or explicit token records."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return (token(continuation, float(value)),)
    if isinstance(value, list):
        return tuple(
            TokenScore(
                text=str(item["t"]),
                logprob=float(item["logprob"]),
                byte_length=int(item["bytes"]),
            )
            for item in value
        )
    raise ValueError(f"scoring value must be a number or token list, got {value!r}")


@dataclass(frozen=True)
class CompletionRule:
    match: MatchRule
    completion: Completion

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "CompletionRule":
        text = record["text"]
        raw_tokens = record.get("tokens")
        if raw_tokens is None:
            tokens = (token(text, 0.0),) if text else ()
        else:
            tokens = tuple(
                TokenScore(str(t["t"]), float(t["logprob"]), int(t["bytes"]))
                for t in raw_tokens
            )
        return cls(
            match=MatchRule.from_record(record.get("match", {})),
            completion=Completion(
                text=text,
                tokens=tokens,
                finish_reason=record.get("finish_reason", "stop"),
            ),
        )


@dataclass(frozen=True)
class ScoreRule:
    match: MatchRule
    table: Mapping[str, tuple[TokenScore, ...]]

    @classmethod
    def from_record(cls, record: Mapping[str, Any]) -> "ScoreRule":
        table = {
            str(cont): _tokens_from_value(str(cont), value)
            for cont, value in record.get("continuations", {}).items()
        }
        return cls(match=MatchRule.from_record(record.get("match", {})), table=table)


def _clip(text: str, limit: int = 120) -> str:
    return text if len(text) <= limit else text[:60] + " ... " + text[-60:]


class ScriptedLM(BaseBackend):
    """Text backend driven entirely by ordered fixture rules."""

    def __init__(
        self,
        backend_id: str = "scripted-lm",
        completions: Sequence[CompletionRule] = (),
        scores: Sequence[ScoreRule] = (),
    ):
        super().__init__(backend_id, frozenset({OP_COMPLETE, OP_SCORE}))
        self._completions = list(completions)
        self._scores = list(scores)

    @classmethod
    def from_record(cls, record: Mapping[str, Any], backend_id: str = "scripted-lm") -> "ScriptedLM":
        return cls(
            backend_id=backend_id,
            completions=[CompletionRule.from_record(r) for r in record.get("rules", ())],
            scores=[ScoreRule.from_record(r) for r in record.get("scores", ())],
        )

    def _serve(self, op: str, request: dict) -> dict:
        prompt = str(request.get("prompt", ""))
        if op == OP_COMPLETE:
            return self._complete(prompt, request)
        return self._score(prompt, request)

    def _complete(self, prompt: str, request: dict) -> dict:
        for rule in self._completions:
            if rule.match.matches(prompt):
                completion = self._apply_stop(rule.completion, request.get("stop") or ())
                return {
                    "text": completion.text,
                    "tokens": tokens_to_wire(completion.tokens),
                    "finish_reason": completion.finish_reason,
                }
        raise FixtureError(
            f"{self.backend_id}: no completion rule matches prompt {_clip(prompt)!r}"
        )

    @staticmethod
    def _apply_stop(completion: Completion, stop: Sequence[str]) -> Completion:
        """Trim a scripted completion at the earliest stop sequence."""
        cut = min(
            (completion.text.index(s) for s in stop if s and s in completion.text),
            default=None,
        )
        if cut is None:
            return completion
        kept: list[TokenScore] = []
        remaining = cut
        for tok in completion.tokens:
            if remaining <= 0:
                break
            if len(tok.text) <= remaining:
                kept.append(tok)
                remaining -= len(tok.text)
            else:
                kept.append(token(tok.text[:remaining], tok.logprob))
                remaining = 0
        return Completion(
            text=completion.text[:cut], tokens=tuple(kept), finish_reason="stop"
        )

    def _score(self, prompt: str, request: dict) -> dict:
        continuations = request.get("continuations")
        if not isinstance(continuations, list) or not continuations:
            raise FixtureError(f"{self.backend_id}: score needs a non-empty continuations list")
        scores: list[list[dict]] = []
        for continuation in continuations:
            continuation = str(continuation)
            if continuation == "":
                scores.append([])
                continue
            scores.append(tokens_to_wire(self._lookup(prompt, continuation)))
        return {"scores": scores}

    def _lookup(self, prompt: str, continuation: str) -> tuple[TokenScore, ...]:
        for rule in self._scores:
            if rule.match.matches(prompt) and continuation in rule.table:
                return rule.table[continuation]
        raise FixtureError(
            f"{self.backend_id}: no scoring entry for continuation {continuation!r} "
            f"under prompt {_clip(prompt)!r}"
        )
