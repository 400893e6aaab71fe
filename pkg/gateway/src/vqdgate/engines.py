"""Deterministic reference engines behind the serving routes.

Every engine is a pure function of (seed, request): outputs come from
SHA-256 draws over the request fields, so identical requests return
identical bytes across calls, restarts, and hosts. They stand in for
real models during development and protocol testing; a production
deployment implements the same two small interfaces over actual
weights and plugs them in through the engine registry.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from typing import Protocol, Sequence

Box = tuple[float, float, float, float]

# logprobs live in [LOGPROB_FLOOR, LOGPROB_CEIL]; the ceiling stays
# strictly negative because a certain token never happens
LOGPROB_FLOOR = -8.0
LOGPROB_CEIL = -0.05


def _unit(*parts: object) -> float:
    """Uniform [0, 1) drawn from a SHA-256 of the parts."""
    payload = "\x1f".join(repr(p) for p in parts)
    digest = hashlib.sha256(payload.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def _logprob(*parts: object) -> float:
    return LOGPROB_CEIL + (LOGPROB_FLOOR - LOGPROB_CEIL) * _unit("logprob", *parts)


@dataclass(frozen=True)
class ScoredToken:
    """One generated or scored piece: its text and log-probability."""

    text: str
    logprob: float

    @property
    def byte_length(self) -> int:
        return len(self.text.encode("utf-8"))

    def to_wire(self) -> dict:
        return {"t": self.text, "logprob": self.logprob, "bytes": self.byte_length}


@dataclass(frozen=True)
class Completion:
    """Generated text with per-token scores; token texts concatenate to text."""

    text: str
    tokens: tuple[ScoredToken, ...]
    finish_reason: str

    def __post_init__(self) -> None:
        joined = "".join(t.text for t in self.tokens)
        if joined != self.text:
            raise ValueError(f"token texts concatenate to {joined!r}, not {self.text!r}")
        if self.finish_reason not in ("stop", "length"):
            raise ValueError(f"finish_reason must be stop or length, got {self.finish_reason!r}")


class TextEngine(Protocol):
    """Generation and continuation scoring."""

    name: str

    def complete(
        self,
        prompt: str,
        *,
        max_tokens: int,
        stop: Sequence[str] = (),
    ) -> Completion: ...

    def score(self, prompt: str, continuations: Sequence[str]) -> list[list[ScoredToken]]: ...


class VisionEngine(Protocol):
    """Image-conditioned operations, addressed by opaque image reference."""

    name: str

    def vqa(self, image_ref: str, question: str, box: Box | None = None) -> str: ...

    def detect(self, image_ref: str, category: str) -> list[Box]: ...

    def depth(self, image_ref: str, box: Box | None = None) -> float: ...

    def similarity(self, image_ref: str, box: Box | None, texts: Sequence[str]) -> list[float]: ...


def _earliest_stop(text: str, stop: Sequence[str]) -> int | None:
    cuts = [text.find(s) for s in stop if s]
    hits = [c for c in cuts if c >= 0]
    return min(hits) if hits else None


def _truncated(pieces: Sequence[ScoredToken], cut: int) -> tuple[str, tuple[ScoredToken, ...]]:
    """Keep the first cut characters; the token under the cut is resplit,
    keeping its logprob (byte length follows the kept prefix)."""
    kept: list[ScoredToken] = []
    consumed = 0
    for piece in pieces:
        end = consumed + len(piece.text)
        if end <= cut:
            kept.append(piece)
        elif consumed < cut:
            kept.append(ScoredToken(piece.text[: cut - consumed], piece.logprob))
        else:
            break
        consumed = end
    return "".join(p.text for p in kept), tuple(kept)


# every character belongs to exactly one piece, so pieces concatenate
# back to the original string
_SCORE_PIECES = re.compile(r"\s+|\S+")

_VOCAB = (
    "the", "a", "one", "small", "round", "pale", "gray", "bright",
    "cat", "dog", "bird", "bowl", "table", "lamp", "window", "plant",
    "sits", "rests", "leans", "waits", "near", "under", "beside", "above",
)


class HashLM:
    """Greedy pseudo language model over a fixed vocabulary.

    Words are drawn one at a time, conditioned on the prompt and the text
    generated so far; every sentence closes with a single ".\\n" token
    after 3-7 words, so newline stop sequences get exercised and the
    terminator straddles a stop cut. Scoring splits a continuation into
    whitespace/word runs and assigns each piece a conditional logprob
    from the same hash draws.
    """

    name = "hash-lm"

    def __init__(self, seed: int = 0):
        self.seed = seed

    def _sentence_target(self, prompt: str, sentence: int) -> int:
        return 3 + int(_unit(self.seed, "sentence", prompt, sentence) * 5)

    def complete(
        self,
        prompt: str,
        *,
        max_tokens: int,
        stop: Sequence[str] = (),
    ) -> Completion:
        pieces: list[ScoredToken] = []
        text = ""
        words_in_sentence = 0
        sentences = 0
        target = self._sentence_target(prompt, 0)
        for _ in range(max_tokens):
            if words_in_sentence >= target:
                piece_text = ".\n"
                words_in_sentence = 0
                sentences += 1
                target = self._sentence_target(prompt, sentences)
            else:
                word = _VOCAB[int(_unit(self.seed, "word", prompt, text) * len(_VOCAB))]
                piece_text = word if not text or text.endswith("\n") else f" {word}"
                words_in_sentence += 1
            pieces.append(ScoredToken(piece_text, _logprob(self.seed, prompt, text, piece_text)))
            text += piece_text
            cut = _earliest_stop(text, stop)
            if cut is not None:
                text, kept = _truncated(pieces, cut)
                return Completion(text=text, tokens=kept, finish_reason="stop")
        return Completion(text=text, tokens=tuple(pieces), finish_reason="length")

    def score(self, prompt: str, continuations: Sequence[str]) -> list[list[ScoredToken]]:
        out: list[list[ScoredToken]] = []
        for continuation in continuations:
            pieces: list[ScoredToken] = []
            seen = ""
            for part in _SCORE_PIECES.findall(continuation):
                pieces.append(ScoredToken(part, _logprob(self.seed, prompt, seen, part)))
                seen += part
            out.append(pieces)
        return out


def _box_key(box: Box | None) -> str:
    if box is None:
        return "full"
    return ",".join(f"{v:g}" for v in box)


class HashVision:
    """Deterministic stand-in for every image-conditioned operation.

    Detections are 1-3 boxes per (image, category), placed inside the
    canvas with positive area and returned in coordinate order; answers
    come from a small lexicon; depth and similarity are bounded draws.
    """

    name = "hash-vision"

    _ANSWERS = (
        "a cat", "a dog", "two birds", "a red bowl", "yes", "no",
        "on the table", "next to the window", "blue", "a person walking",
    )

    def __init__(self, seed: int = 0, width: float = 100.0, height: float = 100.0):
        self.seed = seed
        self.width = float(width)
        self.height = float(height)

    def vqa(self, image_ref: str, question: str, box: Box | None = None) -> str:
        draw = _unit(self.seed, "vqa", image_ref, question, _box_key(box))
        return self._ANSWERS[int(draw * len(self._ANSWERS))]

    def detect(self, image_ref: str, category: str) -> list[Box]:
        count = 1 + int(_unit(self.seed, "detect-count", image_ref, category) * 3)
        boxes: list[Box] = []
        for i in range(count):
            x0 = round(_unit(self.seed, "x0", image_ref, category, i) * (self.width - 8.0), 2)
            y0 = round(_unit(self.seed, "y0", image_ref, category, i) * (self.height - 8.0), 2)
            x1 = round(min(self.width, x0 + 4.0 + _unit(self.seed, "w", image_ref, category, i) * 32.0), 2)
            y1 = round(min(self.height, y0 + 4.0 + _unit(self.seed, "h", image_ref, category, i) * 32.0), 2)
            boxes.append((x0, y0, x1, y1))
        return sorted(boxes)

    def depth(self, image_ref: str, box: Box | None = None) -> float:
        return round(0.5 + _unit(self.seed, "depth", image_ref, _box_key(box)) * 19.5, 4)

    def similarity(self, image_ref: str, box: Box | None, texts: Sequence[str]) -> list[float]:
        return [
            round(_unit(self.seed, "sim", image_ref, _box_key(box), text), 6)
            for text in texts
        ]
