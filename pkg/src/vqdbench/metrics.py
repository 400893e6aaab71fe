"""Answer metrics: normalization, accuracy variants, and a model judge.

normalize_answer applies, in order: lowercase; strip outer whitespace;
drop trailing sentence punctuation; split on whitespace; drop leading
articles (a, an, the); spell number words zero..ten as digits; rejoin
with single spaces. One pass can expose new trailing punctuation or an
unmapped number word (e.g. "x, ." or "one ,"), so the pass repeats until
the text stops changing; the result is idempotent, and every metric
exposes a flag to switch normalization off.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .backends import Backend, score_continuations
from .scoring import normalized_loglikelihood
from .types import Trace, ordered_unique

_ARTICLES = ("a", "an", "the")
_TRAILING_PUNCTUATION = ".,;:!?"
_NUMBER_WORDS = {
    "zero": "0",
    "one": "1",
    "two": "2",
    "three": "3",
    "four": "4",
    "five": "5",
    "six": "6",
    "seven": "7",
    "eight": "8",
    "nine": "9",
    "ten": "10",
}


def _normalize_pass(text: str) -> str:
    text = text.lower().strip()
    while text and text[-1] in _TRAILING_PUNCTUATION:
        text = text[:-1]
    words = text.split()
    while words and words[0] in _ARTICLES:
        words = words[1:]
    words = [_NUMBER_WORDS.get(w, w) for w in words]
    return " ".join(words)


def normalize_answer(text: str) -> str:
    previous = None
    while text != previous:
        previous = text
        text = _normalize_pass(text)
    return text


def vqa_accuracy(
    prediction: str, answers: Sequence[str], *, normalize: bool = True
) -> float:
    """Soft accuracy against multiple annotations: min(1, matches / 3).

    Three agreeing annotators saturate the score. The clamp direction
    matters: without it, more than three matches would score above 1.
    """
    if not answers:
        raise ValueError("vqa_accuracy needs at least one reference answer")
    if normalize:
        prediction = normalize_answer(prediction)
        answers = [normalize_answer(a) for a in answers]
    matches = sum(1 for a in answers if a == prediction)
    return min(1.0, matches / 3)


def exact_match(prediction: str, answer: str, *, normalize: bool = True) -> int:
    if normalize:
        prediction = normalize_answer(prediction)
        answer = normalize_answer(answer)
    return int(prediction == answer)


def mc_accuracy(prediction: str, choices: Sequence[str], correct_index: int) -> int:
    """1 when the predicted choice is the correct one.

    The prediction must be an element of choices; engines guarantee that
    by construction, so anything else is a harness bug worth raising on.
    """
    if not 0 <= correct_index < len(choices):
        raise ValueError(f"correct_index {correct_index} out of range for {len(choices)} choices")
    if prediction not in choices:
        raise ValueError(f"prediction {prediction!r} is not one of the choices")
    return int(prediction == choices[correct_index])


JUDGE_TEMPLATE = "Question: {}\nAnswer: {}\nCandidate: {}\nIs the candidate correct? "


@dataclass(frozen=True, slots=True)
class JudgeResult:
    correct: bool
    yes_score: float
    no_score: float


def llm_judge(
    backend: Backend,
    question: str,
    answers: Sequence[str],
    candidate: str,
    *,
    normalize: bool = False,
    trace: Trace | None = None,
) -> JudgeResult:
    """Model-as-judge correctness verdict.

    The judge sees raw strings by default; multiple reference answers are
    deduplicated in first-seen order and joined with " or ". The verdict
    compares the normalized likelihoods of "yes" and "no" as continuations
    of the judge prompt; a tie is not a yes, so it reads as incorrect.
    """
    if not answers:
        raise ValueError("llm_judge needs at least one reference answer")
    if normalize:
        candidate = normalize_answer(candidate)
        answers = [normalize_answer(a) for a in answers]
    reference = " or ".join(ordered_unique(answers))
    prompt = JUDGE_TEMPLATE.format(question, reference, candidate)
    yes_tokens, no_tokens = score_continuations(backend, prompt, ["yes", "no"], trace=trace)
    yes_score = normalized_loglikelihood(yes_tokens) if yes_tokens else float("-inf")
    no_score = normalized_loglikelihood(no_tokens) if no_tokens else float("-inf")
    return JudgeResult(correct=yes_score > no_score, yes_score=yes_score, no_score=no_score)
