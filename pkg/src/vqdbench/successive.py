"""Successive decomposition: answer by asking follow-up questions.

A text-only language model holds the conversation; it never sees the
image. At each turn the model either asks one follow-up question, which
a vision backend answers, or commits to a final answer. The branch is
decided by scoring which of the two transcript continuations the model
finds likelier:

    Follow-up:
    Answer to the original question:

A step cap forces the final answer when the model keeps asking, so every
instance terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from typing import Sequence

from .backends import BackendSuite, complete, vqa
from .scoring import render_choice_list, select_choice, select_prefix
from .types import (
    BenchmarkInstance,
    DecodingParams,
    EvaluationSetting,
    Method,
    Prediction,
    Trace,
    TraceKind,
)

PREFIX_FOLLOWUP = "Follow-up:"
PREFIX_ANSWER = "Answer to the original question:"

DEFAULT_MAX_STEPS = 8
DEMO_COUNT = 3

TERMINATED_BY_ANSWER = "answer_prefix"
TERMINATED_BY_CAP = "step_cap"


def _asset(name: str) -> str:
    path = resources.files("vqdbench.assets").joinpath(f"successive/{name}")
    return path.read_text(encoding="utf-8").rstrip("\n")


def default_instruction() -> str:
    return _asset("instruction.txt")


def default_demos() -> tuple[str, ...]:
    return tuple(_asset(f"demo_{i}.txt") for i in range(1, DEMO_COUNT + 1))


@dataclass(frozen=True, slots=True)
class DecompositionStep:
    """One follow-up question and the vision backend's answer to it."""

    question: str
    answer: str


@dataclass(frozen=True, slots=True)
class DecompositionResult:
    question: str
    choices: tuple[str, ...] | None
    steps: tuple[DecompositionStep, ...]
    final_answer: str
    terminated_by: str  # "answer_prefix" | "step_cap"

    def transcript(self) -> str:
        """The conversation in the exact shape the model was prompted with."""
        lines = [f"Question: {self.question}"]
        if self.choices:
            lines.append(f"Choices: {render_choice_list(self.choices)}")
        for step in self.steps:
            lines.append(f"{PREFIX_FOLLOWUP} {step.question}")
            lines.append(f"Follow-up answer: {step.answer}")
        lines.append(f"{PREFIX_ANSWER} {self.final_answer}")
        return "\n".join(lines)

    def to_record(self) -> dict:
        return {
            "question": self.question,
            "choices": list(self.choices) if self.choices else None,
            "steps": [{"question": s.question, "answer": s.answer} for s in self.steps],
            "final_answer": self.final_answer,
            "terminated_by": self.terminated_by,
        }


def build_decomposition_prompt(
    question: str,
    steps: Sequence[DecompositionStep] = (),
    *,
    choices: Sequence[str] | None = None,
    instruction: str | None = None,
    demos: Sequence[str] | None = None,
) -> str:
    """The conversation prompt up to (not including) the next turn marker.

    Growing the step list only ever appends lines, so every decision
    point shares the prompt prefix of the previous one.
    """
    if not question:
        raise ValueError("question must be non-empty")
    if instruction is None:
        instruction = default_instruction()
    if demos is None:
        demos = default_demos()
    blocks = [instruction]
    blocks.extend(demos)
    lines = [f"Question: {question}"]
    if choices:
        lines.append(f"Choices: {render_choice_list(choices)}")
    for step in steps:
        lines.append(f"{PREFIX_FOLLOWUP} {step.question}")
        lines.append(f"Follow-up answer: {step.answer}")
    blocks.append("\n".join(lines) + "\n")
    return "\n\n".join(blocks)


def _first_line(text: str) -> str:
    return text.strip().splitlines()[0].strip() if text.strip() else ""


def run_decomposition(
    instance: BenchmarkInstance,
    suite: BackendSuite,
    *,
    setting: EvaluationSetting = EvaluationSetting.DIRECT_ANSWER,
    max_steps: int = DEFAULT_MAX_STEPS,
    instruction: str | None = None,
    demos: Sequence[str] | None = None,
    decoding: DecodingParams | None = None,
    trace: Trace | None = None,
) -> Prediction:
    """Answer one instance by successive decomposition."""
    if trace is None:
        trace = Trace()
    if max_steps < 0:
        raise ValueError("max_steps must be >= 0")
    decoding = decoding or DecodingParams()
    line_decoding = decoding.with_stop("\n")
    lm = suite.instruct_lm
    choices = instance.choices if setting is EvaluationSetting.MULTIPLE_CHOICE else None
    steps: list[DecompositionStep] = []
    terminated_by = TERMINATED_BY_CAP
    while len(steps) < max_steps:
        prompt = build_decomposition_prompt(
            instance.question,
            steps,
            choices=choices,
            instruction=instruction,
            demos=demos,
        )
        pick = select_prefix(lm, prompt, (PREFIX_FOLLOWUP, PREFIX_ANSWER), trace=trace)
        if pick == 1:
            terminated_by = TERMINATED_BY_ANSWER
            break
        followup_prompt = prompt + PREFIX_FOLLOWUP
        generated = complete(lm, followup_prompt, line_decoding, trace=trace)
        followup = _first_line(generated.text)
        # The vision backend sees the follow-up verbatim, whole image only.
        answer = vqa(suite.vlm, instance.image_ref, followup, trace=trace)
        steps.append(DecompositionStep(question=followup, answer=answer))
    prompt = build_decomposition_prompt(
        instance.question,
        steps,
        choices=choices,
        instruction=instruction,
        demos=demos,
    )
    if setting is EvaluationSetting.MULTIPLE_CHOICE:
        final, _scores = select_choice(
            lm, prompt + PREFIX_ANSWER + " ", instance.choices or (), trace=trace
        )
    else:
        generated = complete(lm, prompt + PREFIX_ANSWER, line_decoding, trace=trace)
        final = _first_line(generated.text)
    result = DecompositionResult(
        question=instance.question,
        choices=choices,
        steps=tuple(steps),
        final_answer=final,
        terminated_by=terminated_by,
    )
    trace.record(
        TraceKind.ENGINE_DECISION,
        decision="decomposition_final",
        steps=len(result.steps),
        terminated_by=terminated_by,
    )
    return Prediction(
        instance_id=instance.id,
        answer_text=final,
        method=Method.SUCCESSIVE,
        variant="",
        trace=trace.events,
        outcome_class=None,
        outcome=result,
    )
