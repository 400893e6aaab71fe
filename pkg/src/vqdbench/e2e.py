"""End-to-end querying: one vision-language model call per question.

Direct answering puts the question into a short-answer template and takes
the model's text as-is. Multiple choice instead scores each choice as a
continuation of the same template and keeps the likeliest.
"""

from __future__ import annotations

from .backends import BackendSuite, vqa
from .scoring import select_choice
from .types import (
    BenchmarkInstance,
    EvaluationSetting,
    Method,
    Prediction,
    Trace,
)

E2E_TEMPLATE = "Question: {} Short answer: "


def e2e_prompt(question: str) -> str:
    if not question:
        raise ValueError("question must be non-empty")
    return E2E_TEMPLATE.format(question)


def answer_direct(
    instance: BenchmarkInstance,
    suite: BackendSuite,
    *,
    trace: Trace | None = None,
) -> str:
    """Free-form answer from a single model call."""
    prompt = e2e_prompt(instance.question)
    return vqa(suite.vlm, instance.image_ref, prompt, trace=trace)


def answer_multiple_choice(
    instance: BenchmarkInstance,
    suite: BackendSuite,
    *,
    trace: Trace | None = None,
) -> str:
    """The choice the model scores highest as a continuation."""
    if not instance.choices:
        raise ValueError("instance carries no choices")
    prompt = e2e_prompt(instance.question)
    choice, _scores = select_choice(
        suite.vlm, prompt, instance.choices, image_ref=instance.image_ref, trace=trace
    )
    return choice


def run_end_to_end(
    instance: BenchmarkInstance,
    suite: BackendSuite,
    *,
    setting: EvaluationSetting = EvaluationSetting.DIRECT_ANSWER,
    trace: Trace | None = None,
) -> Prediction:
    """Answer one instance with a single end-to-end model query."""
    if trace is None:
        trace = Trace()
    if setting is EvaluationSetting.MULTIPLE_CHOICE:
        answer = answer_multiple_choice(instance, suite, trace=trace)
    else:
        answer = answer_direct(instance, suite, trace=trace)
    return Prediction(
        instance_id=instance.id,
        answer_text=answer,
        method=Method.END_TO_END,
        variant="",
        trace=trace.events,
        outcome_class=None,
        outcome=None,
    )
