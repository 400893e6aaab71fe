"""End-to-end driver for the program-generation method.

One instance flows prompt -> generated body -> sandboxed execution ->
answer. Failures never abort the run: a program that does not parse or
crashes at runtime yields an empty answer and a classified outcome, so
downstream accuracy and failure tables see every instance.
"""

from __future__ import annotations

from typing import Sequence

from ..backends import BackendSuite, complete
from ..scoring import map_to_nearest_choice
from ..types import (
    DecodingParams,
    EvaluationSetting,
    BenchmarkInstance,
    Method,
    Prediction,
    Trace,
)
from .interpreter import DEFAULT_PROPERTY_THRESHOLD, DEFAULT_STEP_BUDGET, execute
from .outcome import ExecutionOutcome, OutcomeStatus
from .prompt import CodeDemo, PromptVariant, build_code_prompt, signature_for

OUTCOME_OK = "No Exception"
OUTCOME_PARSING = "Parsing"
OUTCOME_RUNTIME = "Runtime"


def assemble_program(signature: str, body: str) -> str:
    """Join the prompted signature with the generated body text."""
    return f"{signature}\n{body}"


def run_modular(
    instance: BenchmarkInstance,
    suite: BackendSuite,
    *,
    setting: EvaluationSetting = EvaluationSetting.DIRECT_ANSWER,
    variant: PromptVariant | str = PromptVariant.TASK_AGNOSTIC,
    demos: Sequence[CodeDemo] | None = None,
    decoding: DecodingParams | None = None,
    property_threshold: float = DEFAULT_PROPERTY_THRESHOLD,
    step_budget: int = DEFAULT_STEP_BUDGET,
    trace: Trace | None = None,
) -> Prediction:
    """Answer one instance by generating and executing a program."""
    variant = PromptVariant(variant)
    if trace is None:
        trace = Trace()
    demos_tuple = tuple(demos) if demos is not None else None
    prompt = build_code_prompt(
        instance.question, setting, instance.choices, variant, demos_tuple
    )
    completion = complete(suite.code_lm, prompt, decoding, trace=trace)
    source = assemble_program(signature_for(setting, instance.choices), completion.text)
    outcome = execute(
        source,
        instance.image_ref,
        suite,
        variant=variant,
        property_threshold=property_threshold,
        step_budget=step_budget,
        decoding=decoding,
        trace=trace,
    )
    answer, outcome_class = _resolve_answer(instance, setting, suite, outcome, trace)
    return Prediction(
        instance_id=instance.id,
        answer_text=answer,
        method=Method.MODULAR,
        variant=variant.value,
        trace=trace.events,
        outcome_class=outcome_class,
        outcome=outcome,
    )


def _resolve_answer(
    instance: BenchmarkInstance,
    setting: EvaluationSetting,
    suite: BackendSuite,
    outcome: ExecutionOutcome,
    trace: Trace,
) -> tuple[str, str]:
    if outcome.status is OutcomeStatus.PARSE_ERROR:
        return "", OUTCOME_PARSING
    if outcome.status is OutcomeStatus.RUNTIME_ERROR:
        return "", OUTCOME_RUNTIME
    raw = outcome.result or ""
    if setting is EvaluationSetting.MULTIPLE_CHOICE and instance.choices:
        mapped = map_to_nearest_choice(
            suite.instruct_lm, raw, instance.choices, trace=trace
        )
        return mapped, OUTCOME_OK
    return raw, OUTCOME_OK
