"""Benchmark harness for visual question answering strategies.

Three ways of answering a question about an image run against the same
backends and datasets:

- end-to-end: one vision-language model call;
- modular: generate a program over an image-patch API, then execute it
  in a sandboxed interpreter;
- successive: a text-only model decomposes the question into follow-ups
  that a vision backend answers one at a time.

Backends are pluggable: deterministic mocks for tests and development,
or a remote gateway speaking the documented HTTP protocol.
"""

from .analysis import (
    classify_outcome,
    render_breakdown_table,
    render_summary_table,
    runtime_breakdown,
    summarize,
)
from .dataset import load_dataset, sample, scan_dataset, write_dataset
from .e2e import E2E_TEMPLATE, answer_direct, answer_multiple_choice, run_end_to_end
from .metrics import (
    exact_match,
    llm_judge,
    mc_accuracy,
    normalize_answer,
    vqa_accuracy,
)
from .progeng import (
    CodeDemo,
    ExecutionOutcome,
    OutcomeStatus,
    PromptVariant,
    build_code_prompt,
    execute,
    parse,
    run_modular,
)
from .report import build_report, canonicalize_report, load_report, write_report
from .scoring import (
    map_to_nearest_choice,
    normalized_loglikelihood,
    select_choice,
    select_prefix,
)
from .successive import (
    PREFIX_ANSWER,
    PREFIX_FOLLOWUP,
    DecompositionResult,
    DecompositionStep,
    build_decomposition_prompt,
    run_decomposition,
)
from .types import (
    BenchmarkInstance,
    DecodingParams,
    EvaluationSetting,
    Method,
    Prediction,
    RunConfig,
    Trace,
    TraceEvent,
    TraceKind,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkInstance",
    "CodeDemo",
    "DecodingParams",
    "DecompositionResult",
    "DecompositionStep",
    "E2E_TEMPLATE",
    "EvaluationSetting",
    "ExecutionOutcome",
    "Method",
    "OutcomeStatus",
    "PREFIX_ANSWER",
    "PREFIX_FOLLOWUP",
    "Prediction",
    "PromptVariant",
    "RunConfig",
    "Trace",
    "TraceEvent",
    "TraceKind",
    "answer_direct",
    "answer_multiple_choice",
    "build_code_prompt",
    "build_decomposition_prompt",
    "build_report",
    "canonicalize_report",
    "classify_outcome",
    "exact_match",
    "execute",
    "llm_judge",
    "load_dataset",
    "load_report",
    "map_to_nearest_choice",
    "mc_accuracy",
    "normalize_answer",
    "normalized_loglikelihood",
    "parse",
    "render_breakdown_table",
    "render_summary_table",
    "run_decomposition",
    "run_end_to_end",
    "run_modular",
    "runtime_breakdown",
    "sample",
    "scan_dataset",
    "select_choice",
    "select_prefix",
    "summarize",
    "vqa_accuracy",
    "write_dataset",
    "write_report",
]
