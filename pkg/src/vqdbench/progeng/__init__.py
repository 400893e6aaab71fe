"""Program generation and sandboxed execution for the modular method."""

from .interpreter import (
    DEFAULT_PROPERTY_THRESHOLD,
    DEFAULT_STEP_BUDGET,
    Interpreter,
    InterpreterError,
    PatchValue,
    execute,
    render_answer,
)
from .lexer import LexError
from .outcome import (
    ERROR_LABELS,
    PARSE_LABELS,
    ExecutionOutcome,
    OutcomeStatus,
)
from .parser import Module, ParseError, parse
from .prompt import (
    API_METHODS,
    AUX_FUNCTIONS,
    FEW_SHOT_DEMO_COUNT,
    CodeDemo,
    PromptVariant,
    api_text,
    build_code_prompt,
    default_demos,
    signature_for,
    variant_functions,
    variant_methods,
)
from .runner import (
    OUTCOME_OK,
    OUTCOME_PARSING,
    OUTCOME_RUNTIME,
    assemble_program,
    run_modular,
)

__all__ = [
    "API_METHODS",
    "AUX_FUNCTIONS",
    "DEFAULT_PROPERTY_THRESHOLD",
    "DEFAULT_STEP_BUDGET",
    "ERROR_LABELS",
    "FEW_SHOT_DEMO_COUNT",
    "CodeDemo",
    "ExecutionOutcome",
    "Interpreter",
    "InterpreterError",
    "LexError",
    "Module",
    "OUTCOME_OK",
    "OUTCOME_PARSING",
    "OUTCOME_RUNTIME",
    "OutcomeStatus",
    "PARSE_LABELS",
    "ParseError",
    "PatchValue",
    "PromptVariant",
    "api_text",
    "assemble_program",
    "build_code_prompt",
    "default_demos",
    "execute",
    "parse",
    "render_answer",
    "run_modular",
    "signature_for",
    "variant_functions",
    "variant_methods",
]
