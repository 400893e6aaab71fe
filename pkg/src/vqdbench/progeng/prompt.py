"""Code-generation prompt assembly with API ablation variants.

The prompt shows an image-patch API, optional worked demonstrations, and
the target question as a comment above a function signature the model
must complete. Variants ablate the API surface: the task-agnostic prompt
exposes everything; one variant removes the direct-query method; two
expose nothing but the direct-query method, with zero or exactly three
demonstrations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from importlib import resources

from ..scoring import render_choice_list
from ..types import EvaluationSetting


class PromptVariant(str, Enum):
    TASK_AGNOSTIC = "task-agnostic"
    WITHOUT_BLIP2 = "no-blip2"
    ONLY_BLIP2_ZERO_SHOT = "only-blip2-zs"
    ONLY_BLIP2_FEW_SHOT = "only-blip2-fs"


API_METHODS = (
    "find",
    "exists",
    "verify_property",
    "simple_query",
    "crop",
    "compute_depth",
    "best_text_match",
)
AUX_FUNCTIONS = ("distance", "llm_query")

FEW_SHOT_DEMO_COUNT = 3

SIGNATURE_DIRECT = "def execute_command(image) -> str:"


@dataclass(frozen=True, slots=True)
class CodeDemo:
    """One worked example: the question and its full program text."""

    question: str
    program: str


def variant_methods(variant: PromptVariant) -> frozenset[str]:
    """Patch methods available under a variant."""
    if variant in (PromptVariant.ONLY_BLIP2_ZERO_SHOT, PromptVariant.ONLY_BLIP2_FEW_SHOT):
        return frozenset({"simple_query"})
    if variant is PromptVariant.WITHOUT_BLIP2:
        return frozenset(API_METHODS) - {"simple_query"}
    return frozenset(API_METHODS)


def variant_functions(variant: PromptVariant) -> frozenset[str]:
    """Global helper functions available under a variant."""
    if variant in (PromptVariant.ONLY_BLIP2_ZERO_SHOT, PromptVariant.ONLY_BLIP2_FEW_SHOT):
        return frozenset()
    return frozenset(AUX_FUNCTIONS)


def _asset(name: str) -> str:
    return resources.files("vqdbench.assets").joinpath(name).read_text(encoding="utf-8")


def _load_demo(name: str) -> CodeDemo:
    text = _asset(name).strip("\n")
    first, _, rest = text.partition("\n")
    if not first.startswith("# "):
        raise ValueError(f"demo asset {name} must start with a question comment")
    return CodeDemo(question=first[2:], program=rest)


def api_text(variant: PromptVariant) -> str:
    """The ImagePatch API text for a variant, methods in canonical order."""
    pieces = [_asset("code_api/header.txt").rstrip("\n")]
    for method in API_METHODS:
        if method in variant_methods(variant):
            pieces.append(_asset(f"code_api/method_{method}.txt").rstrip("\n"))
    for func in AUX_FUNCTIONS:
        if func in variant_functions(variant):
            pieces.append(_asset(f"code_api/function_{func}.txt").rstrip("\n"))
    return "\n\n".join(pieces)


def default_demos(variant: PromptVariant) -> tuple[CodeDemo, ...]:
    if variant is PromptVariant.TASK_AGNOSTIC:
        return (_load_demo("code_api/demo_task_agnostic.txt"),)
    if variant is PromptVariant.WITHOUT_BLIP2:
        return (_load_demo("code_api/demo_without_blip2.txt"),)
    if variant is PromptVariant.ONLY_BLIP2_FEW_SHOT:
        return tuple(
            _load_demo(f"code_api/demo_only_blip2_{i}.txt")
            for i in range(1, FEW_SHOT_DEMO_COUNT + 1)
        )
    return ()


def signature_for(
    setting: EvaluationSetting, choices: tuple[str, ...] | None = None
) -> str:
    if setting is EvaluationSetting.MULTIPLE_CHOICE:
        if not choices:
            raise ValueError("multiple-choice prompts need the choice list")
        return f"def execute_command(image, possible_choices={render_choice_list(choices)}) -> str:"
    return SIGNATURE_DIRECT


def build_code_prompt(
    question: str,
    setting: EvaluationSetting = EvaluationSetting.DIRECT_ANSWER,
    choices: tuple[str, ...] | None = None,
    variant: PromptVariant = PromptVariant.TASK_AGNOSTIC,
    demos: tuple[CodeDemo, ...] | None = None,
) -> str:
    """Assemble the full code-generation prompt, ending with the signature.

    The completion is expected to be the function body. Demonstrations
    default per variant; the few-shot variant requires exactly three.
    """
    if not question:
        raise ValueError("question must be non-empty")
    if demos is None:
        demos = default_demos(variant)
    if variant is PromptVariant.ONLY_BLIP2_ZERO_SHOT and demos:
        raise ValueError("the zero-shot variant takes no demonstrations")
    if variant is PromptVariant.ONLY_BLIP2_FEW_SHOT and len(demos) != FEW_SHOT_DEMO_COUNT:
        raise ValueError(
            f"the few-shot variant takes exactly {FEW_SHOT_DEMO_COUNT} demonstrations, got {len(demos)}"
        )
    parts = [api_text(variant), "\n\n"]
    for demo in demos:
        parts.append(f"# {demo.question}\n{demo.program}\n\n")
    parts.append(f"# {question}\n")
    if setting is EvaluationSetting.MULTIPLE_CHOICE:
        if not choices:
            raise ValueError("multiple-choice prompts need the choice list")
        parts.append(f"# possible answers : {render_choice_list(choices)}\n")
    parts.append(signature_for(setting, choices) + "\n")
    return "".join(parts)
