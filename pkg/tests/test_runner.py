from vqdbench.backends import suite_from_world
from vqdbench.progeng import (
    OUTCOME_OK,
    OUTCOME_PARSING,
    OUTCOME_RUNTIME,
    OutcomeStatus,
    PromptVariant,
    assemble_program,
    build_code_prompt,
    run_modular,
)
from vqdbench.types import (
    BenchmarkInstance,
    EvaluationSetting,
    Method,
    TraceKind,
)


def make_instance(question="What animal is shown?", choices=None):
    return BenchmarkInstance(
        id="t1",
        image_ref="img",
        question=question,
        answers=("cat",),
        choices=tuple(choices) if choices else None,
    )


def world_with_program(tiny_world, question, body, choices=None):
    """Wire the code model to emit `body` for this question's prompt."""
    setting = (
        EvaluationSetting.MULTIPLE_CHOICE if choices else EvaluationSetting.DIRECT_ANSWER
    )
    prompt = build_code_prompt(question, setting, tuple(choices) if choices else None)
    tiny_world["code_lm"]["rules"].append(
        {"match": {"exact": prompt}, "text": body}
    )
    return tiny_world


def test_assemble_program_joins_signature_and_body():
    source = assemble_program("def execute_command(image) -> str:", "  return '1'")
    assert source == "def execute_command(image) -> str:\n  return '1'"


def test_successful_run_produces_the_programs_answer(tiny_world):
    body = (
        "  image_patch = ImagePatch(image)\n"
        "  return image_patch.simple_query('What animal is shown?')"
    )
    world = world_with_program(tiny_world, "What animal is shown?", body)
    suite = suite_from_world(world)
    prediction = run_modular(make_instance(), suite)
    assert prediction.answer_text == "a cat and a dog"
    assert prediction.outcome_class == OUTCOME_OK
    assert prediction.method is Method.MODULAR
    assert prediction.variant == PromptVariant.TASK_AGNOSTIC.value
    assert prediction.outcome.status is OutcomeStatus.OK


def test_crashing_program_is_contained_and_classified(tiny_world):
    world = world_with_program(
        tiny_world, "What animal is shown?", "  return undefined_name"
    )
    suite = suite_from_world(world)
    prediction = run_modular(make_instance(), suite)
    assert prediction.answer_text == ""
    assert prediction.outcome_class == OUTCOME_RUNTIME
    assert prediction.outcome.error_label == "NameError"


def test_unparseable_program_reads_as_parsing(tiny_world):
    world = world_with_program(
        tiny_world, "What animal is shown?", "  return ((oops"
    )
    suite = suite_from_world(world)
    prediction = run_modular(make_instance(), suite)
    assert prediction.outcome_class == OUTCOME_PARSING
    assert prediction.outcome.parse_label == "SyntaxError"
    assert prediction.answer_text == ""


def test_multiple_choice_answers_map_onto_the_choice_list(tiny_world):
    question = "What animal is shown?"
    choices = ["cat", "dog"]
    body = "  return 'cat'\n"
    world = world_with_program(tiny_world, question, body, choices=choices)
    suite = suite_from_world(world)
    prediction = run_modular(
        make_instance(choices=choices),
        suite,
        setting=EvaluationSetting.MULTIPLE_CHOICE,
    )
    # Exact match against a choice: no mapping call needed.
    assert prediction.answer_text == "cat"
    assert suite.instruct_lm.total_calls == 0


def test_trace_covers_generation_and_execution(tiny_world):
    world = world_with_program(tiny_world, "What animal is shown?", "  return 'x'")
    suite = suite_from_world(world)
    prediction = run_modular(make_instance(), suite)
    kinds = [event.kind for event in prediction.trace]
    assert TraceKind.BACKEND_CALL in kinds
    assert TraceKind.PARSER_EVENT in kinds
    assert TraceKind.INTERPRETER_STEP in kinds


def test_variant_threads_through_to_execution(tiny_world):
    question = "What animal is shown?"
    prompt = build_code_prompt(question, variant=PromptVariant.WITHOUT_BLIP2)
    body = (
        "  image_patch = ImagePatch(image)\n"
        "  return image_patch.simple_query('What animal is shown?')"
    )
    tiny_world["code_lm"]["rules"].append({"match": {"exact": prompt}, "text": body})
    suite = suite_from_world(tiny_world)
    prediction = run_modular(
        make_instance(), suite, variant=PromptVariant.WITHOUT_BLIP2
    )
    # simple_query is gated off under this variant, so the program fails.
    assert prediction.outcome_class == OUTCOME_RUNTIME
    assert prediction.outcome.error_label == "AttributeError"
    assert prediction.variant == "no-blip2"
