import pytest

from vqdbench.backends import suite_from_world
from vqdbench.e2e import E2E_TEMPLATE, e2e_prompt, run_end_to_end
from vqdbench.types import BenchmarkInstance, EvaluationSetting, Method, TraceKind


def make_instance(question, choices=None):
    return BenchmarkInstance(
        id="e1",
        image_ref="img",
        question=question,
        answers=("a cat and a dog",),
        choices=tuple(choices) if choices else None,
    )


def test_prompt_template():
    assert e2e_prompt("Is it red?") == "Question: Is it red? Short answer: "
    with pytest.raises(ValueError):
        e2e_prompt("")


def test_direct_answer_is_one_vqa_call(tiny_world):
    question = "What animal is shown?"
    prompt = E2E_TEMPLATE.format(question)
    tiny_world["scenes"][0]["scene_qa"][prompt] = "a cat and a dog"
    suite = suite_from_world(tiny_world)
    prediction = run_end_to_end(make_instance(question), suite)
    assert prediction.answer_text == "a cat and a dog"
    assert prediction.method is Method.END_TO_END
    assert prediction.outcome is None
    assert suite.vlm.call_counts["vqa"] == 1
    assert suite.vlm.total_calls == 1


def test_multiple_choice_scores_choices_against_the_template(tiny_world):
    question = "Which animal is black?"
    prompt = E2E_TEMPLATE.format(question)
    tiny_world["vlm_scores"] = [
        {"match": {"exact": prompt}, "continuations": {"cat": -0.2, "dog": -1.5}}
    ]
    suite = suite_from_world(tiny_world)
    prediction = run_end_to_end(
        make_instance(question, choices=["cat", "dog"]),
        suite,
        setting=EvaluationSetting.MULTIPLE_CHOICE,
    )
    assert prediction.answer_text == "cat"
    assert suite.vlm.call_counts["score"] == 1
    assert "vqa" not in suite.vlm.call_counts


def test_multiple_choice_requires_choices(tiny_suite):
    with pytest.raises(ValueError):
        run_end_to_end(
            make_instance("Which?"),
            tiny_suite,
            setting=EvaluationSetting.MULTIPLE_CHOICE,
        )


def test_empty_question_fails_before_any_backend_call(tiny_suite):
    instance = BenchmarkInstance(
        id="e2", image_ref="img", question="", answers=("x",), choices=None
    )
    with pytest.raises(ValueError):
        run_end_to_end(instance, tiny_suite)
    assert tiny_suite.vlm.total_calls == 0


def test_trace_records_the_backend_call(tiny_world):
    question = "What animal is shown?"
    tiny_world["scenes"][0]["scene_qa"][E2E_TEMPLATE.format(question)] = "a cat"
    suite = suite_from_world(tiny_world)
    prediction = run_end_to_end(make_instance(question), suite)
    calls = [e for e in prediction.trace if e.kind is TraceKind.BACKEND_CALL]
    assert len(calls) == 1
    assert calls[0].payload["op"] == "vqa"
