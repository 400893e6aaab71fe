from vqdbench.types import (
    BenchmarkInstance,
    DecodingParams,
    EvaluationSetting,
    Trace,
    TraceKind,
    ordered_unique,
)


def make_instance(**overrides):
    fields = dict(
        id="q1",
        image_ref="img",
        question="Is there a cat?",
        answers=("yes",),
        choices=None,
        question_type="verify",
        split="test",
    )
    fields.update(overrides)
    return BenchmarkInstance(**fields)


def test_valid_direct_instance_has_no_violations():
    assert make_instance().violations(EvaluationSetting.DIRECT_ANSWER) == []


def test_direct_answer_requires_annotations():
    inst = make_instance(answers=())
    problems = inst.violations(EvaluationSetting.DIRECT_ANSWER)
    assert any("answer" in p for p in problems)


def test_answer_annotation_cap():
    inst = make_instance(answers=tuple(str(i) for i in range(11)))
    problems = inst.violations(EvaluationSetting.DIRECT_ANSWER)
    assert any("10" in p for p in problems)


def test_multiple_choice_requires_choices():
    inst = make_instance(choices=None)
    problems = inst.violations(EvaluationSetting.MULTIPLE_CHOICE)
    assert any("choice" in p for p in problems)


def test_choices_must_be_distinct():
    inst = make_instance(choices=("a", "a"))
    problems = inst.violations(EvaluationSetting.MULTIPLE_CHOICE)
    assert any("distinct" in p for p in problems)


def test_choices_must_be_at_least_two():
    inst = make_instance(choices=("a",))
    problems = inst.violations(EvaluationSetting.MULTIPLE_CHOICE)
    assert problems


def test_empty_fields_are_violations():
    inst = make_instance(id="", image_ref="", question="")
    problems = inst.violations(EvaluationSetting.DIRECT_ANSWER)
    assert len(problems) >= 3


def test_trace_sequence_is_strictly_increasing():
    trace = Trace()
    events = [trace.record(TraceKind.ENGINE_DECISION, n=i) for i in range(5)]
    assert [e.seq for e in events] == [0, 1, 2, 3, 4]
    assert all(e.payload["t"] > 0 for e in events)


def test_trace_of_kind_filters():
    trace = Trace()
    trace.record(TraceKind.BACKEND_CALL, op="vqa")
    trace.record(TraceKind.ENGINE_DECISION, decision="x")
    trace.record(TraceKind.BACKEND_CALL, op="detect")
    assert len(trace.of_kind(TraceKind.BACKEND_CALL)) == 2


def test_decoding_with_stop_replaces_only_stop():
    params = DecodingParams()
    stopped = params.with_stop("\n", "###")
    assert stopped.stop == ("\n", "###")
    assert stopped.beam_width == params.beam_width
    assert params.stop == ()


def test_instance_round_trips_through_record():
    inst = make_instance(choices=("a", "b"))
    record = inst.to_record()
    assert record["choices"] == ["a", "b"]
    assert record["answers"] == ["yes"]


def test_ordered_unique_keeps_first_occurrence():
    assert ordered_unique(["b", "a", "b", "c", "a"]) == ["b", "a", "c"]
