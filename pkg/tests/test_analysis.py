import pytest

from vqdbench.analysis import (
    SUMMARY_CLASSES,
    SUMMARY_OK,
    SUMMARY_PARSING,
    SUMMARY_RUNTIME,
    breakdown_by_type,
    classify_outcome,
    render_breakdown_table,
    render_summary_table,
    runtime_breakdown,
    summarize,
)
from vqdbench.progeng import ERROR_LABELS, ExecutionOutcome, OutcomeStatus


def ok():
    return ExecutionOutcome(status=OutcomeStatus.OK, result="x")


def runtime(label):
    return ExecutionOutcome(status=OutcomeStatus.RUNTIME_ERROR, error_label=label)


def parse(label="SyntaxError"):
    return ExecutionOutcome(status=OutcomeStatus.PARSE_ERROR, parse_label=label)


def test_classify_outcome():
    assert classify_outcome(ok()) == SUMMARY_OK
    assert classify_outcome(parse()) == SUMMARY_PARSING
    assert classify_outcome(parse("IndentationError")) == SUMMARY_PARSING
    assert classify_outcome(runtime("NameError")) == SUMMARY_RUNTIME


def test_summarize_percentages_and_always_all_classes():
    outcomes = [ok()] * 7 + [parse()] * 2 + [runtime("TypeError")]
    table = summarize(outcomes)
    assert table == {SUMMARY_OK: 70.0, SUMMARY_PARSING: 20.0, SUMMARY_RUNTIME: 10.0}
    only_ok = summarize([ok()])
    assert set(only_ok) == set(SUMMARY_CLASSES)
    assert only_ok[SUMMARY_RUNTIME] == 0.0
    with pytest.raises(ValueError):
        summarize([])


def test_indentation_counts_as_parsing_in_summary_but_has_its_own_row():
    outcomes = [parse("IndentationError"), runtime("NameError")]
    summary = summarize(outcomes)
    assert summary[SUMMARY_PARSING] == 50.0
    breakdown = runtime_breakdown(outcomes)
    assert breakdown["IndentationError"] == 50.0
    assert breakdown["NameError"] == 50.0


def test_plain_syntax_errors_stay_out_of_the_breakdown():
    outcomes = [parse("SyntaxError"), runtime("KeyError")]
    breakdown = runtime_breakdown(outcomes)
    assert breakdown["KeyError"] == 100.0


def test_breakdown_population_excludes_successes():
    outcomes = [ok()] * 8 + [runtime("NameError"), runtime("TypeError")]
    breakdown = runtime_breakdown(outcomes)
    assert breakdown["NameError"] == 50.0
    assert breakdown["TypeError"] == 50.0
    assert breakdown["Other"] == 0.0
    assert tuple(breakdown) == ERROR_LABELS


def test_breakdown_of_no_failures_is_empty():
    assert runtime_breakdown([ok(), ok()]) == {}


def test_breakdown_by_type_filters_and_sorts():
    pairs = (
        [("easy", ok()) for _ in range(4)]
        + [("flaky", runtime("NameError")), ("flaky", ok())]
        + [("broken", parse()), ("broken", runtime("TypeError"))]
        + [("rare", runtime("KeyError"))]
    )
    tables = breakdown_by_type(pairs, min_count=2)
    assert list(tables) == ["broken", "flaky", "easy"]
    assert tables["broken"][SUMMARY_PARSING] == 50.0
    dropped = breakdown_by_type(pairs, min_count=2, min_failure_pct=40.0)
    assert list(dropped) == ["broken", "flaky"]
    assert breakdown_by_type(pairs, min_count=5) == {}


def test_render_summary_table_shape():
    table = {SUMMARY_OK: 87.0, SUMMARY_PARSING: 3.0, SUMMARY_RUNTIME: 10.0}
    text = render_summary_table([("viper/task-agnostic", table)])
    lines = text.split("\n")
    assert lines[0].strip() == "viper/task-agnostic"
    assert lines[1].startswith("No Exception")
    assert lines[1].endswith("87%")
    assert lines[2].endswith("3%")
    assert lines[3].endswith("10%")


def test_render_rounds_to_whole_percent():
    table = {SUMMARY_OK: 87.4, SUMMARY_PARSING: 2.5, SUMMARY_RUNTIME: 10.1}
    text = render_summary_table([("run", table)])
    assert "87%" in text
    # Banker's rounding: 2.5 rounds to 2.
    assert " 2%" in text
    assert "10%" in text


def test_render_multiple_columns_align():
    a = {SUMMARY_OK: 100.0, SUMMARY_PARSING: 0.0, SUMMARY_RUNTIME: 0.0}
    b = {SUMMARY_OK: 50.0, SUMMARY_PARSING: 25.0, SUMMARY_RUNTIME: 25.0}
    text = render_summary_table([("first", a), ("second", b)])
    lines = text.split("\n")
    assert all(len(line) <= len(lines[0]) + 6 for line in lines)
    assert "first" in lines[0] and "second" in lines[0]
    with pytest.raises(ValueError):
        render_summary_table([])


def test_render_breakdown_lists_every_label():
    table = runtime_breakdown([runtime("NameError")])
    text = render_breakdown_table([("run", table)])
    for label in ERROR_LABELS:
        assert label in text
    assert "100%" in text
