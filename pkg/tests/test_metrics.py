import random
import string

import pytest

from vqdbench.backends import MatchRule, ScoreRule, ScriptedLM, token
from vqdbench.metrics import (
    JUDGE_TEMPLATE,
    exact_match,
    llm_judge,
    mc_accuracy,
    normalize_answer,
    vqa_accuracy,
)


@pytest.mark.parametrize(
    "raw,expected",
    [
        ("A Cat.", "cat"),
        ("  the  BLUE   mug!? ", "blue mug"),
        ("two", "2"),
        ("The Two Towers", "2 towers"),
        ("ten", "10"),
        ("eleven", "eleven"),
        ("", ""),
        ("a", ""),
        ("an apple a day", "apple a day"),
        ("no.", "no"),
        ("3.5", "3.5"),
    ],
)
def test_normalize_answer_cases(raw, expected):
    assert normalize_answer(raw) == expected


def test_normalize_answer_is_idempotent_on_random_strings():
    alphabet = string.ascii_letters + string.digits + " .,;:!?'\"-"
    rng = random.Random(11)
    for _ in range(500):
        s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 30)))
        once = normalize_answer(s)
        assert normalize_answer(once) == once


def test_vqa_accuracy_clamps_at_three_matches():
    answers = ["cat"] * 5 + ["dog"] * 5
    assert vqa_accuracy("cat", answers[:1]) == pytest.approx(1 / 3)
    assert vqa_accuracy("cat", answers[:2]) == pytest.approx(2 / 3)
    assert vqa_accuracy("cat", answers[:3]) == 1.0
    assert vqa_accuracy("cat", answers) == 1.0
    assert vqa_accuracy("bird", answers) == 0.0


def test_vqa_accuracy_normalization_toggle():
    assert vqa_accuracy("The Cat.", ["cat", "cat", "cat"]) == 1.0
    assert vqa_accuracy("The Cat.", ["cat", "cat", "cat"], normalize=False) == 0.0


def test_vqa_accuracy_requires_answers():
    with pytest.raises(ValueError):
        vqa_accuracy("x", [])


def test_exact_match_toggle():
    assert exact_match("A dog!", "dog") == 1
    assert exact_match("A dog!", "dog", normalize=False) == 0


def test_mc_accuracy_checks_membership_and_range():
    assert mc_accuracy("b", ["a", "b"], 1) == 1
    assert mc_accuracy("a", ["a", "b"], 1) == 0
    with pytest.raises(ValueError):
        mc_accuracy("c", ["a", "b"], 0)
    with pytest.raises(ValueError):
        mc_accuracy("a", ["a", "b"], 2)


def judge_lm(yes, no, expected_prompt=None):
    match = MatchRule(exact=expected_prompt) if expected_prompt else MatchRule()
    table = {"yes": (token("yes", yes),), "no": (token("no", no),)}
    return ScriptedLM(scores=[ScoreRule(match, table)])


def test_llm_judge_prompt_shape_and_verdict():
    prompt = JUDGE_TEMPLATE.format("What color?", "blue", "light blue")
    lm = judge_lm(-0.2, -2.0, expected_prompt=prompt)
    result = llm_judge(lm, "What color?", ["blue"], "light blue")
    assert result.correct
    assert result.yes_score > result.no_score


def test_llm_judge_joins_distinct_answers_with_or():
    prompt = JUDGE_TEMPLATE.format("Q", "blue or navy", "x")
    lm = judge_lm(-3.0, -0.1, expected_prompt=prompt)
    result = llm_judge(lm, "Q", ["blue", "navy", "blue"], "x")
    assert not result.correct


def test_llm_judge_tie_reads_as_incorrect():
    result = llm_judge(judge_lm(-1.0, -1.0), "Q", ["a"], "b")
    assert not result.correct


def test_llm_judge_normalize_flag_rewrites_strings():
    prompt = JUDGE_TEMPLATE.format("Q", "blue", "cat")
    lm = judge_lm(-0.1, -1.0, expected_prompt=prompt)
    result = llm_judge(lm, "Q", ["The Blue."], "A Cat!", normalize=True)
    assert result.correct


def test_llm_judge_requires_answers():
    with pytest.raises(ValueError):
        llm_judge(judge_lm(-1, -1), "Q", [], "x")
