import pytest

from vqdgate.engines import Completion, HashLM, HashVision, ScoredToken


def lm(seed=0):
    return HashLM(seed=seed)


def test_complete_is_deterministic_and_tokens_account_for_text():
    first = lm().complete("Say something:", max_tokens=24)
    second = lm().complete("Say something:", max_tokens=24)
    assert first == second
    assert "".join(t.text for t in first.tokens) == first.text
    assert all(t.byte_length == len(t.text.encode("utf-8")) for t in first.tokens)
    assert all(-8.0 <= t.logprob <= -0.05 for t in first.tokens)
    assert first.finish_reason == "length"
    assert len(first.tokens) == 24


def test_sentences_close_with_a_newline_within_a_short_budget():
    result = lm().complete("Describe the scene.", max_tokens=16)
    assert "\n" in result.text
    assert ".\n" in {t.text for t in result.tokens}


def test_different_prompts_and_seeds_give_different_text():
    a = lm().complete("prompt one", max_tokens=12)
    b = lm().complete("prompt two", max_tokens=12)
    c = lm(seed=9).complete("prompt one", max_tokens=12)
    assert a.text != b.text
    assert a.text != c.text


def test_newline_stop_truncates_at_a_token_straddle():
    free = lm().complete("Tell me:", max_tokens=30)
    stopped = lm().complete("Tell me:", max_tokens=30, stop=("\n",))
    cut = free.text.index("\n")
    assert stopped.text == free.text[:cut]
    assert "\n" not in stopped.text
    assert stopped.finish_reason == "stop"
    # the ".\n" terminator is resplit: its "." survives with the original logprob
    assert stopped.tokens[-1].text == "."
    assert stopped.tokens[-1].logprob == free.tokens[len(stopped.tokens) - 1].logprob
    assert stopped.tokens[-1].byte_length == 1


def test_stop_anywhere_in_generated_text_cuts_before_it():
    free = lm().complete("Tell me:", max_tokens=30)
    probe = free.text[len(free.text) // 2 : len(free.text) // 2 + 3]
    stopped = lm().complete("Tell me:", max_tokens=30, stop=(probe,))
    cut = free.text.index(probe)
    assert stopped.text == free.text[:cut]
    assert probe not in stopped.text
    assert "".join(t.text for t in stopped.tokens) == stopped.text


def test_earliest_of_several_stops_wins():
    free = lm().complete("Pick:", max_tokens=30)
    early = free.text[2:5]
    late = free.text[10:14]
    stopped = lm().complete("Pick:", max_tokens=30, stop=(late, early))
    assert stopped.text == free.text[: free.text.index(early)]


def test_zero_budget_yields_an_empty_length_completion():
    result = lm().complete("anything", max_tokens=0)
    assert result == Completion(text="", tokens=(), finish_reason="length")


def test_score_pieces_concatenate_and_stay_in_range():
    scored = lm().score("Is it? ", ["yes", "no they are not", "", " \n\t x"])
    assert len(scored) == 4
    for continuation, tokens in zip(["yes", "no they are not", "", " \n\t x"], scored):
        assert "".join(t.text for t in tokens) == continuation
        assert all(-8.0 <= t.logprob <= -0.05 for t in tokens)
    assert scored[2] == []
    assert len(scored[0]) == 1
    assert len(scored[1]) == 7  # four words, three separating spaces


def test_score_conditions_on_the_prompt():
    here = lm().score("Prompt A: ", ["the same words"])[0]
    there = lm().score("Prompt B: ", ["the same words"])[0]
    assert [t.text for t in here] == [t.text for t in there]
    assert [t.logprob for t in here] != [t.logprob for t in there]


def test_score_counts_bytes_not_characters():
    tokens = lm().score("say: ", ["café naïve…"])[0]
    assert "".join(t.text for t in tokens) == "café naïve…"
    for t in tokens:
        assert t.byte_length == len(t.text.encode("utf-8"))
    assert sum(t.byte_length for t in tokens) == len("café naïve…".encode("utf-8"))


def test_completion_rejects_mismatched_tokens():
    with pytest.raises(ValueError):
        Completion(text="ab", tokens=(ScoredToken("a", -1.0),), finish_reason="stop")
    with pytest.raises(ValueError):
        Completion(text="a", tokens=(ScoredToken("a", -1.0),), finish_reason="halt")


def vision(seed=0):
    return HashVision(seed=seed)


def test_detect_returns_sorted_positive_boxes_inside_the_canvas():
    for image in ("img-1", "img-2", "img-3"):
        boxes = vision().detect(image, "cat")
        assert boxes == vision().detect(image, "cat")
        assert 1 <= len(boxes) <= 3
        assert boxes == sorted(boxes)
        for x0, y0, x1, y1 in boxes:
            assert 0 <= x0 < x1 <= 100
            assert 0 <= y0 < y1 <= 100


def test_vqa_answers_are_stable_strings_keyed_by_region():
    whole = vision().vqa("img-9", "What is shown?")
    again = vision().vqa("img-9", "What is shown?")
    assert whole == again
    assert isinstance(whole, str) and whole
    boxed = vision().vqa("img-9", "What is shown?", (10.0, 10.0, 60.0, 60.0))
    assert isinstance(boxed, str) and boxed


def test_depth_and_similarity_stay_in_their_ranges():
    v = vision()
    assert 0.5 <= v.depth("img-4") <= 20.0
    assert v.depth("img-4") == v.depth("img-4")
    assert v.depth("img-4") != v.depth("img-4", (0.0, 0.0, 10.0, 10.0))
    scores = v.similarity("img-4", None, ["black", "striped", "tiny"])
    assert len(scores) == 3
    assert all(0.0 <= s < 1.0 for s in scores)
    assert scores == v.similarity("img-4", None, ["black", "striped", "tiny"])
