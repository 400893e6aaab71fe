import json

from vqdbench.backends import (
    CallCache,
    CompletionRule,
    MatchRule,
    OP_COMPLETE,
    ScriptedLM,
    cached,
    token,
)
from vqdbench.backends.base import Completion


def make_lm(backend_id="lm"):
    completion = Completion(text=" out", tokens=(token(" out", -0.5),))
    return ScriptedLM(backend_id, completions=[CompletionRule(MatchRule(), completion)])


def test_miss_then_hit(tmp_path):
    cache = CallCache(tmp_path)
    lm = make_lm()
    wrapped = cached(lm, cache)
    first = wrapped.call(OP_COMPLETE, {"prompt": "p"})
    second = wrapped.call(OP_COMPLETE, {"prompt": "p"})
    assert first == second
    assert lm.total_calls == 1
    assert cache.stats() == {"hits": 1, "misses": 1, "corrupt": 0}


def test_cache_survives_process_boundary(tmp_path):
    lm = make_lm()
    cached(lm, CallCache(tmp_path)).call(OP_COMPLETE, {"prompt": "p"})
    # New cache object over the same directory: still a hit, inner untouched.
    fresh_lm = make_lm()
    rewrapped = cached(fresh_lm, CallCache(tmp_path))
    rewrapped.call(OP_COMPLETE, {"prompt": "p"})
    assert fresh_lm.total_calls == 0


def test_keys_separate_backend_op_and_request(tmp_path):
    cache = CallCache(tmp_path)
    a = cached(make_lm("a"), cache)
    b = cached(make_lm("b"), cache)
    a.call(OP_COMPLETE, {"prompt": "p"})
    b.call(OP_COMPLETE, {"prompt": "p"})
    a.call(OP_COMPLETE, {"prompt": "q"})
    assert cache.stats()["misses"] == 3
    assert cache.stats()["hits"] == 0


def test_key_ignores_request_key_order(tmp_path):
    cache = CallCache(tmp_path)
    wrapped = cached(make_lm(), cache)
    k1 = wrapped.cache_key(OP_COMPLETE, {"prompt": "p", "max_tokens": 4})
    k2 = wrapped.cache_key(OP_COMPLETE, {"max_tokens": 4, "prompt": "p"})
    assert k1 == k2


def test_corrupt_entry_is_a_miss_and_gets_repaired(tmp_path):
    cache = CallCache(tmp_path)
    lm = make_lm()
    wrapped = cached(lm, cache)
    wrapped.call(OP_COMPLETE, {"prompt": "p"})

    key = wrapped.cache_key(OP_COMPLETE, {"prompt": "p"})
    entry_path = tmp_path / key[:2] / f"{key}.json"
    entry_path.write_text("{ not json", encoding="utf-8")

    response = wrapped.call(OP_COMPLETE, {"prompt": "p"})
    assert response["text"] == " out"
    assert lm.total_calls == 2
    assert cache.stats()["corrupt"] == 1
    # Entry rewritten and valid again.
    entry = json.loads(entry_path.read_text(encoding="utf-8"))
    assert entry["response"]["text"] == " out"


def test_checksum_mismatch_counts_as_corrupt(tmp_path):
    cache = CallCache(tmp_path)
    wrapped = cached(make_lm(), cache)
    wrapped.call(OP_COMPLETE, {"prompt": "p"})
    key = wrapped.cache_key(OP_COMPLETE, {"prompt": "p"})
    entry_path = tmp_path / key[:2] / f"{key}.json"
    entry = json.loads(entry_path.read_text(encoding="utf-8"))
    entry["response"]["text"] = " tampered"
    entry_path.write_text(json.dumps(entry), encoding="utf-8")

    response = wrapped.call(OP_COMPLETE, {"prompt": "p"})
    assert response["text"] == " out"
    assert cache.stats()["corrupt"] == 1


def test_wrapper_preserves_identity_and_op_gate(tmp_path):
    lm = make_lm("inner-id")
    wrapped = cached(lm, tmp_path / "cache")
    assert wrapped.backend_id == "inner-id"
    assert wrapped.ops == lm.ops
