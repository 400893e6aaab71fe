"""Assembling backend suites from fixture files or remote URLs.

A mock world file is one JSON document:

    {
      "scenes": [ ...scene graphs... ],
      "code_lm": {"rules": [...], "scores": [...]},
      "instruct_lm": {"rules": [...], "scores": [...]},
      "vlm_scores": [ ...score rules for multiple-choice answering... ]
    }

Backend selectors on the command line are "mock:PATH" or "remote:URL".
"""

from __future__ import annotations

import json
from pathlib import Path

from .base import BackendSuite
from .cache import CallCache, CachedBackend
from .remote import RemoteBackend
from .scene import MockVLM, SceneGraph, SceneOracle
from .scripted import ScoreRule, ScriptedLM


def load_world(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as handle:
        return json.load(handle)


def suite_from_world(world: dict) -> BackendSuite:
    scenes = [SceneGraph.from_record(r) for r in world.get("scenes", ())]
    oracle = SceneOracle(scenes)
    vlm_scores = [ScoreRule.from_record(r) for r in world.get("vlm_scores", ())]
    scorer = ScriptedLM("vlm-scorer", scores=vlm_scores) if vlm_scores else None
    return BackendSuite(
        code_lm=ScriptedLM.from_record(world.get("code_lm", {}), "code-lm"),
        instruct_lm=ScriptedLM.from_record(world.get("instruct_lm", {}), "instruct-lm"),
        vlm=MockVLM(oracle, scorer),
        detector=oracle,
        depth=oracle,
        similarity=oracle,
    )


def mock_suite(path: str | Path) -> BackendSuite:
    return suite_from_world(load_world(path))


def remote_suite(base_url: str) -> BackendSuite:
    """All roles served by one gateway; role names keep cache keys apart."""
    def backend(role: str) -> RemoteBackend:
        return RemoteBackend(base_url, backend_id=f"remote-{role}")

    return BackendSuite(
        code_lm=backend("code-lm"),
        instruct_lm=backend("instruct-lm"),
        vlm=backend("vlm"),
        detector=backend("detector"),
        depth=backend("depth"),
        similarity=backend("similarity"),
    )


def suite_from_selector(selector: str) -> BackendSuite:
    kind, sep, rest = selector.partition(":")
    if not sep or not rest:
        raise ValueError(f"backend selector must look like mock:PATH or remote:URL, got {selector!r}")
    if kind == "mock":
        return mock_suite(rest)
    if kind == "remote":
        return remote_suite(rest)
    raise ValueError(f"unknown backend kind {kind!r} in selector {selector!r}")


def cached_suite(suite: BackendSuite, cache: CallCache | str | Path) -> BackendSuite:
    """Wrap every distinct backend once; shared roles stay shared.

    Accepts an existing CallCache so callers can read hit statistics
    after the run, or a directory to build one from.
    """
    if not isinstance(cache, CallCache):
        cache = CallCache(cache)
    wrapped = {id(b): CachedBackend(b, cache) for b in suite.unique_backends()}
    return BackendSuite(
        code_lm=wrapped[id(suite.code_lm)],
        instruct_lm=wrapped[id(suite.instruct_lm)],
        vlm=wrapped[id(suite.vlm)],
        detector=wrapped[id(suite.detector)],
        depth=wrapped[id(suite.depth)],
        similarity=wrapped[id(suite.similarity)],
    )
