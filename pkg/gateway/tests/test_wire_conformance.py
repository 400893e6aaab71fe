"""The shared black-box protocol suite, run over real HTTP.

The same checks that gate the benchmark's in-process mocks must pass
against this service byte-for-byte: response shapes, token accounting,
stop handling, ordering, and determinism. The suite talks to a live
uvicorn server through the benchmark's own remote client, so the whole
client-wire-server path is under test, not the app object.
"""

import json

import pytest
import requests

from vqdbench.backends import suite_from_world
from vqdbench.backends.base import TransportError
from vqdbench.backends.conformance import conformance_world, run_protocol_checks
from vqdbench.backends.remote import RemoteBackend
from vqdbench.cli import EXIT_OK, main
from vqdbench.report import canonicalize_report, load_report

TEXT_OPS = ("complete", "score")
VISION_OPS = ("vqa", "detect", "depth", "similarity")


def mock_failures():
    suite = suite_from_world(conformance_world())
    failures = []
    failures += run_protocol_checks(suite.instruct_lm.call, ops=TEXT_OPS)
    failures += run_protocol_checks(suite.code_lm.call, ops=TEXT_OPS)
    failures += run_protocol_checks(suite.vlm.call, ops=("vqa", "score"))
    failures += run_protocol_checks(suite.detector.call, ops=VISION_OPS)
    return failures


def test_gateway_passes_the_protocol_suite_exactly_like_the_mocks(live_gateway):
    remote = RemoteBackend(live_gateway, attempts=1)
    assert run_protocol_checks(remote.call) == []
    assert mock_failures() == []


def test_protocol_suite_still_passes_with_bearer_auth_on(live_gateway, monkeypatch):
    monkeypatch.setenv("VQDBENCH_GATEWAY_TOKEN", "open-sesame")
    remote = RemoteBackend(live_gateway, attempts=1)
    assert run_protocol_checks(remote.call) == []


def test_unauthenticated_requests_are_rejected_with_401(live_gateway, monkeypatch):
    monkeypatch.setenv("VQDBENCH_GATEWAY_TOKEN", "open-sesame")
    bare = requests.post(
        f"{live_gateway}/v1/depth", json={"image_ref": "img"}, timeout=10
    )
    assert bare.status_code == 401

    # a client that cannot find the token reports transport trouble
    silent = RemoteBackend(live_gateway, attempts=1, token_env_var="NO_SUCH_TOKEN_VAR")
    with pytest.raises(TransportError, match="HTTP 401"):
        silent.call("depth", {"image_ref": "img"})

    aware = RemoteBackend(live_gateway, attempts=1)
    assert aware.call("depth", {"image_ref": "img"})["depth"] >= 0


def test_benchmark_cli_runs_against_the_gateway(live_gateway, tmp_path):
    dataset = tmp_path / "toy.jsonl"
    rows = [
        {"id": f"q{i}", "image_ref": f"img-{i}", "question": "What is on the table?", "answers": ["a red bowl"] * 4}
        for i in range(3)
    ]
    dataset.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")

    def run(name):
        out = tmp_path / name
        code = main(
            [
                "run",
                "--method", "e2e",
                "--dataset", str(dataset),
                "--backends", f"remote:{live_gateway}",
                "--cache", str(tmp_path / f"cache-{name}"),
                "--out", str(out),
            ]
        )
        assert code == EXIT_OK
        return load_report(out)

    first = run("first.json")
    second = run("second.json")
    assert first["aggregates"]["instances"] == 3
    assert canonicalize_report(first) == canonicalize_report(second)
