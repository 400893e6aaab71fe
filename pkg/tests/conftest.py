import json
from pathlib import Path

import pytest

from vqdbench.backends import suite_from_world

REPO_ROOT = Path(__file__).resolve().parent.parent
FIXTURES = REPO_ROOT / "fixtures"

_acceptance_results: list[tuple[str, str]] = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        _acceptance_results.append((name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL':4s} {name}")


@pytest.fixture(scope="session")
def demo_world() -> dict:
    return json.loads((FIXTURES / "world.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def demo_dataset_path() -> Path:
    return FIXTURES / "scene_vqa.jsonl"


@pytest.fixture(scope="session")
def demo_mc_dataset_path() -> Path:
    return FIXTURES / "scene_mc.jsonl"


@pytest.fixture()
def demo_suite(demo_world):
    return suite_from_world(demo_world)


@pytest.fixture()
def tiny_world() -> dict:
    """One 100x100 scene: a black cat and a brown dog, plus scripted LMs."""
    return {
        "scenes": [
            {
                "image_ref": "img",
                "width": 100,
                "height": 100,
                "objects": [
                    {"id": 0, "category": "cat", "box": [10, 10, 60, 60],
                     "attributes": ["black"], "depth": 2.5},
                    {"id": 1, "category": "dog", "box": [65, 20, 95, 70],
                     "attributes": ["brown"], "depth": 4.0},
                ],
                "scene_qa": {"What animal is shown?": "a cat and a dog"},
                "patch_qa": [
                    {"object_id": 0, "question": "What color is the cat?",
                     "answer": "black"},
                ],
                "caption": "a cat and a dog",
            }
        ],
        "code_lm": {"rules": [], "scores": []},
        "instruct_lm": {"rules": [], "scores": []},
    }


@pytest.fixture()
def tiny_suite(tiny_world):
    return suite_from_world(tiny_world)
