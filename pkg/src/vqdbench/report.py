"""Run reports: per-instance scores, aggregates, and failure tables.

A report is a plain JSON document. Everything timing- or host-dependent
lives under the "meta" key, so two runs over the same inputs compare
equal after canonicalization no matter when or where they ran.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Sequence

from .analysis import breakdown_by_type, runtime_breakdown, summarize
from .backends import BackendSuite, canonical_json
from .metrics import exact_match, llm_judge, mc_accuracy, vqa_accuracy
from .progeng.outcome import ExecutionOutcome
from .types import BenchmarkInstance, EvaluationSetting, Prediction, RunConfig

REPORT_SCHEMA = "vqdbench/run-report/v1"

_NOTES = (
    "Soft accuracy is min(1, matches/3): three agreeing annotators saturate "
    "the score, and the clamp keeps extra agreement from exceeding 1.",
    "No Exception means the program ran to completion, not that its answer "
    "was correct.",
)

_CSV_COLUMNS = (
    "id",
    "question_type",
    "answer_text",
    "vqa_accuracy",
    "exact_match",
    "mc_correct",
    "judge_correct",
    "outcome_class",
)


def correct_choice_index(instance: BenchmarkInstance) -> int | None:
    """Index of the annotated answer within the choice list, if it is one."""
    if not instance.choices or not instance.answers:
        return None
    try:
        return instance.choices.index(instance.answers[0])
    except ValueError:
        return None


def score_prediction(
    instance: BenchmarkInstance,
    prediction: Prediction,
    setting: EvaluationSetting,
    *,
    judge_suite: BackendSuite | None = None,
) -> dict[str, Any]:
    """Scores for one answered instance; unresolvable fields are None."""
    scores: dict[str, Any] = {}
    if setting is EvaluationSetting.MULTIPLE_CHOICE:
        index = correct_choice_index(instance)
        if index is None or prediction.answer_text not in (instance.choices or ()):
            scores["mc_correct"] = None
        else:
            scores["mc_correct"] = mc_accuracy(
                prediction.answer_text, instance.choices, index
            )
        return scores
    scores["vqa_accuracy"] = vqa_accuracy(prediction.answer_text, instance.answers)
    scores["exact_match"] = exact_match(prediction.answer_text, instance.answers[0])
    if judge_suite is not None:
        verdict = llm_judge(
            judge_suite.instruct_lm,
            instance.question,
            instance.answers,
            prediction.answer_text,
        )
        scores["judge_correct"] = int(verdict.correct)
    return scores


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def aggregate_scores(rows: Sequence[dict[str, Any]]) -> dict[str, Any]:
    """Mean of each numeric score over the rows where it resolved."""
    keys = ("vqa_accuracy", "exact_match", "mc_correct", "judge_correct")
    out: dict[str, Any] = {"instances": len(rows)}
    for key in keys:
        values = [float(r[key]) for r in rows if r.get(key) is not None]
        if values:
            out[key] = _mean(values)
            out[f"{key}_scored"] = len(values)
    return out


def build_report(
    config: RunConfig,
    instances: Sequence[BenchmarkInstance],
    predictions: Sequence[Prediction],
    *,
    judge_suite: BackendSuite | None = None,
    backend_calls: dict[str, dict[str, int]] | None = None,
    cache_stats: dict[str, int] | None = None,
    started_at: float | None = None,
    finished_at: float | None = None,
) -> dict[str, Any]:
    """Assemble the full report document for one run."""
    by_id = {p.instance_id: p for p in predictions}
    missing = [i.id for i in instances if i.id not in by_id]
    if missing:
        raise ValueError(f"no prediction for instance(s): {', '.join(missing[:5])}")
    rows: list[dict[str, Any]] = []
    outcomes: list[tuple[str, ExecutionOutcome]] = []
    for instance in instances:
        prediction = by_id[instance.id]
        row: dict[str, Any] = {
            "id": instance.id,
            "question_type": instance.question_type,
            "answer_text": prediction.answer_text,
        }
        if prediction.outcome_class is not None:
            row["outcome_class"] = prediction.outcome_class
        row.update(
            score_prediction(instance, prediction, config.setting, judge_suite=judge_suite)
        )
        rows.append(row)
        if isinstance(prediction.outcome, ExecutionOutcome):
            outcomes.append((instance.question_type, prediction.outcome))
    report: dict[str, Any] = {
        "schema": REPORT_SCHEMA,
        "config": config.to_record(),
        "instances": rows,
        "aggregates": aggregate_scores(rows),
        "notes": list(_NOTES),
        "meta": {
            "started_at": started_at,
            "finished_at": finished_at,
            "backend_calls": backend_calls or {},
            "cache": cache_stats,
        },
    }
    if outcomes:
        outcome_list = [o for _, o in outcomes]
        report["error_summary"] = summarize(outcome_list)
        report["runtime_breakdown"] = runtime_breakdown(outcome_list)
        report["type_breakdown"] = breakdown_by_type(outcomes, min_count=1)
    return report


_EXECUTION_ONLY_CONFIG = ("cache_dir", "jobs")


def canonicalize_report(report: dict[str, Any]) -> str:
    """Canonical JSON of the run-dependent-free view of a report.

    Strips meta plus config knobs that control execution but never
    results (caching, parallelism); everything left is a pure function
    of dataset, config, and backend behavior, so equal runs canonicalize
    identically.
    """
    stripped = {k: v for k, v in report.items() if k != "meta"}
    if isinstance(stripped.get("config"), dict):
        stripped["config"] = {
            k: v
            for k, v in stripped["config"].items()
            if k not in _EXECUTION_ONLY_CONFIG
        }
    return canonical_json(stripped)


def write_report(report: dict[str, Any], path: Path | str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def load_report(path: Path | str) -> dict[str, Any]:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_scores_csv(report: dict[str, Any], path: Path | str) -> None:
    """Per-instance score sidecar with a stable column set."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = report.get("instances", [])
    present = [
        col for col in _CSV_COLUMNS if any(col in row for row in rows)
    ] or list(_CSV_COLUMNS[:3])
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=present, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({col: row.get(col, "") for col in present})
