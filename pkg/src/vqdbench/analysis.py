"""Failure analysis over program execution outcomes.

Two views of the same outcomes:

- a summary splitting instances into No Exception / Parsing / Runtime,
  where indentation problems count as Parsing because the host language
  classifies them as syntax;
- a runtime breakdown over the failed executions only, where
  indentation problems get their own row alongside the runtime labels,
  matching how practitioners eyeball tracebacks.

Percentages are kept at full precision here; the render helpers round
to whole percents for display.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable, Mapping, Sequence

from .progeng.outcome import ERROR_LABELS, ExecutionOutcome, OutcomeStatus

SUMMARY_OK = "No Exception"
SUMMARY_PARSING = "Parsing"
SUMMARY_RUNTIME = "Runtime"
SUMMARY_CLASSES = (SUMMARY_OK, SUMMARY_PARSING, SUMMARY_RUNTIME)

INDENTATION_LABEL = "IndentationError"


def classify_outcome(outcome: ExecutionOutcome) -> str:
    """Summary class of one outcome."""
    if outcome.status is OutcomeStatus.OK:
        return SUMMARY_OK
    if outcome.status is OutcomeStatus.PARSE_ERROR:
        return SUMMARY_PARSING
    return SUMMARY_RUNTIME


def summarize(outcomes: Sequence[ExecutionOutcome]) -> dict[str, float]:
    """Percentage of instances per summary class; classes always present."""
    if not outcomes:
        raise ValueError("cannot summarize zero outcomes")
    counts = Counter(classify_outcome(o) for o in outcomes)
    total = len(outcomes)
    return {cls: 100.0 * counts.get(cls, 0) / total for cls in SUMMARY_CLASSES}


def _breakdown_label(outcome: ExecutionOutcome) -> str | None:
    """Row label in the runtime breakdown, or None if the outcome is
    outside its population (successes and plain syntax errors)."""
    if outcome.status is OutcomeStatus.RUNTIME_ERROR:
        return outcome.error_label
    if (
        outcome.status is OutcomeStatus.PARSE_ERROR
        and outcome.parse_label == INDENTATION_LABEL
    ):
        return INDENTATION_LABEL
    return None


def runtime_breakdown(outcomes: Sequence[ExecutionOutcome]) -> dict[str, float]:
    """Percentage per error label over the failed executions.

    The population is every runtime failure plus indentation failures;
    an empty population yields an empty table.
    """
    labels = [lab for lab in map(_breakdown_label, outcomes) if lab is not None]
    if not labels:
        return {}
    counts = Counter(labels)
    total = len(labels)
    return {label: 100.0 * counts.get(label, 0) / total for label in ERROR_LABELS}


def breakdown_by_type(
    pairs: Iterable[tuple[str, ExecutionOutcome]],
    *,
    min_count: int = 50,
    min_failure_pct: float = 0.0,
) -> dict[str, dict[str, float]]:
    """Summary per question type, keeping types with enough instances.

    Types with fewer than min_count outcomes or with a combined failure
    percentage below min_failure_pct are dropped. Types come back sorted
    by failure percentage, worst first, ties alphabetical.
    """
    by_type: dict[str, list[ExecutionOutcome]] = {}
    for qtype, outcome in pairs:
        by_type.setdefault(qtype, []).append(outcome)
    rows: list[tuple[float, str, dict[str, float]]] = []
    for qtype, outcomes in by_type.items():
        if len(outcomes) < min_count:
            continue
        table = summarize(outcomes)
        failure = table[SUMMARY_PARSING] + table[SUMMARY_RUNTIME]
        if failure < min_failure_pct:
            continue
        rows.append((failure, qtype, table))
    rows.sort(key=lambda row: (-row[0], row[1]))
    return {qtype: table for _failure, qtype, table in rows}


def _render_table(
    row_labels: Sequence[str],
    columns: Sequence[tuple[str, Mapping[str, float]]],
) -> str:
    """Fixed-row percentage table with one column per run."""
    if not columns:
        raise ValueError("need at least one column")
    header = [""] + [name for name, _ in columns]
    body = [
        [label] + [f"{round(table.get(label, 0.0))}%" for _, table in columns]
        for label in row_labels
    ]
    widths = [
        max(len(row[i]) for row in [header] + body) for i in range(len(header))
    ]
    lines = []
    for row in [header] + body:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(widths[i + 1]) for i, cell in enumerate(row[1:])]
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines)


def render_summary_table(columns: Sequence[tuple[str, Mapping[str, float]]]) -> str:
    return _render_table(SUMMARY_CLASSES, columns)


def render_breakdown_table(columns: Sequence[tuple[str, Mapping[str, float]]]) -> str:
    return _render_table(ERROR_LABELS, columns)
