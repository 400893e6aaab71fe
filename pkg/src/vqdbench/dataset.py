"""Dataset loading, validation, and reproducible subsampling.

Datasets are UTF-8 JSON Lines files, one record per line. Subsampling uses
a fully specified PRNG (SplitMix64) plus a partial Fisher-Yates shuffle so
that selections can be reproduced bit-for-bit in any language.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Sequence

from .types import BenchmarkInstance, DatasetError, EvaluationSetting

_STRING_FIELDS = ("id", "image_ref", "question")


def _instance_from_record(record: dict, line: int) -> BenchmarkInstance:
    if not isinstance(record, dict):
        raise DatasetError("record must be a JSON object", line)
    for name in _STRING_FIELDS:
        if name not in record:
            raise DatasetError(f"missing required field {name!r}", line)
        if not isinstance(record[name], str):
            raise DatasetError(f"field {name!r} must be a string", line)
    answers = record.get("answers", [])
    if not isinstance(answers, list) or any(not isinstance(a, str) for a in answers):
        raise DatasetError("field 'answers' must be a list of strings", line)
    choices = record.get("choices")
    if choices is not None:
        if not isinstance(choices, list) or any(not isinstance(c, str) for c in choices):
            raise DatasetError("field 'choices' must be a list of strings", line)
        choices = tuple(choices)
    question_type = record.get("question_type")
    if question_type is not None and not isinstance(question_type, str):
        raise DatasetError("field 'question_type' must be a string", line)
    split = record.get("split", "")
    if not isinstance(split, str):
        raise DatasetError("field 'split' must be a string", line)
    return BenchmarkInstance(
        id=record["id"],
        image_ref=record["image_ref"],
        question=record["question"],
        answers=tuple(answers),
        choices=choices,
        question_type=question_type,
        split=split,
    )


def load_dataset(
    path: str | Path,
    setting: EvaluationSetting | None = None,
) -> list[BenchmarkInstance]:
    """Load and validate a JSONL dataset, preserving file order.

    Any malformed line raises DatasetError naming the 1-based line number.
    When ``setting`` is given, setting-specific invariants are enforced too
    (answers required for direct-answer, choices for multiple-choice).
    """
    instances: list[BenchmarkInstance] = []
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            text = raw.strip()
            if not text:
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DatasetError(f"invalid JSON ({exc.msg})", line_no) from exc
            instance = _instance_from_record(record, line_no)
            problems = instance.violations(setting)
            if problems:
                raise DatasetError("; ".join(problems), line_no)
            instances.append(instance)
    return instances


def scan_dataset(
    path: str | Path,
    setting: EvaluationSetting | None = None,
) -> tuple[list[str], list[str]]:
    """Collect (violations, warnings) across a whole file without stopping.

    Unlike load_dataset this keeps going after the first bad line, so the
    validate command can list everything at once. Duplicate ids are warnings,
    not violations.
    """
    violations: list[str] = []
    warnings: list[str] = []
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, raw in enumerate(handle, start=1):
            text = raw.strip()
            if not text:
                continue
            try:
                record = json.loads(text)
                instance = _instance_from_record(record, line_no)
            except (json.JSONDecodeError, DatasetError) as exc:
                msg = exc.msg if isinstance(exc, json.JSONDecodeError) else str(exc)
                if not msg.startswith("line "):
                    msg = f"line {line_no}: {msg}"
                violations.append(msg)
                continue
            for problem in instance.violations(setting):
                violations.append(f"line {line_no}: {problem}")
            if instance.id in seen_ids:
                warnings.append(f"line {line_no}: duplicate id {instance.id!r}")
            seen_ids.add(instance.id)
    return violations, warnings


def write_dataset(path: str | Path, instances: Iterable[BenchmarkInstance]) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for instance in instances:
            handle.write(json.dumps(instance.to_record(), ensure_ascii=False) + "\n")


_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64 PRNG (Steele, Lea, Flood 2014), 64-bit state.

    next_u64: state  = (state + 0x9E3779B97F4A7C15) mod 2^64
              z      = state
              z      = (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
              z      = (z XOR (z >> 27)) * 0x94D049BB133111EB mod 2^64
              return  z XOR (z >> 31)
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def below(self, bound: int) -> int:
        """Uniform draw in [0, bound) by rejection, no modulo bias.

        Draws are rejected while they fall in the truncated remainder zone
        [2^64 - (2^64 mod bound), 2^64).
        """
        if bound <= 0:
            raise ValueError("bound must be positive")
        limit = _MASK64 + 1 - ((_MASK64 + 1) % bound)
        while True:
            draw = self.next_u64()
            if draw < limit:
                return draw % bound


def sample_indices(population: int, n: int, seed: int) -> list[int]:
    """First n positions of a Fisher-Yates shuffle of range(population).

    Swap i (for i = 0 .. n-1) with index i + rng.below(population - i); the
    prefix arr[:n] is the sample, in selection order.
    """
    if n < 0:
        raise ValueError("sample size must be non-negative")
    if n > population:
        raise ValueError(f"cannot sample {n} from population of {population}")
    rng = SplitMix64(seed)
    arr = list(range(population))
    for i in range(n):
        j = i + rng.below(population - i)
        arr[i], arr[j] = arr[j], arr[i]
    return arr[:n]


def sample(
    instances: Sequence[BenchmarkInstance], n: int, seed: int
) -> list[BenchmarkInstance]:
    """Deterministic n-subset of instances; same inputs, same selection."""
    return [instances[i] for i in sample_indices(len(instances), n, seed)]
