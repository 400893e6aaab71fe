"""Command-line interface: run a benchmark, validate a dataset, view a report.

Exit codes: 0 success (a run with failed instances still completes), 1
dataset violations from validate, 2 configuration or input errors, 3
remote transport failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Sequence

from .analysis import render_breakdown_table, render_summary_table
from .backends import CallCache, TransportError, cached_suite, suite_from_selector
from .dataset import DatasetError, load_dataset, sample, scan_dataset
from .e2e import run_end_to_end
from .progeng import CodeDemo, PromptVariant, run_modular
from .report import build_report, load_report, write_report, write_scores_csv
from .successive import run_decomposition
from .types import (
    BenchmarkInstance,
    DecodingParams,
    EvaluationSetting,
    Method,
    Prediction,
    RunConfig,
)

EXIT_OK = 0
EXIT_VIOLATIONS = 1
EXIT_CONFIG = 2
EXIT_TRANSPORT = 3

_RUN_DEFAULTS: dict[str, Any] = {
    "setting": "direct",
    "variant": "task-agnostic",
    "backends": "mock:fixtures/world.json",
    "cache": None,
    "seed": 0,
    "limit": None,
    "jobs": 1,
    "out": None,
    "judge": False,
    "max_steps": 8,
    "step_budget": 100_000,
    "property_threshold": 0.5,
    "beam_width": 5,
    "length_penalty": -1.0,
    "max_tokens": 256,
    "code_demos": None,
    "successive_instruction": None,
    "successive_demos": None,
}


class CliError(Exception):
    """A configuration problem the user can fix; maps to exit code 2."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqdbench", description="Benchmark visual question answering strategies."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="answer a dataset with one method")
    # method and dataset are required, but a --config file may supply them;
    # requiredness is enforced after the merge.
    run.add_argument("--method", choices=[m.value for m in Method])
    run.add_argument("--dataset")
    run.add_argument("--setting", choices=[s.value for s in EvaluationSetting])
    run.add_argument("--variant", choices=[v.value for v in PromptVariant])
    run.add_argument("--backends", help="mock:PATH or remote:URL")
    run.add_argument("--cache", help="directory for the persistent call cache")
    run.add_argument("--seed", type=int)
    run.add_argument("--limit", type=int, help="sample this many instances")
    run.add_argument("--jobs", type=int)
    run.add_argument("--out", help="write the JSON report here (CSV sidecar beside it)")
    run.add_argument("--judge", action=argparse.BooleanOptionalAction, default=None)
    run.add_argument("--max-steps", type=int, dest="max_steps")
    run.add_argument("--step-budget", type=int, dest="step_budget")
    run.add_argument("--property-threshold", type=float, dest="property_threshold")
    run.add_argument("--beam-width", type=int, dest="beam_width")
    run.add_argument("--length-penalty", type=float, dest="length_penalty")
    run.add_argument("--max-tokens", type=int, dest="max_tokens")
    run.add_argument("--code-demos", dest="code_demos",
                     help="JSON file: [{question, program}, ...]")
    run.add_argument("--successive-instruction", dest="successive_instruction",
                     help="text file replacing the built-in instruction")
    run.add_argument("--successive-demos", dest="successive_demos",
                     help="text file of demos separated by lines containing ---")
    run.add_argument("--config", help="JSON file of defaults for any flag above")

    validate = sub.add_parser("validate", help="check a dataset file")
    validate.add_argument("--dataset", required=True)
    validate.add_argument("--setting", choices=[s.value for s in EvaluationSetting])

    report = sub.add_parser("report", help="render tables from a stored report")
    report.add_argument("--in", dest="path", required=True)
    report.add_argument(
        "--view",
        choices=["aggregates", "summary", "runtime", "types"],
        default="aggregates",
    )
    return parser


def _merge_run_options(args: argparse.Namespace) -> dict[str, Any]:
    """Hard defaults, overlaid by the config file, overlaid by CLI flags."""
    merged = dict(_RUN_DEFAULTS)
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise CliError("config file must hold a JSON object")
        unknown = set(loaded) - set(_RUN_DEFAULTS) - {"method", "dataset"}
        if unknown:
            raise CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
        merged.update(loaded)
    if args.method is not None:
        merged["method"] = args.method
    if args.dataset is not None:
        merged["dataset"] = args.dataset
    for key in ("method", "dataset"):
        if not merged.get(key):
            raise CliError(f"--{key} is required (flag or config file)")
    for key in _RUN_DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    # The three prompt-material flags name files; the corresponding config
    # keys hold the material inline. Resolve flags to content here so the
    # rest of the pipeline only ever sees inline values.
    if args.code_demos is not None:
        merged["code_demos"] = _load_code_demos(args.code_demos)
    if args.successive_instruction is not None:
        merged["successive_instruction"] = _read_text_file(args.successive_instruction)
    if args.successive_demos is not None:
        merged["successive_demos"] = _load_successive_demos(args.successive_demos)
    return merged


def _read_text_file(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8").rstrip("\n")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc


def _load_code_demos(path: str) -> tuple[tuple[str, str], ...]:
    try:
        entries = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read code demos {path}: {exc}") from exc
    demos = []
    for entry in entries:
        if not isinstance(entry, dict) or "question" not in entry or "program" not in entry:
            raise CliError("each code demo needs question and program fields")
        demos.append((str(entry["question"]), str(entry["program"])))
    return tuple(demos)


def _load_successive_demos(path: str) -> tuple[str, ...]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read demos {path}: {exc}") from exc
    blocks = [b.strip("\n") for b in text.split("\n---\n")]
    blocks = [b for b in blocks if b.strip()]
    if not blocks:
        raise CliError(f"no demo blocks found in {path}")
    return tuple(blocks)


def _config_from_options(options: dict[str, Any]) -> RunConfig:
    try:
        method = Method(options["method"])
        setting = EvaluationSetting(options["setting"])
        if method is Method.MODULAR:
            PromptVariant(options["variant"])
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    code_demos = options["code_demos"]
    if code_demos is not None:
        pairs = []
        try:
            for entry in code_demos:
                if isinstance(entry, dict):
                    pairs.append((str(entry["question"]), str(entry["program"])))
                else:
                    question, program = entry
                    pairs.append((str(question), str(program)))
        except (KeyError, TypeError, ValueError) as exc:
            raise CliError("each code demo needs question and program fields") from exc
        code_demos = tuple(pairs)
    instruction = options["successive_instruction"]
    demos = options["successive_demos"]
    if demos is not None:
        demos = tuple(str(d) for d in demos)
    return RunConfig(
        method=method,
        dataset=Path(options["dataset"]),
        backends=options["backends"],
        setting=setting,
        variant=options["variant"],
        seed=int(options["seed"]),
        sample_size=None if options["limit"] is None else int(options["limit"]),
        cache_dir=Path(options["cache"]) if options["cache"] else None,
        jobs=max(1, int(options["jobs"])),
        out=Path(options["out"]) if options["out"] else None,
        decoding=DecodingParams(
            beam_width=int(options["beam_width"]),
            length_penalty=float(options["length_penalty"]),
            max_tokens=int(options["max_tokens"]),
        ),
        max_steps=int(options["max_steps"]),
        step_budget=int(options["step_budget"]),
        property_threshold=float(options["property_threshold"]),
        judge=bool(options["judge"]),
        code_demos=code_demos,
        successive_instruction=instruction,
        successive_demos=demos,
    )


def _predict(instance: BenchmarkInstance, config: RunConfig, suite) -> Prediction:
    if config.method is Method.END_TO_END:
        return run_end_to_end(instance, suite, setting=config.setting)
    if config.method is Method.MODULAR:
        demos = None
        if config.code_demos is not None:
            demos = tuple(CodeDemo(q, p) for q, p in config.code_demos)
        return run_modular(
            instance,
            suite,
            setting=config.setting,
            variant=config.variant,
            demos=demos,
            decoding=config.decoding,
            property_threshold=config.property_threshold,
            step_budget=config.step_budget,
        )
    return run_decomposition(
        instance,
        suite,
        setting=config.setting,
        max_steps=config.max_steps,
        instruction=config.successive_instruction,
        demos=config.successive_demos,
        decoding=config.decoding,
    )


def _guarded_predict(
    instance: BenchmarkInstance, config: RunConfig, suite
) -> Prediction:
    """One instance; anything short of transport trouble yields an empty
    answer instead of aborting the run."""
    try:
        return _predict(instance, config, suite)
    except TransportError:
        raise
    except Exception as exc:
        print(
            f"warning: instance {instance.id}: {type(exc).__name__}: {exc}",
            file=sys.stderr,
        )
        return Prediction(
            instance_id=instance.id,
            answer_text="",
            method=config.method,
            variant=config.variant if config.method is Method.MODULAR else "",
        )


def run_benchmark(config: RunConfig) -> dict[str, Any]:
    """Load, answer, and score a dataset; returns the report document."""
    try:
        instances = load_dataset(config.dataset, config.setting)
    except (OSError, DatasetError) as exc:
        raise CliError(str(exc)) from exc
    if not instances:
        raise CliError(f"dataset {config.dataset} holds no instances")
    if config.sample_size is not None and config.sample_size < len(instances):
        instances = sample(instances, config.sample_size, config.seed)
    try:
        suite = suite_from_selector(config.backends)
    except (OSError, ValueError) as exc:
        raise CliError(str(exc)) from exc
    cache = None
    if config.cache_dir is not None:
        cache = CallCache(config.cache_dir)
        suite = cached_suite(suite, cache)
    started = time.time()
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            predictions = list(
                pool.map(lambda i: _guarded_predict(i, config, suite), instances)
            )
    else:
        predictions = [_guarded_predict(i, config, suite) for i in instances]
    finished = time.time()
    return build_report(
        config,
        instances,
        predictions,
        judge_suite=suite if config.judge else None,
        backend_calls=suite.call_counts(),
        cache_stats=cache.stats() if cache is not None else None,
        started_at=started,
        finished_at=finished,
    )


def _print_aggregates(report: dict[str, Any]) -> None:
    aggregates = report.get("aggregates", {})
    print(f"instances: {aggregates.get('instances', 0)}")
    for key in ("vqa_accuracy", "exact_match", "mc_correct", "judge_correct"):
        if key in aggregates:
            print(
                f"{key}: {aggregates[key]:.4f} "
                f"({aggregates[f'{key}_scored']} scored)"
            )


def _column_label(report: dict[str, Any]) -> str:
    config = report.get("config", {})
    label = str(config.get("method", "run"))
    variant = config.get("variant")
    if config.get("method") == Method.MODULAR.value and variant:
        label = f"{label}/{variant}"
    return label


def _cmd_run(args: argparse.Namespace) -> int:
    options = _merge_run_options(args)
    config = _config_from_options(options)
    report = run_benchmark(config)
    _print_aggregates(report)
    if "error_summary" in report:
        print()
        print(render_summary_table([(_column_label(report), report["error_summary"])]))
    if config.out is not None:
        write_report(report, config.out)
        write_scores_csv(report, config.out.with_suffix(".csv"))
        print(f"\nreport written to {config.out}")
    return EXIT_OK


def _cmd_validate(args: argparse.Namespace) -> int:
    setting = EvaluationSetting(args.setting) if args.setting else None
    try:
        violations, warnings = scan_dataset(args.dataset, setting)
    except OSError as exc:
        raise CliError(str(exc)) from exc
    for message in violations:
        print(f"violation: {message}")
    for message in warnings:
        print(f"warning: {message}")
    print(f"{len(violations)} violation(s), {len(warnings)} warning(s)")
    return EXIT_VIOLATIONS if violations else EXIT_OK


def _cmd_report(args: argparse.Namespace) -> int:
    try:
        report = load_report(args.path)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(str(exc)) from exc
    label = _column_label(report)
    if args.view == "aggregates":
        _print_aggregates(report)
        return EXIT_OK
    if args.view == "summary":
        table = report.get("error_summary")
        if not table:
            print("no execution outcomes recorded in this report")
            return EXIT_OK
        print(render_summary_table([(label, table)]))
        return EXIT_OK
    if args.view == "runtime":
        table = report.get("runtime_breakdown")
        if not table:
            print("no failed executions recorded in this report")
            return EXIT_OK
        print(render_breakdown_table([(label, table)]))
        return EXIT_OK
    tables = report.get("type_breakdown")
    if not tables:
        print("no execution outcomes recorded in this report")
        return EXIT_OK
    print(render_summary_table(list(tables.items())))
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    handlers = {"run": _cmd_run, "validate": _cmd_validate, "report": _cmd_report}
    try:
        return handlers[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT


if __name__ == "__main__":
    sys.exit(main())
