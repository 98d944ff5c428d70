"""Command-line entry point.

Subcommands: perturb, peso-run, random-run, filter, make-tasks, evaluate,
report, similarity. Exit status: 0 success, 1 usage/config error,
2 partial failures.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import datetime
import json
import os
import re
import sys
from pathlib import Path

from . import __version__
from .bench import (
    Judge,
    PerturbedPair,
    build_tasks,
    evaluate_tasks,
    filter_corpus,
    render_report,
    report_run,
)
from .core import (
    CodeSample,
    EquivalenceSpec,
    Language,
    Origin,
    PesoConfig,
    build_catalog,
    load_config,
)
from .corpusio import (
    corpus_digest,
    read_completions,
    read_corpus,
    read_jsonl,
    write_jsonl,
)
from .errors import CodePerturbError, ConfigError, NotApplicable, RegionUnavailable
from .peso import derive_seed, run, run_random_baseline
from .similarity import score_pair
from .transform import HybridEngine, RuleEngine, perturb
from .transform.llm import HttpTransport, LlmConfig, LlmEngine, ReplayTransport
from .verify import VerifyPolicy, default_toolchains, verify


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> _Parser:
    parser = _Parser(prog="codeperturb", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, corpus=True):
        if corpus:
            p.add_argument("--corpus", required=True, help="corpus JSONL ({id, language, content})")
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
        p.add_argument("--output-dir", default="out")
        p.add_argument("--engine", choices=["rule", "llm", "hybrid"], default=None)
        p.add_argument("--replay-dir", help="canned LLM replies for offline runs")
        p.add_argument("--llm-base-url")
        p.add_argument("--llm-model")
        p.add_argument(
            "--equivalence",
            choices=["auto", "exec", "stub"],
            default="auto",
            help="equivalence stage: execution oracle when inputs exist (auto/exec) or none (stub)",
        )
        p.add_argument("--no-compile", action="store_true", help="skip the compile stage")

    p = sub.add_parser("perturb", help="apply one method once per sample")
    common(p)
    p.add_argument("--method", required=True)

    for name in ("peso-run", "random-run"):
        p = sub.add_parser(name, help=f"{name} over a corpus")
        common(p)
        p.add_argument("--max-iter", type=int, default=None)
        p.add_argument("--threshold", type=float, default=None)
        p.add_argument("--temperature", type=float, default=None)
        p.add_argument("--mu", type=float, default=None)
        p.add_argument("--nu", type=float, default=None)
        p.add_argument("--min-tile-len", type=int, default=None)

    p = sub.add_parser("filter", help="apply the corpus filtering rules")
    p.add_argument("--corpus", required=True)
    p.add_argument("--output-dir", default="out")

    p = sub.add_parser("make-tasks", help="build completion tasks from perturbed pairs")
    p.add_argument("--pairs", required=True, help="pairs.jsonl from a peso-run/random-run")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", default="out")

    p = sub.add_parser("evaluate", help="grade completions against tasks")
    p.add_argument("--tasks", required=True)
    p.add_argument("--completions", required=True)
    p.add_argument("--judge", choices=["exact", "normalized", "external"], default="normalized")
    p.add_argument("--external-verdicts", help="JSONL of {task_id, correct} for the external judge")
    p.add_argument("--output-dir", default="out")

    p = sub.add_parser("report", help="render a summary document")
    p.add_argument("--summary", required=True, help="summary.jsonl of a run")
    p.add_argument("--baseline", help="summary.jsonl of a random baseline run")
    p.add_argument("--accuracy", help="accuracy.json from evaluate")
    p.add_argument("--output-dir", default="out")

    p = sub.add_parser("similarity", help="score two files")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--language", required=True)
    p.add_argument("--config")
    p.add_argument("--min-tile-len", type=int, default=None)
    return parser


def _peso_config(args) -> tuple[PesoConfig, dict]:
    base, rest = (PesoConfig(), {})
    if getattr(args, "config", None):
        base, rest = load_config(args.config)
    overrides = {}
    for flag, field in (
        ("mu", "mu"),
        ("nu", "nu"),
        ("temperature", "temperature"),
        ("max_iter", "max_iter"),
        ("threshold", "ss_threshold"),
        ("min_tile_len", "min_tile_len"),
        ("seed", "rng_seed"),
    ):
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field] = value
    if overrides:
        base = PesoConfig(**{**dataclasses.asdict(base), **overrides})
    return base, rest


def _build_engine(args, rest: dict, catalog):
    kind = args.engine or rest.get("engine") or "rule"
    rule = RuleEngine(catalog)
    if kind == "rule":
        return rule
    if args.replay_dir:
        transport = ReplayTransport(args.replay_dir)
    else:
        llm_rest = rest.get("llm", {})
        base_url = args.llm_base_url or llm_rest.get("base_url")
        if not base_url:
            raise ConfigError("llm engine needs --llm-base-url, an llm.base_url config key, or --replay-dir")
        transport = HttpTransport(
            LlmConfig(
                base_url=base_url,
                model=args.llm_model or llm_rest.get("model", "gpt-4o"),
                api_key_env=llm_rest.get("api_key_env", "CODEPERTURB_API_KEY"),
                timeout=float(llm_rest.get("timeout", 60.0)),
            )
        )
    llm = LlmEngine(transport)
    return llm if kind == "llm" else HybridEngine(rule, llm)


def _verifier_for(args, sample: CodeSample, spec: EquivalenceSpec | None):
    toolchains = default_toolchains()
    policy = VerifyPolicy(toolchains=toolchains, compile_stage=not getattr(args, "no_compile", False))
    mode = getattr(args, "equivalence", "auto")
    toolchain = toolchains.get(sample.language)
    if mode in ("auto", "exec") and spec and spec.input_suite and toolchain:
        policy.equivalence_spec = spec
        policy.runner = toolchain
    elif mode == "exec":
        raise ConfigError(
            f"--equivalence exec needs an input_suite and a toolchain for {sample.language.value}"
        )
    return lambda original, candidate: verify(original, candidate, policy)


def _safe_name(sample_id: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", sample_id)


def _write_manifest(out: Path, command: str, config: PesoConfig, rest: dict, digest: str, args) -> None:
    manifest = {
        "command": command,
        "config": dataclasses.asdict(config),
        "engine": args.engine or rest.get("engine") or "rule",
        "equivalence": getattr(args, "equivalence", None),
        "corpus_digest": digest,
        "seed": config.rng_seed,
        "version": __version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _run_over_corpus(args, runner) -> int:
    catalog = build_catalog()
    config, rest = _peso_config(args)
    engine = _build_engine(args, rest, catalog)
    samples = read_corpus(args.corpus)
    out = Path(args.output_dir)
    _write_manifest(out, args.command, config, rest, corpus_digest(samples), args)
    traces_dir = out / "traces"
    traces_dir.mkdir(parents=True, exist_ok=True)

    def one(item):
        sample, spec = item
        cfg = dataclasses.replace(config, rng_seed=derive_seed(config.rng_seed, sample.id))
        verifier = _verifier_for(args, sample, spec)
        return runner(sample, engine, catalog, cfg, verifier)

    failures = []
    results = []
    with concurrent.futures.ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        futures = {pool.submit(one, item): item[0] for item in samples}
        collected = {}
        for future in concurrent.futures.as_completed(futures):
            sample = futures[future]
            try:
                collected[sample.id] = future.result()
            except CodePerturbError as exc:
                failures.append({"sample_id": sample.id, "error": str(exc)})
    for sample, _ in samples:
        if sample.id in collected:
            results.append((sample, collected[sample.id]))

    summaries, pairs, perturbed = [], [], []
    for sample, result in results:
        write_jsonl(
            traces_dir / f"{_safe_name(sample.id)}.jsonl",
            (r.to_dict() for r in result.records),
        )
        summary = result.summary.to_dict()
        summaries.append(summary)
        perturbed.append(
            {
                "id": sample.id,
                "language": sample.language.value,
                "content": result.final.text,
                "lineage": list(result.final.lineage),
            }
        )
        pairs.append(
            {
                "id": sample.id,
                "language": sample.language.value,
                "original": sample.text,
                "perturbed": result.final.text,
                "entry_points": summary["entry_points"],
                "function_map": summary["function_map"],
                "final_ss": summary["final_ss"],
            }
        )
    write_jsonl(out / "summary.jsonl", summaries)
    write_jsonl(out / "perturbed.jsonl", perturbed)
    write_jsonl(out / "pairs.jsonl", pairs)
    if failures:
        write_jsonl(out / "failures.jsonl", failures)
    doc = report_run(summaries)
    (out / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    rendered = render_report(doc)
    (out / "report.txt").write_text(rendered)
    print(rendered, end="")
    if failures:
        print(f"{len(failures)} sample(s) failed; see failures.jsonl", file=sys.stderr)
        return 2
    return 0


def cmd_peso(args) -> int:
    return _run_over_corpus(args, run)


def cmd_random(args) -> int:
    return _run_over_corpus(args, run_random_baseline)


def cmd_perturb(args) -> int:
    catalog = build_catalog()
    config, rest = _peso_config(args)
    engine = _build_engine(args, rest, catalog)
    method = catalog.get(args.method)
    samples = read_corpus(args.corpus)
    out = Path(args.output_dir)
    _write_manifest(out, "perturb", config, rest, corpus_digest(samples), args)
    outcomes = []
    failures = 0
    for sample, spec in samples:
        seed = derive_seed(config.rng_seed, sample.id)
        verifier = _verifier_for(args, sample, spec)
        record = {"sample_id": sample.id, "method": method.id}
        try:
            outcome = perturb(engine, sample, method, seed)
            report = verifier(sample, outcome.candidate)
            score = score_pair(sample, outcome.candidate, config) if report.passed else None
            record.update(
                {
                    "applied": True,
                    "entry_point": outcome.entry_point,
                    "engine": outcome.engine_used.value,
                    "verified": report.passed,
                    "verification": report.to_dict(),
                    "content": outcome.candidate.text,
                    "score": None
                    if score is None
                    else {"s1": score.s1, "s2": score.s2, "ss": score.ss},
                }
            )
        except NotApplicable as exc:
            # A legitimate outcome: the method has no site in this sample.
            record.update({"applied": False, "reason": str(exc)})
        except CodePerturbError as exc:
            record.update({"applied": False, "error": f"{type(exc).__name__}: {exc}"})
            failures += 1
        outcomes.append(record)
    write_jsonl(out / "outcomes.jsonl", outcomes)
    applied = sum(1 for r in outcomes if r.get("applied"))
    print(f"applied {method.id} to {applied}/{len(outcomes)} sample(s) -> {out/'outcomes.jsonl'}")
    return 2 if failures else 0


def cmd_filter(args) -> int:
    samples = read_corpus(args.corpus)
    verdicts = filter_corpus([s for s, _ in samples])
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_jsonl(out / "verdicts.jsonl", (v.to_dict() for v in verdicts))
    kept = sum(v.kept for v in verdicts)
    counts: dict[str, int] = {}
    for v in verdicts:
        for reason in v.reasons:
            counts[reason.value] = counts.get(reason.value, 0) + 1
    print(f"kept {kept}/{len(verdicts)}")
    for reason, count in sorted(counts.items()):
        print(f"  {reason}: {count}")
    return 0


def cmd_make_tasks(args) -> int:
    records = read_jsonl(args.pairs)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    tasks = []
    skipped = []
    for record in records:
        language = Language.parse(record["language"])
        pair = PerturbedPair(
            original=CodeSample(id=record["id"], language=language, text=record["original"]),
            perturbed=CodeSample(
                id=record["id"],
                language=language,
                text=record["perturbed"],
                origin=Origin.ACCEPTED,
                lineage=("peso",),
            ),
            entry_points=tuple(record.get("entry_points", ())),
            function_map=record.get("function_map", {}),
        )
        try:
            tasks.extend(t.to_dict() for t in build_tasks(pair, seed=derive_seed(args.seed, record["id"])))
        except RegionUnavailable as exc:
            skipped.append({"sample_id": record["id"], "error": str(exc)})
    write_jsonl(out / "tasks.jsonl", tasks)
    if skipped:
        write_jsonl(out / "tasks_skipped.jsonl", skipped)
    print(f"built {len(tasks)} task(s) from {len(records)} pair(s), skipped {len(skipped)}")
    return 2 if skipped and tasks else (0 if not skipped else 2)


def cmd_evaluate(args) -> int:
    from .bench import CompletionTask, Variant

    task_records = read_jsonl(args.tasks)
    tasks = [
        CompletionTask(
            task_id=r["task_id"],
            sample_id=r["sample_id"],
            variant=Variant(r["variant"]),
            mask_lines=int(r["mask_lines"]),
            prefix=r["prefix"],
            ground_truth=r["ground_truth"],
            suffix=r["suffix"],
            region_anchor=r.get("region_anchor", {}),
        )
        for r in task_records
    ]
    completions = read_completions(args.completions)
    judge = {"exact": Judge.EXACT_MATCH, "normalized": Judge.NORMALIZED_MATCH, "external": Judge.EXTERNAL}[
        args.judge
    ]
    external = None
    if judge is Judge.EXTERNAL:
        if not args.external_verdicts:
            raise ConfigError("--judge external requires --external-verdicts")
        verdict_map = {r["task_id"]: bool(r["correct"]) for r in read_jsonl(args.external_verdicts)}
        external = lambda task, completion: verdict_map.get(task.task_id, False)
    report = evaluate_tasks(tasks, completions, judge, external_judge=external)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "accuracy.json").write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    for bucket, stats in sorted(report.buckets.items()):
        print(f"{bucket[0]} @{bucket[1]} lines: {stats['correct']}/{stats['total']} = {stats['accuracy']:.3f}")
    for size, delta in sorted(report.deltas.items()):
        print(f"delta @{size} lines: {delta:+.3f}")
    return 0


def cmd_report(args) -> int:
    summaries = read_jsonl(args.summary)
    baseline = read_jsonl(args.baseline) if args.baseline else None
    accuracy = None
    if args.accuracy:
        from .bench import AccuracyReport

        raw = json.loads(Path(args.accuracy).read_text())
        buckets = {}
        for key, stats in raw.get("buckets", {}).items():
            variant, size = key.rsplit(":", 1)
            buckets[(variant, int(size))] = stats
        accuracy = AccuracyReport(
            buckets=buckets,
            deltas={int(k): v for k, v in raw.get("deltas", {}).items()},
            missing=tuple(raw.get("missing", ())),
        )
    doc = report_run(summaries, accuracy=accuracy, baseline_summaries=baseline)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    rendered = render_report(doc)
    (out / "report.txt").write_text(rendered)
    print(rendered, end="")
    return 0


def cmd_similarity(args) -> int:
    language = Language.parse(args.language)
    config = PesoConfig()
    if args.config:
        config, _ = load_config(args.config)
    if args.min_tile_len is not None:
        config = dataclasses.replace(config, min_tile_len=args.min_tile_len)
    a = CodeSample(id=args.file_a, language=language, text=Path(args.file_a).read_text())
    b = CodeSample(id=args.file_b, language=language, text=Path(args.file_b).read_text())
    score = score_pair(a, b, config)
    print(f"s1={score.s1:.4f} s2={score.s2:.4f} ss={score.ss:.4f}")
    return 0


_HANDLERS = {
    "perturb": cmd_perturb,
    "peso-run": cmd_peso,
    "random-run": cmd_random,
    "filter": cmd_filter,
    "make-tasks": cmd_make_tasks,
    "evaluate": cmd_evaluate,
    "report": cmd_report,
    "similarity": cmd_similarity,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _HANDLERS[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CodePerturbError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
