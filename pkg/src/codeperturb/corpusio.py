"""Line-delimited corpus, task, and record I/O.

Corpus records are JSON objects {id, language, content}, one per line.
Optional per-record fields: input_suite (list of stdin strings used by the
execution oracle).
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .core import CodeSample, EquivalenceSpec, Language
from .errors import ConfigError


def read_corpus(path: str | Path) -> list[tuple[CodeSample, EquivalenceSpec | None]]:
    samples = []
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigError(f"cannot read corpus {path}: {exc}") from exc
    for n, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
            sample = CodeSample(
                id=str(record["id"]),
                language=Language.parse(record["language"]),
                text=record["content"],
            )
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ConfigError(f"{path}:{n}: malformed corpus record: {exc}") from exc
        suite = record.get("input_suite")
        spec = EquivalenceSpec(input_suite=tuple(suite)) if suite else None
        samples.append((sample, spec))
    return samples


def write_jsonl(path: str | Path, records) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            out.append(json.loads(line))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{n}: malformed record: {exc}") from exc
    return out


def read_completions(path: str | Path) -> dict:
    """task_id -> completion text, from {task_id, completion} records."""
    completions = {}
    for record in read_jsonl(path):
        try:
            completions[str(record["task_id"])] = record["completion"]
        except KeyError as exc:
            raise ConfigError(f"{path}: completion record missing {exc}") from exc
    return completions


def corpus_digest(samples) -> str:
    h = hashlib.sha256()
    for sample, _ in samples:
        h.update(sample.id.encode())
        h.update(b"\0")
        h.update(sample.text.encode())
        h.update(b"\0")
    return h.hexdigest()
