import json
from pathlib import Path

import pytest

from codeperturb.core import CodeSample, EquivalenceSpec, Language

FIXTURES = Path(__file__).parent / "fixtures"


def load_fixture_corpus(languages=None):
    """The bundled executable corpus: (sample, input suite) pairs."""
    manifest = json.loads((FIXTURES / "manifest.json").read_text())
    out = []
    for record in manifest["programs"]:
        language = Language.parse(record["language"])
        if languages is not None and language not in languages:
            continue
        text = (FIXTURES / record["path"]).read_text()
        sample = CodeSample(id=record["id"], language=language, text=text)
        out.append((sample, EquivalenceSpec(input_suite=tuple(record["inputs"]))))
    return out


def write_corpus_jsonl(path, corpus):
    """Serialize (sample, spec) pairs in the CLI's corpus format."""
    with open(path, "w", encoding="utf-8") as fh:
        for sample, spec in corpus:
            record = {
                "id": sample.id,
                "language": sample.language.value,
                "content": sample.text,
            }
            if spec is not None and spec.input_suite:
                record["input_suite"] = list(spec.input_suite)
            fh.write(json.dumps(record) + "\n")


@pytest.fixture
def fixture_corpus():
    return load_fixture_corpus()


@pytest.fixture
def python_corpus():
    return load_fixture_corpus(languages={Language.PYTHON})
