"""Candidate verification: syntactic validity, optional compilation, and
semantic-equivalence judging.

The equivalence stage is chosen by precedence: an execution oracle when a
runner plus input suite is configured, else LLM voting, else a stub. A
candidate that fails any stage is simply discarded by the optimizer.
"""

from __future__ import annotations

import hashlib
import shutil
import subprocess
import sys
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

from .analysis import has_main_function
from .core import CodeSample, EquivalenceSpec, Language
from .errors import (
    ConfigError,
    ExecutionTimeout,
    LexError,
    RunnerFailure,
    ToolchainUnavailable,
)
from .lexing import TokenKind, check_balance, lex


@dataclass(frozen=True)
class Toolchain:
    """Command templates with {file}, {dir} and {exe} placeholders."""

    run_argv: tuple[str, ...]
    compile_argv: tuple[str, ...] | None = None
    extension: str = ""
    compile_timeout: float = 30.0
    run_timeout: float = 10.0


def default_toolchains() -> dict[Language, Toolchain]:
    chains = {
        Language.PYTHON: Toolchain(run_argv=(sys.executable, "{file}"), extension=".py")
    }
    if shutil.which("gcc"):
        chains[Language.C_CPP] = Toolchain(
            compile_argv=("gcc", "{file}", "-o", "{exe}", "-lm"),
            run_argv=("{exe}",),
            extension=".c",
        )
    if shutil.which("rustc"):
        chains[Language.RUST_LANG] = Toolchain(
            compile_argv=("rustc", "--edition", "2018", "-o", "{exe}", "{file}"),
            run_argv=("{exe}",),
            extension=".rs",
        )
    if shutil.which("go"):
        chains[Language.GO] = Toolchain(
            compile_argv=("go", "build", "-o", "{exe}", "{file}"),
            run_argv=("{exe}",),
            extension=".go",
        )
    return chains


_SYNTH_MAIN = {
    Language.GO: "\nfunc main() {\n}\n",
    Language.RUST_LANG: "\nfn main() {\n}\n",
    Language.C_CPP: "\nint main(void) { return 0; }\n",
}


def ensure_main(text: str, language: Language) -> tuple[str, bool]:
    """Append an empty main when a compiled language lacks one."""
    if language not in _SYNTH_MAIN or has_main_function(text, language):
        return text, False
    if not text.endswith("\n"):
        text += "\n"
    return text + _SYNTH_MAIN[language], True


def _java_public_class(text: str) -> str | None:
    toks = lex(text, Language.JAVA)
    for i, t in enumerate(toks[:-2]):
        if t.text == "public" and toks[i + 1].text == "class" and toks[i + 2].kind is TokenKind.IDENT:
            return toks[i + 2].text
    return None


def syntax_check(sample: CodeSample) -> tuple[bool, list[str]]:
    """Lexical/grammar validation plus the per-language structural rules.

    Python gets a true grammar parse. The other languages get lexical
    validation (tokenizable, balanced delimiters); grammar-level checking
    for them is the compile stage's job when a toolchain is configured.
    """
    diagnostics: list[str] = []
    if sample.language is Language.PYTHON:
        try:
            compile(sample.text, sample.id or "<sample>", "exec")
            return True, diagnostics
        except SyntaxError as exc:
            diagnostics.append(f"syntax error at line {exc.lineno}, offset {exc.offset}: {exc.msg}")
            return False, diagnostics
    try:
        tokens = lex(sample.text, sample.language)
    except LexError as exc:
        diagnostics.append(f"unlexable input at offset {exc.offset}: {exc}")
        return False, diagnostics
    if not tokens:
        diagnostics.append("empty token stream")
        return False, diagnostics
    problem = check_balance(tokens)
    if problem:
        diagnostics.append(problem)
        return False, diagnostics
    if sample.language in _SYNTH_MAIN and not has_main_function(sample.text, sample.language):
        diagnostics.append("no main function; synthetic empty main injected for toolchain stages")
    if sample.language is Language.JAVA:
        cls = _java_public_class(sample.text)
        stem = Path(sample.id).stem if sample.id.endswith(".java") else None
        if cls and stem and cls != stem:
            diagnostics.append(f"public class {cls} does not match file name {stem}.java")
            return False, diagnostics
    return True, diagnostics


def _fill(argv: tuple[str, ...], file: str, directory: str, exe: str) -> list[str]:
    return [a.format(file=file, dir=directory, exe=exe) for a in argv]


def _write_sample(sample: CodeSample, directory: Path, toolchain: Toolchain) -> Path:
    ext = toolchain.extension
    stem = Path(sample.id).stem or "sample"
    suffix = Path(sample.id).suffix
    if suffix in (".c", ".cc", ".cpp", ".py", ".go", ".rs", ".java"):
        ext = suffix
    text, _ = ensure_main(sample.text, sample.language)
    path = directory / f"{stem}{ext}"
    path.write_text(text, encoding="utf-8")
    return path


def compile_check(sample: CodeSample, toolchain: Toolchain) -> tuple[bool | None, list[str]]:
    """Invoke the configured compiler in a scratch directory.

    Returns (None, []) when the toolchain has no compile step. Raises
    ToolchainUnavailable when the command itself cannot run.
    """
    if toolchain.compile_argv is None:
        return None, []
    with tempfile.TemporaryDirectory(prefix="codeperturb-") as scratch:
        directory = Path(scratch)
        path = _write_sample(sample, directory, toolchain)
        exe = directory / "prog"
        argv = _fill(toolchain.compile_argv, str(path), scratch, str(exe))
        try:
            proc = subprocess.run(
                argv, capture_output=True, timeout=toolchain.compile_timeout, cwd=scratch
            )
        except FileNotFoundError as exc:
            raise ToolchainUnavailable(f"cannot run {argv[0]!r}: {exc}") from exc
        except subprocess.TimeoutExpired as exc:
            raise ToolchainUnavailable(f"compile timed out after {toolchain.compile_timeout}s") from exc
        if proc.returncode == 0:
            return True, []
        tail = proc.stderr.decode("utf-8", "replace").strip().splitlines()[-8:]
        return False, ["compile failed"] + tail


class ProgramRunner:
    """Compiles (once per text) and runs programs, memoizing outputs."""

    def __init__(self, toolchain: Toolchain):
        self.toolchain = toolchain
        self._lock = threading.Lock()
        self._dirs: dict[str, tempfile.TemporaryDirectory] = {}
        self._exes: dict[str, tuple[str, str]] = {}
        self._outputs: dict[tuple[str, str], tuple[bytes, int]] = {}

    def _prepare(self, sample: CodeSample) -> tuple[str, str]:
        key = hashlib.sha256(sample.text.encode()).hexdigest()
        with self._lock:
            if key in self._exes:
                return self._exes[key]
            holder = tempfile.TemporaryDirectory(prefix="codeperturb-run-")
            self._dirs[key] = holder
            directory = Path(holder.name)
            path = _write_sample(sample, directory, self.toolchain)
            exe = str(directory / "prog")
            if self.toolchain.compile_argv is not None:
                argv = _fill(self.toolchain.compile_argv, str(path), holder.name, exe)
                try:
                    proc = subprocess.run(
                        argv, capture_output=True, timeout=self.toolchain.compile_timeout,
                        cwd=holder.name,
                    )
                except FileNotFoundError as exc:
                    raise ToolchainUnavailable(f"cannot run {argv[0]!r}: {exc}") from exc
                except subprocess.TimeoutExpired as exc:
                    raise RunnerFailure("compile timed out") from exc
                if proc.returncode != 0:
                    stderr = proc.stderr.decode("utf-8", "replace")[-500:]
                    raise RunnerFailure(f"candidate does not compile: {stderr}")
            self._exes[key] = (str(path), exe)
            return self._exes[key]

    def run(self, sample: CodeSample, stdin_text: str) -> tuple[bytes, int]:
        key = (hashlib.sha256(sample.text.encode()).hexdigest(), stdin_text)
        with self._lock:
            if key in self._outputs:
                return self._outputs[key]
        path, exe = self._prepare(sample)
        argv = _fill(self.toolchain.run_argv, path, str(Path(path).parent), exe)
        try:
            proc = subprocess.run(
                argv,
                input=stdin_text.encode(),
                capture_output=True,
                timeout=self.toolchain.run_timeout,
                cwd=str(Path(path).parent),
            )
        except FileNotFoundError as exc:
            raise RunnerFailure(f"cannot run {argv[0]!r}: {exc}") from exc
        except subprocess.TimeoutExpired as exc:
            raise ExecutionTimeout(
                f"{sample.id}: input {stdin_text[:30]!r} exceeded {self.toolchain.run_timeout}s"
            ) from exc
        result = (proc.stdout, proc.returncode)
        with self._lock:
            self._outputs[key] = result
        return result


def execution_equivalence(
    original: CodeSample,
    candidate: CodeSample,
    spec: EquivalenceSpec,
    runner: Toolchain | ProgramRunner,
) -> bool:
    """Byte-compare stdout and exit status over the whole input suite.

    Extra function parameters with neutral defaults (spec.extra_params_allowed)
    never surface at the process boundary, so no special handling is needed
    beyond comparing program-level behavior.
    """
    if not spec.input_suite:
        raise ConfigError("equivalence spec has an empty input suite")
    prog_runner = runner if isinstance(runner, ProgramRunner) else ProgramRunner(runner)
    for stdin_text in spec.input_suite:
        out_a, code_a = prog_runner.run(original, stdin_text)
        out_b, code_b = prog_runner.run(candidate, stdin_text)
        if out_a != out_b or code_a != code_b:
            return False
    return True


# ---------------------------------------------------------------------------
# Voting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Vote:
    voter_id: str
    verdict: bool


class StubVoter:
    """Always-true stand-in for environments without judges."""

    kind = "ALWAYS_TRUE_STUB"

    def __init__(self, voter_id: str = "stub"):
        self.id = voter_id

    def vote(self, original: CodeSample, candidate: CodeSample) -> bool:
        return True


class ExecutionVoter:
    """Ground-truth voter backed by the execution oracle."""

    kind = "EXECUTION_ORACLE"

    def __init__(self, spec: EquivalenceSpec, runner: Toolchain | ProgramRunner, voter_id: str = "execution_oracle"):
        self.id = voter_id
        self.spec = spec
        self.runner = runner if isinstance(runner, ProgramRunner) else ProgramRunner(runner)

    def vote(self, original: CodeSample, candidate: CodeSample) -> bool:
        return execution_equivalence(original, candidate, self.spec, self.runner)


_JUDGE_PROMPT = (
    "You are reviewing a refactor. Given two programs, decide whether they "
    "are semantically equivalent: for every input they must produce the "
    "same output. Reply with exactly one word, True or False.\n\n"
    "Program A:\n```\n{a}\n```\n\nProgram B:\n```\n{b}\n```"
)


class LlmJudge:
    """Equivalence judge backed by a chat transport.

    The judging prompt is a local design choice; swap it via the prompt
    argument if a calibrated one is available.
    """

    kind = "LLM_JUDGE"

    def __init__(self, voter_id: str, transport, prompt: str = _JUDGE_PROMPT):
        self.id = voter_id
        self.transport = transport
        self.prompt = prompt

    def vote(self, original: CodeSample, candidate: CodeSample) -> bool:
        reply = self.transport.complete(
            "You judge program equivalence. Answer True or False only.",
            self.prompt.format(a=original.text, b=candidate.text),
            request_id=f"judge_{self.id}",
        )
        for word in reply.replace(".", " ").split():
            if word.lower() == "true":
                return True
            if word.lower() == "false":
                return False
        raise ValueError(f"judge {self.id} gave no boolean verdict: {reply[:80]!r}")


def vote_equivalence(
    original: CodeSample, candidate: CodeSample, voters: list
) -> tuple[list[Vote], bool, list[str]]:
    """Collect one strict boolean per voter; majority wins.

    Any voter failure is downgraded to a False vote and logged.
    """
    if any(getattr(v, "kind", "") == "LLM_JUDGE" for v in voters) and len(voters) != 3:
        raise ConfigError("LLM judging requires exactly three voters")
    votes: list[Vote] = []
    diagnostics: list[str] = []
    for voter in voters:
        try:
            verdict = bool(voter.vote(original, candidate))
        except Exception as exc:
            verdict = False
            diagnostics.append(f"voter {voter.id} failed, counted False: {exc}")
        votes.append(Vote(voter_id=voter.id, verdict=verdict))
    passed = sum(v.verdict for v in votes) * 2 > len(votes)
    return votes, passed, diagnostics


# ---------------------------------------------------------------------------
# Composed verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationReport:
    syntax_ok: bool
    compile_ok: bool | None
    votes: tuple[Vote, ...]
    passed: bool
    diagnostics: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "syntax_ok": self.syntax_ok,
            "compile_ok": self.compile_ok,
            "votes": [{"voter_id": v.voter_id, "verdict": v.verdict} for v in self.votes],
            "passed": self.passed,
            "diagnostics": list(self.diagnostics),
        }


@dataclass
class VerifyPolicy:
    """What verification stages run and with what resources.

    Equivalence precedence: execution oracle (runner + input suite), then
    LLM voting, then nothing (syntax/compile only).
    """

    toolchains: dict[Language, Toolchain] = field(default_factory=dict)
    equivalence_spec: EquivalenceSpec | None = None
    runner: Toolchain | ProgramRunner | None = None
    voters: list = field(default_factory=list)
    compile_stage: bool = True


def verify(original: CodeSample, candidate: CodeSample, policy: VerifyPolicy) -> VerificationReport:
    syntax_ok, diagnostics = syntax_check(candidate)
    if not syntax_ok:
        return VerificationReport(False, None, (), False, tuple(diagnostics))
    compile_ok: bool | None = None
    toolchain = policy.toolchains.get(candidate.language)
    if policy.compile_stage and toolchain is not None and toolchain.compile_argv is not None:
        compile_ok, diags = compile_check(candidate, toolchain)
        diagnostics.extend(diags)
        if compile_ok is False:
            return VerificationReport(True, False, (), False, tuple(diagnostics))
    votes: tuple[Vote, ...] = ()
    votes_pass = True
    if policy.runner is not None and policy.equivalence_spec and policy.equivalence_spec.input_suite:
        try:
            verdict = execution_equivalence(
                original, candidate, policy.equivalence_spec, policy.runner
            )
        except (RunnerFailure, ToolchainUnavailable) as exc:
            verdict = False
            diagnostics.append(f"execution oracle failed: {exc}")
        votes = (Vote(voter_id="execution_oracle", verdict=verdict),)
        votes_pass = verdict
    elif policy.voters:
        vote_list, votes_pass, vote_diags = vote_equivalence(original, candidate, policy.voters)
        votes = tuple(vote_list)
        diagnostics.extend(vote_diags)
    passed = syntax_ok and compile_ok is not False and votes_pass
    return VerificationReport(syntax_ok, compile_ok, votes, passed, tuple(diagnostics))
