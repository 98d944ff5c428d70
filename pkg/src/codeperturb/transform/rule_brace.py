"""Deterministic rule-based transformations for the brace languages.

Go and C share one token/line-level engine parameterized by a small
language profile. Sites are only selected where the surrounding layout is
unambiguous (one statement per line, K&R braces, the way gofmt and most C
formatters emit code); anything else is simply not offered as a site.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass

from ..analysis import FunctionSpan, find_functions, line_offsets, line_of_offset, match_brace
from ..core import Language
from ..errors import NotApplicable
from ..lexing import Token, TokenKind, lex

_VAR_WORDS = ["aux", "tmp", "slot", "item", "probe", "spare", "trace", "hold", "mark", "pad"]
_FN_WORDS = ["helper", "worker", "routine", "shim", "stage", "piece", "chunk", "relay"]

_C_TYPE_KEYWORDS = {
    "int", "long", "float", "double", "char", "unsigned", "signed", "short", "void", "bool",
}


@dataclass
class _File:
    text: str
    language: Language

    def __post_init__(self):
        self.tokens = lex(self.text, self.language)
        self.offsets = line_offsets(self.text)
        self.lines = self.text.split("\n")
        self.functions = find_functions(self.text, self.language)
        self.indent_unit = "\t" if self.language is Language.GO else "    "
        by_line: dict[int, list[Token]] = {}
        for t in self.tokens:
            by_line.setdefault(line_of_offset(self.offsets, t.start), []).append(t)
        self.by_line = by_line

    def line_tokens(self, ln: int) -> list[Token]:
        return self.by_line.get(ln, [])

    def indent_of(self, ln: int) -> str:
        line = self.lines[ln]
        return line[: len(line) - len(line.lstrip())]

    def identifiers(self) -> set[str]:
        return {t.text for t in self.tokens if t.kind in (TokenKind.IDENT, TokenKind.KEYWORD)}

    def token_index(self, tok: Token) -> int:
        return self.tokens.index(tok)

    def enclosing_function(self, ln: int) -> str:
        for f in self.functions:
            if f.start_line <= ln <= f.end_line:
                return f.name
        return "<file>"


def _fresh(existing: set[str], rng: random.Random, words: list[str]) -> str:
    for _ in range(1000):
        name = f"{rng.choice(words)}_{rng.randrange(10, 1000)}"
        if name not in existing:
            existing.add(name)
            return name
    raise NotApplicable("could not find a fresh identifier")


def _ends_statement(f: _File, tok: Token) -> bool:
    if f.language is Language.GO:
        if tok.kind in (TokenKind.IDENT, TokenKind.INT, TokenKind.FLOAT, TokenKind.STRING, TokenKind.CHAR):
            return True
        if tok.kind is TokenKind.KEYWORD:
            return tok.text in ("return", "break", "continue", "fallthrough")
        return tok.kind is TokenKind.OP and tok.text in (")", "]", "}", "++", "--", ";", "{", ":")
    return tok.kind is TokenKind.OP and tok.text in (";", "{", "}", ":")


def _stmt_start_line(f: _File, ln: int) -> bool:
    toks = f.line_tokens(ln)
    if not toks:
        return False
    first = toks[0]
    if first.kind is TokenKind.OP and first.text in (".", ",", ")", "]"):
        return False
    if first.kind is TokenKind.KEYWORD and first.text in ("else", "case", "default"):
        return False
    prev = ln - 1
    while prev >= 0 and not f.line_tokens(prev):
        prev -= 1
    if prev < 0:
        return False
    return _ends_statement(f, f.line_tokens(prev)[-1])


def _insertion_lines(f: _File) -> list[int]:
    """Lines a new statement line can be inserted before, inside functions."""
    out = []
    for fn in f.functions:
        for ln in range(fn.body_start_line, fn.end_line + 1):
            toks = f.line_tokens(ln)
            if not toks:
                continue
            if _stmt_start_line(f, ln) or (
                toks[0].text == "}" and _stmt_start_line_allows_close(f, ln)
            ):
                out.append(ln)
    return sorted(set(out))


def _stmt_start_line_allows_close(f: _File, ln: int) -> bool:
    prev = ln - 1
    while prev >= 0 and not f.line_tokens(prev):
        prev -= 1
    return prev >= 0 and _ends_statement(f, f.line_tokens(prev)[-1])


def _insert_lines(f: _File, at_line: int, new_lines: list[str]) -> str:
    lines = f.lines[:]
    for i, ln in enumerate(new_lines):
        lines.insert(at_line + i, ln)
    return "\n".join(lines)


def _splice(text: str, start: int, end: int, replacement: str) -> str:
    return text[:start] + replacement + text[end:]


def _single_line_header(f: _File, ln: int, keyword: str):
    """For a line 'kw ... {', return (kw_token, brace_token) or None."""
    toks = f.line_tokens(ln)
    if not toks or toks[0].kind is not TokenKind.KEYWORD or toks[0].text != keyword:
        return None
    if toks[-1].kind is not TokenKind.OP or toks[-1].text != "{":
        return None
    return toks[0], toks[-1]


def _depth0_ops(f: _File, toks: list[Token], texts: tuple[str, ...]) -> list[Token]:
    depth = 0
    found = []
    for t in toks:
        if t.kind is TokenKind.OP:
            if t.text in "([":
                depth += 1
            elif t.text in ")]":
                depth -= 1
            elif depth == 0 and t.text in texts:
                found.append(t)
    return found


def _close_brace_line(f: _File, brace_tok: Token) -> int:
    idx = f.token_index(brace_tok)
    close = match_brace(f.tokens, idx)
    return line_of_offset(f.offsets, f.tokens[close].start)


def _reindent_lines(f: _File, lines: list[str]) -> list[str]:
    return [f.indent_unit + ln if ln.strip() else ln for ln in lines]


# ---------------------------------------------------------------------------
# Renames
# ---------------------------------------------------------------------------

def _top_level_names(f: _File) -> set[str]:
    names = set()
    depth = 0
    for t in f.tokens:
        if t.kind is TokenKind.OP and t.text in "{}":
            depth += 1 if t.text == "{" else -1
        elif depth == 0 and t.kind is TokenKind.IDENT:
            names.add(t.text)
    return names


def _rename_ident(f: _File, old: str, new: str, start: int = 0, end: int | None = None) -> str:
    end = len(f.text) if end is None else end
    text = f.text
    edits = []
    for i, t in enumerate(f.tokens):
        if t.kind is not TokenKind.IDENT or t.text != old:
            continue
        if not (start <= t.start and t.end <= end):
            continue
        prev = f.tokens[i - 1] if i > 0 else None
        nxt = f.tokens[i + 1] if i + 1 < len(f.tokens) else None
        if prev is not None and prev.text in (".", "->", "struct", "union", "enum"):
            continue  # member access / tag namespace
        if (
            prev is not None
            and prev.text in ("{", ",")
            and nxt is not None
            and nxt.text == ":"
        ):
            continue  # keyed struct literal field
        edits.append((t.start, t.end))
    if not edits:
        raise NotApplicable(f"no occurrences of {old!r}")
    for s, e in reversed(edits):
        text = text[:s] + new + text[e:]
    return text


def function_rename(f: _File, rng: random.Random):
    reserved = {"main", "init"}
    candidates = []
    depth = 0
    for i, t in enumerate(f.tokens):
        if t.kind is TokenKind.OP and t.text in "{}":
            depth += 1 if t.text == "{" else -1
            continue
        if depth != 0:
            continue
        if f.language is Language.GO and t.kind is TokenKind.KEYWORD and t.text == "func":
            nxt = f.tokens[i + 1] if i + 1 < len(f.tokens) else None
            if nxt is not None and nxt.kind is TokenKind.IDENT and nxt.text not in reserved:
                candidates.append(nxt.text)
    if f.language is Language.C_CPP:
        candidates = [fn.name for fn in f.functions if fn.name not in reserved]
    if not candidates:
        raise NotApplicable("no renameable function")
    old = rng.choice(sorted(set(candidates)))
    new = _fresh(f.identifiers(), rng, _FN_WORDS)
    return _rename_ident(f, old, new), new, f"renamed function {old} to {new}"


def _go_local_decls(f: _File, fn: FunctionSpan) -> set[str]:
    names = set()
    start = f.offsets[fn.body_start_line]
    end = f.offsets[min(fn.end_line + 1, len(f.offsets) - 1)]
    toks = [t for t in f.tokens if start <= t.start and t.end <= end]
    for i, t in enumerate(toks):
        if t.kind is TokenKind.OP and t.text == ":=":
            j = i - 1
            while j >= 0:
                if toks[j].kind is TokenKind.IDENT:
                    names.add(toks[j].text)
                    if j - 1 >= 0 and toks[j - 1].text == ",":
                        j -= 2
                        continue
                break
        if t.kind is TokenKind.KEYWORD and t.text == "var":
            j = i + 1
            while j < len(toks) and toks[j].kind is TokenKind.IDENT:
                names.add(toks[j].text)
                if j + 1 < len(toks) and toks[j + 1].text == ",":
                    j += 2
                    continue
                break
    return names


def _c_local_decls(f: _File, fn: FunctionSpan) -> set[str]:
    names = set()
    for ln in range(fn.body_start_line, fn.end_line):
        toks = f.line_tokens(ln)
        if not toks or not _stmt_start_line(f, ln):
            continue
        if not (toks[0].kind is TokenKind.KEYWORD and toks[0].text in _C_TYPE_KEYWORDS):
            continue
        j = 1
        while j < len(toks) and (
            (toks[j].kind is TokenKind.KEYWORD and toks[j].text in _C_TYPE_KEYWORDS)
            or toks[j].text == "*"
        ):
            j += 1
        while j < len(toks) and toks[j].kind is TokenKind.IDENT:
            nxt = toks[j + 1].text if j + 1 < len(toks) else ""
            if nxt not in ("=", ";", ",", "["):
                break
            names.add(toks[j].text)
            while j + 1 < len(toks) and toks[j + 1].text != ",":
                if toks[j + 1].text in "([":
                    break
                j += 1
            j += 2
    return names


def variables_rename(f: _File, rng: random.Random):
    top = _top_level_names(f)
    options = []
    for fn in f.functions:
        decls = (
            _go_local_decls(f, fn) if f.language is Language.GO else _c_local_decls(f, fn)
        )
        decls = {d for d in decls if d not in top and d != "_"}
        if decls:
            options.append((fn, sorted(decls)))
    if not options:
        raise NotApplicable("no function with renameable locals")
    fn, names = options[rng.randrange(len(options))]
    existing = f.identifiers()
    renames = [(old, _fresh(existing, rng, _VAR_WORDS)) for old in names]
    text = f.text
    for old, new in renames:
        cur = _File(text, f.language)
        cur_fn = next(x for x in cur.functions if x.start_line == fn.start_line)
        start = cur.offsets[cur_fn.start_line]
        end = cur.offsets[min(cur_fn.end_line + 1, len(cur.offsets) - 1)]
        text = _rename_ident(cur, old, new, start, end)
    noted = ", ".join(f"{o}->{n}" for o, n in renames)
    return text, fn.name, f"renamed locals in {fn.name}: {noted}"


# ---------------------------------------------------------------------------
# Insertions
# ---------------------------------------------------------------------------

def insert_junk_loop(f: _File, rng: random.Random):
    sites = _insertion_lines(f)
    if not sites:
        raise NotApplicable("no insertion point")
    ln = sites[rng.randrange(len(sites))]
    ind = f.indent_of(ln)
    v = _fresh(f.identifiers(), rng, _VAR_WORDS)
    if f.language is Language.GO:
        new = [f"{ind}for {v} := 0; {v} < 0; {v}++ {{", f"{ind}}}"]
    else:
        new = [f"{ind}for (int {v} = 0; {v} < 0; ++{v}) {{", f"{ind}}}"]
    return _insert_lines(f, ln, new), f.enclosing_function(ln), "inserted junk loop"


def insert_variables(f: _File, rng: random.Random):
    sites = _insertion_lines(f)
    if not sites:
        raise NotApplicable("no insertion point")
    ln = sites[rng.randrange(len(sites))]
    ind = f.indent_of(ln)
    v = _fresh(f.identifiers(), rng, _VAR_WORDS)
    k = rng.randrange(0, 100)
    if f.language is Language.GO:
        new = [f"{ind}{v} := {k}", f"{ind}_ = {v}"]
    else:
        new = [f"{ind}int {v} = {k};", f"{ind}(void){v};"]
    return _insert_lines(f, ln, new), f.enclosing_function(ln), "inserted unused variable"


def insert_junk_function(f: _File, rng: random.Random):
    name = _fresh(f.identifiers(), rng, _FN_WORDS)
    k = rng.randrange(2, 40)
    if f.language is Language.GO:
        chunk = f"\nfunc {name}() int {{\n\treturn {k}\n}}\n"
    else:
        chunk = f"\nstatic int {name}(void) {{\n    return {k};\n}}\n"
    text = f.text if f.text.endswith("\n") else f.text + "\n"
    return text + chunk, name, "appended uncalled function"


def statement_wrapping(f: _File, rng: random.Random):
    banned_first = {
        "if", "for", "switch", "select", "while", "do", "func", "var", "const", "type",
        "package", "import", "return", "case", "default", "else", "goto", "struct",
    }
    sites = []
    for fn in f.functions:
        for ln in range(fn.body_start_line, fn.body_end_line + 1):
            toks = f.line_tokens(ln)
            if not toks or not _stmt_start_line(f, ln):
                continue
            if not _ends_statement(f, toks[-1]) or toks[-1].text in ("{", ":"):
                continue
            first = toks[0]
            if first.text in banned_first:
                continue
            if first.kind is TokenKind.KEYWORD and f.language is Language.C_CPP and first.text in _C_TYPE_KEYWORDS:
                continue  # declaration: braces would change its scope
            if len(toks) > 1 and toks[1].text == ":":
                continue  # label
            if any(t.text in (":=",) for t in toks) or (
                f.language is Language.GO and toks[0].text in ("var", "const")
            ):
                continue
            if f.language is Language.C_CPP and toks[-1].text != ";":
                continue
            if f.language is Language.C_CPP and len(toks) > 1 and toks[0].kind is TokenKind.IDENT and toks[1].kind is TokenKind.IDENT:
                continue  # typedef'd declaration
            sites.append(ln)
    if not sites:
        raise NotApplicable("no wrappable single-line statement")
    ln = sites[rng.randrange(len(sites))]
    ind = f.indent_of(ln)
    header = "if true {" if f.language is Language.GO else "if (1) {"
    lines = f.lines[:]
    lines[ln] = f"{ind}{f.indent_unit}{lines[ln].lstrip()}"
    lines.insert(ln, f"{ind}{header}")
    lines.insert(ln + 2, f"{ind}}}")
    return "\n".join(lines), f.enclosing_function(ln), "wrapped statement with if"


# ---------------------------------------------------------------------------
# Arithmetic methods
# ---------------------------------------------------------------------------

_AUG_OPS = ("+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=")


def modify_operations(f: _File, rng: random.Random):
    sites = []
    for fn in f.functions:
        for ln in range(fn.body_start_line, fn.body_end_line + 1):
            toks = f.line_tokens(ln)
            if not toks or not _stmt_start_line(f, ln):
                continue
            if f.language is Language.C_CPP and (not toks or toks[-1].text != ";"):
                continue
            # Leading target: IDENT(.IDENT)*
            j = 0
            if toks[j].kind is not TokenKind.IDENT:
                continue
            j += 1
            while j + 1 < len(toks) and toks[j].text == "." and toks[j + 1].kind is TokenKind.IDENT:
                j += 2
            if j >= len(toks):
                continue
            op = toks[j]
            body_end = len(toks) - (1 if f.language is Language.C_CPP else 0)
            if op.kind is TokenKind.OP and op.text in _AUG_OPS and j + 1 <= body_end - 1:
                sites.append((ln, j, op, body_end))
            elif (
                op.kind is TokenKind.OP
                and op.text in ("++", "--")
                and j + 1 == body_end
            ):
                sites.append((ln, j, op, body_end))
    if not sites:
        raise NotApplicable("no compound assignment statement")
    ln, j, op, body_end = sites[rng.randrange(len(sites))]
    toks = f.line_tokens(ln)
    target = f.text[toks[0].start : toks[j - 1].end]
    ind = f.indent_of(ln)
    semi = ";" if f.language is Language.C_CPP else ""
    if op.text in ("++", "--"):
        base_op = "+" if op.text == "++" else "-"
        stmt = f"{target} = {target} {base_op} 1{semi}"
    else:
        value = f.text[toks[j + 1].start : toks[body_end - 1].end]
        base_op = op.text[:-1]
        if body_end - (j + 1) > 1:
            value = f"({value})"
        stmt = f"{target} = {target} {base_op} {value}{semi}"
    lines = f.lines[:]
    lines[ln] = ind + stmt
    return "\n".join(lines), f.enclosing_function(ln), f"expanded {op.text} statement"


_PLAIN_INT = re.compile(r"^[0-9][0-9_]*$")


def equi_arithmetic_expression(f: _File, rng: random.Random):
    sites = []
    for t in f.tokens:
        if t.kind is not TokenKind.INT or not _PLAIN_INT.match(t.text):
            continue
        value = int(t.text.replace("_", ""))
        if not (2 <= value <= 10**9):
            continue
        ln = line_of_offset(f.offsets, t.start)
        line_toks = f.line_tokens(ln)
        if f.language is Language.C_CPP and line_toks and line_toks[0].text == "#":
            continue  # preprocessor directives want plain literals
        sites.append((t, value, ln))
    if not sites:
        raise NotApplicable("no integer literal to decompose")
    tok, value, ln = sites[rng.randrange(len(sites))]
    k = rng.randrange(1, min(value - 1, 9) + 1)
    new_text = _splice(f.text, tok.start, tok.end, f"({value - k} + {k})")
    return new_text, f.enclosing_function(ln), f"decomposed literal {value}"


# ---------------------------------------------------------------------------
# Logic methods
# ---------------------------------------------------------------------------

_CMP_MIRROR = {"<": ">", ">": "<", "<=": ">=", ">=": "<=", "==": "==", "!=": "!="}
_OPERAND_OPS = {".", "+", "-", "*", "/", "%", "[", "]"}


def _scan_operand(f: _File, toks: list[Token], idx: int, step: int) -> tuple[int, int] | None:
    """Scan a pure operand left (step=-1) or right (step=+1) of toks[idx].
    Returns (first_idx, last_idx) inclusive, or None."""
    j = idx + step
    collected = []
    bracket = 0
    while 0 <= j < len(toks):
        t = toks[j]
        ok = t.kind in (TokenKind.IDENT, TokenKind.INT, TokenKind.FLOAT, TokenKind.CHAR, TokenKind.STRING)
        if t.kind is TokenKind.OP and t.text in _OPERAND_OPS:
            if t.text in "[]":
                bracket += 1 if t.text == ("]" if step < 0 else "[") else -1
                if bracket < 0:
                    break
            ok = True
        if not ok:
            break
        collected.append(j)
        j += step
    while collected and bracket != 0:
        # Unbalanced tail; trim conservatively.
        collected.pop()
        bracket = 0
        break
    if not collected:
        return None
    lo, hi = min(collected), max(collected)
    return lo, hi


def swap_boolean_expression(f: _File, rng: random.Random):
    candidate_lines = {}
    for fn in f.functions:
        for ln in range(fn.start_line, fn.end_line + 1):
            toks = f.line_tokens(ln)
            if f.language is Language.C_CPP:
                if not toks or toks[0].text not in ("if", "while", "for", "return"):
                    continue
            swaps = []
            for idx, t in enumerate(toks):
                if t.kind is not TokenKind.OP or t.text not in _CMP_MIRROR:
                    continue
                left = _scan_operand(f, toks, idx, -1)
                right = _scan_operand(f, toks, idx, +1)
                if left and right:
                    swaps.append((left, idx, right))
            if swaps:
                candidate_lines[ln] = swaps
    if not candidate_lines:
        raise NotApplicable("no comparison with swappable pure operands")
    ln = sorted(candidate_lines)[rng.randrange(len(candidate_lines))]
    toks = f.line_tokens(ln)
    text = f.text
    for (llo, lhi), idx, (rlo, rhi) in sorted(candidate_lines[ln], key=lambda s: -s[0][0]):
        left_src = text[toks[llo].start : toks[lhi].end]
        right_src = text[toks[rlo].start : toks[rhi].end]
        mirror = _CMP_MIRROR[toks[idx].text]
        text = _splice(text, toks[llo].start, toks[rhi].end, f"{right_src} {mirror} {left_src}")
    return text, f.enclosing_function(ln), "mirrored comparison operands"


def _condition_span(f: _File, ln: int) -> tuple[int, int] | None:
    """Char span of the condition of a single-line if/for/while header."""
    toks = f.line_tokens(ln)
    if not toks or toks[0].kind is not TokenKind.KEYWORD:
        return None
    kw = toks[0].text
    if f.language is Language.GO:
        if kw not in ("if", "for") or toks[-1].text != "{":
            return None
        inner = toks[1:-1]
        if not inner or _depth0_ops(f, inner, (";",)):
            return None  # init clause or three-clause for
        if any(t.kind is TokenKind.KEYWORD and t.text == "range" for t in inner):
            return None
        if any(t.text == ":=" for t in inner):
            return None
        return inner[0].start, inner[-1].end
    if kw not in ("if", "while") or len(toks) < 4 or toks[1].text != "(":
        return None
    open_idx = f.token_index(toks[1])
    close_idx = match_brace(f.tokens, open_idx)
    close_tok = f.tokens[close_idx]
    if line_of_offset(f.offsets, close_tok.start) != ln:
        return None
    inner_start = toks[1].end
    return inner_start, close_tok.start


def equi_boolean_logic(f: _File, rng: random.Random):
    sites = []
    for fn in f.functions:
        for ln in range(fn.start_line, fn.end_line + 1):
            span = _condition_span(f, ln)
            if span and span[1] > span[0]:
                sites.append((ln, span))
    if not sites:
        raise NotApplicable("no rewritable condition")
    ln, (start, end) = sites[rng.randrange(len(sites))]
    cond = f.text[start:end].strip()
    toks = [t for t in f.tokens if start <= t.start and t.end <= end]
    bools = _depth0_ops(f, toks, ("&&", "||"))
    use_demorgan = bool(bools) and rng.random() < 0.7
    if use_demorgan:
        split_on = "||" if any(b.text == "||" for b in bools) else "&&"
        joiner = "&&" if split_on == "||" else "||"
        cuts = [b for b in bools if b.text == split_on]
        parts = []
        prev = start
        for b in cuts:
            parts.append(f.text[prev : b.start].strip())
            prev = b.end
        parts.append(f.text[prev:end].strip())
        new = "!(" + f" {joiner} ".join(f"!({p})" for p in parts) + ")"
        note = "applied De Morgan rewrite"
    else:
        new = f"!(!({cond}))"
        note = "applied double negation"
    return _splice(f.text, start, end, new), f.enclosing_function(ln), note


# ---------------------------------------------------------------------------
# Condition methods
# ---------------------------------------------------------------------------

def _body_range(f: _File, header_ln: int) -> tuple[int, int] | None:
    """(first body line, close brace line) for a header ending in '{'."""
    toks = f.line_tokens(header_ln)
    if not toks or toks[-1].text != "{":
        return None
    close_ln = _close_brace_line(f, toks[-1])
    close_toks = f.line_tokens(close_ln)
    if close_ln <= header_ln or close_toks[0].text != "}":
        return None
    return header_ln + 1, close_ln


def _followed_by_else(f: _File, close_ln: int) -> bool:
    toks = f.line_tokens(close_ln)
    return any(t.kind is TokenKind.KEYWORD and t.text == "else" for t in toks)


def div_composed_if(f: _File, rng: random.Random):
    sites = []
    for fn in f.functions:
        for ln in range(fn.body_start_line, fn.body_end_line + 1):
            toks = f.line_tokens(ln)
            if not toks or toks[0].text != "if":
                continue
            span = _c_if_condition(f, ln) if f.language is Language.C_CPP else _condition_span(f, ln)
            if not span:
                continue
            inner = [t for t in f.tokens if span[0] <= t.start and t.end <= span[1]]
            ands = _depth0_ops(f, inner, ("&&",))
            if not ands or _depth0_ops(f, inner, ("||",)):
                continue
            rng_range = _body_range(f, ln)
            if not rng_range or _followed_by_else(f, rng_range[1]):
                continue
            sites.append((ln, span, ands[0], rng_range))
    if not sites:
        raise NotApplicable("no composed if without else")
    ln, (start, end), and_tok, (body_start, close_ln) = sites[rng.randrange(len(sites))]
    ind = f.indent_of(ln)
    unit = f.indent_unit
    first = f.text[start : and_tok.start].strip()
    rest = f.text[and_tok.end : end].strip()
    if f.language is Language.GO:
        headers = [f"{ind}if {first} {{", f"{ind}{unit}if {rest} {{"]
    else:
        headers = [f"{ind}if ({first}) {{", f"{ind}{unit}if ({rest}) {{"]
    body = _reindent_lines(f, f.lines[body_start:close_ln])
    new_lines = headers + body + [f"{ind}{unit}}}", f"{ind}}}"]
    lines = f.lines[:ln] + new_lines + f.lines[close_ln + 1 :]
    return "\n".join(lines), f.enclosing_function(ln), "split composed condition into nested ifs"


def _c_if_condition(f: _File, ln: int) -> tuple[int, int] | None:
    toks = f.line_tokens(ln)
    if not toks or toks[0].text != "if" or len(toks) < 3 or toks[1].text != "(":
        return None
    if toks[-1].text != "{":
        return None
    open_idx = f.token_index(toks[1])
    close_idx = match_brace(f.tokens, open_idx)
    if line_of_offset(f.offsets, f.tokens[close_idx].start) != ln:
        return None
    return toks[1].end, f.tokens[close_idx].start


def div_if_else(f: _File, rng: random.Random):
    sites = []
    for i in range(len(f.tokens) - 2):
        a, b, c = f.tokens[i : i + 3]
        if a.text == "}" and b.text == "else" and c.text == "if":
            sites.append(i)
    if not sites:
        raise NotApplicable("no else-if chain")
    i = sites[rng.randrange(len(sites))]
    else_tok, if_tok = f.tokens[i + 1], f.tokens[i + 2]
    # Walk the chain to its final close brace.
    j = i + 2
    end_tok = None
    while j < len(f.tokens):
        while j < len(f.tokens) and f.tokens[j].text != "{":
            j += 1
        close = match_brace(f.tokens, j)
        end_tok = f.tokens[close]
        if close + 1 < len(f.tokens) and f.tokens[close + 1].text == "else":
            j = close + 1
            continue
        break
    ln = line_of_offset(f.offsets, else_tok.start)
    ind = f.indent_of(ln)
    unit = f.indent_unit
    chunk = f.text[if_tok.start : end_tok.end]
    chunk_lines = chunk.split("\n")
    rebuilt = [f"{ind}{unit}{chunk_lines[0]}"] + [
        unit + cl if cl.strip() else cl for cl in chunk_lines[1:]
    ]
    new = "else {\n" + "\n".join(rebuilt) + f"\n{ind}}}"
    text = _splice(f.text, else_tok.start, end_tok.end, new)
    return text, f.enclosing_function(ln), "pushed else-if chain under an else"


def if_continue_to_if_else(f: _File, rng: random.Random):
    sites = []
    for fn in f.functions:
        for ln in range(fn.body_start_line, fn.body_end_line):
            header = _go_or_c_if_header(f, ln)
            if not header:
                continue
            rng_range = _body_range(f, ln)
            if not rng_range:
                continue
            body_start, close_ln = rng_range
            body_toks = [t for bl in range(body_start, close_ln) for t in f.line_tokens(bl)]
            want = ["continue"] if f.language is Language.GO else ["continue", ";"]
            if [t.text for t in body_toks] != want:
                continue
            if len(f.line_tokens(close_ln)) != 1:
                continue
            # Enclosing block close: first line after close_ln at strictly
            # smaller indent that is just '}' (plus optional 'while' for C do).
            ind = f.indent_of(ln)
            rest_end = None
            for after in range(close_ln + 1, fn.end_line + 1):
                toks = f.line_tokens(after)
                if toks and toks[0].text == "}" and len(f.indent_of(after)) < len(ind):
                    rest_end = after
                    break
            if rest_end is None or rest_end == close_ln + 1:
                continue
            if any(f.line_tokens(x) and len(f.indent_of(x)) < len(ind) for x in range(close_ln + 1, rest_end)):
                continue  # rest is not a flat tail of this block
            sites.append((ln, close_ln, rest_end))
    if not sites:
        raise NotApplicable("no if-continue followed by statements")
    ln, close_ln, rest_end = sites[rng.randrange(len(sites))]
    ind = f.indent_of(close_ln)
    lines = f.lines[:]
    lines[close_ln] = f"{ind}}} else {{"
    for x in range(close_ln + 1, rest_end):
        if lines[x].strip():
            lines[x] = f.indent_unit + lines[x]
    lines.insert(rest_end, f"{ind}}}")
    return "\n".join(lines), f.enclosing_function(ln), "moved loop tail under else"


def _go_or_c_if_header(f: _File, ln: int):
    toks = f.line_tokens(ln)
    if not toks or toks[0].text != "if" or toks[-1].text != "{":
        return None
    return toks


# ---------------------------------------------------------------------------
# Loop methods
# ---------------------------------------------------------------------------

def _body_has_loop_continue(f: _File, body_start: int, close_ln: int) -> bool:
    """Any continue bound to THIS loop (skips nested for/while bodies)."""
    skip_until = -1
    for ln in range(body_start, close_ln):
        toks = f.line_tokens(ln)
        if ln <= skip_until:
            continue
        for t in toks:
            if t.kind is TokenKind.KEYWORD and t.text in ("for", "while", "do"):
                rng_range = _body_range(f, ln)
                if rng_range:
                    skip_until = rng_range[1]
                break
        if ln <= skip_until:
            continue
        if any(t.kind is TokenKind.KEYWORD and t.text == "continue" for t in toks):
            return True
    return False


def for_while_transformation(f: _File, rng: random.Random):
    three_clause = []
    cond_only = []
    for fn in f.functions:
        for ln in range(fn.body_start_line, fn.body_end_line + 1):
            toks = f.line_tokens(ln)
            if not toks or toks[-1].text != "{":
                continue
            if f.language is Language.GO:
                if toks[0].text != "for":
                    continue
                inner = toks[1:-1]
                semis = _depth0_ops(f, inner, (";",))
                rng_range = _body_range(f, ln)
                if not rng_range:
                    continue
                if len(semis) == 2:
                    if not _body_has_loop_continue(f, *rng_range):
                        three_clause.append((ln, inner, semis, rng_range))
                elif not semis and inner and not any(
                    t.text == ":=" or (t.kind is TokenKind.KEYWORD and t.text == "range") for t in inner
                ):
                    cond_only.append((ln, inner, rng_range))
            else:
                rng_range = _body_range(f, ln)
                if not rng_range:
                    continue
                if toks[0].text == "for" and len(toks) > 2 and toks[1].text == "(":
                    open_idx = f.token_index(toks[1])
                    close_idx = match_brace(f.tokens, open_idx)
                    inner = f.tokens[open_idx + 1 : close_idx]
                    semis = _depth0_ops(f, inner, (";",))
                    if len(semis) == 2 and not _body_has_loop_continue(f, *rng_range):
                        three_clause.append((ln, inner, semis, rng_range))
                elif toks[0].text == "while" and len(toks) > 2 and toks[1].text == "(":
                    open_idx = f.token_index(toks[1])
                    close_idx = match_brace(f.tokens, open_idx)
                    inner = f.tokens[open_idx + 1 : close_idx]
                    if inner:
                        cond_only.append((ln, inner, rng_range))
    if three_clause:
        ln, inner, semis, (body_start, close_ln) = three_clause[rng.randrange(len(three_clause))]
        s1, s2 = semis
        init = f.text[inner[0].start : s1.start].strip() if inner[0].start < s1.start else ""
        cond = f.text[s1.end : s2.start].strip()
        post = f.text[s2.end : inner[-1].end].strip() if s2 is not inner[-1] else ""
        if not cond:
            raise NotApplicable("loop without condition")
        ind = f.indent_of(ln)
        unit = f.indent_unit
        lines = f.lines[:]
        body = _reindent_lines(f, lines[body_start:close_ln])
        if f.language is Language.GO:
            block = [f"{ind}{{"]
            if init:
                block.append(f"{ind}{unit}{init}")
            block.append(f"{ind}{unit}for {cond} {{")
            block.extend(body)
            if post:
                block.append(f"{ind}{unit}{unit}{post}")
            block.extend([f"{ind}{unit}}}", f"{ind}}}"])
        else:
            block = [f"{ind}{{"]
            if init:
                block.append(f"{ind}{unit}{init};")
            block.append(f"{ind}{unit}while ({cond}) {{")
            block.extend(body)
            if post:
                block.append(f"{ind}{unit}{unit}{post};")
            block.extend([f"{ind}{unit}}}", f"{ind}}}"])
        new_lines = lines[:ln] + block + lines[close_ln + 1 :]
        return "\n".join(new_lines), f.enclosing_function(ln), "hoisted loop clauses around a condition loop"
    if cond_only:
        ln, inner, _ = cond_only[rng.randrange(len(cond_only))]
        cond = f.text[inner[0].start : inner[-1].end]
        if f.language is Language.GO:
            new = f"for ; {cond}; {{"
        else:
            new = f"for (; {cond}; ) {{"
        ind = f.indent_of(ln)
        lines = f.lines[:]
        lines[ln] = ind + new
        return "\n".join(lines), f.enclosing_function(ln), "rewrote condition loop in three-clause form"
    raise NotApplicable("no transformable loop")


# ---------------------------------------------------------------------------
# Decomposition methods
# ---------------------------------------------------------------------------

def extract_if(f: _File, rng: random.Random):
    if f.language is not Language.GO:
        raise NotApplicable("closure extraction implemented for Go only")
    sites = []
    for fn in f.functions:
        for ln in range(fn.body_start_line, fn.body_end_line + 1):
            toks = f.line_tokens(ln)
            if not toks or toks[0].text != "if":
                continue
            span = _condition_span(f, ln)
            if span and span[1] > span[0]:
                sites.append((ln, span))
    if not sites:
        raise NotApplicable("no extractable if condition")
    ln, (start, end) = sites[rng.randrange(len(sites))]
    cond = f.text[start:end].strip()
    name = _fresh(f.identifiers(), rng, ["check", "cond", "gate", "test"])
    ind = f.indent_of(ln)
    text = _splice(f.text, start, end, f"{name}()")
    helper = [
        f"{ind}{name} := func() bool {{",
        f"{ind}{f.indent_unit}return {cond}",
        f"{ind}}}",
    ]
    cur = _File(text, f.language)
    return (
        _insert_lines(cur, ln, helper),
        f.enclosing_function(ln),
        f"extracted if condition into {name}",
    )


TRANSFORMS = {
    "function_rename": function_rename,
    "variables_rename": variables_rename,
    "insert_junk_loop": insert_junk_loop,
    "insert_variables": insert_variables,
    "insert_junk_function": insert_junk_function,
    "statement_wrapping": statement_wrapping,
    "modify_operations": modify_operations,
    "equi_arithmetic_expression": equi_arithmetic_expression,
    "swap_boolean_expression": swap_boolean_expression,
    "equi_boolean_logic": equi_boolean_logic,
    "div_composed_if": div_composed_if,
    "div_if_else": div_if_else,
    "if_continue_to_if_else": if_continue_to_if_else,
    "for_while_transformation": for_while_transformation,
    "extract_if": extract_if,
}


def apply_brace_transform(text: str, language: Language, method_id: str, rng: random.Random):
    fn = TRANSFORMS.get(method_id)
    if fn is None:
        raise NotApplicable(f"{method_id} has no brace-language rule")
    return fn(_File(text, language), rng)
