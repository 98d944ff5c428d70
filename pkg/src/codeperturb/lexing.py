"""A small multi-language lexer.

Produces raw token streams with source spans for the five language modes.
Whitespace and comments are skipped. The lexer is deliberately permissive
about operators (any unexpected punctuation becomes a one-character OP
token); it raises LexError only for genuinely unlexable input such as an
unterminated string or block comment.

Spans are (start, end) offsets into the text string.
"""

from __future__ import annotations

import keyword
import re
from dataclasses import dataclass
from enum import Enum

from .core import Language
from .errors import LexError


class TokenKind(Enum):
    KEYWORD = "keyword"
    IDENT = "ident"
    INT = "int"
    FLOAT = "float"
    STRING = "string"
    CHAR = "char"
    LIFETIME = "lifetime"
    OP = "op"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    start: int
    end: int


_GO_KEYWORDS = frozenset(
    "break case chan const continue default defer else fallthrough for func go goto "
    "if import interface map package range return select struct switch type var".split()
)

_C_CPP_KEYWORDS = frozenset(
    "auto break case char class const constexpr continue default delete do double else "
    "enum explicit extern false float for friend goto if inline int long mutable namespace "
    "new noexcept nullptr operator private protected public register return short signed "
    "sizeof static struct switch template this throw true try typedef typename union "
    "unsigned using virtual void volatile wchar_t while bool catch decltype static_assert".split()
)

_RUST_KEYWORDS = frozenset(
    "as async await break const continue crate dyn else enum extern false fn for if impl "
    "in let loop match mod move mut pub ref return self Self static struct super trait "
    "true type unsafe use where while".split()
)

_JAVA_KEYWORDS = frozenset(
    "abstract assert boolean break byte case catch char class const continue default do "
    "double else enum extends final finally float for goto if implements import instanceof "
    "int interface long native new package private protected public return short static "
    "strictfp super switch synchronized this throw throws transient try void volatile "
    "while true false null".split()
)

KEYWORDS: dict[Language, frozenset[str]] = {
    Language.PYTHON: frozenset(keyword.kwlist),
    Language.GO: _GO_KEYWORDS,
    Language.C_CPP: _C_CPP_KEYWORDS,
    Language.RUST_LANG: _RUST_KEYWORDS,
    Language.JAVA: _JAVA_KEYWORDS,
}

# Multi-character operators, longest first. Matching single characters is the
# fallback, so this list only needs the glyph runs that must stay together.
_MULTI_OPS = [
    "<<=", ">>=", "**=", "//=", "...", "..=", "<=>", ">>>", "->*",
    "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "+=", "-=", "*=", "/=",
    "%=", "&=", "|=", "^=", ":=", "->", "=>", "::", "++", "--", "**", "//",
    "..", "<-",
]

_IDENT_RE = re.compile(r"[^\W\d]\w*", re.UNICODE)
_PY_STR_PREFIX_RE = re.compile(r"(?i)(?:rb|br|rf|fr|[rbfu])?(?=['\"])")
_NUM_START_RE = re.compile(r"\d")


def _line_comment_end(text: str, pos: int) -> int:
    nl = text.find("\n", pos)
    return len(text) if nl == -1 else nl


def _block_comment_end(text: str, pos: int, nested: bool) -> int:
    """pos points at the opening slash-star. Returns offset one past the close."""
    depth = 1
    i = pos + 2
    n = len(text)
    while i < n - 1:
        two = text[i : i + 2]
        if nested and two == "/*":
            depth += 1
            i += 2
        elif two == "*/":
            depth -= 1
            i += 2
            if depth == 0:
                return i
        else:
            i += 1
    raise LexError("unterminated block comment", pos)


def _scan_quoted(text: str, pos: int, quote: str, allow_escapes: bool, multiline: bool) -> int:
    """Scan past a quoted literal starting at the opening quote sequence."""
    i = pos + len(quote)
    n = len(text)
    while i < n:
        c = text[i]
        if allow_escapes and c == "\\":
            i += 2
            continue
        if text.startswith(quote, i):
            return i + len(quote)
        if c == "\n" and not multiline:
            break
        i += 1
    raise LexError(f"unterminated {quote!r} literal", pos)


def _scan_number(text: str, pos: int, language: Language) -> tuple[int, TokenKind]:
    n = len(text)
    i = pos
    kind = TokenKind.INT
    if text.startswith(("0x", "0X", "0b", "0B", "0o", "0O"), i) and i + 2 < n:
        i += 2
        while i < n and (text[i].isalnum() or text[i] == "_"):
            i += 1
        return i, TokenKind.INT
    while i < n and (text[i].isdigit() or text[i] == "_"):
        i += 1
    if i < n and text[i] == "." and i + 1 < n and text[i + 1].isdigit():
        kind = TokenKind.FLOAT
        i += 1
        while i < n and (text[i].isdigit() or text[i] == "_"):
            i += 1
    elif i < n and text[i] == "." and not text.startswith("..", i):
        # Trailing-dot float like "1." unless a method call follows (1.max()).
        if i + 1 >= n or not (text[i + 1].isalpha() or text[i + 1] == "_"):
            kind = TokenKind.FLOAT
            i += 1
    if i < n and text[i] in "eE" and (
        (i + 1 < n and text[i + 1].isdigit())
        or (i + 2 < n and text[i + 1] in "+-" and text[i + 2].isdigit())
    ):
        kind = TokenKind.FLOAT
        i += 1
        if text[i] in "+-":
            i += 1
        while i < n and text[i].isdigit():
            i += 1
    # Type/width suffixes: u64, f32, UL, j, ...
    suffix_start = i
    while i < n and (text[i].isalnum() or text[i] == "_"):
        i += 1
    suffix = text[suffix_start:i]
    if suffix and language in (Language.JAVA, Language.C_CPP) and suffix[0] in "fFdD":
        kind = TokenKind.FLOAT
    if suffix and language is Language.PYTHON and suffix in ("j", "J"):
        kind = TokenKind.FLOAT
    if suffix and language is Language.RUST_LANG and suffix.startswith("f"):
        kind = TokenKind.FLOAT
    return i, kind


def _scan_rust_quote(text: str, pos: int) -> tuple[int, TokenKind]:
    """Disambiguate Rust char literals from lifetimes. pos is at the quote."""
    n = len(text)
    i = pos + 1
    if i < n and text[i] == "\\":
        j = i + 2
        if i + 1 < n and text[i + 1] == "u" and j < n and text[j] == "{":
            close = text.find("}", j)
            if close == -1:
                raise LexError("unterminated char escape", pos)
            j = close + 1
        if j < n and text[j] == "'":
            return j + 1, TokenKind.CHAR
        raise LexError("unterminated char literal", pos)
    if i < n and i + 1 < n and text[i + 1] == "'" and text[i] != "'":
        return i + 2, TokenKind.CHAR
    m = _IDENT_RE.match(text, i)
    if m:
        return m.end(), TokenKind.LIFETIME
    raise LexError("stray quote", pos)


def lex(text: str, language: Language) -> list[Token]:
    """Tokenize text for the given language mode."""
    tokens: list[Token] = []
    kw = KEYWORDS[language]
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        # Comments
        if language is Language.PYTHON:
            if c == "#":
                i = _line_comment_end(text, i)
                continue
        else:
            if text.startswith("//", i):
                i = _line_comment_end(text, i)
                continue
            if text.startswith("/*", i):
                i = _block_comment_end(text, i, nested=(language is Language.RUST_LANG))
                continue
        # Strings and chars
        start = i
        if language is Language.PYTHON and (c in "'\"" or _is_py_prefixed_string(text, i)):
            m = _PY_STR_PREFIX_RE.match(text, i)
            qpos = m.end() if m else i
            if qpos < n and text[qpos] in "'\"":
                q3 = text[qpos] * 3
                if text.startswith(q3, qpos):
                    end = _scan_quoted(text, qpos, q3, allow_escapes=True, multiline=True)
                else:
                    end = _scan_quoted(text, qpos, text[qpos], allow_escapes=True, multiline=False)
                tokens.append(Token(TokenKind.STRING, text[start:end], start, end))
                i = end
                continue
        elif language is Language.GO:
            if c == "`":
                end = _scan_quoted(text, i, "`", allow_escapes=False, multiline=True)
                tokens.append(Token(TokenKind.STRING, text[start:end], start, end))
                i = end
                continue
            if c == '"':
                end = _scan_quoted(text, i, '"', allow_escapes=True, multiline=False)
                tokens.append(Token(TokenKind.STRING, text[start:end], start, end))
                i = end
                continue
            if c == "'":
                end = _scan_quoted(text, i, "'", allow_escapes=True, multiline=False)
                tokens.append(Token(TokenKind.CHAR, text[start:end], start, end))
                i = end
                continue
        elif language is Language.RUST_LANG:
            rm = re.match(r"r(#*)\"", text[i:]) if c == "r" else None
            if rm:
                closer = '"' + rm.group(1)
                end = text.find(closer, i + rm.end())
                if end == -1:
                    raise LexError("unterminated raw string", i)
                end += len(closer)
                tokens.append(Token(TokenKind.STRING, text[start:end], start, end))
                i = end
                continue
            if c == '"' or (c == "b" and text.startswith('b"', i)):
                qpos = i if c == '"' else i + 1
                end = _scan_quoted(text, qpos, '"', allow_escapes=True, multiline=True)
                tokens.append(Token(TokenKind.STRING, text[start:end], start, end))
                i = end
                continue
            if c == "'":
                end, kind = _scan_rust_quote(text, i)
                tokens.append(Token(kind, text[start:end], start, end))
                i = end
                continue
        elif language in (Language.C_CPP, Language.JAVA):
            if language is Language.JAVA and text.startswith('"""', i):
                end = _scan_quoted(text, i, '"""', allow_escapes=True, multiline=True)
                tokens.append(Token(TokenKind.STRING, text[start:end], start, end))
                i = end
                continue
            if c == '"':
                end = _scan_quoted(text, i, '"', allow_escapes=True, multiline=False)
                tokens.append(Token(TokenKind.STRING, text[start:end], start, end))
                i = end
                continue
            if c == "'":
                end = _scan_quoted(text, i, "'", allow_escapes=True, multiline=False)
                tokens.append(Token(TokenKind.CHAR, text[start:end], start, end))
                i = end
                continue
        # Numbers
        if _NUM_START_RE.match(c):
            end, kind = _scan_number(text, i, language)
            tokens.append(Token(kind, text[i:end], i, end))
            i = end
            continue
        # Identifiers / keywords
        m = _IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            kind = TokenKind.KEYWORD if word in kw else TokenKind.IDENT
            tokens.append(Token(kind, word, i, m.end()))
            i = m.end()
            continue
        # Operators and punctuation
        for op in _MULTI_OPS:
            if text.startswith(op, i):
                tokens.append(Token(TokenKind.OP, op, i, i + len(op)))
                i += len(op)
                break
        else:
            tokens.append(Token(TokenKind.OP, c, i, i + 1))
            i += 1
    return tokens


def _is_py_prefixed_string(text: str, pos: int) -> bool:
    m = _PY_STR_PREFIX_RE.match(text, pos)
    return bool(m and m.group(0))


_NORMAL_BY_KIND = {
    TokenKind.IDENT: "ID",
    TokenKind.LIFETIME: "ID",
    TokenKind.INT: "INT",
    TokenKind.FLOAT: "FLOAT",
    TokenKind.STRING: "STR",
    TokenKind.CHAR: "CHAR",
}


def normalize_token(token: Token) -> str:
    """Canonical class for a token: identifiers and literals collapse to
    placeholder classes, keywords and operators stay verbatim."""
    return _NORMAL_BY_KIND.get(token.kind, token.text)


def check_balance(tokens: list[Token]) -> str | None:
    """Bracket balance over a token stream. Returns a diagnostic or None."""
    pairs = {")": "(", "]": "[", "}": "{"}
    stack: list[Token] = []
    for tok in tokens:
        if tok.kind is not TokenKind.OP:
            continue
        if tok.text in "([{":
            stack.append(tok)
        elif tok.text in ")]}":
            if not stack or stack[-1].text != pairs[tok.text]:
                return f"unbalanced {tok.text!r} at offset {tok.start}"
            stack.pop()
    if stack:
        return f"unclosed {stack[-1].text!r} at offset {stack[-1].start}"
    return None
