"""Surface, semantic, and combined similarity between two code samples.

Surface similarity is normalized Levenshtein over raw text (Myers/Hyyroe
bit-parallel implementation). Semantic similarity is greedy string tiling
coverage over normalized token streams, so consistent identifier renames
are invisible to it. The combined score is the weighted mean of the two.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .core import CodeSample, PesoConfig
from .errors import EmptyStream, LanguageMismatch
from .lexing import lex, normalize_token


@dataclass(frozen=True)
class TokenStream:
    """Normalized lexical tokens plus their (start, end) offsets in the text."""

    tokens: tuple[str, ...]
    source_spans: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.source_spans):
            raise ValueError("tokens and source_spans must have equal length")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class SimilarityScore:
    s1: float
    s2: float
    ss: float


def tokenize(sample: CodeSample) -> TokenStream:
    """Deterministic normalized token stream for a sample.

    Renaming an identifier consistently leaves the stream unchanged.
    Raises LexError (with offset) on unlexable input.
    """
    toks = lex(sample.text, sample.language)
    return TokenStream(
        tokens=tuple(normalize_token(t) for t in toks),
        source_spans=tuple((t.start, t.end) for t in toks),
    )


def levenshtein_distance(a: str, b: str) -> int:
    """Exact edit distance via the bit-parallel algorithm."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) > len(b):
        a, b = b, a
    m = len(a)
    mask = (1 << m) - 1
    high = 1 << (m - 1)
    peq: dict[str, int] = {}
    for idx, ch in enumerate(a):
        peq[ch] = peq.get(ch, 0) | (1 << idx)
    vp = mask
    vn = 0
    score = m
    get = peq.get
    for ch in b:
        eq = get(ch, 0)
        d0 = ((((eq & vp) + vp) & mask) ^ vp) | eq | vn
        hp = vn | (~(d0 | vp) & mask)
        hn = vp & d0
        if hp & high:
            score += 1
        elif hn & high:
            score -= 1
        hp = ((hp << 1) | 1) & mask
        hn = (hn << 1) & mask
        vp = hn | (~(d0 | hp) & mask)
        vn = hp & d0
    return score


def surface_similarity(a: str, b: str) -> float:
    """1 - dist/max(|a|,|b|); 1.0 when both strings are empty. Symmetric."""
    if not a and not b:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / max(len(a), len(b))


def _maximal_runs(a_ids: np.ndarray, b_ids: np.ndarray, min_len: int):
    """All maximal equal runs (length, i, j) of length >= min_len."""
    na, nb = len(a_ids), len(b_ids)
    runs = []
    for d in range(-(na - 1), nb):
        i0 = max(0, -d)
        i1 = min(na, nb - d)
        if i1 - i0 < min_len:
            continue
        eq = (a_ids[i0:i1] == b_ids[i0 + d : i1 + d]).astype(np.int8)
        padded = np.concatenate(([0], eq, [0]))
        delta = np.diff(padded)
        starts = np.flatnonzero(delta == 1)
        ends = np.flatnonzero(delta == -1)
        for s, e in zip(starts, ends):
            length = int(e - s)
            if length >= min_len:
                i = i0 + int(s)
                runs.append((length, i, i + d))
    return runs


def greedy_tiles(a_tokens: tuple[str, ...], b_tokens: tuple[str, ...], min_tile_len: int):
    """Non-overlapping tiles chosen longest-first.

    Policy: repeatedly take the longest common run of tokens not yet covered
    by a tile (ties broken by smallest position in a, then in b), until no
    run of at least min_tile_len remains.
    """
    vocab: dict[str, int] = {}
    for t in a_tokens:
        vocab.setdefault(t, len(vocab))
    for t in b_tokens:
        vocab.setdefault(t, len(vocab))
    a_ids = np.array([vocab[t] for t in a_tokens], dtype=np.int32)
    b_ids = np.array([vocab[t] for t in b_tokens], dtype=np.int32)

    heap = [(-length, i, j) for length, i, j in _maximal_runs(a_ids, b_ids, min_tile_len)]
    heapq.heapify(heap)
    marked_a = np.zeros(len(a_tokens), dtype=bool)
    marked_b = np.zeros(len(b_tokens), dtype=bool)
    tiles: list[tuple[int, int, int]] = []
    while heap:
        neg_len, i, j = heapq.heappop(heap)
        length = -neg_len
        dirty = marked_a[i : i + length] | marked_b[j : j + length]
        if not dirty.any():
            marked_a[i : i + length] = True
            marked_b[j : j + length] = True
            tiles.append((length, i, j))
            continue
        # Split around covered positions; re-queue the clean pieces.
        clean = np.concatenate(([False], ~dirty, [False]))
        delta = np.diff(clean.astype(np.int8))
        starts = np.flatnonzero(delta == 1)
        ends = np.flatnonzero(delta == -1)
        for s, e in zip(starts, ends):
            piece = int(e - s)
            if piece >= min_tile_len:
                heapq.heappush(heap, (-piece, i + int(s), j + int(s)))
    return tiles


def semantic_similarity(a: TokenStream, b: TokenStream, min_tile_len: int) -> float:
    """Greedy-string-tiling coverage: 2 * matched / (|a| + |b|).

    Identical non-empty streams score 1.0 regardless of the tile floor.
    Raises EmptyStream when both streams are empty. Operand orientation is
    canonicalized so the result is exactly symmetric.
    """
    if min_tile_len < 1:
        raise ValueError("min_tile_len must be >= 1")
    ta, tb = a.tokens, b.tokens
    if not ta and not tb:
        raise EmptyStream("semantic similarity is undefined for two empty programs")
    if ta == tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    if tb < ta:
        ta, tb = tb, ta
    tiles = greedy_tiles(ta, tb, min_tile_len)
    matched = sum(length for length, _, _ in tiles)
    return 2.0 * matched / (len(ta) + len(tb))


def combined_score(s1: float, s2: float, config: PesoConfig) -> float:
    """Weighted overall similarity: mu * s1 + nu * s2."""
    if not (0.0 <= s1 <= 1.0 and 0.0 <= s2 <= 1.0):
        raise ValueError("component scores must lie in [0, 1]")
    return config.mu * s1 + config.nu * s2


def score_pair(original: CodeSample, candidate: CodeSample, config: PesoConfig) -> SimilarityScore:
    """Full similarity triple between two samples of the same language."""
    if original.language is not candidate.language:
        raise LanguageMismatch(
            f"{original.language.value} vs {candidate.language.value}"
        )
    s1 = surface_similarity(original.text, candidate.text)
    s2 = semantic_similarity(tokenize(original), tokenize(candidate), config.min_tile_len)
    return SimilarityScore(s1=s1, s2=s2, ss=combined_score(s1, s2, config))
