"""Independent oracles used by the test suite.

These deliberately use the dumbest correct algorithms (full-matrix DP,
exhaustive scans) so they share no code or structure with the library
implementations they check.
"""

from __future__ import annotations


def dp_levenshtein(a: str, b: str) -> int:
    """Quadratic full-matrix dynamic-programming edit distance."""
    n, m = len(a), len(b)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n + 1):
        dist[i][0] = i
    for j in range(m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            dist[i][j] = min(
                dist[i - 1][j] + 1,
                dist[i][j - 1] + 1,
                dist[i - 1][j - 1] + cost,
            )
    return dist[n][m]


def brute_force_tiles(a: tuple, b: tuple, min_tile_len: int) -> list[tuple[int, int, int]]:
    """Greedy tiling by exhaustive scan.

    Policy mirror: repeatedly take the longest common run of unmarked
    tokens (ties: smallest start in a, then in b) until nothing of length
    min_tile_len or more remains.
    """
    marked_a = [False] * len(a)
    marked_b = [False] * len(b)
    tiles = []
    while True:
        best = None  # (length, i, j)
        for i in range(len(a)):
            for j in range(len(b)):
                k = 0
                while (
                    i + k < len(a)
                    and j + k < len(b)
                    and a[i + k] == b[j + k]
                    and not marked_a[i + k]
                    and not marked_b[j + k]
                ):
                    k += 1
                if k >= min_tile_len:
                    cand = (k, i, j)
                    if best is None or (-cand[0], cand[1], cand[2]) < (-best[0], best[1], best[2]):
                        best = cand
        if best is None:
            break
        length, i, j = best
        for k in range(length):
            marked_a[i + k] = True
            marked_b[j + k] = True
        tiles.append(best)
    return tiles


def brute_force_coverage(a: tuple, b: tuple, min_tile_len: int) -> float:
    if a == b and a:
        return 1.0
    if not a or not b:
        return 0.0
    tiles = brute_force_tiles(a, b, min_tile_len)
    return 2.0 * sum(t[0] for t in tiles) / (len(a) + len(b))
