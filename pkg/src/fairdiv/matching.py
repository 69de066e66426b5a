"""Maximum-weight bipartite matching that matches every agent.

Exact rational weights throughout: the matrix is cleared to integers via the
lcm of all denominators, then a rectangular Hungarian (potential + shortest
augmenting path) solver runs in pure integer arithmetic. Among all
maximum-weight left-perfect matchings the lexicographically smallest good
sequence (agent 0's good, then agent 1's, ...) is returned, which makes runs
reproducible and sends the all-equal-weights case to the diagonal.

When there are fewer goods than agents the matrix is padded with zero-weight
dummy goods; agents matched to a dummy are simply left out of the result and
end up with empty bundles downstream.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Sequence


def _to_int_matrix(weights: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    denoms = [Fraction(w).denominator for row in weights for w in row]
    scale = lcm(*denoms) if denoms else 1
    out = []
    for row in weights:
        out.append([int(Fraction(w) * scale) for w in row])
    return out


def _max_assignment(weights: list[list[int]], rows: list[int],
                    cols: list[int]) -> int:
    """Max total weight of a matching covering all `rows` within `cols`.

    Hungarian algorithm on min-cost transform; requires len(rows) <= len(cols).
    """
    nr, nc = len(rows), len(cols)
    if nr == 0:
        return 0
    assert nr <= nc
    top = max((weights[r][c] for r in rows for c in cols), default=0)
    cost = [[top - weights[r][c] for c in cols] for r in rows]
    inf = sum(sum(row) for row in cost) + 1

    u = [0] * (nr + 1)
    v = [0] * (nc + 1)
    match = [0] * (nc + 1)            # match[j] = row index (1-based) on column j
    for i in range(1, nr + 1):
        match[0] = i
        j0 = 0
        minv = [inf] * (nc + 1)
        used = [False] * (nc + 1)
        way = [0] * (nc + 1)
        while True:
            used[j0] = True
            i0 = match[j0]
            delta = inf
            j1 = -1
            for j in range(1, nc + 1):
                if used[j]:
                    continue
                cur = cost[i0 - 1][j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(nc + 1):
                if used[j]:
                    u[match[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if match[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            match[j0] = match[j1]
            j0 = j1
    total_cost = 0
    for j in range(1, nc + 1):
        if match[j]:
            total_cost += cost[match[j] - 1][j - 1]
    return nr * top - total_cost


def max_weight_left_perfect_matching(
        weights: Sequence[Sequence[Fraction]]) -> list[tuple[int, int]]:
    """Match every agent (row) to a distinct good (column) with maximum
    total weight; deterministic lexicographic tie-breaking.

    Returns (agent, good) pairs, 0-based; agents assigned a padding dummy
    (only possible when m < n) are omitted.
    """
    n = len(weights)
    if n == 0:
        return []
    m = len(weights[0])
    if any(len(row) != m for row in weights):
        raise ValueError("weight matrix is ragged")
    if any(w < 0 for row in weights for w in row):
        raise ValueError("weights must be nonnegative")

    intw = _to_int_matrix(weights)
    width = max(m, n)
    for row in intw:
        row.extend([0] * (width - m))

    all_rows = list(range(n))
    all_cols = list(range(width))
    best = _max_assignment(intw, all_rows, all_cols)

    chosen: list[int] = []
    used: set[int] = set()
    prefix = 0
    for i in range(n):
        rest_rows = list(range(i + 1, n))
        for g in range(width):
            if g in used:
                continue
            rest_cols = [c for c in all_cols if c not in used and c != g]
            if prefix + intw[i][g] + _max_assignment(intw, rest_rows, rest_cols) == best:
                chosen.append(g)
                used.add(g)
                prefix += intw[i][g]
                break
        else:
            raise AssertionError("no extendable good found; solver bug")

    return [(i, g) for i, g in enumerate(chosen) if g < m]
