"""Exact rank of rational matrices by fraction-free (Bareiss) elimination."""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

__all__ = ["integer_rows", "bareiss_rank", "rational_rank"]


def integer_rows(rows: Sequence[Sequence]) -> list[list[int]]:
    """Scale each row by the lcm of its denominators so every entry is an integer."""
    out = []
    for row in rows:
        fr = [Fraction(v) for v in row]
        lcm = 1
        for v in fr:
            lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
        out.append([int(v * lcm) for v in fr])
    return out


def bareiss_rank(mat: Sequence[Sequence[int]]) -> int:
    """Rank of an integer matrix; all intermediate divisions are exact."""
    a = [list(map(int, row)) for row in mat]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    rank = 0
    prev = 1
    for c in range(cols):
        if rank == rows:
            break
        pivot = next((r for r in range(rank, rows) if a[r][c] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][c]
        for r in range(rank + 1, rows):
            arc = a[r][c]
            row_r, row_k = a[r], a[rank]
            for j in range(c + 1, cols):
                num = p * row_r[j] - arc * row_k[j]
                q, rem = divmod(num, prev)
                assert rem == 0, "Bareiss division not exact"
                row_r[j] = q
            row_r[c] = 0
        prev = p
        rank += 1
    return rank


def rational_rank(rows: Sequence[Sequence]) -> int:
    return bareiss_rank(integer_rows(rows))
