"""Super Catalan numbers, densities of the intersection matrix and of KLT blocks.

Table values are exact integers/rationals; floats appear only in the
asymptotic reference curves.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "DensityRow",
    "super_catalan",
    "super_catalan_table",
    "legendre_at_3",
    "legendre_asymptotic",
    "catalan",
    "DENSITY_CONSTANT",
    "KLT_DENSITY_CONSTANT",
    "density_asymptote",
    "klt_density_asymptote",
    "density_full",
    "density_table",
    "klt_density_table",
    "dissection_counts",
    "rows_to_csv",
    "FIG3_THRESHOLD",
    "FIG4_THRESHOLD",
]

# log(3 + sqrt 8) is the exponential growth rate of S_r; 1 comes from Stirling.
DENSITY_CONSTANT = 1.0 + math.log(3.0 + math.sqrt(8.0))
KLT_DENSITY_CONSTANT = DENSITY_CONSTANT + math.log(2.0)

# plot annotations only
FIG3_THRESHOLD = 16
FIG4_THRESHOLD = 25

DENSITY_MAX_N = 60


def catalan(m: int) -> int:
    if m < 0:
        raise ValueError("catalan index must be >= 0")
    return math.comb(2 * m, m) // (m + 1)


@lru_cache(maxsize=None)
def super_catalan_table(r_max: int) -> tuple[int, ...]:
    """S_1..S_{r_max} from the three-term recursion (exact division asserted)."""
    vals = [0, 1, 1]
    for r in range(3, r_max + 1):
        num = 3 * (2 * r - 3) * vals[r - 1] - (r - 3) * vals[r - 2]
        q, rem = divmod(num, r)
        assert rem == 0, f"super Catalan recursion not integral at r={r}"
        vals.append(q)
    return tuple(vals[1 : r_max + 1])


def super_catalan(r: int) -> int:
    """Little Schroeder number S_r: 1, 1, 3, 11, 45, 197, 903, 4279, ..."""
    if r < 1:
        raise ValueError(f"super Catalan index must be >= 1, got {r}")
    return super_catalan_table(max(r, 2))[r - 1]


@lru_cache(maxsize=None)
def legendre_at_3(l: int) -> Fraction:
    """P_l(3) by Bonnet's recursion from P_0 = 1, P_1 = 3."""
    if l < 0:
        raise ValueError("Legendre degree must be >= 0")
    prev, cur = Fraction(1), Fraction(3)
    if l == 0:
        return prev
    for k in range(1, l):
        prev, cur = cur, ((2 * k + 1) * 3 * cur - k * prev) / (k + 1)
    return cur


def legendre_asymptotic(l: int, x: float) -> float:
    """Large-l estimate of P_l(x) for x > 1, leading term only."""
    y = math.sqrt(1.0 - 1.0 / (x * x))
    return (1 + y) ** ((l + 1) / 2) / (1 - y) ** (l / 2) / math.sqrt(2 * math.pi * l * y)


def density_asymptote(n: int) -> float:
    return math.exp(-n * (math.log(n) - DENSITY_CONSTANT))


def klt_density_asymptote(n: int) -> float:
    return math.exp(-n * (math.log(n) - KLT_DENSITY_CONSTANT))


@dataclass(frozen=True)
class DensityRow:
    n: int
    nonzeros: int
    total: int
    density: Fraction
    asymptote: float

    def csv_row(self) -> list:
        return [self.n, self.nonzeros, self.total, f"{self.density.numerator}/{self.density.denominator}",
                repr(self.asymptote)]


def density_full(n: int) -> DensityRow:
    """Share of non-zero entries in a row of the full intersection matrix."""
    if n < 4:
        raise ValueError(f"density needs n >= 4, got {n}")
    nonzeros = super_catalan(n - 1)
    total = math.factorial(n - 1) // 2
    return DensityRow(n, nonzeros, total, Fraction(nonzeros, total), density_asymptote(n))


def density_table(n_min: int = 5, n_max: int = 19) -> list[DensityRow]:
    if not 5 <= n_min <= n_max <= DENSITY_MAX_N:
        raise ValueError(f"need 5 <= n_min <= n_max <= {DENSITY_MAX_N}")
    return [density_full(n) for n in range(n_min, n_max + 1)]


def klt_density_table(n_min: int = 7, n_max: int = 30) -> list[DensityRow]:
    """Per-n density of a single KLT block from the closed formula."""
    from .klt import block_density_formula, klt_block_size, klt_m, klt_m_bar

    if n_min < 7 or n_max < n_min:
        raise ValueError("KLT density table needs 7 <= n_min <= n_max")
    rows = []
    for n in range(n_min, n_max + 1):
        m, mb = klt_m(n), klt_m_bar(n)
        d = klt_block_size(n)
        rows.append(DensityRow(n, 4 * super_catalan(m - 1) * super_catalan(mb - 1), d,
                               block_density_formula(n), klt_density_asymptote(n)))
    return rows


def rows_to_csv(rows: list[DensityRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "nonzeros", "total", "density", "asymptote"])
    for r in rows:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _crosses(d1: tuple[int, int], d2: tuple[int, int]) -> bool:
    (a, b), (c, e) = d1, d2
    return (a < c < b < e) or (c < a < e < b)


def dissection_counts(p: int) -> list[int]:
    """D(p, j): dissections of a convex p-gon by j non-crossing diagonals, j = 0..p-3."""
    if not 3 <= p <= 12:
        raise ValueError(f"dissection counts need 3 <= p <= 12, got {p}")
    diags = [(i, j) for i in range(p) for j in range(i + 2, p) if not (i == 0 and j == p - 1)]
    crossing = [[_crosses(u, v) for v in diags] for u in diags]
    counts = [0] * (p - 2)

    def extend(start: int, chosen: list[int]) -> None:
        counts[len(chosen)] += 1
        for k in range(start, len(diags)):
            if not any(crossing[k][c] for c in chosen):
                chosen.append(k)
                extend(k + 1, chosen)
                chosen.pop()

    extend(0, [])
    return counts

