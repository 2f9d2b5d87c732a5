"""KLT ordering sets, their block partition and block densities.

The two families are

    A = {(1, w(2), ..., w(n-2), n-1, n)}
    B = {(1, g(2), ..., g(m), n, g(m+1), ..., g(n-2), n-1)}

with m = ceil((n-3)/2) + 1 and w, g permutations of {2, ..., n-2}.  The
defining label sequences are kept next to the canonical forms because the
block bookkeeping reads the w/g slots directly.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .intersection import fast_nonzero
from .orderings import Ordering, canonicalize

__all__ = [
    "KltSets",
    "Block",
    "BlockPartition",
    "klt_m",
    "klt_block_size",
    "klt_sets",
    "vanishing_predicate",
    "block_partition",
    "block_matrix",
    "block_density_exact",
    "block_density_formula",
]

DENSITY_EXACT_MAX_N = 10


def klt_m(n: int) -> int:
    return (n - 3 + 1) // 2 + 1


def klt_m_bar(n: int) -> int:
    return (n - 3) // 2 + 1


def klt_block_size(n: int) -> int:
    """d = ceil((n-3)/2)! * floor((n-3)/2)!"""
    return math.factorial(klt_m(n) - 1) * math.factorial(klt_m_bar(n) - 1)


def _a_word(n: int, w: Sequence[int]) -> tuple[int, ...]:
    return (1, *w, n - 1, n)


def _b_word(n: int, g: Sequence[int]) -> tuple[int, ...]:
    m = klt_m(n)
    return (1, *g[: m - 1], n, *g[m - 1:], n - 1)


@dataclass(frozen=True)
class KltSets:
    n: int
    m: int
    words_a: tuple[tuple[int, ...], ...]
    words_b: tuple[tuple[int, ...], ...]

    @property
    def set_a(self) -> tuple[Ordering, ...]:
        return tuple(canonicalize(w) for w in self.words_a)

    @property
    def set_b(self) -> tuple[Ordering, ...]:
        return tuple(canonicalize(w) for w in self.words_b)


def klt_sets(n: int) -> KltSets:
    if n < 5:
        raise ValueError(f"KLT sets need n >= 5, got {n}")
    perms = list(itertools.permutations(range(2, n - 1)))
    return KltSets(
        n,
        klt_m(n),
        tuple(_a_word(n, w) for w in perms),
        tuple(_b_word(n, g) for g in perms),
    )


def _readings(seq: Sequence[int]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Both reading directions of ``seq``, each rotated to start at 1."""
    lab = tuple(seq)
    n = len(lab)
    if sorted(lab) != list(range(1, n + 1)):
        raise ValueError(f"{lab} is not a permutation of 1..{n}")
    k = lab.index(1)
    fwd = lab[k:] + lab[:k]
    return fwd, (1,) + tuple(reversed(fwd[1:]))


def as_a_word(seq: Sequence[int]) -> tuple[int, ...]:
    """Recover the A-form (1, w, n-1, n) of an ordering in any rotation/reflection."""
    for cand in _readings(seq):
        n = len(cand)
        if cand[-2:] == (n - 1, n):
            return cand
    raise ValueError(f"{tuple(seq)} is not of the form (1, ..., n-1, n)")


def as_b_word(seq: Sequence[int]) -> tuple[int, ...]:
    """Recover the B-form (1, g(2..m), n, g(m+1..n-2), n-1)."""
    for cand in _readings(seq):
        n = len(cand)
        if cand[-1] == n - 1 and cand[klt_m(n)] == n:
            return cand
    raise ValueError(f"{tuple(seq)} is not of the form (1, g(2..m), n, g(m+1..n-2), n-1)")


def vanishing_predicate(a: Sequence[int], b: Sequence[int]) -> bool:
    """Sufficient condition for I(a, b) = 0 between an A-word and a B-word.

    True when the labels in slots 2..m of ``a`` meet the labels in slots
    m+1..n-2 of ``b``.
    """
    wa, wb = as_a_word(a), as_b_word(b)
    n = len(wa)
    if len(wb) != n:
        raise ValueError("KLT words have different sizes")
    m = klt_m(n)
    head = set(wa[1:m])
    tail = set(wb[m + 1: n - 1])
    return bool(head & tail)


@dataclass(frozen=True)
class Block:
    head: tuple[int, ...]  # H, |H| = ceil((n-3)/2)
    rest: tuple[int, ...]  # G
    words_a: tuple[tuple[int, ...], ...]
    words_b: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class BlockPartition:
    n: int
    m: int
    d: int
    blocks: tuple[Block, ...]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "d": self.d,
            "blocks": [
                {
                    "H": list(b.head),
                    "G": list(b.rest),
                    "A": [",".join(map(str, w)) for w in b.words_a],
                    "B": [",".join(map(str, w)) for w in b.words_b],
                }
                for b in self.blocks
            ],
        }


def block_partition(n: int) -> BlockPartition:
    """Split A and B into (n-3)!/d blocks indexed by the head set H."""
    if n < 5:
        raise ValueError(f"KLT blocks need n >= 5, got {n}")
    labels = tuple(range(2, n - 1))
    m = klt_m(n)
    blocks = []
    for head in itertools.combinations(labels, m - 1):
        rest = tuple(x for x in labels if x not in head)
        wa, wb = [], []
        for hp in itertools.permutations(head):
            for gp in itertools.permutations(rest):
                wa.append(_a_word(n, hp + gp))
                wb.append(_b_word(n, hp + gp))
        blocks.append(Block(head, rest, tuple(wa), tuple(wb)))
    return BlockPartition(n, m, klt_block_size(n), tuple(blocks))


def block_matrix(block: Block) -> list[list[bool]]:
    return [[fast_nonzero(a, b) for b in block.words_b] for a in block.words_a]


def block_density_exact(n: int, block_index: int | None = None) -> Fraction:
    """Non-zero fraction of one KLT block, counted with :func:`fast_nonzero`.

    Defaults to the block that contains the identity ordering.
    """
    if not 5 <= n <= DENSITY_EXACT_MAX_N:
        raise ValueError(f"exact block density supports 5 <= n <= {DENSITY_EXACT_MAX_N}")
    part = block_partition(n)
    if block_index is None:
        ident = tuple(range(1, n + 1))
        block_index = next(i for i, b in enumerate(part.blocks) if ident in b.words_a)
    mat = block_matrix(part.blocks[block_index])
    nonzero = sum(sum(row) for row in mat)
    return Fraction(nonzero, part.d * part.d)


def block_density_formula(n: int) -> Fraction:
    """4 S_{m-1} S_{mbar-1} / ((m-1)! (mbar-1)!), valid for n >= 7.

    Below n = 7 one of the halves has fewer than three labels and the
    separate counting of reflections overshoots (density > 1).
    """
    from .analytics import super_catalan

    if n < 7:
        raise ValueError(
            f"closed-form block density needs n >= 7 (got {n}); a half with fewer than "
            "three labels double-counts reflections, use block_density_exact instead"
        )
    m, mb = klt_m(n), klt_m_bar(n)
    return Fraction(
        4 * super_catalan(m - 1) * super_catalan(mb - 1),
        math.factorial(m - 1) * math.factorial(mb - 1),
    )
