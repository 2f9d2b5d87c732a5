"""Cyclic orderings of {1..n} modulo rotation and reflection.

An :class:`Ordering` is stored in canonical form: rotated so that label 1
comes first, and of the two reading directions the lexicographically
smaller one is kept.  The :class:`OrderingCatalog` lists every canonical
ordering for a given ``n`` in lexicographic order; that order fixes the
row/column layout of every matrix built by this package.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

__all__ = [
    "MIN_N",
    "MAX_N",
    "Ordering",
    "OrderingCatalog",
    "canonicalize",
    "enumerate_orderings",
    "relabel",
    "parse_ordering",
    "format_ordering",
    "identity_ordering",
]

MIN_N = 4
# (n-1)!/2 at n = 10 is 181440; larger catalogs are not needed at desk scale.
MAX_N = 10


def _check_permutation(seq: Sequence[int]) -> tuple[int, ...]:
    labels = tuple(int(x) for x in seq)
    n = len(labels)
    if n < MIN_N:
        raise ValueError(f"orderings need n >= {MIN_N}, got {n} labels")
    if sorted(labels) != list(range(1, n + 1)):
        raise ValueError(f"{labels} is not a permutation of 1..{n}")
    return labels


def _canonical_labels(labels: tuple[int, ...]) -> tuple[int, ...]:
    k = labels.index(1)
    fwd = labels[k:] + labels[:k]
    rev = (1,) + tuple(reversed(fwd[1:]))
    return min(fwd, rev)


@dataclass(frozen=True, order=True)
class Ordering:
    """Canonical representative of a rotation+reflection class.

    Build instances through :func:`canonicalize` or :func:`parse_ordering`;
    the constructor validates but does not canonicalize.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        labels = _check_permutation(self.labels)
        if _canonical_labels(labels) != labels:
            raise ValueError(f"{labels} is not in canonical form; use canonicalize()")
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __getitem__(self, i):
        return self.labels[i]

    def __str__(self) -> str:
        return format_ordering(self)

    def adjacent_pairs(self) -> frozenset[frozenset[int]]:
        """The n unordered pairs of cyclically adjacent labels."""
        lab = self.labels
        return frozenset(frozenset((lab[i], lab[(i + 1) % len(lab)])) for i in range(len(lab)))


def canonicalize(seq: Sequence[int] | Ordering) -> Ordering:
    """Return the canonical representative of ``seq`` up to rotation and reflection.

    >>> canonicalize((3, 4, 5, 1, 2)).labels
    (1, 2, 3, 4, 5)
    >>> canonicalize((1, 5, 4, 3, 2)).labels
    (1, 2, 3, 4, 5)
    """
    if isinstance(seq, Ordering):
        return seq
    labels = _check_permutation(seq)
    return Ordering(_canonical_labels(labels))


def identity_ordering(n: int) -> Ordering:
    return Ordering(tuple(range(1, n + 1)))


def relabel(o: Ordering | Sequence[int], perm) -> Ordering:
    """Apply a label permutation and canonicalize.

    ``perm`` is either a mapping ``{label: image}`` or a sequence whose
    entry ``k - 1`` is the image of label ``k``.
    """
    labels = o.labels if isinstance(o, Ordering) else tuple(o)
    n = len(labels)
    if hasattr(perm, "keys"):
        images = [perm[k] for k in range(1, n + 1)]
    else:
        images = list(perm)
    if sorted(images) != list(range(1, n + 1)):
        raise ValueError(f"relabeling {images} is not a bijection on 1..{n}")
    return canonicalize(tuple(images[x - 1] for x in labels))


def parse_ordering(text: str) -> Ordering:
    """Parse ``"1,3,5,2,4"`` (any rotation/reflection, optional brackets)."""
    body = text.strip().strip("()[]")
    try:
        labels = tuple(int(tok) for tok in body.split(","))
    except ValueError as exc:
        raise ValueError(f"cannot parse ordering {text!r}") from exc
    return canonicalize(labels)


def format_ordering(o: Ordering | Sequence[int]) -> str:
    return ",".join(str(x) for x in o)


@dataclass(frozen=True)
class OrderingCatalog:
    """All canonical orderings for one ``n``, sorted lexicographically."""

    n: int
    orderings: tuple[Ordering, ...]
    index: dict = field(repr=False, compare=False, hash=False)

    def __len__(self) -> int:
        return len(self.orderings)

    def __iter__(self):
        return iter(self.orderings)

    def __getitem__(self, i: int) -> Ordering:
        return self.orderings[i]

    def position(self, o: Ordering | Sequence[int]) -> int:
        return self.index[canonicalize(o)]

    def as_strings(self) -> list[str]:
        return [format_ordering(o) for o in self.orderings]


_CATALOGS: dict[int, OrderingCatalog] = {}


def enumerate_orderings(n: int) -> OrderingCatalog:
    """Catalog of the (n-1)!/2 canonical orderings of {1..n}.

    Permutations of 2..n are generated in lexicographic order with 1
    prefixed; a permutation is kept when it is not larger than its
    reflection, which yields the canonical forms already sorted.
    """
    if not MIN_N <= n <= MAX_N:
        raise ValueError(f"n must be in [{MIN_N}, {MAX_N}], got {n}")
    cat = _CATALOGS.get(n)
    if cat is None:
        out = []
        for p in itertools.permutations(range(2, n + 1)):
            if p <= p[::-1]:
                out.append(Ordering.__new__(Ordering))
                object.__setattr__(out[-1], "labels", (1,) + p)
        assert len(out) == math.factorial(n - 1) // 2
        cat = OrderingCatalog(n, tuple(out), {o: i for i, o in enumerate(out)})
        _CATALOGS[n] = cat
    return cat


def all_rotations_reflections(labels: Iterable[int]) -> list[tuple[int, ...]]:
    """Every rotation of the sequence and of its reversal (2n tuples)."""
    lab = tuple(labels)
    rev = lab[::-1]
    n = len(lab)
    return [lab[k:] + lab[:k] for k in range(n)] + [rev[k:] + rev[:k] for k in range(n)]
