"""Exact biadjoint amplitudes as sums over shared planar trees.

Kinematics are symmetric rational matrices s[a][b] with zero diagonal and
zero row sums.  Every arithmetic step uses :class:`fractions.Fraction`,
so zero/non-zero decisions are exact.  Amplitudes are returned without the
overall sign, which is recovered numerically in :mod:`tropint.scattering`.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from .orderings import Ordering
from .trees import Tree, enumerate_planar, is_planar

__all__ = [
    "Lcg64",
    "MandelstamMatrix",
    "AmplitudeValue",
    "NonGenericKinematics",
    "sample_mandelstam",
    "q_edge",
    "r_tree",
    "amplitude_unsigned",
    "relabel_mandelstam",
    "save_kinematics",
    "load_kinematics",
]

LCG_MULT = 6364136223846793005
LCG_INC = 1442695040888963407
MASK64 = (1 << 64) - 1

DRAW_LO, DRAW_HI = -10**6, 10**6
MAX_RETRIES = 100


class NonGenericKinematics(ArithmeticError):
    """Some edge invariant Q_e vanishes."""


class Lcg64:
    """64-bit LCG; each draw advances the state and returns its high 32 bits."""

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u32(self) -> int:
        self.state = (self.state * LCG_MULT + LCG_INC) & MASK64
        return self.state >> 32

    def randint(self, lo: int, hi: int) -> int:
        # modulo reduction; bias is below 2^-11 for the default range
        return lo + self.next_u32() % (hi - lo + 1)


@dataclass(frozen=True)
class MandelstamMatrix:
    n: int
    s: tuple[tuple[Fraction, ...], ...]
    seed: int | None = None

    def __post_init__(self):
        s = tuple(tuple(Fraction(v) for v in row) for row in self.s)
        n = self.n
        if len(s) != n or any(len(row) != n for row in s):
            raise ValueError(f"Mandelstam matrix must be {n}x{n}")
        for a in range(n):
            if s[a][a] != 0:
                raise ValueError(f"s[{a + 1}][{a + 1}] must vanish")
            if sum(s[a]) != 0:
                raise ValueError(f"row {a + 1} does not sum to zero")
            for b in range(a):
                if s[a][b] != s[b][a]:
                    raise ValueError(f"s is not symmetric at ({a + 1},{b + 1})")
        object.__setattr__(self, "s", s)

    def __getitem__(self, ab: tuple[int, int]) -> Fraction:
        """1-based access: ``kin[1, 2]`` is s_12."""
        a, b = ab
        return self.s[a - 1][b - 1]

    def as_float(self):
        import numpy as np

        return np.array([[float(v) for v in row] for row in self.s])

    def is_generic(self) -> bool:
        return all(q_edge(self, side) != 0 for side in _all_split_sides(self.n))


def _all_split_sides(n: int):
    for k in range(2, n - 1):
        for side in itertools.combinations(range(1, n), k):
            yield frozenset(side)


def _draw(n: int, rng: Lcg64) -> list[list[Fraction]]:
    s = [[Fraction(0)] * n for _ in range(n)]
    # free entries among labels 1..n-1, lexicographic, skipping (n-2, n-1)
    for a in range(1, n):
        for b in range(a + 1, n):
            if (a, b) == (n - 2, n - 1):
                continue
            s[a - 1][b - 1] = s[b - 1][a - 1] = Fraction(rng.randint(DRAW_LO, DRAW_HI))
    # total over pairs in 1..n-1 must vanish (row n then sums to zero)
    rest = sum(s[a][b] for a in range(n - 1) for b in range(a + 1, n - 1))
    s[n - 3][n - 2] = s[n - 2][n - 3] = -rest
    for a in range(n - 1):
        s[a][n - 1] = s[n - 1][a] = -sum(s[a][b] for b in range(n - 1))
    return s


def sample_mandelstam(n: int, seed: int = 0) -> MandelstamMatrix:
    """Deterministic generic kinematics with n(n-3)/2 free integer draws.

    Draws continue from the same generator stream when a sample turns out
    non-generic; after ``MAX_RETRIES`` attempts the seed is rejected.
    """
    if n < 4:
        raise ValueError(f"kinematics need n >= 4, got {n}")
    rng = Lcg64(seed)
    for _ in range(MAX_RETRIES):
        kin = MandelstamMatrix(n, _draw(n, rng), seed)
        if kin.is_generic():
            return kin
    raise NonGenericKinematics(f"seed {seed} produced non-generic kinematics {MAX_RETRIES} times")


def q_edge(kin: MandelstamMatrix, split: Sequence[int] | frozenset) -> Fraction:
    """Sum of s_ab over pairs on one side of the split (either side gives the same)."""
    side = sorted(split)
    if not 2 <= len(side) <= kin.n - 2:
        raise ValueError(f"split side {side} has invalid size for n={kin.n}")
    s = kin.s
    return sum((s[a - 1][b - 1] for a, b in itertools.combinations(side, 2)), Fraction(0))


def r_tree(kin: MandelstamMatrix, tree: Tree) -> Fraction:
    """Product of 1/Q_e over the internal edges of ``tree``."""
    if tree.n != kin.n:
        raise ValueError("tree and kinematics have different n")
    out = Fraction(1)
    for split in tree.splits:
        q = q_edge(kin, split)
        if q == 0:
            raise NonGenericKinematics(f"Q vanishes on split {sorted(split)}")
        out /= q
    return out


@dataclass(frozen=True)
class AmplitudeValue:
    """Tree sum of R(T) over shared planar trees; physical amplitude up to sign."""

    value: Fraction
    term_count: int

    @property
    def magnitude(self) -> Fraction:
        return abs(self.value)


def amplitude_unsigned(kin: MandelstamMatrix, a: Ordering | Sequence[int], b: Ordering | Sequence[int]) -> AmplitudeValue:
    la, lb = tuple(a), tuple(b)
    if len(la) != kin.n or len(lb) != kin.n:
        raise ValueError("orderings and kinematics have different n")
    shared = [t for t in enumerate_planar(la) if is_planar(t, lb)]
    total = Fraction(0)
    for t in shared:  # enumerate_planar returns trees in a fixed sorted order
        total += r_tree(kin, t)
    return AmplitudeValue(total, len(shared))


def relabel_mandelstam(kin: MandelstamMatrix, perm) -> MandelstamMatrix:
    """Kinematics with label k renamed to perm(k): s'[p(a)][p(b)] = s[a][b]."""
    n = kin.n
    images = [perm[k] for k in range(1, n + 1)] if hasattr(perm, "keys") else list(perm)
    if sorted(images) != list(range(1, n + 1)):
        raise ValueError("relabeling is not a bijection")
    s = [[Fraction(0)] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            s[images[a] - 1][images[b] - 1] = kin.s[a][b]
    return MandelstamMatrix(n, s)


def save_kinematics(path, kin: MandelstamMatrix) -> None:
    Path(path).write_text(json.dumps(kinematics_to_json(kin), indent=1) + "\n")


def kinematics_to_json(kin: MandelstamMatrix) -> dict:
    return {
        "schema": 1,
        "n": kin.n,
        "seed": kin.seed,
        "s": [[[str(v.numerator), str(v.denominator)] for v in row] for row in kin.s],
    }


def load_kinematics(path) -> MandelstamMatrix:
    data = json.loads(Path(path).read_text())
    s = [[Fraction(int(p), int(q)) for p, q in row] for row in data["s"]]
    return MandelstamMatrix(int(data["n"]), s, data.get("seed"))
