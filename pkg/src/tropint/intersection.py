"""Intersection numbers I(a, b) and the intersection / binary matrices.

Three independent routes to the same number:

* :func:`count_bruteforce` filters all (2n-5)!! binary trees (reference oracle);
* :func:`count_dp` counts triangulations of the a-gon whose diagonals are
  arcs of b, by interval dynamic programming;
* :func:`polygon_decomposition` reads the count off the forced common
  splits as a product of Catalan numbers.

:func:`fast_nonzero` decides ``I(a, b) != 0`` by pruning common cherries.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .orderings import Ordering, OrderingCatalog, enumerate_orderings, identity_ordering, parse_ordering
from .trees import compatible, enumerate_all_trees, is_contiguous, is_planar, polygon_splits

__all__ = [
    "IntersectionMatrix",
    "BinaryMatrix",
    "PolygonDecomposition",
    "count_bruteforce",
    "count_dp",
    "fast_nonzero",
    "polygon_decomposition",
    "build_matrix",
    "row_profile",
    "save_matrix",
    "load_matrix",
    "default_workers",
]

log = logging.getLogger(__name__)

COUNTS_MAX_N = 7
BINARY_MAX_N = 8
BRUTEFORCE_MAX_N = 7


def _pair(a, b) -> tuple[tuple[int, ...], tuple[int, ...]]:
    la, lb = tuple(a), tuple(b)
    if len(la) != len(lb):
        raise ValueError(f"orderings have different sizes: {len(la)} vs {len(lb)}")
    return la, lb


def count_bruteforce(a: Ordering | Sequence[int], b: Ordering | Sequence[int]) -> int:
    """Number of binary trees planar for both orderings, by exhaustive filtering."""
    la, lb = _pair(a, b)
    n = len(la)
    if n > BRUTEFORCE_MAX_N:
        raise ValueError(f"brute force is limited to n <= {BRUTEFORCE_MAX_N}")
    return sum(1 for t in enumerate_all_trees(n) if is_planar(t, la) and is_planar(t, lb))


def count_dp(a: Ordering | Sequence[int], b: Ordering | Sequence[int]) -> int:
    """I(a, b) as the number of triangulations of the a-gon using only b-arcs.

    Polygon side ``i`` carries leaf ``a[i]``; the chord between vertices
    i < j cuts off leaves a[i..j-1], which must be a cyclic arc of ``b``.
    """
    la, lb = _pair(a, b)
    n = len(la)
    pos = {x: i for i, x in enumerate(lb)}
    p = [pos[x] for x in la]

    # allowed[i][j]: chord (i, j) is a polygon side or an arc of b
    allowed = [[False] * n for _ in range(n)]
    for i in range(n):
        members = set()
        for j in range(i + 1, n):
            members.add(p[j - 1])
            if j == i + 1 or (i == 0 and j == n - 1):
                allowed[i][j] = True
                continue
            entries = sum(1 for q in members if (q - 1) % n not in members)
            allowed[i][j] = entries == 1

    table = [[0] * n for _ in range(n)]
    for i in range(n - 1):
        table[i][i + 1] = 1
    for span in range(2, n):
        for i in range(0, n - span):
            j = i + span
            total = 0
            for k in range(i + 1, j):
                if allowed[i][k] and allowed[k][j]:
                    total += table[i][k] * table[k][j]
            table[i][j] = total
    return table[0][n - 1]


def fast_nonzero(a: Ordering | Sequence[int], b: Ordering | Sequence[int]) -> bool:
    """Decide ``I(a, b) != 0`` by repeatedly pruning a common cherry.

    The common adjacent pair with the smallest minimum label is chosen and
    its larger label removed from both orderings.  Reaching length 4 means
    a shared tree exists; running out of common pairs means none does.
    """
    la, lb = _pair(a, b)
    if len(la) < 4:
        raise ValueError("orderings need at least 4 labels")
    la, lb = list(la), list(lb)
    while len(la) > 4:
        pairs_a = {(min(la[i], la[i - 1]), max(la[i], la[i - 1])) for i in range(len(la))}
        best = None
        for i in range(len(lb)):
            x, y = lb[i], lb[i - 1]
            key = (x, y) if x < y else (y, x)
            if key in pairs_a and (best is None or key < best):
                best = key
        if best is None:
            return False
        drop = best[1]
        la.remove(drop)
        lb.remove(drop)
    return True


def _prune_all_choices(la: tuple, lb: tuple) -> set[bool]:
    """Outcomes of cherry pruning over every possible sequence of choices."""
    if len(la) == 4:
        return {True}
    pairs_a = {frozenset((la[i], la[i - 1])) for i in range(len(la))}
    common = [frozenset((lb[i], lb[i - 1])) for i in range(len(lb))]
    common = [c for c in common if c in pairs_a]
    if not common:
        return {False}
    out = set()
    for c in common:
        for drop in c:
            out |= _prune_all_choices(tuple(x for x in la if x != drop), tuple(x for x in lb if x != drop))
    return out


# ------------------------------------------------------ polygon decomposition


@dataclass(frozen=True)
class PolygonDecomposition:
    """Forced common splits and the polygon side counts they induce.

    ``sides`` is ``None`` when the two orderings induce different cyclic
    orders around some vertex of the skeleton tree; ``value`` is then 0.
    """

    sides: tuple[int, ...] | None
    value: int
    forced_splits: frozenset
    mismatched_vertex: tuple[frozenset, ...] | None = None

    @property
    def polygons(self) -> int:
        return 0 if self.sides is None else len(self.sides)


def _skeleton_vertices(forced: frozenset, n: int) -> list[list[frozenset]]:
    """Branches (as leaf sets) around each internal vertex of the skeleton tree."""
    everything = frozenset(range(1, n + 1))
    splits = sorted(forced, key=len)

    def children(parent: frozenset) -> list[frozenset]:
        inside = [s for s in splits if s < parent]
        maximal = [s for s in inside if not any(s < t for t in inside)]
        covered = frozenset().union(*maximal) if maximal else frozenset()
        return maximal + [frozenset([x]) for x in sorted(parent - covered)]

    vertices = [children(everything - {n}) + [frozenset([n])]]
    for s in splits:
        vertices.append(children(s) + [everything - s])
    return vertices


def _induced_cycle(branches: list[frozenset], labels: Sequence[int]) -> tuple[int, ...]:
    owner = {}
    for idx, br in enumerate(branches):
        for x in br:
            owner[x] = idx
    seq = []
    for x in labels:
        r = min(branches[owner[x]])
        if not seq or seq[-1] != r:
            seq.append(r)
    while len(seq) > 1 and seq[0] == seq[-1]:
        seq.pop()
    return tuple(seq)


def _same_cycle(u: tuple, v: tuple) -> bool:
    if len(u) != len(v) or set(u) != set(v):
        return False
    k = v.index(u[0])
    rot = v[k:] + v[:k]
    rev = (rot[0],) + tuple(reversed(rot[1:]))
    return u in (rot, rev)


def common_splits(a: Sequence[int], b: Sequence[int]) -> frozenset:
    """Splits that are arcs of both orderings."""
    la, lb = _pair(a, b)
    return frozenset(s for s in polygon_splits(la).values() if is_contiguous(s, lb))


def polygon_decomposition(a: Ordering | Sequence[int], b: Ordering | Sequence[int]) -> PolygonDecomposition:
    """Diagram-rule diagnostic: product of C_{s-2} over skeleton polygons.

    The skeleton tree is built from the common splits that are compatible
    with every other common split.  Each of its internal vertices becomes a
    polygon when both orderings induce the same cyclic order on the branches
    meeting there.
    """
    la, lb = _pair(a, b)
    n = len(la)
    common = common_splits(la, lb)
    forced = frozenset(s for s in common if all(compatible(s, t) for t in common))
    sides = []
    for branches in _skeleton_vertices(forced, n):
        ca = _induced_cycle(branches, la)
        cb = _induced_cycle(branches, lb)
        if len(ca) != len(branches) or len(cb) != len(branches):
            raise AssertionError("skeleton branch is not an arc; forced split bookkeeping broken")
        if not _same_cycle(ca, cb):
            return PolygonDecomposition(None, 0, forced, tuple(branches))
        sides.append(len(branches))
    sides.sort()
    value = math.prod(_catalan(s - 2) for s in sides)
    return PolygonDecomposition(tuple(sides), value, forced)


def _catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


# ---------------------------------------------------------------- matrices


@dataclass(frozen=True)
class IntersectionMatrix:
    n: int
    catalog: OrderingCatalog
    entries: np.ndarray

    kind = "counts"

    def row(self, o: Ordering | Sequence[int]) -> np.ndarray:
        return self.entries[self.catalog.position(o)]

    def to_binary(self) -> "BinaryMatrix":
        return BinaryMatrix(self.n, self.catalog, self.entries != 0)


@dataclass(frozen=True)
class BinaryMatrix:
    n: int
    catalog: OrderingCatalog
    bits: np.ndarray

    kind = "binary"

    def row(self, o: Ordering | Sequence[int]) -> np.ndarray:
        return self.bits[self.catalog.position(o)]


def default_workers() -> int:
    env = os.environ.get("TROPINT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _rows_worker(args) -> tuple[int, int, list[list[int]]]:
    n, mode, lo, hi = args
    cat = enumerate_orderings(n)
    fn = count_dp if mode == "counts" else fast_nonzero
    orderings = [o.labels for o in cat.orderings]
    out = []
    for i in range(lo, hi):
        a = orderings[i]
        out.append([int(fn(a, orderings[j])) for j in range(i, len(orderings))])
    return lo, hi, out


def _row_chunks(size: int, pieces: int) -> list[tuple[int, int]]:
    # upper-triangle rows shrink, so balance by remaining pair count
    total = size * (size + 1) // 2
    target = total / pieces
    bounds, acc, lo = [], 0, 0
    for i in range(size):
        acc += size - i
        if acc >= target * (len(bounds) + 1) and i + 1 < size:
            bounds.append((lo, i + 1))
            lo = i + 1
    bounds.append((lo, size))
    return [b for b in bounds if b[0] < b[1]]


def build_matrix(n: int, mode: str = "counts", workers: int | None = None):
    """Full intersection matrix over the catalog.

    ``mode="counts"`` fills exact I(a, b) with :func:`count_dp` (n <= 7);
    ``mode="binary"`` fills 0/1 with :func:`fast_nonzero` (n <= 8).  Only the
    upper triangle is computed and mirrored.  The result does not depend on
    ``workers``.
    """
    if mode not in ("counts", "binary"):
        raise ValueError(f"unknown mode {mode!r}")
    cap = COUNTS_MAX_N if mode == "counts" else BINARY_MAX_N
    if not 4 <= n <= cap:
        raise ValueError(f"{mode} matrix supports 4 <= n <= {cap}, got {n}")
    cat = enumerate_orderings(n)
    size = len(cat)
    workers = default_workers() if workers is None else max(1, int(workers))
    chunks = _row_chunks(size, max(1, workers * 4))
    jobs = [(n, mode, lo, hi) for lo, hi in chunks]
    if workers == 1 or size < 100:
        results = map(_rows_worker, jobs)
    else:
        pool = ProcessPoolExecutor(max_workers=workers)
        results = pool.map(_rows_worker, jobs)
    dtype = np.int64 if mode == "counts" else bool
    mat = np.zeros((size, size), dtype=dtype)
    for lo, hi, rows in results:
        for off, vals in enumerate(rows):
            i = lo + off
            mat[i, i:] = vals
    if workers != 1 and size >= 100:
        pool.shutdown()
    mat = np.triu(mat) + np.triu(mat, 1).T
    if mode == "counts":
        return IntersectionMatrix(n, cat, mat)
    return BinaryMatrix(n, cat, mat.astype(bool))


def row_profile(n: int) -> Counter:
    """Multiset of I(identity, b) over the catalog."""
    if not 4 <= n <= COUNTS_MAX_N:
        raise ValueError(f"row_profile supports 4 <= n <= {COUNTS_MAX_N}")
    ident = identity_ordering(n).labels
    return Counter(count_dp(ident, o.labels) for o in enumerate_orderings(n))


def binary_row(n: int, o: Ordering | Sequence[int] | None = None) -> np.ndarray:
    """One row of the binary matrix, without building the rest."""
    cat = enumerate_orderings(n)
    a = identity_ordering(n).labels if o is None else tuple(o)
    return np.array([fast_nonzero(a, b.labels) for b in cat.orderings], dtype=bool)


# --------------------------------------------------------------- persistence


def save_matrix(path, matrix: IntersectionMatrix | BinaryMatrix) -> None:
    """Write a JSON header line followed by CSV rows or hex bitset rows.

    Binary rows pack columns big-endian into bytes (column 0 is the most
    significant bit of the first byte) and are written as lowercase hex.
    """
    header = {
        "schema": 1,
        "n": matrix.n,
        "kind": matrix.kind,
        "size": len(matrix.catalog),
        "catalog": matrix.catalog.as_strings(),
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    if matrix.kind == "counts":
        lines.extend(",".join(str(int(v)) for v in row) for row in matrix.entries)
    else:
        lines.extend(np.packbits(row).tobytes().hex() for row in matrix.bits)
    Path(path).write_text("\n".join(lines) + "\n")


def load_matrix(path) -> IntersectionMatrix | BinaryMatrix:
    text = Path(path).read_text().splitlines()
    header = json.loads(text[0])
    n, kind = int(header["n"]), header["kind"]
    cat = enumerate_orderings(n)
    if header["catalog"] != cat.as_strings():
        raise ValueError(f"{path}: catalog in header does not match the canonical catalog for n={n}")
    rows = text[1:]
    size = len(cat)
    if len(rows) != size:
        raise ValueError(f"{path}: expected {size} rows, found {len(rows)}")
    if kind == "counts":
        mat = np.array([[int(v) for v in r.split(",")] for r in rows], dtype=np.int64)
        return IntersectionMatrix(n, cat, mat)
    if kind == "binary":
        packed = np.array([np.frombuffer(bytes.fromhex(r), dtype=np.uint8) for r in rows])
        bits = np.unpackbits(packed, axis=1)[:, :size].astype(bool)
        return BinaryMatrix(n, cat, bits)
    raise ValueError(f"{path}: unknown matrix kind {kind!r}")


def parse_pair(alpha: str, beta: str) -> tuple[Ordering, Ordering]:
    a, b = parse_ordering(alpha), parse_ordering(beta)
    if a.n != b.n:
        raise ValueError(f"orderings have different sizes: {a.n} vs {b.n}")
    return a, b


def all_pairs(n: int):
    """Unordered pairs (with repetition) of catalog orderings."""
    cat = enumerate_orderings(n)
    return itertools.combinations_with_replacement(cat.orderings, 2)

