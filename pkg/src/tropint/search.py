"""Largest permutation submatrices of the binary intersection matrix.

A permutation submatrix M[R][C] is a clique in the compatibility graph on
the 1-entries of M: (i, j) ~ (k, l) when i != k, j != l and the cross
entries M[i][l], M[k][j] both vanish.

Every ordering can be relabeled to the identity, and relabeling permutes
rows and columns of M simultaneously, so some maximum clique uses row 0
(the identity).  The search therefore runs one subproblem per 1-entry
(0, j): rows k with M[k][j] = 0 against columns l with M[0][l] = 0.

Sizes are found by iterative deepening.  Each attempt is a depth-first
search that visits vertices in (row, col) order, so the first clique of the
final size is the lexicographically smallest maximum witness.
"""
from __future__ import annotations

import json
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .exact import rational_rank
from .intersection import BinaryMatrix, IntersectionMatrix, build_matrix, count_dp
from .orderings import Ordering, OrderingCatalog, enumerate_orderings, format_ordering, parse_ordering, relabel

__all__ = [
    "CompatibilityGraph",
    "CliqueWitness",
    "SearchBudgetExceeded",
    "WitnessReport",
    "build_graph",
    "max_permutation_submatrix",
    "verify_witness",
    "symmetric_degree",
    "row_zero_subproblems",
    "dihedral_column_orbits",
    "witness_to_json",
    "save_witness",
    "load_witness",
]

SYMMETRIC_MAX_N = 7
LS_STEPS = 20_000  # local-search moves per subproblem in budgeted mode
LS_TABU = 7


class SearchBudgetExceeded(Exception):
    """Internal signal: the node budget ran out."""


def _bits(mask: np.ndarray) -> int:
    """Python int with bit v set iff mask[v]."""
    if not mask.any():
        return 0
    return int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")


def _iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


@dataclass
class CompatibilityGraph:
    vertices: list[tuple[int, int]]  # (row, col), sorted
    adjacency: list[int]  # bitsets over vertex indices

    @property
    def edge_count(self) -> int:
        return sum(bin(a).count("1") for a in self.adjacency) // 2

    def is_clique(self, members: Sequence[int]) -> bool:
        return all(self.adjacency[u] >> v & 1 for i, u in enumerate(members) for v in members[i + 1:])


def _local_graph(bits: np.ndarray, rows: Sequence[int], cols: Sequence[int]):
    """Compatibility graph on the 1-entries of bits[rows][cols], plus row/col masks."""
    rows = np.asarray(rows, dtype=int)
    cols = np.asarray(cols, dtype=int)
    sub = bits[np.ix_(rows, cols)]
    vr, vc = np.nonzero(sub)  # row-major, so vertices come out sorted
    zero = ~sub
    # (k,l) ~ (k',l') iff zero[k'][l] and zero[k][l']
    by_col = [_bits(zero[vr, c]) for c in range(len(cols))]  # vertices whose row is 0 in column c
    by_row = [_bits(zero[r, vc]) for r in range(len(rows))]  # vertices whose column is 0 in row r
    adjacency = [by_col[c] & by_row[r] for r, c in zip(vr, vc)]
    row_masks = [_bits(vr == r) for r in range(len(rows))]
    col_masks = [_bits(vc == c) for c in range(len(cols))]
    vertices = [(int(rows[r]), int(cols[c])) for r, c in zip(vr, vc)]
    return CompatibilityGraph(vertices, adjacency), [m for m in row_masks if m], [m for m in col_masks if m]


def build_graph(matrix: BinaryMatrix | np.ndarray) -> CompatibilityGraph:
    """Compatibility graph on all 1-entries (memory grows like ones^2 / 8 bytes)."""
    bits = np.asarray(getattr(matrix, "bits", matrix), dtype=bool)
    g, _, _ = _local_graph(bits, range(bits.shape[0]), range(bits.shape[1]))
    return g


@dataclass
class CliqueWitness:
    n: int | None
    rows: tuple[int, ...]  # catalog indices, paired with cols
    cols: tuple[int, ...]
    lower_bound: bool = False
    nodes: int = 0
    checkpoint: dict | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return len(self.rows)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(zip(self.rows, self.cols))


class _Search:
    def __init__(self, budget: int | None, nodes: int = 0, time_limit: float | None = None):
        self.budget = budget
        self.nodes = nodes
        self.deadline = None if time_limit is None else time.monotonic() + time_limit
        self.path: list[int] = []  # vertex indices of the current DFS branch

    def tick(self, k: int = 1):
        self.nodes += k
        if self.budget is not None and self.nodes > self.budget:
            raise SearchBudgetExceeded
        if self.deadline is not None and self.nodes % 1024 < k and time.monotonic() > self.deadline:
            raise SearchBudgetExceeded

    def remaining(self) -> int | None:
        return None if self.budget is None else max(self.budget - self.nodes, 0)

    def find(self, graph, row_masks, col_masks, need: int, resume: Sequence[int] = ()):
        """First clique of size ``need`` in vertex order, or None."""
        if need == 0:
            return []
        self.path = []
        full = (1 << len(graph.vertices)) - 1
        return self._extend(graph, row_masks, col_masks, full, need, list(resume))

    def _extend(self, graph, row_masks, col_masks, cand, need, resume):
        self.tick()
        if need == 0:
            return list(self.path)
        rows = sum(1 for m in row_masks if cand & m)
        if rows < need or sum(1 for m in col_masks if cand & m) < need:
            return None
        start = resume.pop(0) if resume else 0
        for v in _iter_bits(cand >> start << start):
            self.path.append(v)
            rest = cand & graph.adjacency[v] & ~((2 << v) - 1)
            hit = self._extend(graph, row_masks, col_masks, rest, need - 1, resume)
            if hit is not None:
                return hit
            self.path.pop()
            resume = []
        return None


def _unpack(x: int, size: int) -> np.ndarray:
    raw = np.frombuffer(x.to_bytes((size + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:size].astype(bool)


def _local_search(adjacency: list[int], steps: int, rng: random.Random, tick) -> list[int]:
    """Tabu plateau search for a large clique: add, else swap a one-miss vertex, else drop."""
    size = len(adjacency)
    rows: dict[int, np.ndarray] = {}

    def row(v):
        if v not in rows:
            rows[v] = _unpack(adjacency[v], size)
        return rows[v]

    miss = np.zeros(size, dtype=np.int32)  # clique members not adjacent to v
    in_c = np.zeros(size, dtype=bool)
    tabu = np.zeros(size, dtype=np.int64)
    clique: list[int] = []
    best: list[int] = []

    def add(v):
        miss[~row(v)] += 1
        miss[v] -= 1
        in_c[v] = True
        clique.append(v)

    def drop(v, it):
        miss[~row(v)] -= 1
        miss[v] += 1
        in_c[v] = False
        clique.remove(v)
        tabu[v] = it + LS_TABU

    for it in range(steps):
        tick()
        open_ = ~in_c & (tabu <= it)
        can_add = np.nonzero(open_ & (miss == 0))[0]
        if len(can_add):
            add(int(can_add[rng.randrange(len(can_add))]))
            if len(clique) > len(best):
                best = list(clique)
            continue
        one_miss = np.nonzero(open_ & (miss == 1))[0]
        if len(one_miss) and rng.random() < 0.98:
            u = int(one_miss[rng.randrange(len(one_miss))])
            ru = row(u)
            drop(next(c for c in clique if not ru[c]), it)
            add(u)
        elif clique:
            drop(clique[rng.randrange(len(clique))], it)
    return sorted(best)


def row_zero_subproblems(bits: np.ndarray) -> list[tuple[int, list[int], list[int]]]:
    """(j, rows, cols) for every 1-entry (0, j)."""
    out = []
    zero_cols = [l for l in range(bits.shape[1]) if not bits[0, l]]
    for j in np.nonzero(bits[0])[0]:
        rows = [k for k in range(1, bits.shape[0]) if not bits[k, j]]
        out.append((int(j), rows, [l for l in zero_cols if l != j]))
    return out


def dihedral_column_orbits(catalog: OrderingCatalog) -> list[list[int]]:
    """Orbits of catalog positions under relabelings that fix the identity ordering."""
    n = catalog.n
    group = []
    for r in range(n):
        group.append([(k - 1 + r) % n + 1 for k in range(1, n + 1)])
        group.append([(-(k - 1) + r) % n + 1 for k in range(1, n + 1)])
    seen: dict[int, int] = {}
    orbits: list[list[int]] = []
    for pos, o in enumerate(catalog.orderings):
        if pos in seen:
            continue
        orb = sorted({catalog.position(relabel(o, g)) for g in group})
        for p in orb:
            seen[p] = len(orbits)
        orbits.append(orb)
    return orbits


def max_permutation_submatrix(
    matrix: BinaryMatrix | np.ndarray,
    budget: int | None = None,
    deterministic: bool = True,
    symmetry: bool = False,
    resume: dict | None = None,
    upper: int | None = None,
    time_limit: float | None = None,
    heuristic: bool | None = None,
    seed: int = 0,
) -> CliqueWitness:
    """Largest permutation submatrix M[R][C] with row 0 forced into R.

    Without a budget the search is exhaustive.  With ``budget`` (search nodes)
    or ``time_limit`` (seconds) a seeded local search first runs on each
    subproblem, then the exhaustive search continues from the size it
    reached; if the limit hits, the best witness is returned with
    ``lower_bound=True`` and a checkpoint that can be passed back as
    ``resume``.  ``symmetry`` visits one column per orbit of the relabelings
    fixing the identity.  With ``deterministic`` a completed search returns
    the lexicographically smallest maximum witness.
    """
    n = getattr(matrix, "n", None)
    bits = np.asarray(getattr(matrix, "bits", matrix), dtype=bool)
    if bits.ndim != 2 or bits.shape[0] != bits.shape[1]:
        raise ValueError("binary matrix must be square")
    if not bits[0].any():
        return CliqueWitness(n, (), ())
    if upper is None and n is not None:
        upper = math.factorial(n - 3)
    if heuristic is None:
        heuristic = budget is not None or time_limit is not None
    subs = row_zero_subproblems(bits)
    if symmetry and not isinstance(matrix, BinaryMatrix):
        raise ValueError("symmetry reduction needs a BinaryMatrix with its catalog")
    heur_subs = subs
    if isinstance(matrix, BinaryMatrix):
        reps = {min(orb) for orb in dihedral_column_orbits(matrix.catalog)}
        # the local search only produces lower bounds, so one column per orbit is enough
        heur_subs = [s for s in subs if s[0] in reps]
        if symmetry:
            subs = heur_subs

    state = dict(resume or {})
    phase = state.get("phase", "heuristic" if heuristic else "exact")
    pos0 = int(state.get("subproblem", 0))
    best_rows = tuple(state.get("rows", (0,)))
    best_cols = tuple(state.get("cols", (subs[0][0],)))
    path0 = list(state.get("path", ()))
    improved_by_heuristic = bool(state.get("heuristic_best", False))
    search = _Search(budget, int(state.get("nodes", 0)), time_limit)

    def full(size):
        return upper is not None and size >= upper

    pos = pos0
    try:
        if phase == "heuristic":
            for pos in range(pos0, len(heur_subs)):
                if full(len(best_rows)):
                    break
                j, rows, cols = heur_subs[pos]
                graph, _, _ = _local_graph(bits, rows, cols)
                rem = search.remaining()
                steps = LS_STEPS if rem is None else min(LS_STEPS, rem)
                hit = _local_search(graph.adjacency, steps, random.Random(seed * 1_000_003 + j), search.tick)
                if len(hit) + 1 > len(best_rows):
                    members = [(0, j)] + [graph.vertices[v] for v in hit]
                    best_rows = tuple(r for r, _ in members)
                    best_cols = tuple(c for _, c in members)
                    improved_by_heuristic = True
            phase, pos0, path0 = "exact", 0, []
        for pos in range(pos0, len(subs)):
            j, rows, cols = subs[pos]
            graph, rmask, cmask = _local_graph(bits, rows, cols)
            resume_path = path0 if pos == pos0 else []
            while not full(len(best_rows)):
                hit = search.find(graph, rmask, cmask, len(best_rows), resume_path)
                resume_path = []
                if hit is None:
                    break
                members = [(0, j)] + [graph.vertices[v] for v in hit]
                best_rows = tuple(r for r, _ in members)
                best_cols = tuple(c for _, c in members)
                improved_by_heuristic = False
        if deterministic and improved_by_heuristic:
            # the size is now proven maximal; redo it in order for the canonical witness
            phase = "canonical"
            for pos in range(len(subs)):
                j, rows, cols = subs[pos]
                graph, rmask, cmask = _local_graph(bits, rows, cols)
                hit = search.find(graph, rmask, cmask, len(best_rows) - 1)
                if hit is not None:
                    members = [(0, j)] + [graph.vertices[v] for v in hit]
                    best_rows = tuple(r for r, _ in members)
                    best_cols = tuple(c for _, c in members)
                    break
    except SearchBudgetExceeded:
        checkpoint = {
            "schema": 1,
            "n": n,
            "phase": phase if phase != "canonical" else "exact",
            "subproblem": pos if phase != "canonical" else len(subs),
            "path": list(search.path) if phase == "exact" else [],
            "rows": list(best_rows),
            "cols": list(best_cols),
            "heuristic_best": improved_by_heuristic,
            "nodes": search.nodes,
            "symmetry": symmetry,
            "seed": seed,
        }
        return CliqueWitness(n, best_rows, best_cols, True, search.nodes, checkpoint)
    return CliqueWitness(n, best_rows, best_cols, False, search.nodes)


# ------------------------------------------------------------- verification


@dataclass
class WitnessReport:
    size: int
    submatrix: list[list[int]]
    is_permutation: bool  # exactly one non-zero per row and column
    permutation: list[int] | None  # row i pairs with column permutation[i]
    rank: int
    diagonal_values: list[int]


def verify_witness(
    a: Sequence[Ordering | Sequence[int]],
    b: Sequence[Ordering | Sequence[int]],
    matrix: IntersectionMatrix | BinaryMatrix | None = None,
) -> WitnessReport:
    """Recompute I on A x B (or read it from ``matrix``) and check its shape."""
    if len(a) != len(b):
        raise ValueError(f"witness sets have different sizes {len(a)} and {len(b)}")
    la = [tuple(x) for x in a]
    lb = [tuple(x) for x in b]
    if matrix is None:
        sub = [[count_dp(x, y) for y in lb] for x in la]
    else:
        data = matrix.entries if isinstance(matrix, IntersectionMatrix) else matrix.bits
        ia = [matrix.catalog.position(x) for x in la]
        ib = [matrix.catalog.position(y) for y in lb]
        sub = [[int(data[i][j]) for j in ib] for i in ia]
    nz = [[j for j, v in enumerate(row) if v] for row in sub]
    perm = [row[0] for row in nz] if all(len(row) == 1 for row in nz) else None
    is_perm = perm is not None and sorted(perm) == list(range(len(lb)))
    rank = rational_rank(sub) if sub else 0
    diag = [sub[i][perm[i]] for i in range(len(sub))] if is_perm else []
    return WitnessReport(len(sub), sub, is_perm, perm if is_perm else None, rank, diag)


# -------------------------------------------------------- symmetric variant


def _max_clique_containing_first(adj: list[int], cand: int, upper: int | None) -> list[int]:
    """Maximum clique inside ``cand`` by branch and bound with greedy colouring."""
    best: list[int] = []

    def colour_bound(p: int) -> int:
        colours = 0
        while p:
            colours += 1
            q = p
            while q:
                v = (q & -q).bit_length() - 1
                p &= ~(1 << v)
                q &= ~adj[v] & ~(1 << v)
        return colours

    def expand(r: list[int], p: int):
        nonlocal best
        if len(r) > len(best):
            best = list(r)
        if upper is not None and len(best) >= upper:
            return
        while p:
            if len(r) + colour_bound(p) <= len(best):
                return
            v = (p & -p).bit_length() - 1
            r.append(v)
            expand(r, p & adj[v])
            r.pop()
            p &= ~(1 << v)

    expand([], cand)
    return best


def symmetric_degree(n: int, matrix: BinaryMatrix | None = None) -> tuple[int, list[Ordering]]:
    """Largest set S with I(a, b) = 0 for all a != b in S, and one such S.

    Diagonal entries never vanish, so S x S is then diagonal.
    """
    if not 4 <= n <= SYMMETRIC_MAX_N:
        raise ValueError(f"symmetric degree supports 4 <= n <= {SYMMETRIC_MAX_N}, got {n}")
    if matrix is None:
        matrix = build_matrix(n, "binary")
    zero = ~np.asarray(matrix.bits, dtype=bool)
    np.fill_diagonal(zero, False)
    adj = [_bits(zero[v]) for v in range(zero.shape[0])]
    # vertex transitivity again: ordering 0 can be assumed in S
    rest = _max_clique_containing_first(adj, adj[0], math.factorial(n - 3) - 1)
    members = [0] + rest
    cat = matrix.catalog
    return len(members), [cat.orderings[i] for i in sorted(members)]


# ------------------------------------------------------------------ files


def witness_to_json(w: CliqueWitness, catalog: OrderingCatalog | None = None) -> dict:
    cat = catalog or enumerate_orderings(w.n)
    pairs = w.pairs()
    out = {
        "schema": 1,
        "n": w.n,
        "size": w.size,
        "rows": [format_ordering(cat.orderings[r]) for r, _ in pairs],
        "cols": [format_ordering(cat.orderings[c]) for _, c in pairs],
        "permutation": list(range(w.size)),
        "lower_bound": w.lower_bound,
        "nodes": w.nodes,
    }
    if w.checkpoint is not None:
        out["checkpoint"] = w.checkpoint
    return out


def save_witness(path, w: CliqueWitness, catalog: OrderingCatalog | None = None) -> None:
    Path(path).write_text(json.dumps(witness_to_json(w, catalog), indent=1) + "\n")


def load_witness(path) -> tuple[list[Ordering], list[Ordering], dict]:
    data = json.loads(Path(path).read_text())
    rows = [parse_ordering(t) for t in data["rows"]]
    cols = [parse_ordering(t) for t in data["cols"]]
    perm = data.get("permutation", list(range(len(cols))))
    return rows, [cols[p] for p in perm], data
