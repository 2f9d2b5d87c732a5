"""Unrooted leaf-labelled trees stored as sets of splits.

A split is kept as the frozenset of leaves on the side *not* containing
label ``n``.  With that convention two splits are compatible exactly when
one contains the other or they are disjoint.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import networkx as nx

from .orderings import Ordering, canonicalize

__all__ = [
    "Split",
    "Tree",
    "DegenerateTree",
    "canonical_split",
    "compatible",
    "is_contiguous",
    "enumerate_all_trees",
    "is_planar",
    "enumerate_planar",
    "polygon_splits",
    "enumerate_codim1",
    "smoothings",
    "link_graph",
    "girth",
    "common_cherries",
    "format_tree",
    "format_degenerate",
    "parse_degenerate",
]

TREE_MAX_N = 8
CODIM1_MAX_N = 7

Split = frozenset


def canonical_split(side: Iterable[int], n: int) -> frozenset[int]:
    """Return the side of the bipartition that excludes label ``n``."""
    s = frozenset(side)
    if n in s:
        s = frozenset(range(1, n + 1)) - s
    if not 2 <= len(s) <= n - 2:
        raise ValueError(f"split side {sorted(s)} has invalid size for n={n}")
    return s


def compatible(s: frozenset, t: frozenset) -> bool:
    return s <= t or t <= s or not (s & t)


def _check_laminar(splits) -> None:
    for s, t in itertools.combinations(splits, 2):
        if not compatible(s, t):
            raise ValueError(f"splits {sorted(s)} and {sorted(t)} are incompatible")


@dataclass(frozen=True)
class Tree:
    """Unrooted binary tree on leaves 1..n as its n-3 canonical splits."""

    n: int
    splits: frozenset

    def __post_init__(self):
        splits = frozenset(canonical_split(s, self.n) for s in self.splits)
        if len(splits) != self.n - 3:
            raise ValueError(f"binary tree on {self.n} leaves needs {self.n - 3} splits, got {len(splits)}")
        _check_laminar(splits)
        object.__setattr__(self, "splits", splits)

    def __str__(self) -> str:
        return format_tree(self)


@dataclass(frozen=True)
class DegenerateTree:
    """Tree with exactly one degree-4 internal vertex (n-4 splits)."""

    n: int
    splits: frozenset

    def __post_init__(self):
        splits = frozenset(canonical_split(s, self.n) for s in self.splits)
        if len(splits) != self.n - 4:
            raise ValueError(f"degenerate tree on {self.n} leaves needs {self.n - 4} splits")
        _check_laminar(splits)
        object.__setattr__(self, "splits", splits)

    def __str__(self) -> str:
        return format_degenerate(self)


def _fast_tree(n: int, splits: frozenset) -> Tree:
    t = Tree.__new__(Tree)
    object.__setattr__(t, "n", n)
    object.__setattr__(t, "splits", splits)
    return t


def _sort_key(split_set) -> tuple:
    return tuple(sorted(tuple(sorted(s)) for s in split_set))


def format_tree(t: Tree | DegenerateTree) -> str:
    """Sorted canonical splits, e.g. ``{1,2}|{1,2,3}``."""
    parts = sorted(t.splits, key=lambda s: (len(s), sorted(s)))
    return "|".join("{" + ",".join(str(x) for x in sorted(s)) + "}" for s in parts)


# ---------------------------------------------------------------- all trees


def _splits_from_edges(edges: list[tuple[int, int]], k: int) -> frozenset:
    adj: dict[int, list[int]] = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    out = []
    for u, v in edges:
        if u > 0 or v > 0:
            continue  # pendant edge
        # leaves reachable from v without crossing (u, v)
        seen = {u, v}
        stack = [v]
        leaves = set()
        while stack:
            x = stack.pop()
            if x > 0:
                leaves.add(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out.append(canonical_split(leaves, k))
    return frozenset(out)


@lru_cache(maxsize=None)
def enumerate_all_trees(n: int) -> tuple[Tree, ...]:
    """All (2n-5)!! unrooted binary trees on leaves 1..n.

    Built by attaching leaf k+1 to every edge of every k-leaf tree, starting
    from the 3-leaf star.  Leaves are positive node ids, internal vertices
    negative.  Capped at ``n <= 8`` (10395 trees).
    """
    if not 4 <= n <= TREE_MAX_N:
        raise ValueError(f"n must be in [4, {TREE_MAX_N}], got {n}")
    shapes = [[(-1, 1), (-1, 2), (-1, 3)]]
    for leaf in range(4, n + 1):
        grown = []
        for edges in shapes:
            new_internal = -leaf + 2  # -2, -3, ...
            for idx, (u, v) in enumerate(edges):
                rest = edges[:idx] + edges[idx + 1:]
                grown.append(rest + [(u, new_internal), (new_internal, v), (new_internal, leaf)])
        shapes = grown
    trees = sorted({_splits_from_edges(e, n) for e in shapes}, key=_sort_key)
    return tuple(_fast_tree(n, s) for s in trees)


# ------------------------------------------------------------------ planarity


def is_contiguous(members: frozenset, labels: Sequence[int]) -> bool:
    """True when ``members`` occupies a cyclic arc of ``labels``."""
    n = len(labels)
    k = len(members)
    if k == 0 or k == n:
        return True
    # an arc has exactly one entry point: a member preceded by a non-member
    starts = 0
    for i in range(n):
        if labels[i] in members and labels[i - 1] not in members:
            starts += 1
    return starts == 1


def is_planar(t: Tree | DegenerateTree, o: Ordering | Sequence[int]) -> bool:
    labels = tuple(o)
    if t.n != len(labels):
        raise ValueError(f"tree has {t.n} leaves but ordering has {len(labels)} labels")
    return all(is_contiguous(s, labels) for s in t.splits)


def polygon_splits(labels: Sequence[int]) -> dict[tuple[int, int], frozenset]:
    """Map each diagonal (i, j) of the n-gon to its canonical split.

    Side ``i`` of the polygon joins vertices ``i`` and ``i+1`` and carries
    leaf ``labels[i]``; the diagonal (i, j) cuts off sides i..j-1.
    """
    n = len(labels)
    out = {}
    for i in range(n):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            out[(i, j)] = canonical_split(labels[i:j], n)
    return out


def _triangulations(lo: int, hi: int, memo: dict) -> list[tuple[tuple[int, int], ...]]:
    """Triangulations of the sub-polygon on vertices lo..hi (chord lo-hi present)."""
    key = (lo, hi)
    if key in memo:
        return memo[key]
    if hi - lo < 2:
        memo[key] = [()]
        return memo[key]
    out = []
    for k in range(lo + 1, hi):
        left = _triangulations(lo, k, memo)
        right = _triangulations(k, hi, memo)
        chords = ((lo, k),) if k - lo >= 2 else ()
        chords += ((k, hi),) if hi - k >= 2 else ()
        for a in left:
            for b in right:
                out.append(a + b + chords)
    memo[key] = out
    return out


def enumerate_planar(o: Ordering | Sequence[int]) -> tuple[Tree, ...]:
    """The C_{n-2} binary trees planar for ``o``, via n-gon triangulations."""
    labels = tuple(o)
    n = len(labels)
    if not isinstance(o, Ordering):
        canonicalize(labels)  # validates
    diag = polygon_splits(labels)
    trees = []
    for tri in _triangulations(0, n - 1, {}):
        trees.append(frozenset(diag[d] for d in tri))
    trees.sort(key=_sort_key)
    return tuple(_fast_tree(n, s) for s in trees)


# ------------------------------------------------------ codimension one trees


@lru_cache(maxsize=None)
def enumerate_codim1(n: int) -> tuple[DegenerateTree, ...]:
    """All trees with a single degree-4 vertex (contract one edge of a binary tree)."""
    if not 4 <= n <= CODIM1_MAX_N:
        raise ValueError(f"n must be in [4, {CODIM1_MAX_N}], got {n}")
    found = set()
    for t in enumerate_all_trees(n):
        for s in t.splits:
            found.add(t.splits - {s})
    out = []
    for splits in sorted(found, key=_sort_key):
        d = DegenerateTree.__new__(DegenerateTree)
        object.__setattr__(d, "n", n)
        object.__setattr__(d, "splits", splits)
        out.append(d)
    return tuple(out)


def smoothings(d: DegenerateTree) -> tuple[Tree, Tree, Tree]:
    """The three binary trees obtained by opening the degree-4 vertex."""
    n = d.n
    extra = []
    for k in range(2, n - 1):
        for side in itertools.combinations(range(1, n), k):
            s = frozenset(side)
            if s not in d.splits and all(compatible(s, t) for t in d.splits):
                extra.append(s)
    if len(extra) != 3:
        raise ValueError(f"{format_tree(d)} is not a tree with exactly one degree-4 vertex")
    out = sorted((d.splits | {s} for s in extra), key=_sort_key)
    return tuple(_fast_tree(n, s) for s in out)


def format_degenerate(d: DegenerateTree) -> str:
    """``(ab)(cde)`` notation for n = 5; split notation otherwise."""
    if d.n != 5:
        return format_tree(d)
    (s,) = d.splits
    pair = s if len(s) == 2 else frozenset(range(1, 6)) - s
    rest = frozenset(range(1, 6)) - pair
    return "(" + "".join(map(str, sorted(pair))) + ")(" + "".join(map(str, sorted(rest))) + ")"


def parse_degenerate(text: str) -> DegenerateTree:
    """Parse the n = 5 notation ``(34)(512)``."""
    body = text.replace(" ", "")
    if not (body.startswith("(") and body.endswith(")") and ")(" in body):
        raise ValueError(f"cannot parse {text!r} as (ab)(cde)")
    pair, rest = body[1:-1].split(")(")
    labels = [int(c) for c in pair + rest]
    if len(pair) != 2 or sorted(labels) != [1, 2, 3, 4, 5]:
        raise ValueError(f"cannot parse {text!r} as (ab)(cde)")
    return DegenerateTree(5, frozenset([frozenset(int(c) for c in pair)]))


def link_graph(n: int = 5) -> nx.MultiGraph:
    """Link of the origin for n = 5: the Petersen graph.

    Vertices are degenerate trees; each binary tree is an edge joining the
    two degenerate trees it contracts to (attribute ``tree``).
    """
    if n != 5:
        raise ValueError("link_graph is only defined for n = 5")
    g = nx.MultiGraph()
    g.add_nodes_from(enumerate_codim1(5))
    by_splits = {d.splits: d for d in enumerate_codim1(5)}
    for t in enumerate_all_trees(5):
        ends = [by_splits[t.splits - {s}] for s in sorted(t.splits, key=sorted)]
        g.add_edge(ends[0], ends[1], tree=t)
    return g


def girth(g: nx.Graph) -> float:
    """Length of the shortest cycle, by BFS from every vertex."""
    best = float("inf")
    for root in g.nodes:
        dist = {root: 0}
        parent_edge = {root: None}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for _, v, key in g.edges(u, keys=True) if g.is_multigraph() else ((u, v, None) for v in g[u]):
                if (u, v, key) == parent_edge.get(u) or (v, u, key) == parent_edge.get(u):
                    continue
                if v not in dist:
                    dist[v] = dist[u] + 1
                    parent_edge[v] = (u, v, key)
                    queue.append(v)
                else:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


def common_cherries(a: Ordering | Sequence[int], b: Ordering | Sequence[int]) -> frozenset:
    """Unordered cyclically adjacent pairs shared by two orderings."""
    la, lb = tuple(a), tuple(b)
    if len(la) != len(lb):
        raise ValueError("orderings have different lengths")
    pa = {frozenset((la[i], la[i - 1])) for i in range(len(la))}
    pb = {frozenset((lb[i], lb[i - 1])) for i in range(len(lb))}
    return frozenset(pa & pb)
