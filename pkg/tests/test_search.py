import itertools
import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tropint.intersection import build_matrix
from tropint.orderings import enumerate_orderings
from tropint.search import (
    _iter_bits,
    build_graph,
    dihedral_column_orbits,
    load_witness,
    max_permutation_submatrix,
    row_zero_subproblems,
    save_witness,
    symmetric_degree,
    verify_witness,
)
from tropint.witnesses import N5_SYMMETRIC, N6_COLS, N6_ROWS


@pytest.fixture(scope="module")
def b5():
    return build_matrix(5, "binary", workers=1)


@pytest.fixture(scope="module")
def b6():
    return build_matrix(6, "binary", workers=1)


def _nx_max_clique(g):
    G = nx.Graph()
    G.add_nodes_from(range(len(g.vertices)))
    G.add_edges_from((u, v) for u, a in enumerate(g.adjacency) for v in _iter_bits(a) if v > u)
    return nx.max_weight_clique(G, weight=None)[1]


def test_graph_small_cases(b5):
    g = build_graph(np.eye(2, dtype=bool))
    assert len(g.vertices) == 2 and g.edge_count == 1
    g = build_graph(np.ones((3, 3), dtype=bool))
    assert len(g.vertices) == 9 and g.edge_count == 0
    assert len(build_graph(b5).vertices) == 132


def test_graph_edge_rule(b5):
    g = build_graph(b5)
    M = b5.bits
    for u, (i, j) in enumerate(g.vertices):
        for v, (k, l) in enumerate(g.vertices):
            want = i != k and j != l and not M[i, l] and not M[k, j]
            assert bool(g.adjacency[u] >> v & 1) == want


def _is_permutation(bits, rows, cols):
    sub = bits[np.ix_(rows, cols)]
    return (sub.sum(axis=0) == 1).all() and (sub.sum(axis=1) == 1).all()


def test_n5_degree(b5):
    w = max_permutation_submatrix(b5)
    assert w.size == 2 and not w.lower_bound
    assert _is_permutation(b5.bits, list(w.rows), list(w.cols))


def test_n6_degree_exhaustive(b6):
    w = max_permutation_submatrix(b6)
    assert w.size == 4 and not w.lower_bound
    cat = b6.catalog
    rep = verify_witness([cat.orderings[r] for r in w.rows], [cat.orderings[c] for c in w.cols])
    assert rep.is_permutation and rep.rank == 4


@pytest.mark.parametrize("n", [5, 6])
def test_row_fixing_preserves_maximum(n, b5, b6):
    b = b5 if n == 5 else b6
    assert _nx_max_clique(build_graph(b)) == max_permutation_submatrix(b).size


def test_symmetry_reduction_agrees(b6):
    assert max_permutation_submatrix(b6, symmetry=True).size == 4


def test_deterministic_witness_is_lexicographic(b5, b6):
    for b in (b5, b6):
        w1 = max_permutation_submatrix(b)
        w2 = max_permutation_submatrix(b, budget=10**6)
        assert w1.pairs() == w2.pairs()
        assert not w2.lower_bound


def _brute_force_row0(bits):
    size = bits.shape[0]
    for k in range(size, 0, -1):
        for rows in itertools.combinations(range(1, size), k - 1):
            rows = (0,) + rows
            for cols in itertools.permutations(range(size), k):
                sub = bits[np.ix_(rows, cols)]
                if (sub == np.eye(k, dtype=bool)).all():
                    return k
    return 0


@settings(max_examples=40)
@given(st.integers(2, 5).flatmap(lambda k: st.lists(st.booleans(), min_size=k * k, max_size=k * k)))
def test_matches_brute_force_on_random_matrices(flat):
    k = math.isqrt(len(flat))
    bits = np.array(flat, dtype=bool).reshape(k, k)
    w = max_permutation_submatrix(bits)
    assert w.size == _brute_force_row0(bits)
    if w.size:
        assert 0 in w.rows and _is_permutation(bits, list(w.rows), list(w.cols))


def test_budget_gives_lower_bound_and_resume(b6):
    w = max_permutation_submatrix(b6, budget=50, heuristic=False)
    assert w.lower_bound and w.checkpoint["phase"] == "exact"
    state = w.checkpoint
    while True:
        w = max_permutation_submatrix(b6, budget=state["nodes"] + 2000, heuristic=False, resume=state)
        if not w.lower_bound:
            break
        state = w.checkpoint
    assert w.size == 4
    assert w.pairs() == max_permutation_submatrix(b6).pairs()


def test_witness_bound(b5, b6):
    for n, b in ((5, b5), (6, b6)):
        assert max_permutation_submatrix(b).size <= math.factorial(n - 3)


def test_subproblems_and_orbits(b6):
    subs = row_zero_subproblems(b6.bits)
    assert len(subs) == 45
    assert all(not b6.bits[k, j] for j, rows, _ in subs for k in rows)
    orbits = dihedral_column_orbits(b6.catalog)
    assert sorted(p for o in orbits for p in o) == list(range(60))
    # relabelings fixing the identity map row 0 to itself
    assert [0] in orbits


def test_verify_examples():
    rep = verify_witness(N6_ROWS, N6_COLS)
    assert rep.submatrix == np.eye(4, dtype=int).tolist()
    rep = verify_witness(N5_SYMMETRIC, N5_SYMMETRIC)
    assert rep.submatrix == [[5, 0], [0, 5]] and rep.diagonal_values == [5, 5]
    with pytest.raises(ValueError):
        verify_witness(N6_ROWS, N6_COLS[:3])
    bad = verify_witness(N6_ROWS, (N6_COLS[1], N6_COLS[0], N6_COLS[2], N6_COLS[2]))
    assert not bad.is_permutation


def test_verify_against_matrix(b6):
    counts = build_matrix(6, "counts", workers=1)
    assert verify_witness(N6_ROWS, N6_COLS, counts).submatrix == np.eye(4, dtype=int).tolist()
    assert verify_witness(N6_ROWS, N6_COLS, b6).is_permutation


@pytest.mark.parametrize("n, size", [(5, 2), (6, 3)])
def test_symmetric_degree(n, size):
    got, members = symmetric_degree(n)
    assert got == size == len(members)
    rep = verify_witness(members, members)
    assert rep.is_permutation and rep.permutation == list(range(size))


def test_symmetric_degree_matches_networkx(b6):
    zero = ~b6.bits
    G = nx.Graph([(i, j) for i in range(60) for j in range(i + 1, 60) if zero[i, j]])
    assert nx.max_weight_clique(G, weight=None)[1] == 3


def test_witness_file_roundtrip(tmp_path, b6):
    w = max_permutation_submatrix(b6)
    save_witness(tmp_path / "w.json", w, b6.catalog)
    rows, cols, doc = load_witness(tmp_path / "w.json")
    assert doc["schema"] == 1 and doc["size"] == 4 and doc["lower_bound"] is False
    assert verify_witness(rows, cols).is_permutation
