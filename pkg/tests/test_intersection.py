import itertools
import random
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from tropint.analytics import catalan, super_catalan
from tropint.intersection import (
    _prune_all_choices,
    build_matrix,
    count_bruteforce,
    count_dp,
    fast_nonzero,
    load_matrix,
    polygon_decomposition,
    row_profile,
    save_matrix,
)
from tropint.orderings import canonicalize, enumerate_orderings, relabel

from strategies import ordering_pair, permutations_of

ID5 = (1, 2, 3, 4, 5)
ID6 = (1, 2, 3, 4, 5, 6)


@pytest.mark.parametrize("a, b, value", [
    (ID5, (1, 3, 5, 2, 4), 0),
    (ID5, ID5, 5),
    (ID5, (1, 2, 5, 3, 4), 1),
    (ID6, (1, 3, 2, 5, 6, 4), 1),
    (ID6, (1, 2, 3, 6, 5, 4), 4),
    (ID6, ID6, 14),
])
def test_count_examples(a, b, value):
    assert count_dp(a, b) == value
    assert count_bruteforce(a, b) == value


@pytest.mark.parametrize("a, b, value", [
    (ID6, (1, 3, 6, 5, 2, 4), False),
    (ID6, (1, 3, 5, 6, 4, 2), True),
    (ID5, (1, 3, 5, 2, 4), False),
])
def test_fast_nonzero_examples(a, b, value):
    assert fast_nonzero(a, b) is value


def test_size_mismatch():
    for fn in (count_dp, count_bruteforce, fast_nonzero, polygon_decomposition):
        with pytest.raises(ValueError):
            fn(ID5, ID6)


def test_polygon_examples():
    d = polygon_decomposition(ID6, ID6)
    assert d.sides == (6,) and d.value == 14
    d = polygon_decomposition(ID6, (1, 2, 3, 6, 5, 4))
    assert d.sides == (4, 4) and d.value == 4
    assert d.forced_splits == frozenset([frozenset({1, 2, 3})])
    d = polygon_decomposition(ID5, (1, 3, 5, 2, 4))
    assert d.sides is None and d.value == 0


@pytest.mark.parametrize("n", [4, 5, 6])
def test_methods_agree_exhaustively(n):
    cat = enumerate_orderings(n)
    for a, b in itertools.combinations_with_replacement(cat.orderings, 2):
        c = count_dp(a, b)
        assert c == count_bruteforce(a, b)
        assert fast_nonzero(a, b) == (c != 0)
        d = polygon_decomposition(a, b)
        assert d.value == c
        if d.sides is not None:
            assert sum(d.sides) == n + 2 * (len(d.sides) - 1)


def test_methods_agree_sampled_n7():
    cat = enumerate_orderings(7).orderings
    rng = random.Random(11)
    for _ in range(300):
        a, b = rng.choice(cat), rng.choice(cat)
        c = count_dp(a, b)
        assert c == count_bruteforce(a, b)
        assert fast_nonzero(a, b) == (c != 0)
        assert polygon_decomposition(a, b).value == c


@pytest.mark.parametrize("n", [5, 6])
def test_pruning_choice_irrelevant(n):
    cat = enumerate_orderings(n)
    a = cat.orderings[0].labels
    for b in cat.orderings:
        assert _prune_all_choices(a, b.labels) == {fast_nonzero(a, b)}


@settings(max_examples=40)
@given(ordering_pair(5, 9), st.randoms(use_true_random=False))
def test_symmetry_and_relabeling(pair, rnd):
    n, a, b = pair
    assert count_dp(a, b) == count_dp(b, a)
    assert count_dp(a, b) <= catalan(n - 2)
    p = list(range(1, n + 1))
    rnd.shuffle(p)
    assert count_dp(relabel(a, p), relabel(b, p)) == count_dp(a, b)
    assert fast_nonzero(relabel(a, p), relabel(b, p)) == fast_nonzero(a, b)


@given(st.integers(4, 10).flatmap(permutations_of))
def test_diagonal_is_catalan(seq):
    n = len(seq)
    assert count_dp(seq, seq) == catalan(n - 2)
    assert fast_nonzero(seq, canonicalize(seq))


@pytest.mark.parametrize("n", [5, 6])
def test_counts_matrix_invariants(n):
    m = build_matrix(n, "counts", workers=1)
    e = m.entries
    assert (e == e.T).all()
    assert set(np.diag(e)) == {catalan(n - 2)}
    assert e.max() == catalan(n - 2)
    ref = sorted(e[0])
    assert all(sorted(row) == ref for row in e)
    b = build_matrix(n, "binary", workers=1)
    assert (b.bits == (e != 0)).all()
    assert ((b.bits.sum(axis=1)) == super_catalan(n - 1)).all()


def test_row_profile():
    p5 = row_profile(5)
    assert sum(p5.values()) == 12 and 12 - p5[0] == 11
    assert max(p5) == 5 and p5[5] == 1
    p6 = row_profile(6)
    assert p6[0] == 15


def test_build_range():
    with pytest.raises(ValueError):
        build_matrix(8, "counts")
    with pytest.raises(ValueError):
        build_matrix(9, "binary")
    with pytest.raises(ValueError):
        build_matrix(5, "dense")


def test_workers_do_not_change_result():
    one = build_matrix(6, "binary", workers=1).bits
    many = build_matrix(6, "binary", workers=3).bits
    assert (one == many).all()


def test_matrix_roundtrip(tmp_path):
    for mode in ("counts", "binary"):
        m = build_matrix(5, mode, workers=1)
        path = tmp_path / f"{mode}.tmx"
        save_matrix(path, m)
        back = load_matrix(path)
        assert back.kind == mode and back.n == 5
        a = m.entries if mode == "counts" else m.bits
        b = back.entries if mode == "counts" else back.bits
        assert (a == b).all()
    text = (tmp_path / "binary.tmx").read_text().replace("1,2,3,4,5", "1,2,3,5,4", 1)
    (tmp_path / "bad.tmx").write_text(text)
    with pytest.raises(ValueError):
        load_matrix(tmp_path / "bad.tmx")
