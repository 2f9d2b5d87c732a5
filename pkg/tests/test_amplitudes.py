import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from tropint.amplitudes import (
    Lcg64,
    MandelstamMatrix,
    NonGenericKinematics,
    amplitude_unsigned,
    load_kinematics,
    q_edge,
    r_tree,
    relabel_mandelstam,
    sample_mandelstam,
    save_kinematics,
)
from tropint.intersection import count_dp
from tropint.orderings import enumerate_orderings, relabel
from tropint.trees import Tree, enumerate_all_trees

seeds = st.integers(0, 2**64 - 1)


def test_lcg_stream():
    # reference values from the recurrence evaluated by hand in Python ints
    state, out = 42, []
    for _ in range(3):
        state = (state * 6364136223846793005 + 1442695040888963407) % 2**64
        out.append(state >> 32)
    g = Lcg64(42)
    assert [g.next_u32() for _ in range(3)] == out


@settings(max_examples=30)
@given(st.integers(4, 8), seeds)
def test_sample_constraints(n, seed):
    kin = sample_mandelstam(n, seed)
    for a in range(n):
        assert kin.s[a][a] == 0
        assert sum(kin.s[a]) == 0
        assert all(kin.s[a][b] == kin.s[b][a] for b in range(n))
    assert kin.is_generic()
    assert sample_mandelstam(n, seed) == kin


def _reference_sample(n, seed):
    state = seed
    def draw():
        nonlocal state
        state = (state * 6364136223846793005 + 1442695040888963407) % 2**64
        return -10**6 + (state >> 32) % (2 * 10**6 + 1)
    pairs = [(a, b) for a in range(1, n) for b in range(a + 1, n) if (a, b) != (n - 2, n - 1)]
    return {ab: draw() for ab in pairs}


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_free_parameters_follow_draw_order(n):
    ref = _reference_sample(n, 5)
    assert len(ref) == n * (n - 3) // 2
    kin = sample_mandelstam(n, 5)
    assert all(kin[a, b] == v for (a, b), v in ref.items())


def test_validation():
    with pytest.raises(ValueError):
        MandelstamMatrix(4, [[0, 1, 0, -1], [1, 0, 0, -1], [0, 0, 0, 0], [-1, -1, 0, 1]])
    with pytest.raises(ValueError):
        MandelstamMatrix(4, [[0, 1, -1, 0], [2, 0, -1, -1], [-1, -1, 0, 2], [0, -1, 2, 0]])
    with pytest.raises(ValueError):
        sample_mandelstam(3)


def test_q_edge_examples():
    kin = sample_mandelstam(5, 3)
    assert q_edge(kin, {1, 2}) == kin[1, 2]
    assert q_edge(kin, {1, 2, 3}) == kin[1, 2] + kin[1, 3] + kin[2, 3] == kin[4, 5]
    with pytest.raises(ValueError):
        q_edge(kin, {1})


@settings(max_examples=25)
@given(st.integers(4, 7), seeds, st.data())
def test_q_edge_complement(n, seed, data):
    kin = sample_mandelstam(n, seed)
    k = data.draw(st.integers(2, n - 2))
    side = set(data.draw(st.permutations(range(1, n + 1)))[:k])
    assert q_edge(kin, side) == q_edge(kin, set(range(1, n + 1)) - side)


def test_r_tree_examples():
    kin = sample_mandelstam(5, 9)
    t = Tree(5, frozenset([frozenset({1, 2}), frozenset({1, 2, 3})]))
    assert r_tree(kin, t) == 1 / (kin[1, 2] * kin[4, 5])
    kin4 = sample_mandelstam(4, 1)
    assert r_tree(kin4, Tree(4, frozenset([frozenset({1, 2})]))) == 1 / kin4[1, 2]


def test_r_tree_non_generic():
    s = [[0, 0, 1, -1], [0, 0, -1, 1], [1, -1, 0, 0], [-1, 1, 0, 0]]
    kin = MandelstamMatrix(4, s)
    assert not kin.is_generic()
    with pytest.raises(NonGenericKinematics):
        r_tree(kin, Tree(4, frozenset([frozenset({1, 2})])))


def test_r_tree_homogeneity():
    kin = sample_mandelstam(6, 4)
    scaled = MandelstamMatrix(6, [[3 * v for v in row] for row in kin.s])
    for t in enumerate_all_trees(6)[:20]:
        assert r_tree(scaled, t) == r_tree(kin, t) / Fraction(3) ** 3


def test_amplitude_examples():
    kin = sample_mandelstam(4, 2)
    a = amplitude_unsigned(kin, (1, 2, 3, 4), (1, 2, 3, 4))
    assert a.value == 1 / kin[1, 2] + 1 / kin[1, 4] and a.term_count == 2
    assert amplitude_unsigned(kin, (1, 2, 3, 4), (1, 3, 2, 4)).value == 1 / kin[1, 4]
    z = amplitude_unsigned(sample_mandelstam(5, 2), (1, 2, 3, 4, 5), (1, 3, 5, 2, 4))
    assert z.value == 0 and z.term_count == 0 and z.magnitude == 0


@pytest.mark.parametrize("n", [4, 5, 6])
def test_term_count_is_intersection(n):
    kin = sample_mandelstam(n, 17)
    for a, b in itertools.combinations_with_replacement(enumerate_orderings(n).orderings, 2):
        amp = amplitude_unsigned(kin, a, b)
        assert amp.term_count == count_dp(a, b)
        assert (amp.value == 0) == (amp.term_count == 0)


@settings(max_examples=15)
@given(st.integers(5, 6), seeds, st.data())
def test_relabel_covariance(n, seed, data):
    kin = sample_mandelstam(n, seed)
    cat = enumerate_orderings(n).orderings
    a = data.draw(st.sampled_from(cat))
    b = data.draw(st.sampled_from(cat))
    p = data.draw(st.permutations(range(1, n + 1)))
    lhs = amplitude_unsigned(kin, a, b).value
    rhs = amplitude_unsigned(relabel_mandelstam(kin, p), relabel(a, p), relabel(b, p)).value
    assert abs(lhs) == abs(rhs)


def test_kinematics_roundtrip(tmp_path):
    kin = sample_mandelstam(6, 123)
    save_kinematics(tmp_path / "k.json", kin)
    assert load_kinematics(tmp_path / "k.json") == kin
