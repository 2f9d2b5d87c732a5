import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from tropint.analytics import (
    DENSITY_CONSTANT,
    KLT_DENSITY_CONSTANT,
    catalan,
    density_full,
    density_table,
    dissection_counts,
    klt_density_table,
    legendre_asymptotic,
    legendre_at_3,
    rows_to_csv,
    super_catalan,
)


def large_schroeder(k):
    # independent closed form: sum_j C(k+j, 2j) C_j
    return sum(math.comb(k + j, 2 * j) * catalan(j) for j in range(k + 1))


@given(st.integers(2, 80))
def test_super_catalan_matches_closed_form(r):
    assert super_catalan(r) == large_schroeder(r - 1) // 2


def test_super_catalan_values():
    assert [super_catalan(r) for r in range(1, 9)] == [1, 1, 3, 11, 45, 197, 903, 4279]
    with pytest.raises(ValueError):
        super_catalan(0)


def test_legendre():
    assert legendre_at_3(0) == 1 and legendre_at_3(1) == 3 and legendre_at_3(2) == 13
    for r in range(2, 61):
        assert super_catalan(r) == (3 * legendre_at_3(r - 1) - legendre_at_3(r - 2)) / (4 * r)


def test_legendre_asymptotic_is_close():
    exact = float(legendre_at_3(60))
    assert abs(legendre_asymptotic(60, 3.0) / exact - 1) < 0.01


def test_growth_ratio():
    lam = 3 + math.sqrt(8)
    ratio = lambda r: super_catalan(r) / super_catalan(r - 1)
    # the r^(-3/2) prefactor keeps the bare ratio ~1.5/r below lam
    assert abs(ratio(40) / (lam * (39 / 40) ** 1.5) - 1) < 1e-3
    assert abs(ratio(40) / lam - 1) == pytest.approx(1.5 / 40, rel=0.01)
    assert abs(ratio(150) / lam - 1) < 0.01
    devs = [abs(math.log(super_catalan(n - 1)) - (n * math.log(3 + math.sqrt(8)) - 1.5 * math.log(n)))
            for n in range(20, 61)]
    assert max(devs) - min(devs) < math.log(20)


def test_constants():
    assert round(DENSITY_CONSTANT, 2) == 2.76
    assert round(KLT_DENSITY_CONSTANT, 2) == 3.46
    assert KLT_DENSITY_CONSTANT - DENSITY_CONSTANT == pytest.approx(math.log(2))


def test_density_rows():
    assert density_full(5).density == Fraction(11, 12)
    assert density_full(6).density == Fraction(3, 4)
    assert density_full(7).density == Fraction(197, 360)
    rows = density_table(5, 19)
    assert [r.n for r in rows] == list(range(5, 20))
    assert all(a.density > b.density for a, b in zip(rows, rows[1:]))
    assert all(r.total == math.factorial(r.n - 1) // 2 for r in rows)
    with pytest.raises(ValueError):
        density_table(4, 10)


def test_klt_table():
    rows = klt_density_table(7, 30)
    assert rows[0].density == 1
    assert next(r for r in rows if r.n == 11).density == Fraction(484, 576)
    with pytest.raises(ValueError):
        klt_density_table(6, 10)


def test_csv():
    text = rows_to_csv(density_table(5, 6))
    lines = text.splitlines()
    assert lines[0] == "n,nonzeros,total,density,asymptote"
    assert lines[1].startswith("5,11,12,11/12,")
    assert lines[2].startswith("6,45,60,3/4,")


@pytest.mark.parametrize("p", range(4, 10))
def test_dissections(p):
    counts = dissection_counts(p)
    assert len(counts) == p - 2
    assert counts[0] == 1 and counts[-1] == catalan(p - 2)
    assert sum(counts) == super_catalan(p - 1)


def test_dissection_examples():
    assert dissection_counts(5) == [1, 5, 5]
    assert dissection_counts(4) == [1, 2]
    with pytest.raises(ValueError):
        dissection_counts(2)


def test_catalan():
    assert [catalan(m) for m in range(5)] == [1, 1, 2, 5, 14]
