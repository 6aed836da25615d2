from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hodgefrac import exact


def dense_rank(rows, ncols):
    """Plain Gaussian elimination on dense Fraction rows (reference)."""
    m = [[Fraction(r.get(j, 0)) for j in range(ncols)] for r in rows]
    rank, col = 0, 0
    while rank < len(m) and col < ncols:
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col]:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
        col += 1
    return rank


sparse_rows = st.integers(1, 7).flatmap(
    lambda n: st.tuples(
        st.just(n),
        st.lists(
            st.dictionaries(st.integers(0, n - 1), st.integers(-4, 4).map(lambda x: Fraction(x, 3)), max_size=n),
            max_size=8,
        ),
    )
)


@settings(max_examples=200, deadline=None)
@given(sparse_rows)
def test_rank_matches_dense_elimination(case):
    n, rows = case
    assert exact.rank(rows, n) == dense_rank(rows, n)


@settings(max_examples=200, deadline=None)
@given(sparse_rows)
def test_nullspace_is_kernel_of_full_dimension(case):
    n, rows = case
    ns = exact.nullspace(rows, n)
    assert len(ns) == n - dense_rank(rows, n)
    for v in ns:
        for r in rows:
            assert sum(Fraction(a) * v[j] for j, a in r.items()) == 0
    assert dense_rank([dict(enumerate(v)) for v in ns], n) == len(ns)


def test_nullspace_vectors_are_primitive_integers():
    ns = exact.nullspace([{0: 2, 1: -4}], 2)
    assert ns == [[2, 1]]


def test_echelon_contains():
    e = exact.echelon([{0: 1, 1: 1}, {1: 2}], 3)
    assert e.contains({0: 3})
    assert not e.contains({2: 1})


def test_solve_and_inverse():
    a = [[2, 1], [1, 3]]
    x = exact.solve(a, [3, 5])
    assert x == [Fraction(4, 5), Fraction(7, 5)]
    inv = exact.inverse(a)
    assert exact.matvec(inv, [3, 5]) == x


def test_solve_singular_raises():
    with pytest.raises(ArithmeticError):
        exact.solve([[1, 2], [2, 4]], [1, 2])
