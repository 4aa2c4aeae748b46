from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from hurwitz.linalg import (BasedComplex, DifferentialError, NoSolution, SparseMat, SpanReducer, in_span,
                            nullspace, rank, rank_of_vectors, relative_rank, solve)


def dense_rank(rows):
    """Oracle: textbook Gaussian elimination over Fractions."""
    m = [[Fraction(x) for x in r] for r in rows]
    rk, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rk, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rk], m[piv] = m[piv], m[rk]
        for r in range(len(m)):
            if r != rk and m[r][col]:
                f = m[r][col] / m[rk][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rk])]
        rk += 1
    return rk


def sparse(rows):
    entries = [(r, c, v) for r, row in enumerate(rows) for c, v in enumerate(row) if v]
    return SparseMat(len(rows), len(rows[0]), entries)


def as_dicts(rows):
    return [{c: v for c, v in enumerate(r) if v} for r in rows]


matrices = st.integers(1, 7).flatmap(lambda nc: st.lists(
    st.lists(st.integers(-3, 3), min_size=nc, max_size=nc), min_size=1, max_size=7))


@given(matrices)
def test_rank_matches_dense_oracle(rows):
    assert rank(sparse(rows)) == dense_rank(rows)
    assert rank(sparse(rows).transpose()) == dense_rank(rows)


@given(matrices)
def test_nullspace_is_kernel_of_right_size(rows):
    m = sparse(rows)
    ker = nullspace(m)
    assert len(ker) == m.ncols - dense_rank(rows)
    for v in ker:
        assert not m.apply(v)


@given(matrices, st.data())
def test_solve_round_trip(rows, data):
    m = sparse(rows)
    x = {c: data.draw(st.integers(-2, 2)) for c in range(m.ncols)}
    b = m.apply(x)
    assert m.apply(solve(m, b)) == b


def test_solve_raises_with_certificate():
    m = sparse([[1, 1], [2, 2]])
    with pytest.raises(NoSolution):
        solve(m, {0: 1, 1: 3})


@settings(max_examples=60)
@given(matrices, matrices)
def test_span_reducer_agrees_with_ranks(a, b):
    width = max(len(a[0]), len(b[0]))
    a = as_dicts(a)
    b = [{c: v for c, v in r.items() if c < width} for r in as_dicts(b)]
    S = SpanReducer(a)
    assert S.rank == rank_of_vectors(a)
    assert S.relative_rank(b) == relative_rank(a, b)
    T = S.copy()
    for v in b:
        T.add(v)
    assert T.rank == rank_of_vectors(a + b)
    assert S.rank == rank_of_vectors(a)
    assert all(T.contains(v) for v in a + b)
    assert in_span(a + b, a)


def test_fractions_and_dump_round_trip():
    m = SparseMat(2, 3, [(0, 0, Fraction(1, 3)), (1, 2, -7)])
    assert SparseMat.loads(m.dumps()).to_dense() == m.to_dense()


def test_based_complex_circle():
    # cellular chains of a circle: one vertex, one edge, d = 0
    cx = BasedComplex({0: ["v"], 1: ["e"]}, {1: SparseMat(1, 1)}, step=-1)
    h = cx.homology()
    assert [h[k].homology_dim for k in (0, 1)] == [1, 1]
    # an interval: two vertices, one edge
    cx = BasedComplex({0: ["a", "b"], 1: ["e"]}, {1: sparse([[-1], [1]])}, step=-1)
    assert [cx.homology()[k].homology_dim for k in (0, 1)] == [1, 0]


def test_d_squared_detected():
    cx = BasedComplex({0: ["x"], 1: ["y"], 2: ["z"]}, {0: sparse([[1]]), 1: sparse([[1]])})
    with pytest.raises(DifferentialError):
        cx.check_d_squared()
