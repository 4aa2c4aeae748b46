from itertools import product

import pytest
from hypothesis import given, strategies as st

from hurwitz.braids import (BudgetExceeded, boundary_monodromy, braid_generator, component_count,
                            enumerate_orbits, predicted_component_count, tuples_with)
from hurwitz.groups import AbelianShape, semidirect_inversion, order_two_class


def orbits_by_search(G, c, n):
    """Oracle: plain breadth-first closure under all generators and inverses."""
    seen, orbits = set(), []
    for t in product(c.members, repeat=n):
        if t in seen:
            continue
        orbit, todo = {t}, [t]
        while todo:
            u = todo.pop()
            for i in range(1, n):
                for inv in (False, True):
                    v = braid_generator(G, i, u, inv)
                    if v not in orbit:
                        orbit.add(v)
                        todo.append(v)
        seen |= orbit
        orbits.append(orbit)
    return orbits


def test_generator_examples(d6, s):
    G, _ = d6
    rs = G.labels.index("r1s")
    assert braid_generator(G, 1, (s, s)) == (s, s)
    assert braid_generator(G, 1, (s, rs)) == (rs, G.conjugate(s, rs))


@pytest.mark.parametrize("n", range(1, 6))
def test_orbits_match_search(d6, n):
    G, c = d6
    table = enumerate_orbits(G, c, n)
    assert table.count == len(orbits_by_search(G, c, n))
    assert sum(table.sizes()) == len(c) ** n


tuples3 = st.lists(st.sampled_from([3, 4, 5]), min_size=2, max_size=6).map(tuple)


@given(tuples3, st.data())
def test_generator_inverse_and_monodromy(d6, t, data):
    G, _ = d6
    i = data.draw(st.integers(1, len(t) - 1))
    u = braid_generator(G, i, t)
    assert braid_generator(G, i, u, inverse=True) == t
    assert boundary_monodromy(G, u) == boundary_monodromy(G, t)


def test_braid_relations_exhaustive(d6):
    G, c = d6
    n = 5
    for t in product(c.members, repeat=n):
        for i in range(1, n - 1):
            a = braid_generator(G, i, braid_generator(G, i + 1, braid_generator(G, i, t)))
            b = braid_generator(G, i + 1, braid_generator(G, i, braid_generator(G, i + 1, t)))
            assert a == b
        for i in range(1, n):
            for j in range(i + 2, n):
                assert (braid_generator(G, i, braid_generator(G, j, t))
                        == braid_generator(G, j, braid_generator(G, i, t)))


def test_dihedral_counts(d6, s):
    G, c = d6
    shape = AbelianShape((3,))
    for n in range(3, 10):
        assert component_count(G, c, n, s) == predicted_component_count(shape, G, n, s)
    assert component_count(G, c, 4, s) == 0


def test_order_18_counts():
    shape = AbelianShape((3, 3))
    G = semidirect_inversion(shape)
    c = order_two_class(G)
    g = c.members[0]
    assert [component_count(G, c, n, g) for n in (3, 5)] == [2, 3]
    assert predicted_component_count(shape, G, 5, g) == 3


def test_generating_restriction(d6):
    G, c = d6
    table = enumerate_orbits(G, c, 4, "generating")
    assert all(G.generates(r) for r in table.representatives)
    # 27 triples spread evenly over the 3 reflections; only (s, s, s) fails to generate
    assert len(tuples_with(G, c, 3, monodromy=3, generating=True)) == 8


def test_budget(d6):
    G, c = d6
    with pytest.raises(BudgetExceeded):
        enumerate_orbits(G, c, 6, budget=1)
