from itertools import product
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from hurwitz.braids import braid_generator, enumerate_orbits, tuples_with
from hurwitz.fuks import (CellFilter, FalsificationError, FuksComplex, FuksModel, append_letters,
                          apply_differential, cell_degree, chain_map_failures, compositions, conf_pullback,
                          costabilize, fuks_differential, iterate_more_g, normalize_tail,
                          reduce_one_more_g, shuffle)
from hurwitz.groups import identity_class, trivial_group
from hurwitz.linalg import SparseMat, nullspace, rank
from hurwitz.stable import Setting

letters = st.sampled_from([3, 4, 5])
words = st.lists(letters, min_size=1, max_size=3).map(tuple)


def test_shuffle_examples(d6, s):
    G, _ = d6
    h = G.labels.index("r1s")
    assert shuffle(G, (s,), (h,)) == {(s, h): 1, (h, G.conjugate(s, h)): -1}
    assert shuffle(G, (s,), (s,)) == {}
    assert sorted(shuffle(G, (0, 1), (2,)).values()) == [-1, 1, 1]


def test_shuffle_sign_trivial_group():
    # with trivial conjugation the shuffle of (x) with (y, z) has three signed terms
    T = trivial_group()
    assert shuffle(T, (0,), (0,)) == {}
    assert shuffle(T, (0,), (0, 0)) == {(0, 0, 0): 1}
    assert shuffle(T, (0, 0), (0, 0)) == {(0, 0, 0, 0): 2}


@settings(max_examples=200)
@given(st.lists(words, min_size=1, max_size=4).map(tuple))
def test_delta_squared_random_cells(d6, cell):
    G, _ = d6
    assert apply_differential(G, fuks_differential(G, cell)) == {}


@given(st.lists(words, min_size=2, max_size=4).map(tuple))
def test_differential_preserves_product_and_subgroup(d6, cell):
    G, _ = d6
    letters_of = lambda x: tuple(a for w in x for a in w)  # noqa: E731
    prod0 = G.mul(*letters_of(cell))
    sub0 = G.closure(letters_of(cell))
    for image in fuks_differential(G, cell):
        assert cell_degree(image) == cell_degree(cell) + 1
        assert G.mul(*letters_of(image)) == prod0
        assert G.closure(letters_of(image)) == sub0


def test_single_word_is_closed(d6):
    G, _ = d6
    assert fuks_differential(G, ((3, 4, 5),)) == {}


@pytest.mark.parametrize("n", range(1, 6))
def test_dimensions_mode_all(d6, n):
    G, c = d6
    cx = FuksComplex(G, c, n)
    assert [cx.dim(i) for i in cx.degrees] == [comb(n - 1, i) * 3 ** n for i in range(n)]
    assert sum(1 for _ in compositions(n, 2)) == n - 1


@pytest.mark.parametrize("n", range(2, 9))
def test_trivial_group_cohomology(n):
    T = trivial_group()
    cx = FuksComplex(T, identity_class(T), n)
    assert [cx.betti(i) for i in cx.degrees] == [1, 1] + [0] * (n - 2)


@pytest.mark.parametrize("n", range(1, 6))
def test_h0_counts_orbits(d6, n):
    G, c = d6
    assert FuksComplex(G, c, n).betti(0) == enumerate_orbits(G, c, n).count


def test_h0_component_counts(d6, s):
    G, c = d6
    for n in (3, 4, 5):
        table = enumerate_orbits(G, c, n, "generating")
        assert FuksComplex(G, c, n, CellFilter.component(s)).betti(0) == len(table.orbits_with_monodromy(s))


def presentation_homology(G, c, n, g):
    """Oracle: ``H_0, H_1`` of ``B_n`` acting on the generating tuples with product ``g``.

    Uses the presentation 2-complex of the braid group with coefficients in the
    permutation module of the tuple set, independent of the cell model.
    """
    X = tuples_with(G, c, n, g, generating=True)
    idx = {t: k for k, t in enumerate(X)}
    N, S = len(X), n - 1
    act = lambda i, x, inv=False: idx[braid_generator(G, i + 1, X[x], inv)]  # noqa: E731
    rels = [[(i, 1), (i + 1, 1), (i, 1), (i + 1, -1), (i, -1), (i + 1, -1)] for i in range(S - 1)]
    rels += [[(i, 1), (j, 1), (i, -1), (j, -1)] for i in range(S) for j in range(i + 2, S)]
    d1 = {}
    for x in range(N):
        for i in range(S):
            y = act(i, x)
            if y != x:
                d1.setdefault(x, {})[x * S + i] = -1
                d1.setdefault(y, {})[x * S + i] = 1
    m1 = SparseMat.from_rows(N, N * S, d1)
    cols = []
    for x in range(N):
        for rel in rels:
            col, v = {}, x
            for i, e in rel:
                if e == 1:
                    col[v * S + i] = col.get(v * S + i, 0) + 1
                    v = act(i, v)
                else:
                    v = act(i, v, True)
                    col[v * S + i] = col.get(v * S + i, 0) - 1
            cols.append({k: a for k, a in col.items() if a})
    r1 = rank(m1)
    r2 = rank(SparseMat.from_columns(N * S, cols)) if cols else 0
    return N - r1, N * S - r1 - r2


@pytest.mark.parametrize("n", [3, 4, 5])
def test_component_h0_h1_against_presentation_oracle(d6, n):
    G, c = d6
    for g in range(G.order):
        cx = FuksComplex(G, c, n, CellFilter.component(g))
        assert (cx.betti(0), cx.betti(1)) == presentation_homology(G, c, n, g)


def test_costabilize_examples():
    y = ((3, 4), (5,))
    assert costabilize({y + ((3,),): 2}, 3) == {y: 2}
    assert costabilize({y + ((4,),): 1}, 3) == {}
    assert costabilize({y + ((3, 3),): 1}, 3) == {}


@pytest.mark.parametrize("n", range(2, 6))
def test_chain_maps(d6, n):
    G, c = d6
    src, tgt = FuksComplex(G, c, n), FuksComplex(G, c, n - 1)
    for g in c:
        assert chain_map_failures(lambda x, g=g: costabilize(x, g), src, tgt) == []
    T = trivial_group()
    conf = FuksComplex(T, identity_class(T), n)
    assert chain_map_failures(lambda x: conf_pullback(x, src), conf, src) == []
    comp = FuksComplex(G, c, n, CellFilter.component(3))
    assert chain_map_failures(comp.project, src, comp) == []


def test_pullback_single_letter(d6):
    G, c = d6
    target = FuksComplex(G, c, 1)
    assert conf_pullback({((0,),): 1}, target) == {((h,),): 1 for h in c}


def test_filter_closed_and_parse():
    assert CellFilter.parse("monodromy:3") == CellFilter.component(3)
    assert CellFilter.parse("adjoined:3:1") == CellFilter.with_adjoined((3,), 1)
    assert CellFilter.parse("generating") == CellFilter(True)
    with pytest.raises(ValueError):
        CellFilter.parse("sometimes")


def test_disk_cache_round_trip(d6, tmp_path):
    G, c = d6
    a = FuksComplex(G, c, 4, CellFilter.component(0), tmp_path)
    dims = [a.betti(i) for i in a.degrees]
    assert list(tmp_path.glob("*.mat"))
    b = FuksComplex(G, c, 4, CellFilter.component(0), tmp_path)
    assert [b.betti(i) for i in b.degrees] == dims
    assert all(a.differential(i) == b.differential(i) for i in range(3))


def cocycles_ending_in(cx, g, i):
    cells = [x for x in cx.basis(i) if x[-1] == (g,)]
    cols = [cx.to_vector(cx.delta({x: 1}), i + 1) for x in cells]
    return [{cells[k]: a for k, a in v.items()}
            for v in nullspace(SparseMat.from_columns(cx.dim(i + 1), cols))]


@pytest.mark.parametrize("n, i, mono", [(4, 1, 1), (5, 1, 3), (6, 2, 0)])
def test_one_more_g_witnesses(d6, s, n, i, mono):
    G, c = d6
    model = FuksModel(G, c)
    cx = model.complex(n, CellFilter.with_adjoined((s,), mono))
    xs = cocycles_ending_in(cx, s, i)
    assert xs
    for x in xs[:4]:
        r = reduce_one_more_g(model, x, s, i)
        assert apply_differential(G, append_letters(r.w, [s])) == {
            k: v for k, v in _sub(costabilize(x, s), append_letters(r.z, [s])).items() if v}
        it = iterate_more_g(model, x, s, i)
        assert all(cell[-1] == (s,) for cell in it.remainder)


def _sub(a, b):
    out = dict(a)
    for k, v in b.items():
        out[k] = out.get(k, 0) - v
    return out


def test_one_more_g_zero(d6, s):
    G, c = d6
    r = reduce_one_more_g(FuksModel(G, c), {}, s, 1)
    assert (r.z, r.w) == ({}, {})


def test_normalize_tail(d6, s):
    G, c = d6
    S = Setting(G, c)
    Z = S.cohomology(5, s, 1)
    model = FuksModel(G, c)
    outcomes = []
    for v in Z.representatives:
        x = Z.cochain(v)
        try:
            r = normalize_tail(model, x, s, 2, 1)
        except FalsificationError as exc:
            assert exc.instance["h"] != s
            outcomes.append(False)
            continue
        outcomes.append(True)
        assert S.component(5, s).is_cocycle(r.cocycle, 1)
        diff = _sub(x, r.cocycle)
        assert {k: a for k, a in diff.items() if a} == apply_differential(G, r.primitive)
    assert True in outcomes and False in outcomes
