import pytest

from hurwitz.groups import dihedral, order_two_class


@pytest.fixture(scope="session")
def d6():
    G = dihedral(3)
    return G, order_two_class(G)


@pytest.fixture(scope="session")
def s(d6):
    G, _ = d6
    return G.labels.index("s")
