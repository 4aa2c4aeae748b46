"""Finite groups given by multiplication tables.

Elements are integers ``0 .. order-1``.  The dihedral group of order ``2l`` is
indexed as ``a + l*b`` for the rotation part ``a`` and reflection bit ``b``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, product
from math import gcd, prod
from pathlib import Path


class GroupError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    """A group given by its Cayley table. ``mult[x][y]`` is the index of ``xy``."""

    order: int
    mult: tuple[tuple[int, ...], ...]
    inv: tuple[int, ...]
    identity: int
    labels: tuple[str, ...] | None = field(default=None, compare=False)
    name: str = field(default="", compare=False)

    @classmethod
    def from_table(cls, table, labels=None, name="", check=True) -> "FiniteGroup":
        mult = tuple(tuple(int(v) for v in row) for row in table)
        m = len(mult)
        if m == 0 or any(len(row) != m for row in mult):
            raise GroupError("multiplication table must be square and nonempty")
        if any(not 0 <= v < m for row in mult for v in row):
            raise GroupError("table entry out of range")
        ids = [e for e in range(m) if all(mult[e][x] == x == mult[x][e] for x in range(m))]
        if not ids:
            raise GroupError("no two-sided identity")
        e = ids[0]
        inv = []
        for x in range(m):
            ys = [y for y in range(m) if mult[x][y] == e and mult[y][x] == e]
            if not ys:
                raise GroupError(f"element {x} has no inverse")
            inv.append(ys[0])
        G = cls(m, mult, tuple(inv), e, None if labels is None else tuple(labels), name)
        if check and not G.is_associative():
            raise GroupError("table is not associative")
        return G

    @cached_property
    def _hash(self) -> int:
        return hash((self.order, self.mult))

    def __hash__(self):
        return self._hash

    def mul(self, *xs: int) -> int:
        r = self.identity
        for x in xs:
            r = self.mult[r][x]
        return r

    def conjugate(self, x: int, h: int) -> int:
        """Return ``h^-1 x h``."""
        return self.mult[self.mult[self.inv[h]][x]][h]

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.mult[y][x]
            k += 1
        return k

    def is_associative(self) -> bool:
        M = self.mult
        return all(M[M[x][y]][z] == M[x][M[y][z]]
                   for x, y, z in product(range(self.order), repeat=3))

    def closure(self, elements) -> frozenset[int]:
        """Subgroup generated by ``elements``."""
        seen = {self.identity}
        gens = set(elements)
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = self.mult[x][s]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def generates(self, elements) -> bool:
        return len(self.closure(elements)) == self.order

    @cached_property
    def conjugacy_classes(self) -> tuple[tuple[int, ...], ...]:
        seen, out = set(), []
        for x in range(self.order):
            if x in seen:
                continue
            cls = sorted({self.conjugate(x, h) for h in range(self.order)})
            seen.update(cls)
            out.append(tuple(cls))
        return tuple(out)

    def label(self, x: int) -> str:
        return self.labels[x] if self.labels else str(x)


@dataclass(frozen=True)
class ConjClass:
    group: FiniteGroup
    members: tuple[int, ...]

    def __post_init__(self):
        G = self.group
        ms = set(self.members)
        if tuple(sorted(ms)) != self.members or not ms:
            raise GroupError("class members must be sorted, distinct and nonempty")
        if any(G.conjugate(x, h) not in ms for x in ms for h in range(G.order)):
            raise GroupError("members are not closed under conjugation")

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, x):
        return x in self.members

    @cached_property
    def position(self) -> dict[int, int]:
        return {x: k for k, x in enumerate(self.members)}


@dataclass(frozen=True)
class AbelianShape:
    """Orders ``d_1, ..., d_k`` of the cyclic factors of an abelian group."""

    cyclic_factors: tuple[int, ...]

    def __post_init__(self):
        if any(d < 1 for d in self.cyclic_factors):
            raise GroupError("cyclic factor orders must be positive")

    @property
    def order(self) -> int:
        return prod(self.cyclic_factors)


def wedge_square_order(H: AbelianShape) -> int:
    """Order of the exterior square of ``H = sum Z/d_i``: the product of ``gcd(d_i, d_j)``, i < j."""
    return prod(gcd(a, b) for a, b in combinations(H.cyclic_factors, 2))


def semidirect_inversion(H: AbelianShape, name="") -> FiniteGroup:
    """``H x| Z/2`` with the generator of ``Z/2`` acting on ``H`` by inversion.

    The element ``(a, b)`` gets index ``code(a) + |H| * b`` where ``code`` is the
    little-endian mixed-radix encoding of ``a``.
    """
    ds = H.cyclic_factors
    m = H.order
    hs = list(product(*[range(d) for d in reversed(ds)]))
    hs = [tuple(reversed(a)) for a in hs]  # little-endian: first factor varies fastest

    def code(a):
        k, base = 0, 1
        for ai, d in zip(a, ds):
            k += ai * base
            base *= d
        return k

    elems = [(a, b) for b in (0, 1) for a in sorted(hs, key=code)]
    table = []
    for a, b in elems:
        row = []
        for a2, b2 in elems:
            sgn = -1 if b else 1
            a3 = tuple((x + sgn * y) % d for x, y, d in zip(a, a2, ds))
            row.append(code(a3) + m * ((b + b2) % 2))
        table.append(row)
    labels = []
    for a, b in elems:
        s = ",".join(map(str, a)) if a else "0"
        labels.append(f"({s}){'s' if b else ''}")
    return FiniteGroup.from_table(table, labels, name or f"semidirect:{'x'.join(map(str, ds))}",
                                  check=False)


def dihedral(ell: int) -> FiniteGroup:
    """Dihedral group of order ``2*ell`` (``ell`` odd, at least 3)."""
    if not isinstance(ell, int) or ell < 3 or ell % 2 == 0:
        raise GroupError(f"dihedral group needs odd l >= 3, got {ell!r}")
    G = semidirect_inversion(AbelianShape((ell,)), name=f"dihedral:{ell}")
    labels = [f"r{a}" if a else "e" for a in range(ell)] + [f"r{a}s" if a else "s" for a in range(ell)]
    return FiniteGroup(G.order, G.mult, G.inv, G.identity, tuple(labels), G.name)


def cyclic(m: int) -> FiniteGroup:
    if m < 1:
        raise GroupError("cyclic group order must be positive")
    table = [[(x + y) % m for y in range(m)] for x in range(m)]
    return FiniteGroup.from_table(table, name=f"cyclic:{m}", check=False)


def trivial_group() -> FiniteGroup:
    return cyclic(1)


def dihedral_index(ell: int, a: int, b: int) -> int:
    return a % ell + ell * b


def order_two_class(G: FiniteGroup) -> ConjClass:
    """The conjugacy class of involutions; raises if involutions form several classes."""
    invs = [x for x in range(G.order) if x != G.identity and G.mult[x][x] == G.identity]
    if not invs:
        raise GroupError("group has no involutions")
    cls = sorted({G.conjugate(invs[0], h) for h in range(G.order)})
    if cls != invs:
        raise GroupError("involutions split into more than one conjugacy class")
    return ConjClass(G, tuple(cls))


def identity_class(G: FiniteGroup) -> ConjClass:
    return ConjClass(G, (G.identity,))


def centralizer_in_class_is_self(G: FiniteGroup, c: ConjClass) -> bool:
    """True iff each ``h`` in ``c`` commutes with no other member of ``c``."""
    return all(G.mult[x][h] != G.mult[h][x] or x == h for h in c for x in c)


def read_table(path) -> list[list[int]]:
    lines = [ln.split() for ln in Path(path).read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines:
        raise GroupError(f"empty table file {path}")
    m = int(lines[0][0])
    rows = [[int(v) for v in ln] for ln in lines[1:]]
    if len(rows) != m:
        raise GroupError(f"expected {m} table rows, found {len(rows)}")
    return rows


def parse_group_spec(spec: str) -> FiniteGroup:
    """Parse ``dihedral:<l>``, ``semidirect:<d1>x<d2>...`` or ``table:<path>``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "dihedral":
            return dihedral(int(arg))
        if kind == "semidirect":
            ds = tuple(int(d) for d in arg.split("x"))
            if any(d % 2 == 0 for d in ds):
                raise GroupError("semidirect factors must be odd")
            return semidirect_inversion(AbelianShape(ds), name=spec)
        if kind == "table":
            return FiniteGroup.from_table(read_table(arg), name=spec)
        if kind == "trivial":
            return trivial_group()
    except ValueError as exc:
        if isinstance(exc, GroupError):
            raise
        raise GroupError(f"bad group spec {spec!r}: {exc}") from exc
    raise GroupError(f"unknown group spec {spec!r}")
