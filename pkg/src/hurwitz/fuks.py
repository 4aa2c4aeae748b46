"""Fox-Neuwirth/Fuks cochain complexes of Hurwitz spaces.

A cell at level ``n`` and degree ``i`` is a tuple of ``n - i`` nonempty words
over ``c`` with ``n`` letters in total; letters are group elements.  Cochains
are dicts ``{cell: Fraction}``.  The coboundary merges adjacent words by the
signed, conjugation-twisted shuffle.
"""

from __future__ import annotations

import hashlib
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, product
from pathlib import Path

from .groups import ConjClass, FiniteGroup
from .linalg import (BasedComplex, NoSolution, SparseMat, add_into, rank_of_vectors,
                     solve)

CACHE_ENV = "HURWITZ_CACHE"


class FalsificationError(RuntimeError):
    """A certificate that should exist could not be produced; ``instance`` describes the input."""

    def __init__(self, message, instance=None):
        super().__init__(message)
        self.instance = instance or {}


# -- cells and filters ------------------------------------------------------

def cell_letters(cell) -> tuple:
    return tuple(x for w in cell for x in w)


def cell_degree(cell) -> int:
    return sum(map(len, cell)) - len(cell)


def compositions(n: int, parts: int):
    """Compositions of ``n`` into ``parts`` positive parts, lexicographic."""
    if parts == 0:
        if n == 0:
            yield ()
        return
    for cut in combinations(range(1, n), parts - 1):
        bounds = (0,) + cut + (n,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def split_letters(letters, comp) -> tuple:
    out, k = [], 0
    for v in comp:
        out.append(tuple(letters[k:k + v]))
        k += v
    return tuple(out)


@dataclass(frozen=True)
class CellFilter:
    """Selects cells by their letters: total product, and whether letters plus ``adjoined`` generate."""

    generating: bool = False
    monodromy: int | None = None
    adjoined: tuple[int, ...] = ()

    @classmethod
    def all(cls):
        return cls()

    @classmethod
    def component(cls, g):
        """Connected covers with boundary monodromy ``g``."""
        return cls(True, g)

    @classmethod
    def with_adjoined(cls, extra, monodromy=None):
        return cls(True, monodromy, tuple(sorted(set(extra))))

    @property
    def key(self) -> str:
        parts = ["gen" if self.generating else "all"]
        if self.monodromy is not None:
            parts.append(f"m{self.monodromy}")
        if self.adjoined:
            parts.append("adj" + "-".join(map(str, self.adjoined)))
        return "_".join(parts)

    @classmethod
    def parse(cls, text: str) -> "CellFilter":
        """``all``, ``generating``, ``monodromy:<g>``, ``adjoined:<g>[:<m>]``."""
        kind, _, arg = text.partition(":")
        if kind == "all":
            return cls()
        if kind == "generating":
            return cls(True)
        if kind == "monodromy":
            return cls.component(int(arg))
        if kind == "adjoined":
            g, _, m = arg.partition(":")
            return cls.with_adjoined((int(g),), int(m) if m else None)
        raise ValueError(f"unknown filter {text!r}")


# -- shuffle product --------------------------------------------------------

@lru_cache(maxsize=None)
def _shuffle_patterns(s: int, t: int):
    """For each (s,t)-shuffle: (sign, layout) where layout lists ('w', i, v) or ('h', j)."""
    pats = []
    for hpos in combinations(range(s + t), t):
        hset = set(hpos)
        layout, v, gi, inversions = [], 0, 0, 0
        for p in range(s + t):
            if p in hset:
                layout.append(("h", v))
                v += 1
            else:
                layout.append(("w", gi, v))
                inversions += v
                gi += 1
        pats.append((-1 if inversions % 2 else 1, tuple(layout)))
    return tuple(pats)


def shuffle(G: FiniteGroup, w: tuple, w2: tuple) -> dict:
    """Signed shuffle ``sh(w, w2)`` as ``{word: coeff}``.

    Letters of ``w2`` keep their value; a letter ``x`` of ``w`` is replaced by
    ``a^-1 x a`` with ``a`` the product of the letters of ``w2`` placed before it.
    """
    return dict(_shuffle_cached(G, tuple(w), tuple(w2)))


@lru_cache(maxsize=1 << 18)
def _shuffle_cached(G, w, w2):
    prefix = [G.identity]
    for h in w2:
        prefix.append(G.mult[prefix[-1]][h])
    out: dict = {}
    for sign, layout in _shuffle_patterns(len(w), len(w2)):
        word = tuple(w2[e[1]] if e[0] == "h" else G.conjugate(w[e[1]], prefix[e[2]]) for e in layout)
        c = out.get(word, 0) + sign
        if c:
            out[word] = c
        else:
            out.pop(word, None)
    return tuple(sorted(out.items()))


def fuks_differential(G: FiniteGroup, cell: tuple) -> dict:
    """``sum_j (-1)^(j+1) w_1 ... sh(w_j, w_{j+1}) ... w_k`` as ``{cell: coeff}``."""
    out: dict = {}
    for j in range(len(cell) - 1):
        sign = 1 if j % 2 == 0 else -1
        head, tail = cell[:j], cell[j + 2:]
        for word, c in _shuffle_cached(G, cell[j], cell[j + 1]):
            key = head + (word,) + tail
            v = out.get(key, 0) + sign * c
            if v:
                out[key] = v
            else:
                out.pop(key, None)
    return out


def apply_differential(G: FiniteGroup, x: dict) -> dict:
    out: dict = {}
    for cell, a in x.items():
        add_into(out, fuks_differential(G, cell), a)
    return out


# -- costabilization --------------------------------------------------------

def costabilize(x: dict, g: int) -> dict:
    """Keep the terms whose last word is the single letter ``g``, dropping that word."""
    last = (g,)
    return {cell[:-1]: a for cell, a in x.items() if cell and cell[-1] == last}


def costabilize_seq(x: dict, letters) -> dict:
    """Apply :func:`costabilize` for each letter in turn (first letter strips the last word)."""
    for g in letters:
        x = costabilize(x, g)
    return x


def append_letters(x: dict, letters) -> dict:
    """``x (x) (l_1) (x) ... (x) (l_k)``: append single-letter words."""
    suffix = tuple((g,) for g in letters)
    return {cell + suffix: a for cell, a in x.items()}


def dual_of_appending(x: dict, letters) -> dict:
    """Cochain dual of the homology operator appending ``letters`` in order."""
    return costabilize_seq(x, list(reversed(list(letters))))


# -- the complex ------------------------------------------------------------

class FuksComplex:
    """The Fuks cochain complex at level ``n`` restricted to a cell filter.

    Degrees run ``0 .. n-1``; bases and differentials are built lazily.
    """

    def __init__(self, G: FiniteGroup, c: ConjClass, n: int, filt: CellFilter = CellFilter(),
                 cache_dir=None):
        self.G, self.c, self.n, self.filter = G, c, n, filt
        self._gen_cache: dict = {}
        self._bases: dict[int, list] = {}
        self._index: dict[int, dict] = {}
        self._d: dict[int, SparseMat] = {}
        env = os.environ.get(CACHE_ENV)
        self.cache_dir = Path(cache_dir) if cache_dir else (Path(env) if env else None)
        self.letters = [t for t in product(c.members, repeat=n) if self.admits(t)]
        self.letters.sort(key=self._code)

    def _code(self, t):
        pos, m = self.c.position, len(self.c)
        return sum(pos[x] * m ** k for k, x in enumerate(t))

    def admits(self, letters) -> bool:
        f = self.filter
        if f.monodromy is not None and self.G.mul(*letters) != f.monodromy:
            return False
        if f.generating:
            key = frozenset(letters) | frozenset(f.adjoined)
            ok = self._gen_cache.get(key)
            if ok is None:
                ok = self._gen_cache[key] = self.G.generates(key)
            return ok
        return True

    def admits_cell(self, cell) -> bool:
        return len(cell_letters(cell)) == self.n and self.admits(cell_letters(cell))

    @property
    def degrees(self) -> range:
        return range(self.n) if self.n else range(1)

    def basis(self, i: int) -> list:
        if i not in self._bases:
            if self.n == 0:
                cells = [()] if i == 0 and self.admits(()) else []
            elif not 0 <= i < self.n:
                cells = []
            else:
                cells = [split_letters(t, comp)
                         for comp in compositions(self.n, self.n - i) for t in self.letters]
            self._bases[i] = cells
        return self._bases[i]

    def index(self, i: int) -> dict:
        if i not in self._index:
            self._index[i] = {cell: k for k, cell in enumerate(self.basis(i))}
        return self._index[i]

    def dim(self, i: int) -> int:
        return len(self.basis(i))

    def _cache_path(self, i):
        if self.cache_dir is None:
            return None
        key = f"{self.G.name}|{self.G.mult}|{self.c.members}|{self.filter.key}|{self.n}|{i}"
        h = hashlib.sha256(key.encode()).hexdigest()[:24]
        return self.cache_dir / f"fuks_{self.n}_{i}_{self.filter.key}_{h}.mat"

    def differential(self, i: int) -> SparseMat:
        """Matrix of the coboundary from degree ``i`` to ``i + 1``."""
        if i in self._d:
            return self._d[i]
        path = self._cache_path(i)
        if path is not None and path.exists():
            m = SparseMat.loads(path.read_text())
        else:
            m = self._assemble(i)
            if path is not None:
                path.parent.mkdir(parents=True, exist_ok=True)
                fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
                with os.fdopen(fd, "w") as fh:
                    fh.write(m.dumps())
                os.replace(tmp, path)
        self._d[i] = m
        return m

    def _assemble(self, i):
        src, tgt = self.basis(i), self.index(i + 1)
        rows: dict[int, dict] = {}
        for col, cell in enumerate(src):
            for image, a in fuks_differential(self.G, cell).items():
                r = tgt.get(image)
                if r is None:
                    raise FalsificationError("cell filter is not closed under the differential",
                                             {"cell": cell, "image": image})
                rows.setdefault(r, {})[col] = a
        return SparseMat.from_rows(len(tgt), len(src), rows)

    def based_complex(self, degrees=None) -> BasedComplex:
        ks = list(self.degrees if degrees is None else degrees)
        basis = {k: self.basis(k) for k in ks}
        d = {k: self.differential(k) for k in ks if k + 1 in basis}
        return BasedComplex(basis, d, step=1, trusted=set(ks) - ({max(ks)} if max(ks) < self.n - 1 else set()),
                            meta={"level": self.n, "filter": self.filter.key})

    def homology(self, degrees=None):
        """Cohomology report; degrees at the top of a partial window are untrusted."""
        ks = list(self.degrees if degrees is None else degrees)
        cx = self.based_complex(sorted(set(ks) | {k + 1 for k in ks if k + 1 < self.n}))
        rep = cx.homology(degrees=ks, check=False)
        return rep

    def betti(self, i: int) -> int:
        from .linalg import rank
        di = rank(self.differential(i)) if i + 1 < self.n and self.dim(i) else 0
        dprev = rank(self.differential(i - 1)) if i >= 1 and self.dim(i - 1) else 0
        return self.dim(i) - di - dprev

    # vectors <-> cochains
    def to_vector(self, x: dict, i: int) -> dict:
        idx = self.index(i)
        out = {}
        for cell, a in x.items():
            if cell not in idx:
                raise KeyError(f"cell {cell} is not a degree-{i} cell of this complex")
            out[idx[cell]] = Fraction(a)
        return out

    def to_cochain(self, v: dict, i: int) -> dict:
        basis = self.basis(i)
        return {basis[k]: a for k, a in v.items() if a}

    def project(self, x: dict) -> dict:
        """Restriction to cells admitted by this complex (a chain map between summands)."""
        return {cell: a for cell, a in x.items() if self.admits_cell(cell)}

    def delta(self, x: dict) -> dict:
        return apply_differential(self.G, x)

    def cocycles(self, i: int) -> list[dict]:
        from .linalg import nullspace
        if i + 1 >= self.n:
            return [{k: Fraction(1)} for k in range(self.dim(i))]
        return nullspace(self.differential(i))

    def coboundaries(self, i: int) -> list[dict]:
        if i == 0:
            return []
        return [col for col in self.differential(i - 1).columns() if col]

    def is_cocycle(self, x: dict, i: int) -> bool:
        return not self.delta(x)

    def solve_coboundary(self, target: dict, i: int) -> dict:
        """Cochain ``w`` of degree ``i - 1`` with ``delta(w) = target``; raises NoSolution."""
        b = self.to_vector(target, i)
        if i == 0:
            if b:
                raise NoSolution()
            return {}
        return self.to_cochain(solve(self.differential(i - 1), b), i - 1)


class FuksModel:
    """Memoized Fuks complexes for one ``(G, c)`` across levels and filters."""

    def __init__(self, G: FiniteGroup, c: ConjClass, cache_dir=None):
        self.G, self.c, self.cache_dir = G, c, cache_dir
        self._cx: dict = {}

    def complex(self, n: int, filt: CellFilter = CellFilter()) -> FuksComplex:
        key = (n, filt)
        if key not in self._cx:
            self._cx[key] = FuksComplex(self.G, self.c, n, filt, self.cache_dir)
        return self._cx[key]


def build_fuks(G, c, n, filt: CellFilter = CellFilter(), cache_dir=None) -> FuksComplex:
    return FuksComplex(G, c, n, filt, cache_dir)


# -- pullback from configuration space --------------------------------------

def conf_pullback(x: dict, target: FuksComplex) -> dict:
    """Send each composition cell of a trivial-group cochain to the sum of its admissible labelings."""
    out: dict = {}
    for cell, a in x.items():
        comp = tuple(len(w) for w in cell)
        for t in target.letters:
            out[split_letters(t, comp)] = out.get(split_letters(t, comp), 0) + a
    return {k: v for k, v in out.items() if v}


def conf_pullback_matrix(conf: FuksComplex, target: FuksComplex, i: int) -> SparseMat:
    tidx = target.index(i)
    rows: dict = {}
    for col, cell in enumerate(conf.basis(i)):
        for tc in conf_pullback({cell: 1}, target):
            rows.setdefault(tidx[tc], {})[col] = 1
    return SparseMat.from_rows(target.dim(i), conf.dim(i), rows)


# -- constructive reductions -----------------------------------------------

@dataclass
class OneMoreG:
    z: dict
    w: dict


def reduce_one_more_g(model: FuksModel, x: dict, g: int, i: int) -> OneMoreG:
    """For a cocycle ``x = y (x) (g)`` of degree ``i``, find ``z, w`` with ``y - z(g) = delta(w(g))``.

    ``z`` and ``w`` are searched among cells whose letters, together with ``g``,
    generate the group and whose product matches.
    """
    G = model.G
    if any(cell[-1] != (g,) for cell in x):
        raise ValueError("cochain does not end in the single-letter word g")
    if apply_differential(G, x):
        raise ValueError("input is not a cocycle")
    y = costabilize(x, g)
    if not y:
        return OneMoreG({}, {})
    level = sum(map(len, next(iter(y))))
    mono = G.mul(*cell_letters(next(iter(y))))
    ycx = model.complex(level, CellFilter.with_adjoined((g,), mono))
    zcx = model.complex(level - 1, CellFilter.with_adjoined((g,), G.mul(mono, G.inv[g])))
    cols: list[dict] = []
    labels: list[tuple] = []
    if i >= 1:
        for cell in zcx.basis(i - 1):
            img = ycx.delta({cell + ((g,),): 1})
            cols.append(ycx.to_vector(img, i))
            labels.append(("w", cell))
    for cell in zcx.basis(i):
        cols.append(ycx.to_vector({cell + ((g,),): 1}, i))
        labels.append(("z", cell))
    m = SparseMat.from_columns(ycx.dim(i), cols)
    try:
        sol = solve(m, ycx.to_vector(y, i))
    except NoSolution as exc:
        raise FalsificationError("no witness for the one-more-g reduction",
                                 {"x": _serial(x), "g": g, "degree": i}) from exc
    z, w = {}, {}
    for k, a in sol.items():
        kind, cell = labels[k]
        (w if kind == "w" else z)[cell] = a
    # y - z(g) = delta(w(g))
    lhs = add_into(dict(y), append_letters(z, [g]), -1)
    if lhs != apply_differential(G, append_letters(w, [g])):
        raise FalsificationError("one-more-g witness failed substitution", {"x": _serial(x)})
    return OneMoreG(z, w)


@dataclass
class IteratedMoreG:
    primitive: dict          # W with x - delta(W) = remainder
    remainder: dict
    steps: list[OneMoreG]


def iterate_more_g(model: FuksModel, x: dict, g: int, i: int) -> IteratedMoreG:
    """Push a cocycle ``y (x) g`` to ``y_J (x) g^J`` by repeated one-more-g steps."""
    G = model.G
    y = costabilize(x, g)
    j = 1
    W: dict = {}
    steps = []
    while y:
        step = reduce_one_more_g(model, append_letters(y, [g]), g, i)
        steps.append(step)
        add_into(W, append_letters(step.w, [g] * (j + 1)))
        y = step.z
        j += 1
    remainder = add_into(dict(x), apply_differential(G, W), -1)
    if remainder != append_letters(y, [g] * j):
        raise FalsificationError("iterated reduction lost track of the coboundary", {"x": _serial(x)})
    return IteratedMoreG(W, remainder, steps)


@dataclass
class NormalizedTail:
    cocycle: dict
    primitive: dict          # input - delta(primitive) = cocycle
    tails: dict              # s -> z_s, with projection z_s (x) g^s


def normalize_tail(model: FuksModel, x: dict, g: int, m: int, i: int) -> NormalizedTail:
    """Modify a cocycle by coboundaries until ``x[g]^s[h] = 0`` for ``s < m`` and ``h != g``.

    ``x[g]^s[h]`` strips ``s`` trailing ``(g)`` words and then a trailing
    ``(h)``.  Afterwards every term whose last ``s <= m`` words are single
    letters ends in ``g^s``.
    """
    G = model.G
    if not x:
        return NormalizedTail({}, {}, {s: {} for s in range(1, m + 1)})
    level = sum(map(len, next(iter(x))))
    mono = G.mul(*cell_letters(next(iter(x))))
    x = dict(x)
    Y: dict = {}
    for s in range(m):
        for h in model.c:
            if h == g:
                continue
            t = costabilize_seq(x, [g] * s + [h])
            if not t:
                continue
            tm = G.mul(mono, *([G.inv[g]] * s), G.inv[h])
            cx = model.complex(level - s - 1, CellFilter.with_adjoined((g, h), tm))
            try:
                xp = cx.solve_coboundary(t, i)
            except NoSolution as exc:
                raise FalsificationError("tail projection is not a coboundary",
                                         {"s": s, "h": h, "g": g, "degree": i}) from exc
            piece = append_letters(xp, [h] + [g] * s)
            add_into(Y, piece)
            add_into(x, apply_differential(G, piece), -1)
    tails = {}
    for s in range(1, m + 1):
        proj = {cell: a for cell, a in x.items()
                if len(cell) >= s and all(len(wd) == 1 for wd in cell[-s:])}
        if any(cell[-s:] != ((g,),) * s for cell in proj):
            raise FalsificationError("normalized cocycle has a non-g tail", {"s": s})
        tails[s] = {cell[:-s]: a for cell, a in proj.items()}
    return NormalizedTail(x, Y, tails)


def _serial(x: dict):
    return [[list(map(list, cell)), str(a)] for cell, a in sorted(x.items())]


def cohomology_rank_of(cx: FuksComplex, i: int, vectors: list[dict]) -> int:
    """Dimension of the span of cocycle ``vectors`` in ``H^i`` of ``cx``."""
    B = cx.coboundaries(i)
    return rank_of_vectors(B + vectors) - rank_of_vectors(B)


def operator_matrix(op, src: FuksComplex, tgt: FuksComplex, i: int) -> SparseMat:
    """Matrix of a cochain operator from degree ``i`` of ``src`` to degree ``i`` of ``tgt``.

    Images are restricted to the cells of ``tgt``.
    """
    idx = tgt.index(i)
    rows: dict = {}
    for col, cell in enumerate(src.basis(i)):
        for image, a in op({cell: 1}).items():
            r = idx.get(image)
            if r is not None:
                rows.setdefault(r, {})[col] = a
    return SparseMat.from_rows(tgt.dim(i), src.dim(i), rows)


def chain_map_failures(op, src: FuksComplex, tgt: FuksComplex) -> list[int]:
    """Degrees ``i`` where ``delta M_i != M_(i+1) delta``."""
    bad = []
    for i in range(max(src.n, tgt.n) - 1):
        if i + 1 >= src.n and i + 1 >= tgt.n:
            continue
        lhs = tgt.differential(i) @ operator_matrix(op, src, tgt, i) if i + 1 < tgt.n else None
        rhs = operator_matrix(op, src, tgt, i + 1) @ src.differential(i) if i + 1 < src.n else None
        if lhs is None:
            lhs = SparseMat(rhs.nrows, rhs.ncols)
        if rhs is None:
            rhs = SparseMat(lhs.nrows, lhs.ncols)
        if lhs != rhs:
            bad.append(i)
    return bad
