"""Exact sparse linear algebra over Q and a based-complex container.

Vectors are dicts ``{index: Fraction}`` without zero entries.  Elimination runs
on integer rows (fraction-free, rows rescaled by their content) with a
Markowitz-style pivot order: shortest remaining row first, then the pivot
column with the fewest entries, ties broken by lowest index.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable


class LinalgError(ArithmeticError):
    pass


class NoSolution(LinalgError):
    """``m x = b`` is inconsistent; ``certificate`` is ``y`` with ``y m = 0`` and ``y b = 1``."""

    def __init__(self, certificate=None):
        super().__init__("linear system has no solution")
        self.certificate = certificate


class DifferentialError(LinalgError):
    def __init__(self, degree, label):
        super().__init__(f"d o d != 0 starting in degree {degree} at basis element {label!r}")
        self.degree = degree
        self.label = label


def _frac(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def add_into(acc: dict, vec: dict, scale=1) -> dict:
    for k, v in vec.items():
        w = acc.get(k, 0) + scale * v
        if w:
            acc[k] = w
        else:
            acc.pop(k, None)
    return acc


class SparseMat:
    """Immutable sparse rational matrix stored as row dicts."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, entries: Iterable = ()):
        rows: dict[int, dict[int, Fraction]] = {}
        for r, c, v in entries:
            if not (0 <= r < nrows and 0 <= c < ncols):
                raise IndexError(f"entry ({r}, {c}) outside {nrows}x{ncols}")
            row = rows.setdefault(r, {})
            w = row.get(c, 0) + _frac(v)
            if w:
                row[c] = w
            else:
                row.pop(c, None)
        self.nrows, self.ncols = nrows, ncols
        self._rows = {r: row for r, row in rows.items() if row}

    @classmethod
    def from_rows(cls, nrows, ncols, rows: dict) -> "SparseMat":
        m = cls(nrows, ncols)
        m._rows = {r: {c: _frac(v) for c, v in row.items() if v} for r, row in rows.items()}
        m._rows = {r: row for r, row in m._rows.items() if row}
        return m

    @classmethod
    def from_columns(cls, nrows, columns: list[dict]) -> "SparseMat":
        return cls(nrows, len(columns), ((r, c, v) for c, col in enumerate(columns) for r, v in col.items()))

    @classmethod
    def identity(cls, n) -> "SparseMat":
        return cls(n, n, ((i, i, 1) for i in range(n)))

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows.values())

    def row(self, r) -> dict:
        return dict(self._rows.get(r, {}))

    def rows(self) -> dict:
        return {r: dict(row) for r, row in self._rows.items()}

    def entries(self) -> list[tuple[int, int, Fraction]]:
        return [(r, c, v) for r in sorted(self._rows) for c, v in sorted(self._rows[r].items())]

    def columns(self) -> list[dict]:
        cols = [dict() for _ in range(self.ncols)]
        for r, row in self._rows.items():
            for c, v in row.items():
                cols[c][r] = v
        return cols

    def transpose(self) -> "SparseMat":
        return SparseMat(self.ncols, self.nrows, ((c, r, v) for r, c, v in self.entries()))

    T = property(transpose)

    def apply(self, vec: dict) -> dict:
        out: dict = {}
        cols = self._column_index()
        for c, v in vec.items():
            for r, a in cols.get(c, ()):
                w = out.get(r, 0) + a * v
                if w:
                    out[r] = w
                else:
                    out.pop(r, None)
        return out

    def _column_index(self):
        idx: dict[int, list] = {}
        for r, row in self._rows.items():
            for c, v in row.items():
                idx.setdefault(c, []).append((r, v))
        return idx

    def __matmul__(self, other: "SparseMat") -> "SparseMat":
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        out = {}
        for r, row in self._rows.items():
            acc: dict = {}
            for k, a in row.items():
                orow = other._rows.get(k)
                if orow:
                    add_into(acc, orow, a)
            if acc:
                out[r] = acc
        return SparseMat.from_rows(self.nrows, other.ncols, out)

    def __add__(self, other):
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return SparseMat(self.nrows, self.ncols, self.entries() + other.entries())

    def __neg__(self):
        return SparseMat(self.nrows, self.ncols, ((r, c, -v) for r, c, v in self.entries()))

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        return isinstance(other, SparseMat) and self.shape == other.shape and self._rows == other._rows

    def __hash__(self):
        return hash((self.shape, tuple(self.entries())))

    def is_zero(self) -> bool:
        return not self._rows

    def to_dense(self) -> list[list[Fraction]]:
        d = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for r, c, v in self.entries():
            d[r][c] = v
        return d

    def __repr__(self):
        return f"SparseMat({self.nrows}x{self.ncols}, nnz={self.nnz})"

    def dumps(self) -> str:
        """Coordinate text format: ``rows cols nnz`` then ``r c num/den`` lines."""
        ents = self.entries()
        lines = [f"{self.nrows} {self.ncols} {len(ents)}"]
        lines += [f"{r} {c} {v.numerator}/{v.denominator}" for r, c, v in ents]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "SparseMat":
        lines = text.split("\n")
        nr, nc, nnz = map(int, lines[0].split())
        ents = []
        for ln in lines[1:1 + nnz]:
            r, c, v = ln.split()
            ents.append((int(r), int(c), Fraction(v)))
        return cls(nr, nc, ents)


# -- elimination ------------------------------------------------------------

def _integer_rows(rows: Iterable[dict]) -> list[dict[int, int]]:
    out = []
    for row in rows:
        if not row:
            continue
        den = 1
        for v in row.values():
            if isinstance(v, Fraction) and v.denominator != 1:
                den = lcm(den, v.denominator)
        out.append({c: int(v * den) for c, v in row.items() if v})
    return out


def _content_normalize(row: dict[int, int]) -> None:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return
    if g > 1:
        for k in row:
            row[k] //= g


def _echelon(rows: list[dict[int, int]], forbidden: int | None = None):
    """Integer row echelon form.

    Returns ``(pivots, leftover)``: ``pivots`` is a list of ``(col, row)`` in
    elimination order where ``row`` has had every earlier pivot column
    removed; ``leftover`` are the nonzero rows supported only on the forbidden
    column.
    """
    rows = [dict(r) for r in rows]
    colidx: dict[int, set[int]] = {}
    for i, r in enumerate(rows):
        for c in r:
            colidx.setdefault(c, set()).add(i)
    active = set(range(len(rows)))
    heap = [(len(r), i) for i, r in enumerate(rows)]
    heapq.heapify(heap)
    pivots = []
    leftover = []
    while heap:
        n, i = heapq.heappop(heap)
        if i not in active or len(rows[i]) != n:
            continue
        R = rows[i]
        cands = [c for c in R if c != forbidden]
        if not cands:
            active.discard(i)
            leftover.append(R)
            continue
        p = min(cands, key=lambda c: (abs(R[c]) != 1, len(colidx[c]), c))
        active.discard(i)
        for c in R:
            colidx[c].discard(i)
        a = R[p]
        for s in sorted(colidx[p]):
            S = rows[s]
            b = S[p]
            if b % a == 0:
                f, sa = b // a, 1
            else:
                g = gcd(a, b)
                f, sa = b // g, a // g
                if sa < 0:
                    f, sa = -f, -sa
                for k in S:
                    S[k] *= sa
            for k, v in R.items():
                w = S.get(k, 0) - f * v
                if w:
                    if k not in S:
                        colidx[k].add(s)
                    S[k] = w
                else:
                    if k in S:
                        del S[k]
                        if k != p:
                            colidx[k].discard(s)
            colidx[p].discard(s)
            if sa != 1:
                _content_normalize(S)
            if S:
                heapq.heappush(heap, (len(S), s))
            else:
                active.discard(s)
        colidx[p] = set()
        pivots.append((p, R))
    return pivots, leftover


def rank_of_vectors(vectors: Iterable[dict]) -> int:
    return len(_echelon(_integer_rows(vectors))[0])


def rank(m: SparseMat) -> int:
    """Rank over Q."""
    rows = list(m._rows.values())
    if m.nrows > m.ncols:
        rows = m.columns()
    return rank_of_vectors(rows)


def _back_reduce(pivots):
    """Fully reduce pivot rows: each becomes ``{pivot: 1, free columns...}`` over Q."""
    pivcols = {p for p, _ in pivots}
    reduced: dict[int, dict[int, Fraction]] = {}
    for p, R in reversed(pivots):
        a = R[p]
        row = {k: Fraction(v, a) for k, v in R.items()}
        for q in [k for k in row if k in pivcols and k != p]:
            f = row.get(q)
            if f:
                add_into(row, reduced[q], -f)
        reduced[p] = row
    return reduced


def row_reduce(vectors: Iterable[dict]) -> dict[int, dict[int, Fraction]]:
    """Reduced row echelon form of the span, keyed by pivot column."""
    pivots, _ = _echelon(_integer_rows(vectors))
    return _back_reduce(pivots)


def nullspace_of_rows(rows: Iterable[dict], ncols: int) -> list[dict[int, Fraction]]:
    """Basis of ``{x : r . x = 0 for all rows r}``, one vector per free column (ascending)."""
    red = row_reduce(rows)
    by_free: dict[int, list] = {}
    for p, row in red.items():
        for k, v in row.items():
            if k != p:
                by_free.setdefault(k, []).append((p, v))
    basis = []
    for f in range(ncols):
        if f in red:
            continue
        vec = {f: Fraction(1)}
        for p, v in by_free.get(f, ()):
            vec[p] = -v
        basis.append(vec)
    return basis


def nullspace(m: SparseMat) -> list[dict[int, Fraction]]:
    """Basis of the right kernel ``{x : m x = 0}``."""
    return nullspace_of_rows(m._rows.values(), m.ncols)


def solve(m: SparseMat, b: dict) -> dict[int, Fraction]:
    """Some exact solution of ``m x = b``; raises :class:`NoSolution` with a certificate.

    Free variables are set to zero.
    """
    rhs = m.ncols
    aug = []
    for r in range(m.nrows):
        row = dict(m._rows.get(r, {}))
        if b.get(r):
            row[rhs] = _frac(b[r])
        if row:
            aug.append(row)
    pivots, leftover = _echelon(_integer_rows(aug), forbidden=rhs)
    if leftover:
        raise NoSolution(_left_certificate(m, b))
    x: dict[int, Fraction] = {}
    for p, R in reversed(pivots):
        acc = Fraction(R.get(rhs, 0))
        for k, v in R.items():
            if k != p and k != rhs and k in x:
                acc -= v * x[k]
        if acc:
            x[p] = acc / R[p]
    return x


def _left_certificate(m: SparseMat, b: dict) -> dict[int, Fraction]:
    cols = m.columns()
    mt_rows = {c: col for c, col in enumerate(cols) if col}
    mt_rows[m.ncols] = {r: _frac(v) for r, v in b.items() if v}
    aug = SparseMat.from_rows(m.ncols + 1, m.nrows, mt_rows)
    return solve(aug, {m.ncols: 1})


def in_span(vectors: list[dict], targets: list[dict]) -> bool:
    """True iff every target lies in the span of ``vectors``."""
    base = rank_of_vectors(vectors)
    return rank_of_vectors(list(vectors) + list(targets)) == base


def relative_rank(base: list[dict], extra: list[dict]) -> int:
    """``dim span(base + extra) - dim span(base)``."""
    return rank_of_vectors(list(base) + list(extra)) - rank_of_vectors(base)


class SpanReducer:
    """Echelonized span that reduces further vectors against it and can grow."""

    def __init__(self, vectors: Iterable[dict] = ()):
        pivots, _ = _echelon(_integer_rows(vectors))
        self._rows: list[tuple[int, dict]] = []
        self._pos: dict[int, int] = {}
        for p, R in pivots:
            self._append(p, R)

    def _append(self, p, R):
        self._pos[p] = len(self._rows)
        self._rows.append((p, R))

    @property
    def rank(self) -> int:
        return len(self._rows)

    def copy(self) -> "SpanReducer":
        new = SpanReducer()
        new._rows, new._pos = list(self._rows), dict(self._pos)
        return new

    def reduce(self, vec: dict) -> dict:
        """Remainder of ``vec`` after eliminating every pivot column."""
        v = {k: _frac(a) for k, a in vec.items() if a}
        heap = [self._pos[k] for k in v if k in self._pos]
        heapq.heapify(heap)
        while heap:
            k = heapq.heappop(heap)
            p, R = self._rows[k]
            a = v.get(p)
            if not a:
                continue
            f = a / R[p]
            for col, x in R.items():
                w = v.get(col, 0) - f * x
                if w:
                    if col not in v and col in self._pos:
                        heapq.heappush(heap, self._pos[col])
                    v[col] = w
                else:
                    v.pop(col, None)
        return v

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def add(self, vec: dict) -> bool:
        """Add ``vec`` to the span; True iff it was independent."""
        r = self.reduce(vec)
        if not r:
            return False
        (row,) = _integer_rows([r])
        p = min(row, key=lambda c: (abs(row[c]) != 1, c))
        self._append(p, row)
        return True

    def relative_rank(self, vectors: Iterable[dict]) -> int:
        """Rank added by ``vectors`` without modifying this span."""
        extra = SpanReducer()
        for v in vectors:
            r = self.reduce(v)
            if r:
                extra.add(r)
        return extra.rank


# -- complexes --------------------------------------------------------------

@dataclass
class DegreeReport:
    degree: int
    dim: int
    rank_in: int
    rank_out: int
    trusted: bool

    @property
    def homology_dim(self) -> int:
        return self.dim - self.rank_in - self.rank_out

    def as_dict(self):
        return {"degree": self.degree, "dim": self.dim, "rank_in": self.rank_in,
                "rank_out": self.rank_out, "homology_dim": self.homology_dim,
                "trusted": self.trusted}


@dataclass
class HomologyReport:
    degrees: list[DegreeReport]

    def __getitem__(self, k) -> DegreeReport:
        for d in self.degrees:
            if d.degree == k:
                return d
        raise KeyError(k)

    def dims(self, trusted_only=False) -> dict[int, int]:
        return {d.degree: d.homology_dim for d in self.degrees if d.trusted or not trusted_only}

    @property
    def trusted(self) -> list[int]:
        return [d.degree for d in self.degrees if d.trusted]

    def as_dict(self):
        return {"degrees": [d.as_dict() for d in self.degrees], "trusted": self.trusted}


@dataclass
class BasedComplex:
    """A finite window of a graded vector space with labeled bases and a differential.

    ``d[k]`` maps degree ``k`` to ``k + step`` (``step = +1`` cohomological,
    ``-1`` homological); rows are indexed by the target basis.
    """

    basis: dict[int, list]
    d: dict[int, SparseMat]
    step: int = 1
    trusted: set[int] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def degrees(self) -> list[int]:
        return sorted(self.basis)

    def dim(self, k) -> int:
        return len(self.basis.get(k, ()))

    def index(self, k) -> dict:
        return {lab: i for i, lab in enumerate(self.basis.get(k, ()))}

    def differential(self, k) -> SparseMat:
        if k in self.d:
            return self.d[k]
        return SparseMat(self.dim(k + self.step), self.dim(k))

    def check_d_squared(self) -> None:
        for k in self.degrees:
            sq = self.differential(k + self.step) @ self.differential(k)
            if not sq.is_zero():
                col = min(c for _, c, _ in sq.entries())
                raise DifferentialError(k, self.basis[k][col])

    def is_trusted(self, k) -> bool:
        if self.trusted is not None:
            return k in self.trusted
        return True

    def homology(self, degrees=None, check=True) -> HomologyReport:
        if check:
            self.check_d_squared()
        ks = self.degrees if degrees is None else list(degrees)
        ranks: dict[int, int] = {}

        def r(k):
            if k not in ranks:
                ranks[k] = rank(self.differential(k)) if self.dim(k) and self.dim(k + self.step) else 0
            return ranks[k]

        reps = [DegreeReport(k, self.dim(k), r(k - self.step), r(k), self.is_trusted(k)) for k in ks]
        return HomologyReport(reps)

    def cocycles(self, k) -> list[dict]:
        return nullspace(self.differential(k))

    def coboundaries(self, k) -> list[dict]:
        """Spanning set of the image of the differential landing in degree ``k``."""
        return [c for c in self.differential(k - self.step).columns() if c]
