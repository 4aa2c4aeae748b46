"""Stabilization and comparison with configuration space on computed cohomology.

Homology statements are checked through their duals.  The homology operator
appending letters ``a_1 ... a_k`` is dual to stripping the trailing pattern
``(a_1) ... (a_k)`` and restricting to the source component.  For a
subspace ``U = ker(p_*)`` of ``H_i`` and maps ``A_k``, the joint kernel
``U ∩ ker A_k`` is the annihilator of ``im p^* + sum im A_k^*``, so every
kernel dimension below is ``dim H^i`` minus a rank modulo coboundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .braids import component_count
from .fuks import (CellFilter, FuksComplex, FuksModel, conf_pullback, costabilize_seq)
from .groups import ConjClass, FiniteGroup, identity_class, trivial_group
from .linalg import SpanReducer, nullspace

CHECKS = {
    "fuks": "fuks-cohomology-of-hurwitz-space",
    "theorem": "theorem:component-cohomology-equals-configuration-space",
    "trivial_action": "lemma:trivial-action-on-kernel",
    "cyclic": "lemma:cyclic-monodromy-kernel",
    "annihilation": "proposition:annihilated-class-vanishes",
    "braid_move": "identity:braid-move-on-costabilization",
}


class BudgetSkip(Exception):
    """A cohomology computation would exceed the cell budget."""


class Cohomology:
    """``H^i`` of a Fuks complex with a reducer over coboundaries."""

    def __init__(self, cx: FuksComplex, i: int, budget: int | None = None):
        if budget is not None and cx.dim(i) + cx.dim(i + 1) + cx.dim(i - 1) > budget:
            raise BudgetSkip(f"level {cx.n}, degree {i}: {cx.dim(i)} cells")
        self.cx, self.i = cx, i
        self.B = SpanReducer(cx.coboundaries(i) if 0 <= i < max(cx.n, 1) else [])

    @cached_property
    def dim(self) -> int:
        return self.cx.betti(self.i) if self.cx.dim(self.i) else 0

    @cached_property
    def representatives(self) -> list[dict]:
        """Cocycle vectors whose classes form a basis of ``H^i``."""
        if self.dim == 0:
            return []
        span = self.B.copy()
        reps = []
        for z in self._cocycles():
            if span.add(z):
                reps.append(z)
                if len(reps) == self.dim:
                    break
        return reps

    def _cocycles(self):
        cx, i = self.cx, self.i
        if i + 1 >= cx.n:
            return ({k: 1} for k in range(cx.dim(i)))
        return iter(nullspace(cx.differential(i)))

    def rank_mod_coboundaries(self, vectors) -> int:
        return self.B.relative_rank(vectors)

    def vector(self, x: dict) -> dict:
        """Index vector of a cochain, after restricting to this complex's cells."""
        return self.cx.to_vector(self.cx.project(x), self.i)

    def cochain(self, v: dict) -> dict:
        return self.cx.to_cochain(v, self.i)


def induced_rank(op, src: Cohomology, tgt: Cohomology) -> int:
    """Rank on cohomology of the cochain operator ``op`` (cochain dict to cochain dict)."""
    return tgt.rank_mod_coboundaries([tgt.vector(op(src.cochain(z))) for z in src.representatives])


def stabilization_cochain(x: dict, c: ConjClass) -> dict:
    """``sum_h x[h][h]``: dual of appending ``h h`` summed over ``h``."""
    out: dict = {}
    for h in c:
        for cell, a in costabilize_seq(x, [h, h]).items():
            out[cell] = out.get(cell, 0) + a
    return {k: v for k, v in out.items() if v}


def dual_append(letters):
    """Cochain operator dual to appending ``letters`` in homology."""
    pattern = list(reversed(list(letters)))
    return lambda x: costabilize_seq(x, pattern)


@dataclass
class Setting:
    """A tuple ``(G, c)`` with memoized Fuks complexes and configuration-space data."""

    G: FiniteGroup
    c: ConjClass
    cache_dir: str | None = None
    budget: int | None = None
    _coh: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.model = FuksModel(self.G, self.c, self.cache_dir)
        T = trivial_group()
        self.conf = FuksModel(T, identity_class(T))

    def component(self, n: int, g: int) -> FuksComplex:
        return self.model.complex(n, CellFilter.component(g))

    def cohomology(self, n: int, g: int, i: int) -> Cohomology:
        key = ("Z", n, g, i)
        if key not in self._coh:
            self._coh[key] = Cohomology(self.component(n, g), i, self.budget)
        return self._coh[key]

    def conf_cohomology(self, n: int, i: int) -> Cohomology:
        key = ("conf", n, i)
        if key not in self._coh:
            self._coh[key] = Cohomology(self.conf.complex(n), i)
        return self._coh[key]

    def pullback_vectors(self, n: int, g: int, i: int) -> list[dict]:
        """Images in the component complex of a basis of ``H^i(Conf_n)``."""
        Z = self.cohomology(n, g, i)
        conf = self.conf_cohomology(n, i)
        return [Z.vector(conf_pullback(conf.cochain(z), Z.cx)) for z in conf.representatives]

    def pullback_rank(self, n: int, g: int, i: int) -> int:
        return self.cohomology(n, g, i).rank_mod_coboundaries(self.pullback_vectors(n, g, i))

    def kernel_dim(self, n: int, g: int, i: int) -> int:
        """``dim ker(H_i(Z) -> H_i(Conf_n))``."""
        return self.cohomology(n, g, i).dim - self.pullback_rank(n, g, i)

    def append_images(self, n: int, g: int, i: int, letters) -> list[dict]:
        """Duals of ``z -> z (x) letters`` applied to a basis of the target ``H^i``, as source vectors."""
        src = self.cohomology(n, g, i)
        mono = self.G.mul(g, *letters)
        tgt = self.cohomology(n + len(letters), mono, i)
        op = dual_append(letters)
        return [src.vector(op(tgt.cochain(z))) for z in tgt.representatives]


# -- stable table -----------------------------------------------------------

def parity_of(G: FiniteGroup, c: ConjClass, g: int) -> int | None:
    """The parity of ``n`` for which a product of ``n`` class elements can equal ``g``, if forced."""
    reach = {G.identity: {0}}
    frontier = {G.identity}
    for n in range(1, 2 * G.order + 1):
        frontier = {G.mult[x][h] for x in frontier for h in c}
        for x in frontier:
            reach.setdefault(x, set()).add(n % 2)
    p = reach.get(g, set())
    return next(iter(p)) if len(p) == 1 else None


@dataclass
class StableCell:
    n: int
    i: int
    dim: int | None
    conf_dim: int | None = None
    pullback_rank: int | None = None
    stabilization_rank: int | None = None
    status: str = "ok"

    def as_dict(self):
        return {"n": self.n, "i": self.i, "dim": self.dim, "conf_dim": self.conf_dim,
                "pullback_rank": self.pullback_rank, "stabilization_rank": self.stabilization_rank,
                "status": self.status}


@dataclass
class StableTable:
    group: str
    monodromy: int
    parity: int | None
    cells: dict[tuple[int, int], StableCell]

    def levels(self) -> list[int]:
        return sorted({n for n, _ in self.cells})

    def degrees(self) -> list[int]:
        return sorted({i for _, i in self.cells})

    def stabilized_from(self, i: int, locked: bool = False) -> int | None:
        """First ``n`` where dim and stabilization rank agree at ``n`` and ``n+2`` (and ``n+4`` if locked)."""
        need = 3 if locked else 2
        for n in self.levels():
            run = [self.cells.get((n + 2 * k, i)) for k in range(need)]
            if any(r is None or r.dim is None for r in run):
                continue
            d = run[0].dim
            if all(r.dim == d for r in run) and all(
                    r.stabilization_rank == d for r in run[1:] if r.n >= 2):
                return n
        return None

    def onset(self, i: int) -> int | None:
        """Smallest ``n`` from which ``dim H^i`` equals the configuration value at every computed level."""
        ns = [n for n in self.levels() if (n, i) in self.cells and self.cells[(n, i)].dim is not None]
        best = None
        for n in reversed(ns):
            cell = self.cells[(n, i)]
            if cell.dim != cell.conf_dim:
                break
            best = n
        return best

    def as_dict(self):
        return {"group": self.group, "monodromy": self.monodromy, "parity": self.parity,
                "cells": [self.cells[k].as_dict() for k in sorted(self.cells)],
                "stabilized_from": {i: self.stabilized_from(i) for i in self.degrees()},
                "locked_from": {i: self.stabilized_from(i, locked=True) for i in self.degrees()},
                "onset": {i: self.onset(i) for i in self.degrees()}}


def stable_table(S: Setting, g: int, i_max: int, n_max: int, n_min: int = 1,
                 n_max_by_degree: dict | None = None, ranks: bool = True) -> StableTable:
    """Dims, pullback ranks and (optionally) stabilization ranks for levels of matching parity.

    ``n_max_by_degree`` overrides ``n_max`` per degree; cells over the budget are marked.
    """
    parity = parity_of(S.G, S.c, g)
    caps = {i: (n_max_by_degree or {}).get(i, n_max) for i in range(i_max + 1)}
    cells = {}
    for n in range(n_min, max(caps.values()) + 1):
        if parity is not None and n % 2 != parity:
            continue
        for i in range(0, min(i_max, n - 1) + 1):
            if n > caps[i]:
                continue
            try:
                cell = _stable_cell(S, g, n, i, ranks)
            except BudgetSkip:
                cell = StableCell(n, i, None, status="budget")
            cells[(n, i)] = cell
    return StableTable(S.G.name, g, parity, cells)


def _stable_cell(S: Setting, g, n, i, ranks=True) -> StableCell:
    Z = S.cohomology(n, g, i)
    cell = StableCell(n, i, Z.dim, conf_dim=S.conf_cohomology(n, i).dim)
    cell.pullback_rank = S.pullback_rank(n, g, i)
    if ranks and n - 2 >= 1 and i <= n - 3:
        try:
            tgt = S.cohomology(n - 2, g, i)
            cell.stabilization_rank = induced_rank(lambda x: stabilization_cochain(x, S.c), Z, tgt)
        except BudgetSkip:
            pass
    return cell


def certify_theorem(S: Setting, g: int, i_max: int, n_max: int,
                    n_max_by_degree: dict | None = None, ranks: bool = True) -> dict:
    """Compare ``H^i(Z_g)`` with ``H^i(Conf_n)`` degree by degree.

    Per degree the verdict records the empirical onset (the smallest level from
    which dims agree at every computed level) and checks that the pullback is
    injective from the onset on.  A degree whose onset lies beyond the computed
    range is reported as ``not reached`` rather than failed.
    """
    table = stable_table(S, g, i_max, n_max, n_max_by_degree=n_max_by_degree, ranks=ranks)
    verdict = {}
    ok = True
    for i in table.degrees():
        onset = table.onset(i)
        cells = [c for c in table.cells.values() if c.i == i and c.dim is not None]
        inj = sorted(c.n for c in cells if onset is not None and c.n >= onset
                     and c.pullback_rank != c.conf_dim)
        budget = sorted(c.n for c in table.cells.values() if c.i == i and c.dim is None)
        verdict[i] = {"onset": onset, "computed_levels": sorted(c.n for c in cells),
                      "dims": {c.n: c.dim for c in cells},
                      "pullback_injective_failures": inj, "budget_skipped": budget,
                      "status": "stable" if onset is not None else "not reached"}
        ok &= not inj
    return {"check": CHECKS["theorem"], "table": table.as_dict(), "verdict": verdict, "pass": ok}


# -- lemmas -----------------------------------------------------------------

def certify_trivial_action(S: Setting, g: int, h: int, i: int, n: int) -> dict:
    """``z[h] = 0`` for ``z`` in ``ker(H_i(Z_g) -> H_i(Conf))``."""
    if h == g:
        raise ValueError("h must differ from g")
    Z = S.cohomology(n, g, i)
    kernel = S.kernel_dim(n, g, i)
    span = Z.B.copy()
    for v in S.pullback_vectors(n, g, i):
        span.add(v)
    images = S.append_images(n, g, i, [h])
    extra = span.relative_rank(images)
    return {"check": CHECKS["trivial_action"], "n": n, "i": i, "g": g, "h": h,
            "kernel_dim": kernel, "rank_on_kernel": extra, "pass": extra == 0}


def certify_cyclic_monodromy(S: Setting, zeta: int, i: int, n: int) -> dict:
    parity = parity_of(S.G, S.c, zeta)
    if parity is not None and n % 2 != parity:
        return {"check": CHECKS["cyclic"], "n": n, "i": i, "zeta": zeta, "component": "empty",
                "kernel_dim": 0, "pass": True}
    Z = S.cohomology(n, zeta, i)
    k = S.kernel_dim(n, zeta, i)
    return {"check": CHECKS["cyclic"], "n": n, "i": i, "zeta": zeta, "dim": Z.dim,
            "conf_dim": S.conf_cohomology(n, i).dim, "kernel_dim": k, "pass": k == 0}


def annihilation_kernel(S: Setting, g: int, i: int, n: int, w_max: int) -> dict[int, int]:
    """Joint kernel dim of ``z -> z[g]^w[h]`` (``w <= W``, ``h != g``) on the pullback kernel, per ``W``."""
    Z = S.cohomology(n, g, i)
    span = Z.B.copy()
    base = span.rank
    for v in S.pullback_vectors(n, g, i):
        span.add(v)
    out = {-1: Z.dim - (span.rank - base)}
    for w in range(w_max + 1):
        for h in S.c:
            if h == g:
                continue
            for v in S.append_images(n, g, i, [g] * w + [h]):
                span.add(v)
        out[w] = Z.dim - (span.rank - base)
    return out


def certify_annihilation_implies_zero(S: Setting, g: int, i: int, n: int, w_max: int = 3) -> dict:
    if i == 0:
        return {"check": CHECKS["annihilation"], "n": n, "i": 0, "kernel_by_w": {}, "pass": True}
    ks = annihilation_kernel(S, g, i, n, w_max)
    mono = all(ks[w] <= ks[w - 1] for w in range(w_max + 1))
    return {"check": CHECKS["annihilation"], "n": n, "i": i, "g": g, "w_max": w_max,
            "pullback_kernel": ks[-1], "kernel_by_w": {w: ks[w] for w in range(w_max + 1)},
            "monotone": mono, "pass": ks[w_max] == 0 and mono}


def braid_move_identity(S: Setting, g: int, h: int, j: int, i: int, n: int) -> dict:
    """``[g]^j[h]`` and ``[h][h^-1 g h]^j`` agree on ``H^i``; cochain-level equality is also reported.

    Both append ``j + 1`` letters to a class of the component with monodromy
    ``g``.  The comparison runs on the duals: for each target cocycle the two
    stripped cochains must differ by a coboundary of the source.
    """
    G = S.G
    k = G.conjugate(g, h)
    left, right = [g] * j + [h], [h] + [k] * j
    src = S.cohomology(n, g, i)
    mono = G.mul(g, *left)
    tgt = S.cohomology(n + j + 1, mono, i)
    opl, opr = dual_append(left), dual_append(right)
    diffs, cochain_equal = [], True
    for z in tgt.representatives + tgt.cx.coboundaries(i):
        x = tgt.cochain(z)
        a, b = src.vector(opl(x)), src.vector(opr(x))
        if a != b:
            cochain_equal = False
        d = {key: a.get(key, 0) - b.get(key, 0) for key in set(a) | set(b)}
        diffs.append({key: v for key, v in d.items() if v})
    extra = src.rank_mod_coboundaries(diffs[:len(tgt.representatives)])
    return {"check": CHECKS["braid_move"], "n": n, "i": i, "g": g, "h": h, "j": j,
            "cohomology_equal": extra == 0, "cochain_equal": cochain_equal, "pass": extra == 0}


def components_vs_h0(S: Setting, g: int, n: int) -> dict:
    """``dim H^0`` of the component complex against the braid-orbit count."""
    count = component_count(S.G, S.c, n, g)
    dim = S.cohomology(n, g, 0).dim
    return {"n": n, "g": g, "orbits": count, "h0": dim, "pass": count == dim}
