"""One- and two-sided K-complexes over graded modules where only ``[g]`` acts.

A two-sided cell is ``(alpha, letters, beta)``: grading ``alpha`` in the right
module ``M``, a word of class elements, grading ``beta`` in the left module
``N``.  The homological degree is the letter count; both differentials remove
one letter.  Cells with some letter different from ``g`` span ``C'``; the
all-``g`` cells span ``B``, and ``C = B + C'`` as complexes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable

from .groups import ConjClass, FiniteGroup, GroupError, centralizer_in_class_is_self
from .linalg import (BasedComplex, SparseMat, add_into, nullspace_of_rows, rank,
                     rank_of_vectors)

CONVENTIONS = ("plain", "koszul")


@dataclass(frozen=True)
class ModuleSpec:
    """A graded module, one-dimensional in each grading of ``[lo, hi]`` (``None`` is unbounded).

    ``[g]`` shifts the grading by one; every other ``[h]`` acts by zero.  A
    ``custom`` module supplies ``action(h, a) -> a' | None`` instead.
    """

    kind: str
    g: int | None = None
    lo: int | None = 0
    hi: int | None = None
    action: Callable | None = field(default=None, compare=False)
    inverse: Callable | None = field(default=None, compare=False)

    @classmethod
    def trivial_k(cls):
        return cls("trivial_k", None, 0, 0)

    @classmethod
    def k_of_g(cls, g):
        return cls("k_of_g", g, 0, None)

    @classmethod
    def k_laurent_g(cls, g):
        return cls("k_laurent_g", g, None, None)

    @classmethod
    def custom(cls, lo, hi, action, inverse=None):
        return cls("custom", None, lo, hi, action, inverse)

    def contains(self, a: int) -> bool:
        return (self.lo is None or a >= self.lo) and (self.hi is None or a <= self.hi)

    def act(self, h: int, a: int) -> int | None:
        """Grading of ``[h]`` applied to the basis vector in grading ``a``, or None if zero."""
        if self.action is not None:
            b = self.action(h, a)
        elif self.g is not None and h == self.g:
            b = a + 1
        else:
            b = None
        return b if b is not None and self.contains(b) else None

    def act_inverse(self, h: int, a: int) -> int:
        """Grading ``b`` with ``[h] b = a``; raises if ``[h]`` is not invertible here."""
        if self.inverse is not None:
            b = self.inverse(h, a)
        elif self.g is not None and h == self.g and self.lo is None and self.hi is None:
            b = a - 1
        else:
            b = None
        if b is None or self.act(h, b) != a:
            raise ValueError(f"[{h}] does not act invertibly on the {self.kind} module")
        return b

    def invertible(self, h: int) -> bool:
        try:
            self.act_inverse(h, 0)
        except ValueError:
            return False
        return True

    def describe(self) -> str:
        return self.kind if self.g is None else f"{self.kind}({self.g})"


# -- symbolic differentials -------------------------------------------------

def d_left(G: FiniteGroup, M: ModuleSpec, cell) -> dict:
    """Remove letter ``g_i``, act by it on ``M``, conjugate the earlier letters by it."""
    alpha, w, beta = cell
    out: dict = {}
    for i, x in enumerate(w, 1):
        a2 = M.act(x, alpha)
        if a2 is None:
            continue
        word = tuple(G.conjugate(y, x) for y in w[:i - 1]) + w[i:]
        key = (a2, word, beta)
        out[key] = out.get(key, 0) + (-1) ** i
    return {k: v for k, v in out.items() if v}


def d_right(G: FiniteGroup, N: ModuleSpec, cell) -> dict:
    """Remove letter ``g_i`` and act on ``N`` by its conjugate under the later letters."""
    alpha, w, beta = cell
    out: dict = {}
    suffix = G.identity
    for i in range(len(w), 0, -1):
        gamma = G.conjugate(w[i - 1], suffix)
        suffix = G.mult[w[i - 1]][suffix]
        b2 = N.act(gamma, beta)
        if b2 is None:
            continue
        key = (alpha, w[:i - 1] + w[i:], b2)
        out[key] = out.get(key, 0) + (-1) ** i
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class TwoSided:
    """The two-sided K-complex ``K(M, A, N)`` for ``(G, c)`` as symbolic maps on cells."""

    G: FiniteGroup
    c: ConjClass
    M: ModuleSpec
    N: ModuleSpec
    convention: str = "plain"

    def dl(self, cell) -> dict:
        out = d_left(self.G, self.M, cell)
        if self.convention == "koszul" and cell[2] % 2:
            out = {k: -v for k, v in out.items()}
        return out

    def dr(self, cell) -> dict:
        return d_right(self.G, self.N, cell)

    def d(self, cell) -> dict:
        return add_into(self.dl(cell), self.dr(cell))

    def apply(self, f, x: dict) -> dict:
        out: dict = {}
        for cell, a in x.items():
            add_into(out, f(cell), a)
        return out

    def admits(self, cell) -> bool:
        alpha, w, beta = cell
        return self.M.contains(alpha) and self.N.contains(beta) and all(x in self.c for x in w)

    def with_convention(self, convention: str) -> "TwoSided":
        return TwoSided(self.G, self.c, self.M, self.N, convention)


def k_model(G, c, M, N, convention="plain", guard=True) -> TwoSided:
    if guard and not centralizer_in_class_is_self(G, c):
        raise GroupError("some element of c commutes with another element of c")
    return TwoSided(G, c, M, N, convention)


def is_all_g(cell, g) -> bool:
    return all(x == g for x in cell[1])


# -- finite windows ---------------------------------------------------------

@dataclass(frozen=True)
class Window:
    """Cells of one ``z``-summand with ``letters <= max_letters``.

    ``alpha_max``/``beta_max`` cut quotient complexes (the differentials raise
    gradings); ``beta_min`` and the letter bound cut subcomplexes.  ``part``
    is ``all``, ``cprime`` or ``b``.
    """

    z: int
    max_letters: int
    alpha_max: int | None = None
    beta_max: int | None = None
    beta_min: int | None = None
    part: str = "all"
    g: int | None = None


def window_cells(model: TwoSided, win: Window, t: int) -> list:
    M, N = model.M, model.N
    beta_top = win.beta_max if win.beta_max is not None else N.hi
    lo = M.lo if M.lo is not None else (None if beta_top is None else win.z - t - beta_top)
    caps = [M.hi, win.alpha_max,
            None if N.lo is None else win.z - t - N.lo,
            None if win.beta_min is None else win.z - t - win.beta_min]
    caps = [v for v in caps if v is not None]
    if lo is None or not caps:
        raise ValueError("window is unbounded; set alpha_max, beta_max or beta_min")
    hi = min(caps)
    cells = []
    for alpha in range(lo, hi + 1):
        beta = win.z - t - alpha
        if not (M.contains(alpha) and N.contains(beta)):
            continue
        if win.beta_max is not None and beta > win.beta_max:
            continue
        for w in product(model.c.members, repeat=t):
            cell = (alpha, w, beta)
            if win.part == "cprime" and is_all_g(cell, win.g):
                continue
            if win.part == "b" and not is_all_g(cell, win.g):
                continue
            cells.append(cell)
    return cells


def _escapes_quotient(win: Window, cell) -> bool:
    return ((win.alpha_max is not None and cell[0] > win.alpha_max)
            or (win.beta_max is not None and cell[2] > win.beta_max))


def _matrix(f, src: list, tgt_index: dict, win: Window) -> SparseMat:
    rows: dict = {}
    for col, cell in enumerate(src):
        for image, a in f(cell).items():
            r = tgt_index.get(image)
            if r is None:
                if _escapes_quotient(win, image):
                    continue
                raise RuntimeError(f"window is not closed: {cell} -> {image}")
            rows.setdefault(r, {})[col] = a
    return SparseMat.from_rows(len(tgt_index), len(src), rows)


@dataclass
class WindowComplex:
    model: TwoSided
    window: Window
    basis: dict[int, list]
    dl: dict[int, SparseMat]
    dr: dict[int, SparseMat]

    def complex(self) -> BasedComplex:
        d = {t: self.dl[t] + self.dr[t] for t in self.dl}
        top = self.window.max_letters
        return BasedComplex(self.basis, d, step=-1, trusted={t for t in self.basis if t < top},
                            meta={"z": self.window.z, "convention": self.model.convention})

    def sign_checks(self) -> dict:
        """Exact checks of ``d_l^2``, ``d_r^2`` and the cross terms on the window."""
        ok = {"dl_squared": True, "dr_squared": True, "cross": True}
        for t in self.dl:
            if t - 1 not in self.dl:
                continue
            a, b = self.dl, self.dr
            ok["dl_squared"] &= (a[t - 1] @ a[t]).is_zero()
            ok["dr_squared"] &= (b[t - 1] @ b[t]).is_zero()
            ok["cross"] &= (a[t - 1] @ b[t] + b[t - 1] @ a[t]).is_zero()
        return ok


def build_window(model: TwoSided, win: Window) -> WindowComplex:
    basis = {t: window_cells(model, win, t) for t in range(win.max_letters + 1)}
    index = {t: {cell: k for k, cell in enumerate(cells)} for t, cells in basis.items()}
    dl, dr = {}, {}
    for t in range(1, win.max_letters + 1):
        dl[t] = _matrix(model.dl, basis[t], index[t - 1], win)
        dr[t] = _matrix(model.dr, basis[t], index[t - 1], win)
    return WindowComplex(model, win, basis, dl, dr)


def two_sided(G, c, M, N, win: Window, guard=True) -> tuple[WindowComplex, str]:
    """Assemble ``C^z`` on a window following the sign protocol.

    The plain sum ``d_l + d_r`` is tried first; if the cross terms fail, the
    Koszul sign ``(-1)^beta`` on ``d_l`` is tried.  Returns the window and the
    convention that passed.
    """
    for conv in CONVENTIONS:
        wc = build_window(k_model(G, c, M, N, conv, guard), win)
        checks = wc.sign_checks()
        if all(checks.values()):
            return wc, conv
    raise RuntimeError(f"no sign convention makes the total differential square to zero: {checks}")


def k_complex(G, c, N: ModuleSpec, z: int, max_letters: int) -> BasedComplex:
    """One-sided ``K(N)``: letters tensored with ``N`` and the conjugated right action."""
    wc = build_window(TwoSided(G, c, ModuleSpec.trivial_k(), N), Window(z, max_letters))
    return wc.complex()


# -- canonical form and homotopies -----------------------------------------

def canonical_form(word, g):
    """Split ``word`` as ``(x, h, t)`` with ``h != g`` the rightmost non-``g`` letter and ``t`` trailing g's."""
    t = 0
    while t < len(word) and word[len(word) - 1 - t] == g:
        t += 1
    if t == len(word):
        raise ValueError("all-g cell has no canonical form")
    return word[:len(word) - t - 1], word[len(word) - t - 1], t


def homotopy_sigma(model: TwoSided, g: int, cell) -> dict:
    """``(x, h, g^t) -> (-1)^L (x, h g h^-1, h, g^t)`` with one fewer ``N`` grading."""
    G = model.G
    alpha, w, beta = cell
    x, h, t = canonical_form(w, g)
    b2 = beta - 1
    if not model.N.contains(b2):
        raise ValueError("sigma leaves the module N")
    new = x + (G.mul(h, g, G.inv[h]), h) + (g,) * t
    return {(alpha, new, b2): (-1) ** len(w)}


def homotopy_bianchi(model: TwoSided, g: int, cell) -> dict:
    """``(x, h, g^t) -> (-1)^L (g x g^-1, g, h, g^t)`` with one fewer ``M`` grading."""
    G = model.G
    alpha, w, beta = cell
    x, h, t = canonical_form(w, g)
    a2 = alpha - 1
    if not model.M.contains(a2):
        raise ValueError("the alternate homotopy leaves the module M")
    gi = G.inv[g]
    new = tuple(G.mul(g, y, gi) for y in x) + (g, h) + (g,) * t
    return {(a2, new, beta): (-1) ** len(w)}


def homotopy_S0(model: TwoSided, h: int, cell) -> dict:
    """``v -> (-1)^(L+1) (word, h)`` with ``[h]^-1`` applied on ``N``."""
    alpha, w, beta = cell
    b2 = model.N.act_inverse(h, beta)
    return {(alpha, w + (h,), b2): (-1) ** (len(w) + 1)}


def s0_twist(model: TwoSided, h: int, cell) -> dict:
    """``[m][h] (h^-1 w h) [h]^-1 [omega]``: the second term of the S0 identity."""
    alpha, w, beta = cell
    a2 = model.M.act(h, alpha)
    if a2 is None:
        return {}
    G = model.G
    return {(a2, tuple(G.conjugate(y, h) for y in w), model.N.act_inverse(h, beta)): 1}


def homotopy_defect(model: TwoSided, hom, cell) -> dict:
    """``(hom d + d hom)(cell)``."""
    out = model.apply(hom, model.d(cell))
    add_into(out, model.apply(model.d, hom(cell)))
    return {k: v for k, v in out.items() if v}


def cprime_cells(model: TwoSided, g: int, z: int, letters, offsets, side: str = "alpha") -> list:
    """C' cells of the ``z``-summand with letter counts in ``letters``.

    ``side="alpha"`` takes ``alpha`` from ``offsets``; ``side="beta"`` takes ``beta``.
    """
    out = []
    for t in letters:
        for off in offsets:
            alpha, beta = (off, z - t - off) if side == "alpha" else (z - t - off, off)
            if not (model.M.contains(alpha) and model.N.contains(beta)):
                continue
            for w in product(model.c.members, repeat=t):
                if any(x != g for x in w):
                    out.append((alpha, w, beta))
    return out


def trailing_g(cell, g) -> int:
    return canonical_form(cell[1], g)[2]


def filtered_identity_failures(model: TwoSided, hom, g: int, cells) -> dict:
    """Cells where ``(hom d + d hom)(v)`` is not ``(-1)^(L+s+1) v`` plus terms of lower filtration.

    The filtration ``F^t`` counts trailing ``g`` letters.  Also counts the cells
    where the identity holds on the nose.
    """
    bad, exact = [], 0
    for v in cells:
        x, _, t = canonical_form(v[1], g)
        out = homotopy_defect(model, hom, v)
        if out.get(v, 0) != (-1) ** (len(v[1]) + len(x) + 1):
            bad.append(v)
            continue
        rest = [k for k in out if k != v]
        if any(trailing_g(k, g) >= t for k in rest):
            bad.append(v)
        elif not rest:
            exact += 1
    return {"failures": bad, "exact": exact}


def composite_rank(model: TwoSided, hom, cells) -> tuple[int, int, bool]:
    """``(rank, dim, closed)`` of ``hom d + d hom`` on the span of ``cells``, dropping escapes."""
    index = {v: k for k, v in enumerate(cells)}
    closed = True
    rows: dict = {}
    for col, v in enumerate(cells):
        for image, a in homotopy_defect(model, hom, v).items():
            r = index.get(image)
            if r is None:
                closed = False
                continue
            rows.setdefault(r, {})[col] = a
    return rank(SparseMat.from_rows(len(cells), len(cells), rows)), len(cells), closed


def _homotopy_certificate(which, model, hom, g, z, max_letters, offsets, side) -> dict:
    per = {}
    ok = True
    failures = []
    for L in range(1, max_letters + 1):
        cells = cprime_cells(model, g, z, [L], offsets, side)
        fil = filtered_identity_failures(model, hom, g, cells)
        r, n, closed = composite_rank(model, hom, cells)
        no_tail = [v for v in cells if trailing_g(v, g) == 0]
        per[L] = {"cells": n, "rank": r, "closed": closed, "exact_cells": fil["exact"],
                  "cells_without_trailing_g": len(no_tail)}
        failures += fil["failures"]
        ok &= not fil["failures"] and r == n and fil["exact"] >= len(no_tail)
    return {"which": which, "modules": [model.M.describe(), model.N.describe()], "z": z,
            "degrees": per, "failures": [_cell_json(v) for v in failures[:5]], "pass": ok}


# -- D^x and J --------------------------------------------------------------

def truncation_Dx(model: TwoSided, g: int, x: int, z: int = 0) -> WindowComplex:
    """``D^x``: the C' cells with ``beta >= x``; a finite subcomplex when ``M`` is bounded below."""
    if x > 0:
        raise ValueError("x must be <= 0")
    return build_window(model, Window(z, z - x - (model.M.lo or 0), beta_min=x, part="cprime", g=g))


def j_piece(model: TwoSided, g: int, x: int, z: int = 0):
    """Basis cells of ``C'_{0,x}`` and a basis of ``J_x = ker(d_l)`` there."""
    t = z - x
    cells = [(0, w, x) for w in product(model.c.members, repeat=t) if any(y != g for y in w)]
    index = {cell: k for k, cell in enumerate(cells)}
    tgt: dict = {}
    rows: dict = {}
    for col, cell in enumerate(cells):
        for image, a in model.dl(cell).items():
            r = tgt.setdefault(image, len(tgt))
            rows.setdefault(r, {})[col] = a
    kernel = nullspace_of_rows(list(rows.values()), len(cells))
    return cells, index, kernel


def j_differential_rank(model: TwoSided, g: int, x: int, z: int = 0) -> tuple[int, int]:
    """``(dim J_x, rank of d_r: J_x -> J_{x+1})``."""
    cells, _, kernel = j_piece(model, g, x, z)
    images = []
    for vec in kernel:
        img: dict = {}
        for k, a in vec.items():
            add_into(img, model.dr(cells[k]), a)
        images.append(img)
    keyed = {}
    rows = []
    for img in images:
        rows.append({keyed.setdefault(cell, len(keyed)): a for cell, a in img.items() if a})
    return len(kernel), rank_of_vectors(rows)


# -- certificates -----------------------------------------------------------

def _trusted_dims(cx: BasedComplex) -> dict:
    rep = cx.homology()
    return {t: rep[t].homology_dim for t in rep.trusted}


def certify_one_sided(G, c, g, max_letters=6, z=0) -> dict:
    cx = k_complex(G, c, ModuleSpec.k_laurent_g(g), z, max_letters)
    dims = _trusted_dims(cx)
    return {"which": "one-sided", "module": f"k_laurent_g({g})", "z": z, "homology": dims,
            "dims": {t: cx.dim(t) for t in cx.degrees}, "pass": not any(dims.values())}


def certify_two_sided(G, c, g, max_letters=4, z=0, alpha_max=4) -> dict:
    win = Window(z, max_letters, alpha_max=alpha_max)
    wc, conv = two_sided(G, c, ModuleSpec.k_of_g(g), ModuleSpec.k_laurent_g(g), win)
    checks = wc.sign_checks()
    return {"which": "two-sided", "z": z, "convention": conv, "checks": checks,
            "dims": {t: len(b) for t, b in wc.basis.items()}, "pass": all(checks.values())}


def certify_T_exact(G, c, g, max_letters=6, zs=(0,), alpha_max=None) -> dict:
    """Homology of ``C'`` (equivalently ``T``) vanishes in trusted degrees."""
    out = {}
    ok = True
    for z in zs:
        win = Window(z, max_letters, alpha_max=alpha_max if alpha_max is not None else max_letters,
                     part="cprime", g=g)
        wc, conv = two_sided(G, c, ModuleSpec.k_of_g(g), ModuleSpec.k_laurent_g(g), win)
        dims = _trusted_dims(wc.complex())
        ok &= not any(dims.values())
        out[z] = {"convention": conv, "homology": dims}
    return {"which": "T-exact", "windows": out, "pass": ok}


def certify_two_sided_g(G, c, g, depth=5, zs=(-1, 0, 1)) -> dict:
    """All-``g`` part ``B`` carries the homology: ``C/B`` exact and equal dims on trusted degrees.

    Windows are the subcomplexes ``beta >= z - depth``; by the ``D^x`` result
    only their top letter degree can carry spurious homology, so it is untrusted.
    """
    out = {}
    ok = True
    M, N = ModuleSpec.k_of_g(g), ModuleSpec.k_laurent_g(g)
    for z in zs:
        res = {}
        for part in ("all", "b", "cprime"):
            wc, conv = two_sided(G, c, M, N, Window(z, depth, beta_min=z - depth, part=part, g=g))
            res[part] = _trusted_dims(wc.complex())
        good = res["all"] == res["b"] and not any(res["cprime"].values())
        ok &= good
        out[z] = {"convention": conv, "homology_total": res["all"], "homology_b": res["b"],
                  "homology_quotient": res["cprime"], "pass": good}
    return {"which": "two-sided-g", "windows": out, "pass": ok}


def certify_sigma(G, c, g, max_letters=6, z=0, alphas=(0, 1, 2)) -> dict:
    """``sigma d + d sigma`` is ``(-1)^(L+s+1)`` on each ``F^t/F^(t-1)`` and invertible on C'."""
    model = k_model(G, c, ModuleSpec.k_of_g(g), ModuleSpec.k_laurent_g(g))
    hom = lambda v: homotopy_sigma(model, g, v)  # noqa: E731
    return _homotopy_certificate("sigma", model, hom, g, z, max_letters, alphas, "alpha")


def certify_bianchi(G, c, g, max_letters=6, z=0, betas=(0, 1, 2), mirrored=True) -> dict:
    """The alternate homotopy, on ``M = k[g, g^-1], N = k[g]`` (or on ``alpha >= 1`` if not mirrored)."""
    if mirrored:
        model = k_model(G, c, ModuleSpec.k_laurent_g(g), ModuleSpec.k_of_g(g))
        offsets, side = betas, "beta"
    else:
        model = k_model(G, c, ModuleSpec.k_of_g(g), ModuleSpec.k_laurent_g(g))
        offsets, side = tuple(b + 1 for b in betas), "alpha"
    hom = lambda v: homotopy_bianchi(model, g, v)  # noqa: E731
    return _homotopy_certificate("bianchi", model, hom, g, z, max_letters, offsets, side)


def certify_S0(G, c, g, max_letters=5, z=0, alphas=(0, 1, 2), twisted=True) -> dict:
    """Per-cell check of ``(d S0 + S0 d)(v) = v + twist(v)`` with ``h = g``.

    With ``twisted=False`` the module ``M`` is ``k`` so ``[m][h] = 0`` and the
    composite must be the identity.
    """
    M = ModuleSpec.k_of_g(g) if twisted else ModuleSpec.trivial_k()
    model = k_model(G, c, M, ModuleSpec.k_laurent_g(g))
    bad, count = [], 0
    for alpha in (alphas if twisted else (0,)):
        for t in range(max_letters + 1):
            for w in product(c.members, repeat=t):
                cell = (alpha, w, z - t - alpha)
                count += 1
                expect = add_into({cell: 1}, s0_twist(model, g, cell))
                got = homotopy_defect(model, lambda v: homotopy_S0(model, g, v), cell)
                if got != {k: v for k, v in expect.items() if v}:
                    bad.append(cell)
    return {"which": "S0", "cells": count, "twisted": twisted,
            "failures": [_cell_json(v) for v in bad[:5]], "pass": not bad}


def certify_Dx(G, c, g, xs=(0, -1, -2, -3)) -> dict:
    """``D^x`` is exact below the top degree, and its top homology is ``ker(d_r|J_x)``."""
    model = k_model(G, c, ModuleSpec.k_of_g(g), ModuleSpec.k_laurent_g(g))
    out = {}
    ok = True
    for x in xs:
        wc = truncation_Dx(model, g, x)
        cx = wc.complex()
        cx.trusted = set(cx.basis)
        rep = cx.homology()
        top = -x
        lower = {t: rep[t].homology_dim for t in cx.degrees if t != top}
        top_dim = rep[top].homology_dim if top in cx.basis else 0
        if x < 0:
            jdim, jrank = j_differential_rank(model, g, x)
            jker = jdim - jrank
            jprev = j_differential_rank(model, g, x - 1)[1]
        else:
            jdim = jker = jprev = 0
        good = not any(lower.values()) and top_dim == jker == jprev
        ok &= good
        out[x] = {"homology": {**lower, top: top_dim}, "J_dim": jdim, "J_kernel": jker,
                  "J_incoming_rank": jprev, "pass": good}
    return {"which": "Dx", "truncations": out, "pass": ok}


def _cell_json(cell):
    return [cell[0], list(cell[1]), cell[2]]
