"""Braid group action on tuples of conjugacy-class elements and its orbits.

Tuples hold group elements.  Orbit tables encode a tuple by the little-endian
mixed-radix number of its class positions, ``sum pos(t_k) * |c|**k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .groups import ConjClass, FiniteGroup, wedge_square_order, AbelianShape

DEFAULT_BUDGET = 1 << 31


class BudgetExceeded(MemoryError):
    pass


def braid_generator(G: FiniteGroup, i: int, t: tuple, inverse: bool = False) -> tuple:
    """``sigma_i`` (1-based): entries ``i, i+1`` become ``(t_{i+1}, t_{i+1}^-1 t_i t_{i+1})``."""
    n = len(t)
    if not 1 <= i <= n - 1:
        raise IndexError(f"braid generator index {i} out of range for n={n}")
    a, b = t[i - 1], t[i]
    if inverse:
        new = (G.mul(a, b, G.inv[a]), a)
    else:
        new = (b, G.conjugate(a, b))
    return t[:i - 1] + new + t[i + 1:]


def boundary_monodromy(G: FiniteGroup, t) -> int:
    return G.mul(*t)


def _check_budget(size: int, n: int, budget: int) -> None:
    need = size * 8 * (3 * max(n, 1) + 4)
    if need > budget:
        raise BudgetExceeded(f"|c|^n = {size} states need ~{need} bytes, budget is {budget}")


@dataclass(frozen=True)
class OrbitTable:
    n: int
    restriction: str
    states: np.ndarray        # admitted tuple codes, ascending
    orbit_of: np.ndarray      # orbit id per admitted state
    representatives: tuple[tuple[int, ...], ...]
    monodromy: tuple[int, ...]

    @property
    def count(self) -> int:
        return len(self.representatives)

    def orbits_with_monodromy(self, g: int) -> list[int]:
        return [k for k, m in enumerate(self.monodromy) if m == g]

    def sizes(self) -> list[int]:
        return np.bincount(self.orbit_of, minlength=self.count).tolist()


def _decode_all(c: ConjClass, n: int) -> np.ndarray:
    """Array ``(|c|^n, n)`` of group elements, row ``k`` is the tuple with code ``k``."""
    m = len(c)
    codes = np.arange(m ** n, dtype=np.int64)
    members = np.array(c.members, dtype=np.int64)
    cols = [members[(codes // m ** k) % m] for k in range(n)]
    return np.stack(cols, axis=1) if n else np.zeros((1, 0), dtype=np.int64)


def enumerate_orbits(G: FiniteGroup, c: ConjClass, n: int, restriction: str = "all",
                     budget: int = DEFAULT_BUDGET) -> OrbitTable:
    """Orbits of ``B_n`` on ``c^n`` (or on its generating tuples)."""
    if restriction not in ("all", "generating"):
        raise ValueError(f"unknown restriction {restriction!r}")
    m = len(c)
    size = m ** n
    _check_budget(size, n, budget)
    tuples = _decode_all(c, n)
    mult = np.array(G.mult, dtype=np.int64)
    inv = np.array(G.inv, dtype=np.int64)
    pos = np.full(G.order, -1, dtype=np.int64)
    pos[list(c.members)] = np.arange(m)
    weights = m ** np.arange(n, dtype=np.int64)
    src, dst = [], []
    for i in range(n - 1):
        a, b = tuples[:, i], tuples[:, i + 1]
        conj = mult[mult[inv[b], a], b]
        new = tuples.copy()
        new[:, i], new[:, i + 1] = b, conj
        src.append(np.arange(size, dtype=np.int64))
        dst.append(pos[new] @ weights)
    if src:
        s, d = np.concatenate(src), np.concatenate(dst)
    else:
        s = d = np.zeros(0, dtype=np.int64)
    graph = coo_matrix((np.ones(len(s), dtype=np.int8), (s, d)), shape=(size, size))
    _, labels = connected_components(graph, directed=True, connection="weak")

    # relabel orbits by their smallest code
    first = {}
    for code, lab in enumerate(labels.tolist()):
        first.setdefault(lab, code)
    reps_all = sorted(first.values())
    relabel = {labels[r]: k for k, r in enumerate(reps_all)}
    orb = np.array([relabel[l] for l in labels.tolist()], dtype=np.int64)

    keep_orbit = []
    for r in reps_all:
        t = tuple(int(x) for x in tuples[r])
        keep_orbit.append(restriction == "all" or G.generates(t))
    keep_orbit = np.array(keep_orbit, dtype=bool)
    admitted = np.nonzero(keep_orbit[orb])[0]
    kept_ids = np.nonzero(keep_orbit)[0]
    new_id = np.full(len(reps_all), -1, dtype=np.int64)
    new_id[kept_ids] = np.arange(len(kept_ids))
    reps = tuple(tuple(int(x) for x in tuples[reps_all[k]]) for k in kept_ids)
    mono = tuple(boundary_monodromy(G, t) for t in reps)
    return OrbitTable(n, restriction, admitted, new_id[orb[admitted]], reps, mono)


def component_count(G: FiniteGroup, c: ConjClass, n: int, g: int,
                    budget: int = DEFAULT_BUDGET) -> int:
    """Number of generating braid orbits of length ``n`` with boundary monodromy ``g``."""
    table = enumerate_orbits(G, c, n, "generating", budget)
    return len(table.orbits_with_monodromy(g))


def predicted_component_count(H: AbelianShape, G: FiniteGroup, n: int, g: int) -> int:
    """Large-``n`` count for ``H x| Z/2``: ``#wedge^2 H`` at matching parity, else 0.

    Assumes the ``semidirect_inversion`` indexing, where ``g >= |H|`` means ``g``
    is a reflection.
    """
    parity = int(g >= H.order)
    return wedge_square_order(H) if parity == n % 2 else 0


def stabilization_onset(counts: dict[int, int], predicted: dict[int, int]) -> int | None:
    """First ``n`` whose count matches the prediction and stays matched for two more same-parity steps."""
    for n in sorted(counts):
        run = [n, n + 2, n + 4]
        if all(k in counts and counts[k] == predicted[k] for k in run):
            return n
    return None


def tuples_with(G: FiniteGroup, c: ConjClass, n: int, monodromy=None, generating=False):
    """All tuples of ``c^n`` with the given product (and generating, if asked)."""
    out = []
    for t in product(c.members, repeat=n):
        if monodromy is not None and G.mul(*t) != monodromy:
            continue
        if generating and not G.generates(t):
            continue
        out.append(t)
    return out
