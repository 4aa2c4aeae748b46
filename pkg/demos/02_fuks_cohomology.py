"""Cohomology of one component from the Fuks cell complex.

Cells are tuples of words over the reflections; the coboundary merges adjacent
words by a signed shuffle in which letters are conjugated as they pass.  The
restriction to generating cells with product s computes the cohomology of the
component with boundary monodromy s, and pulling back along the map to the
configuration space compares it with (1, 1, 0, ..., 0).
"""

import time

from hurwitz.fuks import CellFilter, FuksComplex, shuffle
from hurwitz.groups import dihedral, identity_class, order_two_class, trivial_group
from hurwitz.stable import Setting

G = dihedral(3)
c = order_two_class(G)
s, rs = G.labels.index("s"), G.labels.index("r1s")

print("sh((s), (r1s)) =", {tuple(G.label(x) for x in w): a for w, a in shuffle(G, (s,), (rs,)).items()})
print("sh((s), (s))   =", shuffle(G, (s,), (s,)))

T = trivial_group()
print("configuration space, n=6:", [FuksComplex(T, identity_class(T), 6).betti(i) for i in range(6)])

S = Setting(G, c)
for n in (3, 5, 7):
    t0 = time.perf_counter()
    cx = FuksComplex(G, c, n, CellFilter.component(s))
    dims = [cx.betti(i) for i in cx.degrees]
    ranks = [S.pullback_rank(n, s, i) for i in (0, 1)]
    print(f"component n={n}: H^* = {dims}, pullback rank on H^0, H^1 = {ranks} "
          f"({time.perf_counter() - t0:.1f} s)")

# H^1 reaches the configuration-space value 1 only at n = 9.
print("component n=9: dim H^1 =", S.cohomology(9, s, 1).dim)
