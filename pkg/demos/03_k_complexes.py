"""Exactness of the K-complexes behind the stability argument.

The two-sided complex has cells (alpha, word, beta) with gradings in
M = k[g] and N = k[g, g^-1].  Cells with some letter other than g form an
exact complex; two explicit homotopies certify this, and the all-g part then
carries all the homology.
"""

from hurwitz import kcomplex as K
from hurwitz.groups import dihedral, order_two_class

G = dihedral(3)
c = order_two_class(G)
g = G.labels.index("s")

for name, run in [
    ("one-sided K(k[g, g^-1])", lambda: K.certify_one_sided(G, c, g, max_letters=5)),
    ("sigma homotopy", lambda: K.certify_sigma(G, c, g, max_letters=5)),
    ("alternate homotopy", lambda: K.certify_bianchi(G, c, g, max_letters=5)),
    ("S0 homotopy", lambda: K.certify_S0(G, c, g, max_letters=4)),
    ("truncations D^x", lambda: K.certify_Dx(G, c, g)),
]:
    r = run()
    print(f"{name}: {'ok' if r['pass'] else 'FAILED'}")

r = K.certify_two_sided_g(G, c, g, depth=5, zs=(0,))
w = r["windows"][0]
print("all-g part:", w["homology_b"])
print("whole complex:", w["homology_total"])
print("quotient:", w["homology_quotient"])
