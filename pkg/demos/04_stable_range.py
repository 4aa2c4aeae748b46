"""Where the component's cohomology meets the configuration space.

The table lists, for the D6 component with monodromy s, the dimension of H^i,
the configuration-space value, and the rank of the pullback.  Degree 0 agrees
from n = 3.  Degree 1 still differs at n = 7 and agrees at n = 9, where the
pullback kernel printed below vanishes.  Degree 2 has not met its value 0 by n = 7.
Below the stable range the kernel of the pullback is nonzero, and the braid move
identity still holds on cohomology even though the cochain operators differ.
"""

from hurwitz.groups import dihedral, order_two_class
from hurwitz.stable import Setting, braid_move_identity, certify_theorem

G = dihedral(3)
c = order_two_class(G)
s = G.labels.index("s")
S = Setting(G, c)

r = certify_theorem(S, s, 2, 7, ranks=False)
for cell in r["table"]["cells"]:
    print("  n={n} i={i}: dim {dim}, Conf {conf_dim}, pullback rank {pullback_rank}".format(**cell))
for i, v in r["verdict"].items():
    print(f"degree {i}: onset {v['onset']} ({v['status']})")

print("kernel of the pullback on H^1 at n = 3, 5, 9:", [S.kernel_dim(n, s, 1) for n in (3, 5, 9)])
m = braid_move_identity(S, s, G.labels.index("r1s"), 1, 1, 3)
print(f"[s][r1s] against [r1s][conjugate]: equal on cohomology {m['cohomology_equal']}, "
      f"equal on cochains {m['cochain_equal']}")
