"""Connected components of dihedral Hurwitz spaces as braid orbits.

For D6 with its three reflections, tuples of length n are grouped into orbits
under the braid moves (a, b) -> (b, b^-1 a b).  Orbits made of generating tuples
are the connected components; each carries its boundary monodromy.
"""

from hurwitz.braids import enumerate_orbits, predicted_component_count
from hurwitz.groups import AbelianShape, dihedral, order_two_class, semidirect_inversion


def show(G, c, shape, n_max):
    print(f"{G.name}: class of size {len(c)}")
    for n in range(1, n_max + 1):
        table = enumerate_orbits(G, c, n, "generating")
        per_g = {G.label(g): len(table.orbits_with_monodromy(g)) for g in range(G.order)}
        per_g = {k: v for k, v in per_g.items() if v}
        g = c.members[0]
        print(f"  n={n}: {table.count} components {per_g}; "
              f"large-n count for {G.label(g)}: {predicted_component_count(shape, G, n, g)}")


G = dihedral(3)
show(G, order_two_class(G), AbelianShape((3,)), 8)

# With H = Z/3 x Z/3 the wedge square has order 3, so matching-parity levels
# eventually carry three components per reflection.
H = semidirect_inversion(AbelianShape((3, 3)))
show(H, order_two_class(H), AbelianShape((3, 3)), 6)
