"""
Intersection numbers of dihedral orderings
==========================================

Counts binary trees that are planar for two orderings at once, first on
small examples, then for a whole matrix row.
"""

from tropint.orderings import canonicalize, enumerate_orderings
from tropint.trees import enumerate_planar, format_tree, link_graph, girth
from tropint.intersection import count_dp, fast_nonzero, polygon_decomposition, row_profile

# the five planar trees of the pentagon ordering
ident = (1, 2, 3, 4, 5)
for t in enumerate_planar(ident):
    print(format_tree(t))

# the "pentagram" ordering shares no tree with the pentagon
star = canonicalize((1, 3, 5, 2, 4))
print("I(pentagon, pentagram) =", count_dp(ident, star))

# n = 5: the link is the Petersen graph
g = link_graph(5)
print(g.number_of_nodes(), "vertices,", g.number_of_edges(), "edges, girth", girth(g))

###############################################################################
# Larger examples: the polygon rule splits the count into Catalan factors

a = (1, 2, 3, 4, 5, 6)
b = (1, 2, 3, 6, 5, 4)
dec = polygon_decomposition(a, b)
print("sides", dec.sides, "->", dec.value, "| dp:", count_dp(a, b))

# the cherry pruning test only answers zero / non-zero
print(fast_nonzero(a, (1, 3, 6, 5, 2, 4)), fast_nonzero(a, (1, 3, 5, 6, 4, 2)))

###############################################################################
# A full row: how often does each value occur?

for n in (5, 6, 7):
    prof = row_profile(n)
    print(n, len(enumerate_orderings(n)), "orderings;", dict(sorted(prof.items())))
