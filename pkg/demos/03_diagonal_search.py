"""
Diagonal submatrices
====================

A set of row orderings and column orderings whose intersection matrix is
diagonal up to a permutation is a clique in the compatibility graph.
"""

import time

from tropint.intersection import build_matrix
from tropint.search import max_permutation_submatrix, symmetric_degree, verify_witness
from tropint.witnesses import N6_COLS, N6_ROWS, N7_COLS, N7_ROWS

B6 = build_matrix(6, "binary")
t = time.time()
w = max_permutation_submatrix(B6)
print(f"n=6: largest witness {w.size} ({w.nodes} search nodes, {time.time() - t:.2f}s)")
cat = B6.catalog
for r, c in w.pairs():
    print("  ", cat.orderings[r], cat.orderings[c])

# a known pair of sets from the literature
print(verify_witness(N6_ROWS, N6_COLS).submatrix)
rep = verify_witness(N7_ROWS, N7_COLS)
print("n=7 witness: permutation", rep.is_permutation, "rank", rep.rank, "entries", sorted(set(rep.diagonal_values)))

# when the row and column sets must coincide the answer is much smaller
for n in (5, 6, 7):
    print("symmetric", n, symmetric_degree(n)[0])

###############################################################################
# n = 7 under a budget: the result is only a lower bound (about a minute)

B7 = build_matrix(7, "binary")
w7 = max_permutation_submatrix(B7, budget=200_000)
print("n=7 budgeted:", w7.size, "lower bound" if w7.lower_bound else "exact")
