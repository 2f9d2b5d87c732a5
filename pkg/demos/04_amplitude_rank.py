"""
Amplitude matrix from the scattering equations
==============================================

Exact tree sums give |m(a, b)|; solving the scattering equations gives the
same matrix as a Gram product of (n-3)! vectors, hence its low rank.
"""

import math

import numpy as np

from tropint.amplitudes import amplitude_unsigned, sample_mandelstam
from tropint.intersection import build_matrix
from tropint.orderings import enumerate_orderings
from tropint.scattering import (exact_unsigned_matrix, gram_matrix, sign_inference,
                                solve_scattering, zero_pattern)

n, seed = 5, 7
kin = sample_mandelstam(n, seed)
print(kin.as_float())

sol = solve_scattering(kin)
print(len(sol.solutions), "solutions, max residual", sol.max_residual)

cat = enumerate_orderings(n)
G = gram_matrix(sol, cat)
sv = np.linalg.svd(G.entries, compute_uv=False)
print("singular values / sigma_1:", np.round(sv / sv[0], 14))

# zeros of the amplitude matrix are exactly the zeros of I(a, b)
print("zero pattern matches:", (zero_pattern(G.entries) == build_matrix(n, "binary").bits).all())

exact = exact_unsigned_matrix(kin, [o.labels for o in cat])
inf = sign_inference(G, exact)
print("worst relative mismatch", inf.max_rel_mismatch, "| exact rank", inf.exact_rank,
      "| bound", math.factorial(n - 3))
print(inf.signs)

a, b = cat.orderings[0], cat.orderings[1]
print(a, b, amplitude_unsigned(kin, a, b).value, G.entries[0, 1])
