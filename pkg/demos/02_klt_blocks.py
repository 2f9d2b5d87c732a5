"""
KLT ordering sets
=================

The two KLT families meet in a block-diagonal pattern.  Blocks are
labelled by which labels sit in the first half of the A-words.
"""

import numpy as np

from tropint.intersection import count_dp
from tropint.klt import block_partition, block_density_exact, block_density_formula, klt_sets

k = klt_sets(6)
print("m =", k.m)
for a, b in zip(k.words_a, k.words_b):
    print(a, b)

# full (n-3)! x (n-3)! matrix, ordered block by block
n = 7
part = block_partition(n)
rows = [w for blk in part.blocks for w in blk.words_a]
cols = [w for blk in part.blocks for w in blk.words_b]
M = np.array([[count_dp(a, b) for b in cols] for a in rows])
print(f"n={n}: {len(part.blocks)} blocks of size {part.d}")
print((M != 0).astype(int))

# every block is equally dense; the closed form agrees for n >= 7
for n in (7, 8, 9):
    print(n, block_density_exact(n), block_density_formula(n))
