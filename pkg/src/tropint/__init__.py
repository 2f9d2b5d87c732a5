"""Intersection numbers of planar phylogenetic trees, KLT blocks and the numbers around them."""
from .orderings import Ordering, OrderingCatalog, canonicalize, enumerate_orderings, parse_ordering
from .trees import Tree, enumerate_all_trees, enumerate_planar
from .intersection import (
    BinaryMatrix,
    IntersectionMatrix,
    build_matrix,
    count_dp,
    fast_nonzero,
    polygon_decomposition,
)
from .klt import block_partition, klt_sets
from .amplitudes import MandelstamMatrix, amplitude_unsigned, sample_mandelstam
from .search import max_permutation_submatrix, symmetric_degree, verify_witness
from .analytics import super_catalan

__version__ = "0.1.0"
