"""Published diagonal-submatrix witnesses, as plain label tuples."""

N5_SYMMETRIC = ((1, 2, 3, 4, 5), (1, 3, 5, 2, 4))

N6_ROWS = ((1, 2, 3, 4, 5, 6), (1, 2, 6, 3, 4, 5), (1, 5, 3, 4, 2, 6), (1, 5, 4, 2, 3, 6))
N6_COLS = ((1, 3, 2, 5, 6, 4), (1, 2, 5, 3, 6, 4), (1, 3, 5, 2, 6, 4), (1, 3, 6, 5, 2, 4))

N7_ROWS = (
    (1, 2, 3, 4, 5, 6, 7), (1, 5, 6, 4, 3, 2, 7), (1, 3, 5, 4, 6, 2, 7), (1, 3, 4, 2, 6, 7, 5),
    (1, 2, 7, 6, 5, 4, 3), (1, 5, 3, 4, 2, 6, 7), (1, 2, 7, 3, 4, 5, 6), (1, 2, 7, 6, 4, 5, 3),
    (1, 3, 2, 4, 6, 5, 7), (1, 5, 3, 4, 7, 2, 6), (1, 3, 2, 4, 6, 7, 5), (1, 2, 3, 4, 7, 5, 6),
    (1, 2, 6, 4, 3, 5, 7), (1, 5, 7, 3, 4, 2, 6),
)
N7_COLS = (
    (1, 4, 5, 2, 3, 6, 7), (1, 4, 6, 3, 7, 2, 5), (1, 3, 6, 2, 5, 4, 7), (1, 3, 6, 2, 5, 7, 4),
    (1, 3, 6, 5, 2, 7, 4), (1, 4, 2, 5, 3, 6, 7), (1, 4, 5, 2, 7, 3, 6), (1, 2, 5, 3, 6, 7, 4),
    (1, 3, 6, 5, 2, 4, 7), (1, 4, 7, 2, 5, 3, 6), (1, 4, 7, 6, 3, 2, 5), (1, 4, 7, 5, 2, 3, 6),
    (1, 2, 5, 7, 3, 6, 4), (1, 4, 2, 5, 7, 3, 6),
)
