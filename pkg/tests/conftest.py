import pytest

from einpath import parse_einsum

# Closed six-tensor network used throughout: every index has extent 2 and
# joins exactly two tensors. Worked by hand below and in the docs.
EQUATION = "im,ijp,jkn,klp,mno,lo->"
EXTENTS = {ix: 2 for ix in "imjpknlo"}

# The five-step ordering worked out by hand: (0,4) sums m, (6,5) sums o,
# (1,2) sums j, (8,3) sums p and k, (7,9) sums i, n and l.
WORKED_PAIRS = ((0, 4), (6, 5), (1, 2), (8, 3), (7, 9))
WORKED_COST = (104, 16, 41)  # flops, peak_size, write_volume

# Other linearizations of the same tree: they schedule the same five
# contractions, so intermediates and costs must not change.
EQUIVALENT_PAIRS = (
    WORKED_PAIRS,
    ((0, 4), (1, 2), (6, 5), (7, 3), (8, 9)),
    ((0, 4), (1, 2), (7, 3), (6, 5), (9, 8)),
    ((1, 2), (6, 3), (0, 4), (8, 5), (9, 7)),
    ((1, 2), (0, 4), (6, 3), (7, 5), (9, 8)),
    ((1, 2), (0, 4), (7, 5), (6, 3), (8, 9)),
)

# Index sets of the four non-root intermediates of that tree.
WORKED_HEADS = (
    frozenset("ino"),
    frozenset("inl"),
    frozenset("ipkn"),
    frozenset("inl"),
)


@pytest.fixture
def closed6():
    return parse_einsum(EQUATION, EXTENTS)
