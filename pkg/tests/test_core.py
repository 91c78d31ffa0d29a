from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from conftest import EQUIVALENT_PAIRS, WORKED_COST, WORKED_HEADS, WORKED_PAIRS
from einpath import (
    CostReport,
    EinExpr,
    InvalidContractionError,
    MalformedPathError,
    MissingExtentError,
    NetworkValidationError,
    SsaPath,
    TensorNetwork,
    TensorSig,
    TraceError,
    UnsupportedArityError,
    cost,
    index_appearances,
    intermediates_equal,
    naive,
    parse_einsum,
    ssa_to_tree,
    summed_indices,
    tensor_size,
    tree_to_ssa,
    validate_tree,
)
from einpath.core import contraction_flops


def test_worked_ordering_cost(closed6):
    tree = ssa_to_tree(SsaPath(WORKED_PAIRS), closed6)
    report = cost(tree, closed6.extents)
    assert (report.flops, report.peak_size, report.write_volume) == WORKED_COST


def test_worked_ordering_intermediates(closed6):
    tree = ssa_to_tree(SsaPath(WORKED_PAIRS), closed6)
    heads = Counter(node.head for node in tree.branches())
    # the four named intermediates plus the scalar root
    assert heads == Counter(WORKED_HEADS) + Counter([frozenset()])


@pytest.mark.parametrize("pairs", EQUIVALENT_PAIRS[1:], ids=range(1, 6))
def test_equivalent_orderings(closed6, pairs):
    worked = ssa_to_tree(SsaPath(WORKED_PAIRS), closed6)
    other = ssa_to_tree(SsaPath(pairs), closed6)
    assert intermediates_equal(worked, other)
    assert cost(other, closed6.extents) == cost(worked, closed6.extents)


def test_summed_indices(closed6):
    tree = ssa_to_tree(SsaPath(WORKED_PAIRS), closed6)
    summed = [summed_indices(node) for node in tree.branches()]
    assert Counter(summed) == Counter(
        [
            frozenset("m"),
            frozenset("o"),
            frozenset("j"),
            frozenset("pk"),
            frozenset("inl"),
        ]
    )
    assert summed_indices(tree.args[0]) in summed
    leaf = next(tree.leaves())
    assert summed_indices(leaf) == frozenset()


def test_index_appearances(closed6):
    appear = index_appearances(closed6)
    assert appear == {ix: 2 for ix in "imjpknlo"}
    open_net = parse_einsum("ij,jk->ik", {"i": 2, "j": 3, "k": 4})
    assert index_appearances(open_net) == {"i": 2, "j": 2, "k": 2}


def test_tensor_size():
    extents = {"i": 2, "j": 3, "k": 4}
    assert tensor_size(frozenset("ik"), extents) == 8
    assert tensor_size(frozenset(), extents) == 1
    with pytest.raises(MissingExtentError):
        tensor_size(frozenset("iz"), extents)


def test_contraction_flops():
    extents = {"i": 2, "j": 3, "k": 4}
    assert contraction_flops("ij", "jk", "ik", extents) == 24
    # the symmetric difference must survive and nothing beyond the union may
    with pytest.raises(InvalidContractionError):
        contraction_flops("ij", "jk", "i", extents)
    with pytest.raises(InvalidContractionError):
        contraction_flops("ij", "jk", "ikz", extents)


def test_tree_to_ssa_round_trip(closed6):
    tree = ssa_to_tree(SsaPath(WORKED_PAIRS), closed6)
    assert tree_to_ssa(tree).pairs == WORKED_PAIRS
    again = ssa_to_tree(tree_to_ssa(tree), closed6)
    assert intermediates_equal(tree, again)


def test_naive_single_node(closed6):
    chain = naive(closed6)
    assert len(chain.args) == len(closed6.tensors)
    assert chain.head == frozenset()
    # an n-ary node is costed as a left fold, so the equivalent binary
    # left-deep chain must cost exactly the same
    left_deep = ssa_to_tree(SsaPath(((0, 1), (6, 2), (7, 3), (8, 4), (9, 5))), closed6)
    assert cost(chain, closed6.extents).flops == cost(left_deep, closed6.extents).flops
    with pytest.raises(UnsupportedArityError):
        tree_to_ssa(chain)


def test_naive_single_tensor():
    net = parse_einsum("ij->ij", {"i": 2, "j": 2})
    leaf = naive(net)
    assert leaf.is_leaf
    assert cost(leaf, net.extents) == CostReport(0, 0, 0)


def test_einexpr_leaf_xor_branch():
    with pytest.raises(InvalidContractionError):
        EinExpr(head=frozenset("i"))
    with pytest.raises(InvalidContractionError):
        EinExpr(head=frozenset("i"), args=(EinExpr.leaf(TensorSig(0, "i")),), leaf_id=0)
    leaf = EinExpr.leaf(TensorSig(3, ("i", "j")))
    assert leaf.is_leaf and leaf.leaf_id == 3 and leaf.head == frozenset("ij")


def test_ssa_path_errors(closed6):
    with pytest.raises(MalformedPathError):
        ssa_to_tree(SsaPath(((0, 0),)), closed6)
    with pytest.raises(MalformedPathError):
        ssa_to_tree(SsaPath(((0, 99),)), closed6)
    with pytest.raises(MalformedPathError):  # id 0 already consumed
        ssa_to_tree(SsaPath(((0, 1), (0, 2), (6, 7), (8, 3), (9, 4))), closed6)
    with pytest.raises(MalformedPathError):  # too short for a full contraction
        ssa_to_tree(SsaPath(((0, 1), (6, 2))), closed6)


def test_validate_tree_catches_bad_head(closed6):
    tree = ssa_to_tree(SsaPath(WORKED_PAIRS), closed6)
    validate_tree(tree, closed6)
    bad = EinExpr(head=frozenset("i"), args=tree.args)
    with pytest.raises(InvalidContractionError):
        validate_tree(bad, closed6)


def test_network_validation():
    with pytest.raises(NetworkValidationError):
        TensorNetwork((), {}, ())
    with pytest.raises(NetworkValidationError):  # ids must be 0..n-1 in order
        TensorNetwork((TensorSig(1, ("i",)),), {"i": 2}, ("i",))
    with pytest.raises(NetworkValidationError):  # missing extent
        TensorNetwork((TensorSig(0, ("i",)),), {}, ("i",))
    with pytest.raises(NetworkValidationError):  # extent for unknown index
        TensorNetwork((TensorSig(0, ("i",)),), {"i": 2, "z": 2}, ("i",))
    with pytest.raises(NetworkValidationError):  # dangling index
        TensorNetwork((TensorSig(0, ("i",)),), {"i": 2}, ())
    with pytest.raises(NetworkValidationError):  # output repeats
        TensorNetwork((TensorSig(0, ("i",)),), {"i": 2}, ("i", "i"))
    with pytest.raises(NetworkValidationError):  # output not on any tensor
        TensorNetwork((TensorSig(0, ("i",)),), {"i": 2}, ("z",))
    with pytest.raises(NetworkValidationError):  # extents are positive ints
        TensorNetwork((TensorSig(0, ("i",)),), {"i": 0}, ("i",))
    with pytest.raises(TraceError):
        TensorSig(0, ("i", "i"))


def test_intermediates_equal_negative(closed6):
    worked = ssa_to_tree(SsaPath(WORKED_PAIRS), closed6)
    chain = ssa_to_tree(SsaPath(((0, 1), (6, 2), (7, 3), (8, 4), (9, 5))), closed6)
    assert not intermediates_equal(worked, chain)


def _random_pairs(rng, n):
    alive = list(range(n))
    pairs = []
    nxt = n
    while len(alive) > 1:
        a = alive.pop(rng.randrange(len(alive)))
        b = alive.pop(rng.randrange(len(alive)))
        pairs.append((a, b))
        alive.append(nxt)
        nxt += 1
    return tuple(pairs)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 10**9), n=st.integers(2, 9))
def test_ssa_round_trip_property(seed, n):
    from random import Random

    from einpath import GenConfig, generate

    rng = Random(seed)
    net = generate(GenConfig(n_tensors=n, n_open=rng.randrange(3), extent_max=4, seed=seed))
    tree = ssa_to_tree(SsaPath(_random_pairs(rng, n)), net)
    validate_tree(tree, net)
    again = ssa_to_tree(tree_to_ssa(tree), net)
    assert intermediates_equal(tree, again)
    assert cost(again, net.extents) == cost(tree, net.extents)
