"""Tensor networks and contraction expression trees.

A tensor network is a hypergraph: vertices are tensors, edges are indices,
and an index shared by three or more tensors is a hyperedge. A contraction
order is a binary tree over the tensors. Every node records the index set of
its result (its "head"); an index is summed at the node where the last of
its carriers meet, unless it belongs to the network output, in which case it
is never summed.
"""

import itertools
from collections import Counter
from dataclasses import dataclass, field

from .errors import (
    InvalidContractionError,
    MalformedPathError,
    MissingExtentError,
    NetworkValidationError,
    TraceError,
    UnsupportedArityError,
)

__all__ = [
    "Index",
    "TensorSig",
    "TensorNetwork",
    "EinExpr",
    "CostReport",
    "SsaPath",
    "tensor_size",
    "contraction_flops",
    "cost",
    "summed_indices",
    "naive",
    "tree_to_ssa",
    "ssa_to_tree",
    "intermediates_equal",
    "validate_tree",
    "index_appearances",
]


@dataclass(frozen=True)
class Index:
    """A named index with a positive integer extent."""

    name: str
    extent: int

    def __post_init__(self):
        if not isinstance(self.extent, int) or isinstance(self.extent, bool):
            raise NetworkValidationError(f"extents.{self.name}", "extent must be an integer")
        if self.extent < 1:
            raise NetworkValidationError(f"extents.{self.name}", "extent must be >= 1")


@dataclass(frozen=True)
class TensorSig:
    """A tensor's id and ordered index names (no data, just the signature)."""

    id: int
    indices: tuple

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(self.indices))
        seen = set()
        for ix in self.indices:
            if ix in seen:
                raise TraceError(
                    f"tensor {self.id} repeats index '{ix}'; internal traces are not supported"
                )
            seen.add(ix)


@dataclass(frozen=True)
class TensorNetwork:
    """A set of tensor signatures, an extents map and the output indices.

    Tensor ids must be exactly 0..n-1 in list order, so that SSA input ids,
    list positions and tensor ids all coincide.
    """

    tensors: tuple
    extents: dict
    output: tuple

    def __post_init__(self):
        object.__setattr__(self, "tensors", tuple(self.tensors))
        object.__setattr__(self, "output", tuple(self.output))
        if not self.tensors:
            raise NetworkValidationError("tensors", "network has no tensors")
        for pos, sig in enumerate(self.tensors):
            if sig.id != pos:
                raise NetworkValidationError(
                    f"tensors[{pos}].id", f"tensor ids must be 0..n-1 in order, got {sig.id}"
                )
        named = set()
        for sig in self.tensors:
            named.update(sig.indices)
        for ix in sorted(named):
            if ix not in self.extents:
                raise NetworkValidationError("extents", f"missing extent for index '{ix}'")
        for ix in self.extents:
            if ix not in named:
                raise NetworkValidationError(f"extents.{ix}", "extent for unknown index")
            Index(ix, self.extents[ix])
        out_seen = set()
        for k, ix in enumerate(self.output):
            if ix not in named:
                raise NetworkValidationError(f"output[{k}]", f"output index '{ix}' not on any tensor")
            if ix in out_seen:
                raise NetworkValidationError(f"output[{k}]", f"output index '{ix}' repeated")
            out_seen.add(ix)
        carriers = Counter()
        for sig in self.tensors:
            carriers.update(sig.indices)
        for pos, sig in enumerate(self.tensors):
            for k, ix in enumerate(sig.indices):
                if carriers[ix] == 1 and ix not in out_seen:
                    raise NetworkValidationError(
                        f"tensors[{pos}].indices[{k}]",
                        f"index '{ix}' appears once and is not in the output (dangling)",
                    )

    def index(self, name):
        if name not in self.extents:
            raise MissingExtentError(f"no extent recorded for index '{name}'")
        return Index(name, self.extents[name])

    def indices(self):
        """All indices of the network, sorted by name."""
        return tuple(Index(ix, self.extents[ix]) for ix in sorted(self.extents))


def index_appearances(network):
    """Count how many tensors carry each index, plus one if it is an output.

    An index is summed at a node exactly when the node's subtree accounts
    for all of these appearances.
    """
    appear = Counter()
    for sig in network.tensors:
        appear.update(sig.indices)
    for ix in network.output:
        appear[ix] += 1
    return dict(appear)


@dataclass(frozen=True)
class EinExpr:
    """A node of a contraction tree.

    Either a leaf (``leaf_id`` set, no args) standing for an input tensor,
    or a branch whose args are contracted together. ``head`` is the index
    set of the node's result.
    """

    head: frozenset
    args: tuple = field(default=(), repr=False)
    leaf_id: int = None

    def __post_init__(self):
        object.__setattr__(self, "head", frozenset(self.head))
        object.__setattr__(self, "args", tuple(self.args))
        if (self.leaf_id is None) == (not self.args):
            raise InvalidContractionError(
                "a node is either a leaf (leaf_id, no args) or a branch (args, no leaf_id)"
            )

    @classmethod
    def leaf(cls, sig):
        return cls(head=frozenset(sig.indices), leaf_id=sig.id)

    @property
    def is_leaf(self):
        return self.leaf_id is not None

    def leaves(self):
        """Yield leaf nodes, left to right (iterative, trees can be deep)."""
        stack = [self]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                yield node
            else:
                stack.extend(reversed(node.args))

    def branches(self):
        """Yield branch nodes in post-order (children before parents)."""
        stack = [(self, False)]
        while stack:
            node, done = stack.pop()
            if node.is_leaf:
                continue
            if done:
                yield node
            else:
                stack.append((node, True))
                stack.extend((a, False) for a in reversed(node.args))


def summed_indices(node):
    """Indices removed at this node: the union of child heads minus the head."""
    if node.is_leaf:
        return frozenset()
    gathered = frozenset().union(*(a.head for a in node.args))
    return gathered - node.head


def tensor_size(head, extents):
    """Number of entries of a tensor with the given index set."""
    size = 1
    for ix in head:
        try:
            size *= extents[ix]
        except KeyError:
            raise MissingExtentError(f"no extent recorded for index '{ix}'") from None
    return size


def contraction_flops(a, b, result, extents):
    """FLOP count of a pairwise contraction, one fused multiply-add per term.

    The count is the product of extents over the union of the operand heads.
    ``result`` is checked for consistency: it must lie between the symmetric
    difference (indices on one side only always survive) and the union.
    """
    a = frozenset(a)
    b = frozenset(b)
    result = frozenset(result)
    union = a | b
    if not (a ^ b) <= result <= union:
        raise InvalidContractionError(
            f"result head {sorted(result)} inconsistent with operands "
            f"{sorted(a)} and {sorted(b)}"
        )
    return tensor_size(union, extents)


def _fold_entries(node, extents):
    """Per-contraction (flops, head) entries for a branch node.

    Binary nodes give one entry. An n-ary node is costed as a left fold in
    arg order: fold intermediates keep an index while a later arg or the
    node's own head still needs it.
    """
    heads = [a.head for a in node.args]
    if len(heads) < 2:
        raise InvalidContractionError("branch nodes need at least two arguments")
    if len(heads) == 2:
        return [(tensor_size(heads[0] | heads[1], extents), node.head)]
    suffix = [frozenset()] * (len(heads) + 1)
    for i in range(len(heads) - 1, -1, -1):
        suffix[i] = suffix[i + 1] | heads[i]
    entries = []
    cur = heads[0]
    for i in range(1, len(heads)):
        union = cur | heads[i]
        entries.append((tensor_size(union, extents), union & (suffix[i + 1] | node.head)))
        cur = entries[-1][1]
    return entries


def cost(tree, extents):
    """Cost a contraction tree: total flops, peak intermediate size, write volume.

    flops counts one fused multiply-add per produced-and-accumulated term,
    i.e. the product over the union of the child heads at each contraction.
    peak_size is the largest intermediate produced; the root counts only when
    it has nonzero rank. write_volume sums the sizes of everything written,
    root included. All three are exact integers.
    """
    entries = []
    for node in tree.branches():
        entries.extend(_fold_entries(node, extents))
    flops = 0
    peak = 0
    write = 0
    last = len(entries) - 1
    for i, (f, head) in enumerate(entries):
        flops += f
        size = tensor_size(head, extents)
        write += size
        if i == last and not head:
            continue  # scalar root is not an intermediate
        peak = max(peak, size)
    return CostReport(flops=flops, peak_size=peak, write_volume=write)


@dataclass(frozen=True)
class CostReport:
    """Exact integer cost metrics for one contraction tree."""

    flops: int
    peak_size: int
    write_volume: int


@dataclass(frozen=True)
class SsaPath:
    """A contraction order as a flat list of SSA id pairs.

    Ids 0..n-1 are the input tensors in network order; each contraction
    appends a fresh id. Pairs keep the branch argument order.
    """

    pairs: tuple

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple((int(a), int(b)) for a, b in self.pairs))

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]


def naive(network):
    """The n-ary single-node tree contracting every tensor at once."""
    if len(network.tensors) == 1:
        return EinExpr.leaf(network.tensors[0])
    args = tuple(EinExpr.leaf(sig) for sig in network.tensors)
    return EinExpr(head=frozenset(network.output), args=args)


def tree_to_ssa(tree):
    """Serialize a binary tree to an SsaPath (post-order, left args first)."""
    leaf_ids = sorted(node.leaf_id for node in tree.leaves())
    n = len(leaf_ids)
    if leaf_ids != list(range(n)):
        raise MalformedPathError("tree leaf ids must be exactly 0..n-1")
    counter = itertools.count(n)
    pairs = []
    vals = []
    stack = [(tree, 0)]
    while stack:
        node, state = stack.pop()
        if node.is_leaf:
            vals.append(node.leaf_id)
            continue
        if len(node.args) != 2:
            raise UnsupportedArityError("only binary trees serialize to an SSA path")
        if state < 2:
            stack.append((node, state + 1))
            stack.append((node.args[state], 0))
        else:
            b = vals.pop()
            a = vals.pop()
            pairs.append((a, b))
            vals.append(next(counter))
    return SsaPath(tuple(pairs))


def ssa_to_tree(path, network):
    """Rebuild the expression tree for an SSA path over a network.

    Heads are recomputed from scratch with the appearance counts, so the
    result is valid by construction. The path must be a full contraction:
    n-1 pairs, every id consumed exactly once.
    """
    n = len(network.tensors)
    appear = index_appearances(network)
    alive = {}
    for sig in network.tensors:
        alive[sig.id] = (EinExpr.leaf(sig), Counter(sig.indices))
    next_id = n
    for step, pair in enumerate(path):
        try:
            a, b = pair
        except (TypeError, ValueError):
            raise MalformedPathError(f"pair {step} is not a pair: {pair!r}") from None
        for x in (a, b):
            if not isinstance(x, int) or not 0 <= x < next_id:
                raise MalformedPathError(f"pair {step} references unknown id {x}")
        if a == b:
            raise MalformedPathError(f"pair {step} contracts id {a} with itself")
        if a not in alive:
            raise MalformedPathError(f"pair {step} reuses consumed id {a}")
        if b not in alive:
            raise MalformedPathError(f"pair {step} reuses consumed id {b}")
        expr_a, counts_a = alive.pop(a)
        expr_b, counts_b = alive.pop(b)
        counts = counts_a + counts_b
        head = frozenset(ix for ix, c in counts.items() if c < appear[ix])
        for ix in counts.keys() - head:
            del counts[ix]
        alive[next_id] = (EinExpr(head=head, args=(expr_a, expr_b)), counts)
        next_id += 1
    if len(alive) != 1:
        raise MalformedPathError(
            f"path has {len(path)} pairs but a full contraction of {n} tensors needs {n - 1}"
        )
    (expr, _), = alive.values()
    return expr


def intermediates_equal(a, b):
    """Whether two trees produce the same multiset of intermediate index sets."""
    return Counter(n.head for n in a.branches()) == Counter(n.head for n in b.branches())


def validate_tree(tree, network):
    """Check a tree against its network; raises on any violated invariant.

    Verifies the leaf ids cover the tensors exactly once, every branch has
    at least two args, and every stored head matches the head recomputed
    from the appearance counts.
    """
    appear = index_appearances(network)
    n = len(network.tensors)
    vals = []
    stack = [(tree, False)]
    while stack:
        node, done = stack.pop()
        if node.is_leaf:
            if not 0 <= node.leaf_id < n:
                raise MalformedPathError(f"leaf id {node.leaf_id} outside 0..{n - 1}")
            sig = network.tensors[node.leaf_id]
            if node.head != frozenset(sig.indices):
                raise InvalidContractionError(
                    f"leaf {node.leaf_id} head {sorted(node.head)} does not match "
                    f"tensor indices {sorted(sig.indices)}"
                )
            vals.append(Counter(sig.indices))
            continue
        if not done:
            if len(node.args) < 2:
                raise InvalidContractionError("branch nodes need at least two arguments")
            stack.append((node, True))
            stack.extend((a, False) for a in reversed(node.args))
            continue
        counts = vals.pop()
        for _ in range(len(node.args) - 1):
            counts = counts + vals.pop()
        head = frozenset(ix for ix, c in counts.items() if c < appear[ix])
        if node.head != head:
            raise InvalidContractionError(
                f"branch head {sorted(node.head)} should be {sorted(head)}"
            )
        vals.append(counts)
    ids = sorted(node.leaf_id for node in tree.leaves())
    if ids != list(range(n)):
        raise MalformedPathError("tree must use every tensor exactly once")
