"""Recursive hypergraph-partitioning optimizer.

The network is bisected into two balanced tensor groups cutting as little
index weight as possible, each side is solved as its own sub-network (cut
indices become open indices), and the two results meet in a final join.
Small sides are handed to a leaf optimizer.
"""

import dataclasses
import heapq
import math
from dataclasses import dataclass
from random import Random

from ._util import derive_seed
from .core import SsaPath, TensorNetwork, TensorSig, cost, ssa_to_tree, tree_to_ssa
from .errors import EinPathError
from .greedy import GreedyConfig, greedy
from .search import SearchConfig, exhaustive_dfs

__all__ = ["Hypergraph", "PartitionConfig", "build_hypergraph", "bisect", "partition_optimize"]

ANCHOR = -1  # virtual vertex holding the output indices; it never moves

_RESTARTS = 8

_LEAVES = ("exhaustive_dfs", "greedy")


@dataclass(frozen=True)
class PartitionConfig:
    """Knobs for bisection and the recursion around it."""

    imbalance: float = 0.2
    cutoff: int = 8
    fm_passes: int = 10
    leaf_optimizer: str = "exhaustive_dfs"
    seed: int = 0

    def __post_init__(self):
        if not 0 <= self.imbalance < 0.5:
            raise EinPathError("imbalance must lie in [0, 0.5)")
        if self.cutoff < 2:
            raise EinPathError("cutoff must be >= 2")
        if self.fm_passes < 1:
            raise EinPathError("fm_passes must be >= 1")
        if self.leaf_optimizer not in _LEAVES:
            raise EinPathError(f"unknown leaf optimizer '{self.leaf_optimizer}'")


@dataclass(frozen=True)
class Hypergraph:
    """One vertex per tensor; every index is a hyperedge weighted log2(extent)."""

    vertices: tuple
    edges: dict
    weights: dict


def build_hypergraph(network):
    """Hypergraph of a network for bisection.

    Output indices additionally attach to a virtual anchor vertex (id -1)
    pinned to side A, so tensors carrying output indices get pulled toward
    one block instead of every cut through them being free.
    """
    incidence = {}
    for sig in network.tensors:
        for ix in sig.indices:
            incidence.setdefault(ix, set()).add(sig.id)
    for ix in network.output:
        incidence[ix].add(ANCHOR)
    return Hypergraph(
        vertices=tuple(range(len(network.tensors))),
        edges={ix: frozenset(vs) for ix, vs in sorted(incidence.items())},
        weights={ix: math.log2(network.extents[ix]) for ix in sorted(incidence)},
    )


def _balance_bounds(n, imbalance):
    half = -(-n // 2)
    lo = max(1, math.floor(half * (1 - imbalance)))
    hi = min(n - 1, math.ceil(half * (1 + imbalance)))
    return lo, hi


def cut_weight(h, part_a):
    """Total weight of edges spanning the two sides (anchor sits in part A)."""
    total = 0.0
    for ix in sorted(h.edges):
        in_a = in_b = False
        for v in h.edges[ix]:
            if v == ANCHOR or v in part_a:
                in_a = True
            else:
                in_b = True
        if in_a and in_b:
            total += h.weights[ix]
    return total


def _gain(h, incident, counts, side, v):
    g = 0.0
    s = side[v]
    for ix in incident[v]:
        c = counts[ix]
        if c[s] == 1:
            if c[1 - s] >= 1:
                g += h.weights[ix]
        elif c[1 - s] == 0:
            g -= h.weights[ix]
    return g


def _fm_pass(h, incident, side, sizes, lo, hi):
    """One refinement pass: greedily move unlocked vertices (each at most
    once) by gain under the balance bounds, then keep the best prefix.
    Returns the achieved cut reduction (>= 0)."""
    counts = {}
    for ix, members in h.edges.items():
        c = [0, 0]
        for v in members:
            c[0 if v == ANCHOR else side[v]] += 1
        counts[ix] = c
    heaps = ([], [])
    gen = {}
    for v in sorted(side):
        gen[v] = 0
        heapq.heappush(heaps[side[v]], (-_gain(h, incident, counts, side, v), v, 0))
    locked = set()
    moves = []
    cum = 0.0
    best_cum = 0.0
    best_len = 0
    n = len(side)
    while True:
        tops = [None, None]
        for s in (0, 1):
            heap = heaps[s]
            while heap:
                negg, v, g = heap[0]
                if v in locked or g != gen[v] or side[v] != s:
                    heapq.heappop(heap)
                    continue
                tops[s] = (negg, v)
                break
            if sizes[s] < max(lo + 1, n - hi + 1):
                tops[s] = None  # moving out of s would break balance
        if tops[0] is None and tops[1] is None:
            break
        if tops[1] is None or (tops[0] is not None and tops[0] < tops[1]):
            s = 0
        else:
            s = 1
        negg, v = tops[s]
        heapq.heappop(heaps[s])
        locked.add(v)
        t = 1 - s
        side[v] = t
        sizes[s] -= 1
        sizes[t] += 1
        touched = set()
        for ix in incident[v]:
            counts[ix][s] -= 1
            counts[ix][t] += 1
            touched.update(h.edges[ix])
        cum += -negg
        moves.append(v)
        if cum > best_cum + 1e-12:
            best_cum = cum
            best_len = len(moves)
        for u in sorted(touched):
            if u == ANCHOR or u in locked or u == v:
                continue
            gen[u] += 1
            heapq.heappush(
                heaps[side[u]], (-_gain(h, incident, counts, side, u), u, gen[u])
            )
    for v in moves[best_len:]:
        s = side[v]
        side[v] = 1 - s
        sizes[s] -= 1
        sizes[1 - s] += 1
    return best_cum


def bisect(h, config=None):
    """Split a hypergraph in two balanced halves with a small cut.

    Randomized starting assignments (derived from config.seed) are refined
    by up to fm_passes Fiduccia-Mattheyses-style passes each; a pass never
    increases the cut. Returns (part_a, part_b, cut_weight); the virtual
    output anchor counts as part A when weighing cuts.
    """
    config = config or PartitionConfig()
    vertices = sorted(h.vertices)
    n = len(vertices)
    if n < 2:
        raise EinPathError("bisection needs at least two vertices")
    lo, hi = _balance_bounds(n, config.imbalance)
    incident = {v: [] for v in vertices}
    for ix in sorted(h.edges):
        for v in h.edges[ix]:
            if v != ANCHOR:
                incident[v].append(ix)
    best = None
    for restart in range(_RESTARTS):
        rng = Random(derive_seed(config.seed, restart))
        perm = vertices[:]
        rng.shuffle(perm)
        size_a = rng.randint(max(lo, n - hi), min(hi, n - lo))
        side = {v: 0 if pos < size_a else 1 for pos, v in enumerate(perm)}
        sizes = [size_a, n - size_a]
        for _ in range(config.fm_passes):
            if _fm_pass(h, incident, side, sizes, lo, hi) <= 0:
                break
        part_a = frozenset(v for v in vertices if side[v] == 0)
        weight = cut_weight(h, part_a)
        if best is None or weight < best[0] - 1e-12:
            best = (weight, part_a)
    weight, part_a = best
    part_b = frozenset(vertices) - part_a
    return part_a, part_b, weight


def _subnetwork(network, members, carriers, out_set):
    """Sub-network over `members`; indices reaching outside become output."""
    inside = set(members)
    used = []
    seen = set()
    for pid in members:
        for ix in network.tensors[pid].indices:
            if ix not in seen:
                seen.add(ix)
                used.append(ix)
    sub_output = tuple(
        ix for ix in sorted(seen) if ix in out_set or carriers[ix] - inside
    )
    tensors = tuple(
        TensorSig(pos, network.tensors[pid].indices) for pos, pid in enumerate(members)
    )
    extents = {ix: network.extents[ix] for ix in seen}
    return TensorNetwork(tensors, extents, sub_output)


def _leaf_pairs(network, config):
    if len(network.tensors) == 1:
        return []
    if config.leaf_optimizer == "greedy":
        tree, _ = greedy(network, GreedyConfig())
    else:
        tree, _, _ = exhaustive_dfs(network, SearchConfig())
    return list(tree_to_ssa(tree))


def _partition_pairs(network, seed, depth, config):
    n = len(network.tensors)
    if n <= config.cutoff:
        return _leaf_pairs(network, config)
    h = build_hypergraph(network)
    part_a, part_b, _ = bisect(h, dataclasses.replace(config, seed=seed))
    sides = sorted(
        [sorted(part_a), sorted(part_b)], key=lambda s: (len(s), s[0])
    )
    carriers = {}
    for sig in network.tensors:
        for ix in sig.indices:
            carriers.setdefault(ix, set()).add(sig.id)
    out_set = set(network.output)
    pairs = []
    roots = []
    for tag, members in enumerate(sides):
        sub = _subnetwork(network, members, carriers, out_set)
        sub_pairs = _partition_pairs(sub, derive_seed(seed, depth, tag), depth + 1, config)
        trans = dict(enumerate(members))
        m = len(members)
        root = trans[0] if m == 1 else None
        for j, (x, y) in enumerate(sub_pairs):
            pairs.append((trans[x], trans[y]))
            root = trans[m + j] = n + len(pairs) - 1
        roots.append(root)
    pairs.append((roots[0], roots[1]))
    return pairs


def partition_optimize(network, config=None):
    """Contract by recursive balanced bisection of the index hypergraph.

    Cut indices become open indices of the two sub-problems, which recurse
    until at most `cutoff` tensors remain and the leaf optimizer takes over;
    the root join then sums exactly the cut indices not in the output.
    Child seeds derive from (seed, depth, side). Returns (tree, cost report).
    """
    config = config or PartitionConfig()
    pairs = _partition_pairs(network, config.seed, 0, config)
    if not pairs:
        from .core import EinExpr

        leaf = EinExpr.leaf(network.tensors[0])
        return leaf, cost(leaf, network.extents)
    tree = ssa_to_tree(SsaPath(pairs), network)
    return tree, cost(tree, network.extents)
