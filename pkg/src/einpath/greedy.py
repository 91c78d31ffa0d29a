"""Greedy contraction-order optimization with optional thermal sampling."""

import heapq
import itertools
import math
import warnings
from dataclasses import dataclass
from random import Random

from ._util import derive_seed
from .core import CostReport, EinExpr, SsaPath, cost, index_appearances, ssa_to_tree, tensor_size
from .errors import EinPathError

__all__ = ["GreedyConfig", "greedy", "sampled_greedy"]

BOLTZMANN_POOL = 32  # candidates considered per thermal selection

_SCORES = ("size_difference",)


@dataclass(frozen=True)
class GreedyConfig:
    """Knobs for the greedy optimizer.

    score picks the pair ranking heuristic; temperature > 0 switches pair
    selection to Boltzmann sampling over the current best candidates;
    samples > 1 repeats the whole run and keeps the cheapest tree.
    """

    score: str = "size_difference"
    temperature: float = 0.0
    samples: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.score not in _SCORES:
            raise EinPathError(f"unknown score heuristic '{self.score}'")
        if self.temperature < 0:
            raise EinPathError("temperature must be >= 0")
        if self.samples < 1:
            raise EinPathError("samples must be >= 1")


def _pop_valid(heap, legs):
    """Pop entries until one references two live terms; None when exhausted."""
    while heap:
        entry = heapq.heappop(heap)
        if entry[1] in legs and entry[2] in legs:
            return entry
    return None


def _thermal_pop(heap, legs, temperature, rng):
    """Boltzmann-sample one of the best live candidates, pushing back the rest."""
    pool = []
    while heap and len(pool) < BOLTZMANN_POOL:
        entry = heapq.heappop(heap)
        if entry[1] in legs and entry[2] in legs:
            pool.append(entry)
    if not pool:
        return None
    if len(pool) == 1:
        return pool[0]
    base = pool[0][0]
    weights = []
    for entry in pool:
        d = entry[0] - base
        weights.append(math.exp(-d / temperature) if d <= 700 * temperature else 0.0)
    r = rng.random() * sum(weights)
    chosen = 0
    acc = 0.0
    for k, w in enumerate(weights):
        acc += w
        if r < acc:
            chosen = k
            break
    entry = pool.pop(chosen)
    for other in pool:
        heapq.heappush(heap, other)
    return entry


def _greedy_path(network, temperature=0.0, rng=None):
    """Run one greedy pass; returns (ssa pairs, heap pushes).

    Terms carry per-index appearance counts so hyperedges survive until
    their last two carriers meet. Candidate pairs live in a heap keyed by
    (score, smaller id, larger id); stale entries are dropped lazily when
    popped. With no sharing pair left, the two smallest terms are contracted
    (outer products only happen between finished components).
    """
    appear = index_appearances(network)
    extents = network.extents
    legs = {}
    sizes = {}
    carriers = {}
    for sig in network.tensors:
        legs[sig.id] = dict.fromkeys(sig.indices, 1)
        sizes[sig.id] = tensor_size(sig.indices, extents)
        for ix in sig.indices:
            carriers.setdefault(ix, set()).add(sig.id)

    def merge(i, j):
        counts = dict(legs[i])
        for ix, c in legs[j].items():
            counts[ix] = counts.get(ix, 0) + c
        kept = {}
        size = 1
        for ix, c in counts.items():
            if c < appear[ix]:
                kept[ix] = c
                size *= extents[ix]
        return kept, size

    heap = []
    tick = itertools.count()
    pushes = 0

    def push(i, j):
        nonlocal pushes
        _, size = merge(i, j)
        score = size - sizes[i] - sizes[j]
        heapq.heappush(heap, (score, i, j, next(tick)))
        pushes += 1

    seen = set()
    for ix in sorted(carriers):
        for i, j in itertools.combinations(sorted(carriers[ix]), 2):
            if (i, j) not in seen:
                seen.add((i, j))
                push(i, j)

    pairs = []
    next_id = len(network.tensors)
    while len(legs) > 1:
        if temperature > 0:
            entry = _thermal_pop(heap, legs, temperature, rng)
        else:
            entry = _pop_valid(heap, legs)
        if entry is None:
            # disconnected remainder: fold the two smallest results together
            i, j = sorted(legs, key=lambda t: (sizes[t], t))[:2]
            if i > j:
                i, j = j, i
        else:
            _, i, j, _ = entry
        kept, size = merge(i, j)
        k = next_id
        next_id += 1
        for t in (i, j):
            for ix in legs[t]:
                group = carriers[ix]
                group.discard(t)
                if not group:
                    del carriers[ix]
            del legs[t]
            del sizes[t]
        legs[k] = kept
        sizes[k] = size
        neighbours = set()
        for ix in kept:
            # an output index can outlive every other carrier
            carriers.setdefault(ix, set()).add(k)
            neighbours |= carriers[ix]
        neighbours.discard(k)
        for b in sorted(neighbours):
            push(b, k)
        pairs.append((i, j))
    return pairs, pushes


def _single_run(network, config, sample):
    rng = None
    if config.temperature > 0:
        rng = Random(derive_seed(config.seed, sample))
    pairs, pushes = _greedy_path(network, temperature=config.temperature, rng=rng)
    tree = ssa_to_tree(SsaPath(pairs), network)
    return tree, cost(tree, network.extents), pushes


def greedy(network, config=None):
    """Greedily contract the best-scoring pair until one tensor remains.

    The default heuristic scores a pair by the size of its result minus the
    sizes of both operands (lower is better). Returns the tree and its cost.
    """
    config = config or GreedyConfig()
    if len(network.tensors) == 1:
        leaf = EinExpr.leaf(network.tensors[0])
        return leaf, CostReport(0, 0, 0)
    tree, report, _ = _single_run(network, config, 0)
    return tree, report


def _sample_runs(network, config):
    """Yield (sample, tree, report) for each sampled greedy pass."""
    for sample in range(config.samples):
        tree, report, _ = _single_run(network, config, sample)
        yield sample, tree, report


def sampled_greedy(network, config=None):
    """Repeat thermal greedy passes and keep the minimum-flops tree.

    Each sample runs with a sub-seed derived from (seed, sample), so results
    do not depend on evaluation order. With temperature 0 every sample is
    identical; that degenerate combination warns and collapses to one pass.
    """
    config = config or GreedyConfig()
    if len(network.tensors) == 1:
        leaf = EinExpr.leaf(network.tensors[0])
        return leaf, CostReport(0, 0, 0)
    if config.temperature == 0 and config.samples > 1:
        warnings.warn("temperature=0 makes all greedy samples identical", stacklevel=2)
        config = GreedyConfig(score=config.score, temperature=0.0, samples=1, seed=config.seed)
    best = None
    for sample, tree, report in _sample_runs(network, config):
        if best is None or report.flops < best[2].flops:
            best = (sample, tree, report)
    return best[1], best[2]
