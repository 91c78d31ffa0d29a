"""Exhaustive contraction-order search.

Two implementations of the same optimum: a depth-first branch-and-bound that
recursively splits tensor subsets under a cost bound, memoizing each subset's
optimum, and a breadth-first best-tree-per-subset dynamic program with an
iteratively raised cost cap. Both avoid outer products unless the network is
disconnected and nothing else is left to contract (configurable).
"""

from collections import defaultdict
from dataclasses import dataclass

from .core import CostReport, EinExpr, SsaPath, cost, ssa_to_tree
from .errors import BudgetError, EinPathError
from .greedy import _greedy_path

__all__ = ["SearchConfig", "SearchStats", "exhaustive_dfs", "exhaustive_bfs"]

_METRICS = ("flops", "peak_size")

_MEMO_CAP = 1_000_000  # tabulated subsets kept per search
_SPINE_CAP = 13  # subset DP over disconnected component results
_CHUNK = 11  # index bits per precomputed size table


@dataclass(frozen=True)
class SearchConfig:
    """Shared knobs for both exhaustive searches.

    init_bound is "naive", "greedy" or an explicit positive metric value;
    it seeds the pruning bound (depth-first) or the starting cost cap
    (breadth-first). outer_products widens the space to all pair sequences.
    """

    metric: str = "flops"
    init_bound: object = "greedy"
    outer_products: bool = False

    def __post_init__(self):
        if self.metric not in _METRICS:
            raise EinPathError(f"unknown metric '{self.metric}'")
        ib = self.init_bound
        if isinstance(ib, bool) or not (ib in ("naive", "greedy") or isinstance(ib, int)):
            raise EinPathError("init_bound must be 'naive', 'greedy' or an integer")
        if isinstance(ib, int) and ib < 1:
            raise EinPathError("an explicit bound must be >= 1")


@dataclass
class SearchStats:
    """Counters for one search call; prunes never exceeds nodes_expanded."""

    nodes_expanded: int = 0
    prunes: int = 0
    best_cost: int = None


class _Space:
    """Bitmask view of a network: index bits, extents, carrier masks."""

    def __init__(self, network):
        names = sorted({ix for sig in network.tensors for ix in sig.indices})
        self.bit = {ix: i for i, ix in enumerate(names)}
        self.extents = [network.extents[ix] for ix in names]
        self.max_extent = max(self.extents, default=2)
        self.term_masks = []
        self.carriers = [0] * len(names)
        for pos, sig in enumerate(network.tensors):
            m = 0
            for ix in sig.indices:
                b = self.bit[ix]
                m |= 1 << b
                self.carriers[b] |= 1 << pos
            self.term_masks.append(m)
        self.out_mask = 0
        for ix in network.output:
            self.out_mask |= 1 << self.bit[ix]
        self._sizes = {0: 1}
        tables = []
        for lo in range(0, len(names), _CHUNK):
            part = self.extents[lo:lo + _CHUNK]
            tbl = [1] * (1 << len(part))
            for m in range(1, len(tbl)):
                b = m & -m
                tbl[m] = tbl[m ^ b] * part[b.bit_length() - 1]
            tables.append(tbl)
        self.size_tables = tables or [[1]]

    def size(self, mask):
        try:
            return self._sizes[mask]
        except KeyError:
            pass
        s = 1
        m = mask
        i = 0
        low = (1 << _CHUNK) - 1
        while m:
            s *= self.size_tables[i][m & low]
            m >>= _CHUNK
            i += 1
        self._sizes[mask] = s
        return s

    def head(self, leafmask, union):
        """Result indices of a subtree: kept while carried outside or output."""
        h = self.out_mask & union
        m = union & ~h
        while m:
            b = m & -m
            if self.carriers[b.bit_length() - 1] & ~leafmask:
                h |= b
            m ^= b
        return h


def _components(space, n):
    """Connected components (over shared indices) as tensor bitmasks."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for leafmask in space.carriers:
        first = None
        m = leafmask
        while m:
            b = m & -m
            pos = b.bit_length() - 1
            if first is None:
                first = pos
            else:
                parent[find(pos)] = find(first)
            m ^= b
    groups = defaultdict(int)
    for pos in range(n):
        groups[find(pos)] |= 1 << pos
    return sorted(groups.values(), key=lambda mask: mask & -mask)


def _chain_metric(space, n, metric):
    """Metric value of the naive left-fold chain, its pairs, and whether the
    chain stays inside the no-outer-product space (every step shares)."""
    pairs = []
    cur_ssa = 0
    cur_leaf = 1
    cur_mask = space.term_masks[0]
    value = 0
    shares = True
    for t in range(1, n):
        mb = space.term_masks[t]
        if not cur_mask & mb:
            shares = False
        union = cur_mask | mb
        cur_leaf |= 1 << t
        new_mask = space.head(cur_leaf, union)
        if metric == "flops":
            value += space.size(union)
        elif not (t == n - 1 and new_mask == 0):
            value = max(value, space.size(new_mask))
        pairs.append((cur_ssa, t))
        cur_ssa = n + t - 1
        cur_mask = new_mask
    return value, pairs, shares


def _metric_of(report, metric):
    return report.flops if metric == "flops" else report.peak_size


def _initial_bound(network, space, config):
    """Bound value plus an incumbent path achieving it, when one exists.

    greedy seeding takes the better of the greedy tree and the naive chain,
    so a greedy-seeded search never starts looser than a naive-seeded one.
    The chain can only serve as an incumbent when it avoids non-forced outer
    products; otherwise it would fall outside the search space.
    """
    n = len(network.tensors)
    naive_val, naive_pairs, chain_ok = _chain_metric(space, n, config.metric)
    if config.outer_products:
        chain_ok = True
    if config.init_bound == "naive":
        return naive_val, (naive_pairs if chain_ok else None)
    if config.init_bound == "greedy":
        pairs, _ = _greedy_path(network)
        report = cost(ssa_to_tree(SsaPath(pairs), network), network.extents)
        greedy_val = _metric_of(report, config.metric)
        if greedy_val <= naive_val:
            return greedy_val, pairs
        return naive_val, (naive_pairs if chain_ok else None)
    return config.init_bound, None


def _connected_masks(adjm, cap):
    """Every nonempty connected subset of the unit graph, as a set of index
    masks, or None when there are more than cap of them.

    Grows each subset from its lowest unit one frontier unit at a time; a
    frontier unit skipped at some step is banned below it, so every subset
    comes up exactly once."""
    u = len(adjm)
    adjbit = {1 << i: adjm[i] for i in range(u)}
    out = set()
    add = out.add
    for v in range(u):
        start = 1 << v
        above = ~(start | (start - 1))
        add(start)
        stack = [(start, adjm[v] & above, 0)]
        while stack:
            cur, frontier, banned = stack.pop()
            while frontier:
                w = frontier & -frontier
                frontier ^= w
                newcur = cur | w
                newfront = (frontier | (adjbit[w] & above)) & ~newcur & ~banned
                banned |= w
                if newfront:
                    stack.append((newcur, newfront, banned))
                add(newcur)
        if len(out) > cap:
            return None
    return out


# Why a tighter initial bound can only shrink the search: split candidates
# are enumerated in an order that does not depend on the bound, and a state's
# exact optimum is a property of the network alone. Every prune compares a
# bound-free quantity (admissible floor or exact child value) against
# min(bound, best value completed so far at this state), which by induction
# over the shared enumeration order is never smaller in the loosely seeded
# run, and a state that failed under the looser bound fails under the tighter
# one too. So the tightly seeded run visits a subset of the loose run's
# states and enumerates identical candidates at each, hence nodes_expanded
# with a greedy seed never exceeds nodes_expanded with a naive seed.


def _dfs_solve(space, items, metric, allow_outer, exclude_root_scalar, cap, stats):
    """Best tree over atomic units by memoized depth-first splitting.

    items are units of (leafmask, head mask, base value). Solving a unit
    subset tries every split into a side holding the lowest unit and its
    complement, both connected over shared head indices (every nonempty
    complement when outer products are allowed), recursing depth first under
    one global cost cap. A split is abandoned when an admissible floor (for
    flops: each side's final merge costs at least its head size and each
    unit is consumed once by a merge at least as large as it) reaches the
    bound. Returns a mapping like _capped_dp's, keyed by leafmask; the
    target key is absent when every tree in the space costs at least cap.
    """
    u = len(items)
    exts = [it[0] for it in items]
    heads = [it[1] for it in items]
    bases = [it[2] for it in items]
    if u == 1:
        return {exts[0]: (bases[0], heads[0], None)}, exts[0]
    target = (1 << u) - 1
    limit0 = float("inf") if cap is None else cap
    flops_metric = metric == "flops"
    size = space.size
    sp_head = space.head
    adjm = [0] * u
    for i in range(u):
        hi = heads[i]
        for j in range(i + 1, u):
            if hi & heads[j]:
                adjm[i] |= 1 << j
                adjm[j] |= 1 << i
    if not allow_outer:
        conn_set = _connected_masks(adjm, _MEMO_CAP)
        if conn_set is not None:
            is_conn = conn_set.__contains__
        else:
            # too many connected subsets to tabulate; check each complement
            def is_conn(mask):
                seen = mask & -mask
                front = adjm[seen.bit_length() - 1] & mask & ~seen
                while front:
                    seen |= front
                    grow = 0
                    f = front
                    while f:
                        b = f & -f
                        f ^= b
                        grow |= adjm[b.bit_length() - 1]
                    front = grow & mask & ~seen
                return seen == mask

    hsizes = [size(h) for h in heads]
    adjbit = {1 << i: adjm[i] for i in range(u)}
    meta = {}  # unit mask -> (head mask, head size, admissible floor, leafmask)
    for j in range(u):
        meta[1 << j] = (heads[j], hsizes[j], bases[j], exts[j])

    def info(s):
        rec = meta.get(s)
        if rec is not None:
            return rec
        e = hu = bsum = hsum = hmax = bmax = 0
        m = s
        while m:
            b = m & -m
            m ^= b
            j = b.bit_length() - 1
            e |= exts[j]
            hu |= heads[j]
            if flops_metric:
                bsum += bases[j]
                hj = hsizes[j]
                hsum += hj
                if hj > hmax:
                    hmax = hj
            elif bases[j] > bmax:
                bmax = bases[j]
        h = sp_head(e, hu)
        hs = size(h)
        if flops_metric:
            half = (hsum + 1) >> 1
            lb = hs if hs > half else half
            if hmax > lb:
                lb = hmax
            lb += bsum
        else:
            lb = hs if hs > bmax else bmax
        rec = (h, hs, lb, e)
        meta[s] = rec
        return rec

    def sides_of(s):
        """Split sides of s holding its lowest unit, in a fixed grow order."""
        v0 = s & -s
        rest = s ^ v0
        out = []
        if allow_outer:
            sub = (rest - 1) & rest
            while True:
                out.append(v0 | sub)
                if sub == 0:
                    return out
                sub = (sub - 1) & rest
        conn_has = is_conn
        adj = adjbit
        append = out.append
        if conn_has(rest):
            append(v0)
        # grow the side one frontier unit at a time; a unit skipped here is
        # banned below so each connected side comes up exactly once
        stack = [(v0, adjbit[v0] & rest, 0)]
        pop = stack.pop
        push = stack.append
        while stack:
            cur, frontier, banned = pop()
            while frontier:
                w = frontier & -frontier
                frontier ^= w
                newcur = cur | w
                newfront = (frontier | (adj[w] & s)) & ~newcur & ~banned
                banned |= w
                if newfront:
                    push((newcur, newfront, banned))
                comp = s ^ newcur
                if comp and conn_has(comp):
                    append(newcur)
        return out

    solved = {}
    choice = {}
    failed = set()
    for j in range(u):
        if bases[j] < limit0:
            solved[1 << j] = bases[j]
        else:
            failed.add(1 << j)
    nodes = prunes = 0

    tables = space.size_tables
    low = (1 << _CHUNK) - 1

    def solve(s):
        nonlocal nodes, prunes
        meta_get = meta.get
        solved_get = solved.get
        unsolvable = failed
        best_v = None
        best_split = None
        limit = limit0
        if flops_metric:
            join_term = None
        else:
            h, hs, _, _ = info(s)
            join_term = 0 if exclude_root_scalar and s == target and h == 0 else hs
        for a in sides_of(s):
            nodes += 1
            b = s ^ a
            ra = meta_get(a)
            if ra is None:
                ra = info(a)
            rb = meta_get(b)
            if rb is None:
                rb = info(b)
            lbb = rb[2]
            if flops_metric:
                m = ra[0] | rb[0]
                join = 1
                i = 0
                while m:
                    join *= tables[i][m & low]
                    m >>= _CHUNK
                    i += 1
                floor = ra[2] + lbb + join
            else:
                lba = ra[2]
                floor = lba if lba > lbb else lbb
                if join_term > floor:
                    floor = join_term
            if floor >= limit:
                prunes += 1
                continue
            va = solved_get(a)
            if va is None:
                if a in unsolvable:
                    prunes += 1
                    continue
                va = solve(a)
                if va is None:
                    prunes += 1
                    continue
            if flops_metric:
                floor = va + lbb + join
            else:
                floor = va if va > lbb else lbb
                if join_term > floor:
                    floor = join_term
            if floor >= limit:
                prunes += 1
                continue
            vb = solved_get(b)
            if vb is None:
                if b in unsolvable:
                    prunes += 1
                    continue
                vb = solve(b)
                if vb is None:
                    prunes += 1
                    continue
            if flops_metric:
                v = va + vb + join
            else:
                v = va if va > vb else vb
                if join_term > v:
                    v = join_term
            if best_v is None or v < best_v:
                best_v = v
                best_split = (a, b)
                if v < limit:
                    limit = v
            else:
                prunes += 1
        if best_v is not None and best_v < limit0:
            solved[s] = best_v
            choice[s] = best_split
            return best_v
        failed.add(s)
        return None

    value = solve(target)
    stats.nodes_expanded += nodes
    stats.prunes += prunes
    tmask = info(target)[3]
    if value is None:
        return {}, tmask
    out = {}
    walk = [target]
    while walk:
        s = walk.pop()
        h, _, _, e = info(s)
        split = choice.get(s)
        if split is None:
            out[e] = (solved[s], h, None)
        else:
            a, b = split
            out[e] = (solved[s], h, (info(a)[3], info(b)[3]))
            walk.append(a)
            walk.append(b)
    return out, tmask


def _dfs_attempt(space, n, config, cap, stats):
    """One bounded depth-first sweep; returns SSA pairs, or None when the cap
    excludes every tree in the space."""
    singles = [(1 << i, space.term_masks[i], 0) for i in range(n)]
    base = {1 << i: i for i in range(n)}
    pairs = []
    counter = [n]
    if config.outer_products:
        best, target = _dfs_solve(space, singles, config.metric, True, True, cap, stats)
        if target not in best:
            return None
        _emit(best, target, base, pairs, counter)
        return pairs
    comps = _components(space, n)
    units = []
    for comp in comps:
        members = [s for s in singles if s[0] & comp]
        sub, _ = _dfs_solve(
            space, members, config.metric, False, len(comps) == 1, cap, stats
        )
        if comp not in sub:
            return None
        root = _emit(sub, comp, base, pairs, counter)
        value, headmask, _ = sub[comp]
        units.append(((comp, root), (comp, headmask, value)))
    if len(units) > 1:
        spine, target = _dfs_solve(
            space, [un[1] for un in units], config.metric, True, True, cap, stats
        )
        if target not in spine:
            return None
        roots = {comp: root for (comp, root), _ in units}
        _emit(spine, target, roots, pairs, counter)
    return pairs


def exhaustive_dfs(network, config=None):
    """Optimal contraction order by depth-first branch-and-bound.

    Recursively splits tensor subsets in two, memoizing each subset's
    optimum; splits whose admissible cost floor reaches the current bound
    are abandoned. A sweep that proves the initial bound unbeatable falls
    back to the tree that produced the bound, or searches again unbounded
    when an explicit bound excluded every tree.
    Returns (tree, cost report, search stats).
    """
    config = config or SearchConfig()
    n = len(network.tensors)
    stats = SearchStats()
    if n == 1:
        leaf = EinExpr.leaf(network.tensors[0])
        stats.best_cost = 0
        return leaf, CostReport(0, 0, 0), stats
    space = _Space(network)
    bound, incumbent = _initial_bound(network, space, config)
    pairs = _dfs_attempt(space, n, config, bound, stats)
    if pairs is None:
        pairs = incumbent
    if pairs is None:
        # the bound excluded every tree in the space; search again without it
        pairs = _dfs_attempt(space, n, config, None, stats)
    tree = ssa_to_tree(SsaPath(pairs), network)
    report = cost(tree, network.extents)
    stats.best_cost = _metric_of(report, config.metric)
    return tree, report, stats


def _capped_dp(space, items, metric, allow_outer, exclude_root_scalar, cap0, stats):
    """Best tree per subset, admitting only subtrees within a cost cap.

    items are atomic units: (leafmask, head mask, base value). The cap rises
    geometrically until the union of all units is solved; any subset whose
    optimum fits under the final cap is recorded optimally along the way.
    """
    best = {}
    levels = defaultdict(list)
    target = 0
    for leafmask, headmask, value in items:
        best[leafmask] = (value, headmask, None)
        levels[leafmask.bit_count()].append(leafmask)
        target |= leafmask
    if len(items) == 1:
        return best, target
    flops_metric = metric == "flops"
    cap = max(cap0, 1)
    factor = max(2, space.max_extent)
    top = target.bit_count()
    while target not in best:
        for c in range(2, top + 1):
            for d in range(1, c // 2 + 1):
                la = levels.get(d, ())
                lb = levels.get(c - d, ())
                for i, a in enumerate(la):
                    va, ha, _ = best[a]
                    partners = lb if d != c - d else la[i + 1:]
                    for b in partners:
                        if a & b:
                            continue
                        vb, hb, _ = best[b]
                        if not allow_outer and not ha & hb:
                            continue
                        stats.nodes_expanded += 1
                        key = a | b
                        head = space.head(key, ha | hb)
                        if flops_metric:
                            value = va + vb + space.size(ha | hb)
                        elif exclude_root_scalar and key == target and head == 0:
                            value = va if va >= vb else vb
                        else:
                            value = max(va, vb, space.size(head))
                        if value > cap:
                            stats.prunes += 1
                            continue
                        cur = best.get(key)
                        if cur is None:
                            best[key] = (value, head, (a, b))
                            levels[c].append(key)
                        elif value < cur[0]:
                            best[key] = (value, head, (a, b))
        if target not in best:
            cap *= factor
    return best, target


def _emit(best, key, base_ssa, pairs, counter):
    """Expand recorded splits into SSA pairs; returns the subtree's SSA id."""
    _, _, split = best[key]
    if split is None:
        return base_ssa[key]
    a, b = split
    if (a & -a) > (b & -b):
        a, b = b, a
    sa = _emit(best, a, base_ssa, pairs, counter)
    sb = _emit(best, b, base_ssa, pairs, counter)
    pairs.append((sa, sb))
    ssa = counter[0]
    counter[0] += 1
    return ssa


def exhaustive_bfs(network, config=None):
    """Optimal contraction order by breadth-first subset search.

    Builds best subtrees for tensor subsets of growing cardinality under a
    cost cap, raising the cap by the largest extent until the full network
    is solved. Disconnected networks are solved per component, then the
    component results are joined by an outer-product subset search.
    Returns (tree, cost report, search stats).
    """
    config = config or SearchConfig()
    n = len(network.tensors)
    stats = SearchStats()
    if n == 1:
        leaf = EinExpr.leaf(network.tensors[0])
        stats.best_cost = 0
        return leaf, CostReport(0, 0, 0), stats
    if n > 64:
        raise BudgetError("breadth-first search uses subset bitmasks capped at 64 tensors")
    space = _Space(network)
    bound, _ = _initial_bound(network, space, config)
    singletons = [(1 << i, space.term_masks[i], 0) for i in range(n)]
    pairs = []
    counter = [n]
    if config.outer_products:
        best, target = _capped_dp(space, singletons, config.metric, True, True, bound, stats)
        base = {1 << i: i for i in range(n)}
        _emit(best, target, base, pairs, counter)
    else:
        comps = _components(space, n)
        if len(comps) > _SPINE_CAP:
            raise BudgetError(
                f"network splits into {len(comps)} components; the outer-product "
                f"combination search is capped at {_SPINE_CAP}"
            )
        units = []
        base = {1 << i: i for i in range(n)}
        for comp in comps:
            members = [s for s in singletons if s[0] & comp]
            sub, _ = _capped_dp(
                space, members, config.metric, False,
                len(comps) == 1, bound, stats,
            )
            root = _emit(sub, comp, base, pairs, counter)
            value, headmask, _ = sub[comp]
            units.append(((comp, root), (comp, headmask, value)))
        if len(units) == 1:
            pass
        else:
            spine, target = _capped_dp(
                space, [u[1] for u in units], config.metric, True, True, bound, stats
            )
            roots = {comp: root for (comp, root), _ in units}
            _emit(spine, target, roots, pairs, counter)
    tree = ssa_to_tree(SsaPath(pairs), network)
    report = cost(tree, network.extents)
    stats.best_cost = _metric_of(report, config.metric)
    return tree, report, stats
