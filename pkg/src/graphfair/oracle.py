"""Exact maximin-share computations by pruned exhaustive search.

The searches run over connected partitions enumerated canonically: the first
bundle always contains the smallest unassigned vertex, and bundles grow by a
standard no-duplicate connected-subset expansion.  Vertex sets are bitmasks,
utilities are exact (integers internally whenever every value is integral,
Fractions otherwise), and branches are cut by two bounds: the running minimum
can only drop, and no completion can beat the remaining weight divided by the
remaining bundle count.

These routines are meant for desk-scale inputs; everything refuses graphs
larger than the configured cap (default 14 vertices).
"""

from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Agent,
    Allocation,
    GoodsGraph,
    InvalidInputError,
    Packing,
    SizeLimitError,
    StructuralError,
    UndefinedMmsError,
    Value,
    ZERO,
)
from .graphs import connected_components, is_connected

DEFAULT_MAX_VERTICES = 14

_INF = float("inf")

_cache: dict = {}


def clear_cache() -> None:
    _cache.clear()


def _cap(graph: GoodsGraph, max_vertices: int | None) -> None:
    cap = DEFAULT_MAX_VERTICES if max_vertices is None else max_vertices
    if len(graph.vertices) > cap:
        raise SizeLimitError(
            f"graph has {len(graph.vertices)} vertices, enumeration cap is {cap}"
        )


@dataclass(frozen=True)
class MmsRecord:
    """An exact share value with a witness packing.

    The witness labels are bundle slots 1..n, not agent ids.  For kind "mms"
    the witness covers the whole vertex set; for kind "pmms" it may not.
    """

    agent_id: int
    n: int
    value: Value
    witness: Packing
    kind: str


class _Mask:
    """Bitmask view of a graph: vertex i of `ids` is bit i."""

    __slots__ = ("ids", "pos", "adj", "full", "m")

    def __init__(self, graph: GoodsGraph):
        self.ids = list(graph.vertices)
        self.pos = {v: i for i, v in enumerate(self.ids)}
        self.m = len(self.ids)
        self.adj = [0] * self.m
        for a, b in graph.edges:
            ia, ib = self.pos[a], self.pos[b]
            self.adj[ia] |= 1 << ib
            self.adj[ib] |= 1 << ia
        self.full = (1 << self.m) - 1

    def to_set(self, mask: int) -> frozenset[str]:
        return frozenset(self.ids[i] for i in _bits(mask))


def _bits(mask: int):
    while mask:
        b = mask & -mask
        yield b.bit_length() - 1
        mask ^= b


def _component_count(adj: list[int], mask: int) -> int:
    count = 0
    rest = mask
    while rest:
        count += 1
        comp = rest & -rest
        frontier = comp
        while frontier:
            nxt = 0
            f = frontier
            while f:
                b = f & -f
                f ^= b
                nxt |= adj[b.bit_length() - 1]
            frontier = nxt & mask & ~comp
            comp |= frontier
        rest &= ~comp
    return count


def _weights_for(agent_like, ids: list[str]):
    """Weights in vertex order; ints when every value is integral."""
    utility = agent_like.utility if isinstance(agent_like, Agent) else agent_like
    vals = []
    for v in ids:
        if v not in utility:
            raise InvalidInputError(f"no utility for vertex {v!r}")
        vals.append(utility[v])
    if all(val.denominator == 1 for val in vals):
        return [val.numerator for val in vals]
    return list(vals)


def enumerate_connected_partitions(
    graph: GoodsGraph, n: int, max_vertices: int | None = None
):
    """Yield every partition of V into at most n nonempty connected bundles.

    Each partition appears exactly once (up to bundle order) as an n-tuple of
    frozensets, padded with empty bundles.  Bundles are listed in canonical
    order: the first contains the smallest vertex, and so on.
    """
    if n < 1:
        raise InvalidInputError(f"need at least one bundle, got n={n}")
    _cap(graph, max_vertices)
    mk = _Mask(graph)
    adj = mk.adj
    empty: frozenset[str] = frozenset()

    def bundles_from(seed_bit: int, allowed: int):
        # Connected subsets of `allowed` containing the seed, each once.
        seed_mask = 1 << seed_bit

        def grow(s_mask: int, cand: int, banned: int):
            yield s_mask
            live = cand & ~banned
            local_ban = banned
            while live:
                b = live & -live
                live ^= b
                i = b.bit_length() - 1
                new_s = s_mask | b
                new_cand = (cand | adj[i]) & allowed & ~new_s
                yield from grow(new_s, new_cand, local_ban)
                local_ban |= b

        yield from grow(seed_mask, adj[seed_bit] & allowed & ~seed_mask, 0)

    def rec(remaining: int, parts_left: int, acc: tuple):
        if remaining == 0:
            yield acc + (empty,) * (n - len(acc))
            return
        if parts_left == 0:
            return
        if _component_count(adj, remaining) > parts_left:
            return
        seed = (remaining & -remaining).bit_length() - 1
        for s_mask in bundles_from(seed, remaining):
            yield from rec(remaining ^ s_mask, parts_left - 1, acc + (mk.to_set(s_mask),))

    yield from rec(mk.full, n, ())


def _minmax_partition_search(adj: list[int], full: int, wts, n: int):
    """Best (max of min bundle weight) partition into at most n connected parts.

    Partitions using fewer than n nonempty parts count as value 0 because the
    missing bundles are empty.  Returns (value, parts) with parts a tuple of
    masks (no padding), or (None, None) when no partition exists at all.
    """
    best_val = None
    best_parts = None
    total = sum((wts[i] for i in _bits(full)), ZERO)

    def rec(remaining, parts_left, cur_min, acc, rem_weight):
        nonlocal best_val, best_parts
        if remaining == 0:
            val = cur_min if len(acc) == n else ZERO
            if cur_min is None:  # n bundles, all empty: only when full == 0
                val = ZERO
            if best_val is None or val > best_val:
                best_val = val
                best_parts = acc
            return
        if parts_left == 0:
            return
        if best_val is not None:
            bound = rem_weight / parts_left
            if cur_min is not None and cur_min < bound:
                bound = cur_min
            if bound <= best_val:
                return
        if _component_count(adj, remaining) > parts_left:
            return
        seed = (remaining & -remaining).bit_length() - 1
        seed_mask = 1 << seed

        def grow(s_mask, s_weight, cand, banned):
            close_min = s_weight if cur_min is None or s_weight < cur_min else cur_min
            skip = False
            if best_val is not None and parts_left > 1:
                b2 = (rem_weight - s_weight) / (parts_left - 1)
                if close_min < b2:
                    b2 = close_min
                if b2 <= best_val:
                    skip = True
            if not skip:
                rec(remaining ^ s_mask, parts_left - 1, close_min, acc + (s_mask,), rem_weight - s_weight)
            live = cand & ~banned
            local_ban = banned
            while live:
                b = live & -live
                live ^= b
                i = b.bit_length() - 1
                new_s = s_mask | b
                grow(new_s, s_weight + wts[i], (cand | adj[i]) & remaining & ~new_s, local_ban)
                local_ban |= b

        grow(seed_mask, wts[seed], adj[seed] & remaining & ~seed_mask, 0)

    rec(full, n, None, (), total)
    if best_val is None:
        return None, None
    return Fraction(best_val), best_parts


def _witness_packing(mk: _Mask, parts: tuple, n: int) -> Packing:
    bundles = [(i + 1, mk.to_set(mask)) for i, mask in enumerate(parts)]
    for j in range(len(parts), n):
        bundles.append((j + 1, frozenset()))
    return Packing(bundles=tuple(bundles))


def _graph_key(graph: GoodsGraph):
    return (graph.vertices, tuple(sorted(graph.edges)))


def mms(graph: GoodsGraph, agent: Agent, n: int, max_vertices: int | None = None) -> MmsRecord:
    """Exact maximin share over connected partitions into n bundles.

    Undefined (raises UndefinedMmsError) when the graph has more than n
    connected components, since no n-bundle partition covers V then.
    """
    if n < 1:
        raise InvalidInputError(f"need at least one bundle, got n={n}")
    _cap(graph, max_vertices)
    wts_probe = _weights_for(agent, list(graph.vertices))
    key = ("mms", _graph_key(graph), tuple(wts_probe), n, agent.id)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    if len(connected_components(graph)) > n:
        raise UndefinedMmsError(
            f"graph has more than {n} components; no {n}-bundle partition covers it"
        )
    mk = _Mask(graph)
    value, parts = _minmax_partition_search(mk.adj, mk.full, wts_probe, n)
    record = MmsRecord(
        agent_id=agent.id,
        n=n,
        value=value,
        witness=_witness_packing(mk, parts, n),
        kind="mms",
    )
    _cache[key] = record
    return record


def pmms(graph: GoodsGraph, agent: Agent, n: int, max_vertices: int | None = None) -> MmsRecord:
    """Exact maximin share over packings (bundles need not cover V).

    Defined for every graph.  Bundles live inside single components, so the
    optimum distributes the n bundles over components and solves each
    component as a connected subproblem; a component receiving k bundles is
    worth its k-bundle maximin share.
    """
    if n < 1:
        raise InvalidInputError(f"need at least one bundle, got n={n}")
    _cap(graph, max_vertices)
    wts_all = _weights_for(agent, list(graph.vertices))
    key = ("pmms", _graph_key(graph), tuple(wts_all), n, agent.id)
    hit = _cache.get(key)
    if hit is not None:
        return hit

    mk = _Mask(graph)
    comps = connected_components(graph)
    comp_masks = []
    for comp in comps:
        mask = 0
        for v in comp:
            mask |= 1 << mk.pos[v]
        comp_masks.append(mask)

    per_comp: list[dict[int, tuple[Value, tuple]]] = []
    for mask in comp_masks:
        table: dict[int, tuple[Value, tuple]] = {}
        size = bin(mask).count("1")
        for k in range(1, min(size, n) + 1):
            val, parts = _minmax_partition_search(mk.adj, mask, wts_all, k)
            table[k] = (val, parts)
        per_comp.append(table)

    sizes = [bin(mask).count("1") for mask in comp_masks]
    memo: dict[tuple[int, int], tuple] = {}

    def dp(j: int, budget: int):
        # Returns (best min value or None when infeasible, chosen k tuple).
        if j == len(comp_masks):
            return (_INF, ()) if budget == 0 else (None, ())
        state = (j, budget)
        if state in memo:
            return memo[state]
        best = (None, ())
        for k in range(0, min(sizes[j], budget) + 1):
            sub, picks = dp(j + 1, budget - k)
            if sub is None:
                continue
            mine = _INF if k == 0 else per_comp[j][k][0]
            cand = mine if mine < sub else sub
            if best[0] is None or cand > best[0]:
                best = (cand, (k,) + picks)
        memo[state] = best
        return best

    best_val, picks = dp(0, n)
    if best_val is None:
        # More bundles than vertices: some bundle is empty, the share is 0.
        value = ZERO
        bundles = []
        for i, v in enumerate(graph.vertices[:n]):
            bundles.append((i + 1, frozenset({v})))
        for j in range(len(bundles), n):
            bundles.append((j + 1, frozenset()))
        witness = Packing(bundles=tuple(bundles))
    else:
        value = ZERO if best_val == _INF else Fraction(best_val)
        parts: list[int] = []
        for j, k in enumerate(picks):
            if k:
                parts.extend(per_comp[j][k][1])
        witness = _witness_packing(mk, tuple(parts), n)
    record = MmsRecord(agent_id=agent.id, n=n, value=value, witness=witness, kind="pmms")
    _cache[key] = record
    return record


def max_min_ratio_allocation(
    graph: GoodsGraph,
    agents: list[Agent],
    targets: dict[int, Value],
    max_vertices: int | None = None,
) -> Allocation:
    """Among all n-bundle connected partitions, maximize min value/target.

    Agents with target 0 are unconstrained (their ratio is reported as 1);
    negative targets are rejected.  Ties keep the first optimum in canonical
    enumeration order, so the result is deterministic.
    """
    if not agents:
        raise InvalidInputError("no agents to allocate to")
    _cap(graph, max_vertices)
    if not is_connected(graph):
        raise StructuralError("graph is disconnected")
    n = len(agents)
    mk = _Mask(graph)
    adj = mk.adj
    for a in agents:
        t = targets.get(a.id, ZERO)
        if t < 0:
            raise InvalidInputError(f"negative target for agent {a.id}")
    wts = [_weights_for(a, mk.ids) for a in agents]
    tlist = [targets.get(a.id, ZERO) for a in agents]
    constrained = [i for i, t in enumerate(tlist) if t > 0]
    totals = [sum((w[i] for i in _bits(mk.full)), ZERO) for w in wts]

    best_score = None
    best_parts = None
    best_assign = None

    def leaf(bundle_masks, bundle_vals):
        nonlocal best_score, best_parts, best_assign
        nb = len(bundle_masks)
        padded_vals = list(bundle_vals) + [[ZERO] * n for _ in range(n - nb)]
        ratio = [
            [
                (Fraction(padded_vals[b][a]) / tlist[a]) if tlist[a] > 0 else _INF
                for a in range(n)
            ]
            for b in range(n)
        ]
        memo: dict[int, tuple] = {}

        def assign(used: int):
            if used == (1 << n) - 1:
                return _INF, ()
            bi = bin(used).count("1")
            if used in memo:
                return memo[used]
            best = None
            for a in range(n):
                if used >> a & 1:
                    continue
                sub, rest = assign(used | (1 << a))
                r = ratio[bi][a]
                cand = r if r < sub else sub
                if best is None or cand > best[0]:
                    best = (cand, ((bi, a),) + rest)
            memo[used] = best
            return best

        score, pairs = assign(0)
        if best_score is None or score > best_score:
            best_score = score
            best_parts = tuple(bundle_masks) + (0,) * (n - nb)
            best_assign = pairs

    def rec(remaining, parts_left, closed_masks, closed_vals, closed_best, rem_wt):
        if remaining == 0:
            leaf(closed_masks, closed_vals)
            return
        if parts_left == 0:
            return
        if best_score is not None and constrained:
            bound = _INF
            for a in constrained:
                pot = closed_best[a]
                whole = Fraction(rem_wt[a]) / tlist[a]
                if whole > pot:
                    pot = whole
                if pot < bound:
                    bound = pot
            if bound <= best_score:
                return
        if _component_count(adj, remaining) > parts_left:
            return
        seed = (remaining & -remaining).bit_length() - 1
        seed_mask = 1 << seed

        def grow(s_mask, s_vals, cand, banned):
            new_best = list(closed_best)
            for a in range(n):
                if tlist[a] > 0:
                    r = Fraction(s_vals[a]) / tlist[a]
                    if r > new_best[a]:
                        new_best[a] = r
            rec(
                remaining ^ s_mask,
                parts_left - 1,
                closed_masks + [s_mask],
                closed_vals + [s_vals],
                new_best,
                [rem_wt[a] - s_vals[a] for a in range(n)],
            )
            live = cand & ~banned
            local_ban = banned
            while live:
                b = live & -live
                live ^= b
                i = b.bit_length() - 1
                new_s = s_mask | b
                grow(
                    new_s,
                    [s_vals[a] + wts[a][i] for a in range(n)],
                    (cand | adj[i]) & remaining & ~new_s,
                    local_ban,
                )
                local_ban |= b

        grow(seed_mask, [wts[a][seed] for a in range(n)], adj[seed] & remaining & ~seed_mask, 0)

    rec(mk.full, n, [], [], [ZERO] * n, list(totals))

    if best_parts is None:
        raise StructuralError("no connected partition found")

    bundle_sets = [mk.to_set(mask) for mask in best_parts]
    by_agent: dict[int, frozenset[str]] = {}
    ratios: dict[int, Value] = {}
    for bi, ai in best_assign:
        agent = agents[ai]
        by_agent[agent.id] = bundle_sets[bi]
        if tlist[ai] > 0:
            ratios[agent.id] = Fraction(agent.value(bundle_sets[bi])) / tlist[ai]
        else:
            ratios[agent.id] = Fraction(1)
    packing = Packing(
        bundles=tuple((aid, by_agent[aid]) for aid in sorted(by_agent))
    )
    alloc = Allocation(
        packing=packing,
        target_alpha=min(ratios.values()),
        per_agent_ratio=ratios,
    )
    return alloc
