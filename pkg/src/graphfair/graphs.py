"""Structural graph algorithms: connectivity, blocks, class recognition.

Everything here is deterministic.  Components are reported sorted by their
smallest member, blocks are sorted by their sorted vertex tuples, and the
split partition is the lexicographically least one among the valid choices.
Inputs are desk scale, so the clique search may be exponential in the worst
case without being a problem in practice.
"""

from dataclasses import dataclass
from itertools import combinations

from .core import (
    GoodsGraph,
    StructuralError,
    UnsupportedBlockError,
)


def connected_components(graph: GoodsGraph) -> list[list[str]]:
    """Maximal connected vertex sets, each sorted, ordered by smallest member."""
    seen: set[str] = set()
    comps: list[list[str]] = []
    for root in graph.vertices:
        if root in seen:
            continue
        comp = {root}
        frontier = [root]
        while frontier:
            nxt: list[str] = []
            for v in frontier:
                for w in graph.adjacency[v]:
                    if w not in comp:
                        comp.add(w)
                        nxt.append(w)
            frontier = nxt
        seen |= comp
        comps.append(sorted(comp))
    return comps


def is_connected(graph: GoodsGraph) -> bool:
    return len(connected_components(graph)) <= 1


def is_connected_subset(graph: GoodsGraph, subset) -> bool:
    """True when `subset` induces a connected subgraph; the empty set counts."""
    sub = set(subset)
    if not sub:
        return True
    root = next(iter(sub))
    comp = {root}
    frontier = [root]
    while frontier:
        nxt: list[str] = []
        for v in frontier:
            for w in graph.adjacency[v]:
                if w in sub and w not in comp:
                    comp.add(w)
                    nxt.append(w)
        frontier = nxt
    return comp == sub


@dataclass(frozen=True)
class BlockCutTree:
    """Blocks and cut vertices of a connected graph.

    tree_edges joins block indices to the cut vertices they contain; a block
    adjacent to at most one cut vertex is terminal.  A graph that is itself
    biconnected has a single terminal block and no cut vertices.
    """

    blocks: tuple[frozenset[str], ...]
    cut_vertices: frozenset[str]
    tree_edges: tuple[tuple[int, str], ...]
    terminal_blocks: frozenset[int]

    def blocks_sorted(self) -> list[tuple[str, ...]]:
        return [tuple(sorted(b)) for b in self.blocks]


def block_cut_tree(graph: GoodsGraph) -> BlockCutTree:
    """Biconnected components via an iterative lowpoint search.

    Raises StructuralError on disconnected or empty input.
    """
    if not graph.vertices:
        raise StructuralError("empty graph has no block structure")
    if not is_connected(graph):
        raise StructuralError("graph is disconnected")
    if len(graph.vertices) == 1:
        only = frozenset(graph.vertices)
        return BlockCutTree(
            blocks=(only,),
            cut_vertices=frozenset(),
            tree_edges=(),
            terminal_blocks=frozenset({0}),
        )

    index: dict[str, int] = {}
    low: dict[str, int] = {}
    parent: dict[str, str | None] = {}
    cuts: set[str] = set()
    raw_blocks: list[frozenset[str]] = []
    edge_stack: list[tuple[str, str]] = []
    counter = 0

    root = graph.vertices[0]
    parent[root] = None
    # Each stack frame carries the vertex and an iterator over its neighbors,
    # so the search survives deep graphs without recursion.
    stack = [(root, iter(sorted(graph.adjacency[root])))]
    index[root] = low[root] = counter
    counter += 1
    root_children = 0

    while stack:
        v, it = stack[-1]
        advanced = False
        for w in it:
            if w not in index:
                parent[w] = v
                if v == root:
                    root_children += 1
                edge_stack.append((v, w))
                index[w] = low[w] = counter
                counter += 1
                stack.append((w, iter(sorted(graph.adjacency[w]))))
                advanced = True
                break
            if w != parent[v] and index[w] < index[v]:
                edge_stack.append((v, w))
                low[v] = min(low[v], index[w])
        if advanced:
            continue
        stack.pop()
        if stack:
            u = stack[-1][0]
            low[u] = min(low[u], low[v])
            if low[v] >= index[u]:
                # u closes a block; pop edges down to (u, v).
                members: set[str] = set()
                while True:
                    a, b = edge_stack.pop()
                    members.add(a)
                    members.add(b)
                    if (a, b) == (u, v):
                        break
                raw_blocks.append(frozenset(members))
                if u != root or root_children > 1:
                    cuts.add(u)

    blocks = tuple(sorted(raw_blocks, key=lambda b: tuple(sorted(b))))
    tree_edges = tuple(
        (i, c) for i, b in enumerate(blocks) for c in sorted(b & cuts)
    )
    cut_degree = {i: 0 for i in range(len(blocks))}
    for i, _ in tree_edges:
        cut_degree[i] += 1
    terminal = frozenset(i for i, d in cut_degree.items() if d <= 1)
    return BlockCutTree(
        blocks=blocks,
        cut_vertices=frozenset(cuts),
        tree_edges=tree_edges,
        terminal_blocks=terminal,
    )


@dataclass(frozen=True)
class ClassWitness:
    """Which structured classes a graph belongs to, plus the evidence.

    flags may contain: connected, complete, cycle, tree, block_graph,
    cactus, block_cactus, complete_multipartite, split.  parts is the part
    list for complete multipartite graphs, sorted by (size, members);
    split_pair is a (clique, independent set) partition.
    """

    flags: frozenset[str]
    parts: tuple[frozenset[str], ...] | None = None
    split_pair: tuple[frozenset[str], frozenset[str]] | None = None

    def has(self, flag: str) -> bool:
        return flag in self.flags


def _is_clique(graph: GoodsGraph, vs: frozenset[str]) -> bool:
    return all(graph.has_edge(a, b) for a, b in combinations(sorted(vs), 2))


def _is_cycle_set(graph: GoodsGraph, vs: frozenset[str]) -> bool:
    """Does `vs` induce a (chordless) cycle of length at least 3?"""
    if len(vs) < 3:
        return False
    degs = [sum(1 for w in graph.adjacency[v] if w in vs) for v in vs]
    if any(d != 2 for d in degs):
        return False
    return is_connected_subset(graph, vs)


def _multipartite_parts(graph: GoodsGraph) -> tuple[frozenset[str], ...] | None:
    """Parts of a complete multipartite graph, or None.

    The parts are the connected components of the complement; the graph is
    complete multipartite exactly when every cross-part pair is an edge and
    every within-part pair is a non-edge.
    """
    verts = graph.vertices
    comp_adj: dict[str, set[str]] = {v: set() for v in verts}
    for a, b in combinations(verts, 2):
        if not graph.has_edge(a, b):
            comp_adj[a].add(b)
            comp_adj[b].add(a)
    seen: set[str] = set()
    parts: list[frozenset[str]] = []
    for root in verts:
        if root in seen:
            continue
        comp = {root}
        frontier = [root]
        while frontier:
            nxt = []
            for v in frontier:
                for w in comp_adj[v]:
                    if w not in comp:
                        comp.add(w)
                        nxt.append(w)
            frontier = nxt
        seen |= comp
        parts.append(frozenset(comp))
    part_of = {v: i for i, p in enumerate(parts) for v in p}
    for a, b in combinations(verts, 2):
        same = part_of[a] == part_of[b]
        if same == graph.has_edge(a, b):
            return None
    return tuple(sorted(parts, key=lambda p: (len(p), tuple(sorted(p)))))


def _maximal_cliques(graph: GoodsGraph):
    """Bron-Kerbosch with pivoting; fine at desk scale."""
    adj = graph.adjacency
    out: list[frozenset[str]] = []

    def expand(r: set[str], p: set[str], x: set[str]) -> None:
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda v: len(adj[v] & p))
        for v in sorted(p - adj[pivot]):
            expand(r | {v}, p & set(adj[v]), x & set(adj[v]))
            p.remove(v)
            x.add(v)

    expand(set(), set(graph.vertices), set())
    return out


def _split_partition(graph: GoodsGraph) -> tuple[frozenset[str], frozenset[str]] | None:
    """A (clique, independent set) partition when one exists.

    Every split graph has a maximum clique whose complement is independent;
    among those the lexicographically least clique is chosen.
    """
    if not graph.vertices:
        return frozenset(), frozenset()
    cliques = _maximal_cliques(graph)
    omega = max(len(c) for c in cliques)
    vset = set(graph.vertices)
    best: tuple[str, ...] | None = None
    for c in cliques:
        if len(c) != omega:
            continue
        rest = vset - c
        if any(graph.has_edge(a, b) for a, b in combinations(sorted(rest), 2)):
            continue
        key = tuple(sorted(c))
        if best is None or key < best:
            best = key
    if best is None:
        return None
    clique = frozenset(best)
    return clique, frozenset(vset - clique)


def recognize(graph: GoodsGraph) -> ClassWitness:
    """Classify a graph against the structured classes this package serves."""
    flags: set[str] = set()
    n = len(graph.vertices)
    connected = is_connected(graph)
    if connected:
        flags.add("connected")
    if all(graph.has_edge(a, b) for a, b in combinations(graph.vertices, 2)):
        flags.add("complete")
    if connected and n >= 3 and all(len(graph.adjacency[v]) == 2 for v in graph.vertices):
        flags.add("cycle")
    if connected and n >= 1 and len(graph.edges) == n - 1:
        flags.add("tree")

    if connected and n >= 1:
        bct = block_cut_tree(graph)
        kinds = []
        for b in bct.blocks:
            kinds.append((_is_clique(graph, b), _is_cycle_set(graph, b)))
        if all(cl for cl, _ in kinds):
            flags.add("block_graph")
        if all(cy or len_b <= 2 for (_, cy), len_b in zip(kinds, map(len, bct.blocks))):
            flags.add("cactus")
        if all(cl or cy for cl, cy in kinds):
            flags.add("block_cactus")

    parts = _multipartite_parts(graph)
    if parts is not None:
        flags.add("complete_multipartite")
    split_pair = _split_partition(graph)
    if split_pair is not None:
        flags.add("split")

    return ClassWitness(flags=frozenset(flags), parts=parts, split_pair=split_pair)


def hamiltonian_path_in_block(block: frozenset[str], graph: GoodsGraph, endpoint: str) -> list[str]:
    """A Hamiltonian path through a clique or cycle block, ending at `endpoint`.

    Cliques (including single edges and triangles) list the other vertices in
    id order.  Larger cycle blocks are walked starting from the endpoint's
    smallest neighbor, moving away from the endpoint.
    """
    if endpoint not in block:
        raise StructuralError(f"endpoint {endpoint!r} is not in the block")
    if len(block) == 1:
        return [endpoint]
    if _is_clique(graph, block):
        return sorted(block - {endpoint}) + [endpoint]
    if _is_cycle_set(graph, block):
        start = min(graph.adjacency[endpoint] & block)
        path = [start]
        prev = endpoint
        cur = start
        while len(path) < len(block) - 1:
            nxt = next(w for w in graph.adjacency[cur] if w in block and w != prev)
            path.append(nxt)
            prev, cur = cur, nxt
        path.append(endpoint)
        return path
    raise UnsupportedBlockError(f"block {tuple(sorted(block))} is neither a clique nor a cycle")
