"""Half-share allocation on block-cactus graphs.

Every biconnected piece of such a graph is a clique or a cycle, and both
admit strong exact guarantees, so the strategy is to shrink the graph until
it is biconnected and finish by exact search.  Shrinking happens at a
terminal block B with cut vertex v in one of two ways:

* absorb: nobody values B - v at her target, so B - v is folded into v
  (whoever eventually receives v receives B - v on top) and the smaller
  graph goes back through the peel-and-split reduction, because the folded
  vertex may now be heavy;
* carve: someone values B - v at her target, so bundles worth half their
  targets are cut greedily from a Hamiltonian path of B ending at v, the
  served agents leave, and the rest of the graph is unchanged.

Targets are fixed by the caller and threaded through unchanged; each step
preserves "the graph still admits an n-bundle partition giving every active
agent her target" and every served agent walks away with at least half hers.
"""

from dataclasses import dataclass
from fractions import Fraction

from .carve import greedy_prefix_carve
from .core import (
    Agent,
    Allocation,
    ClassMismatchError,
    GoodsGraph,
    GuaranteeViolationError,
    Instance,
    InvalidInputError,
    Packing,
    StructuralError,
    Value,
    validate_instance,
)
from .graphs import (
    block_cut_tree,
    connected_components,
    hamiltonian_path_in_block,
    is_connected,
    recognize,
)
from .reduction import allocate_reduction
from . import oracle

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class BoundedCallFrame:
    """One recursion state: the current graph, active agents, their targets.

    The caller promises the graph is connected block-cactus and admits a
    partition into len(agents) connected bundles worth each agent's target.
    """

    graph: GoodsGraph
    agents: tuple[Agent, ...]
    targets: dict[int, Value]


def is_block_cactus_graph(graph: GoodsGraph) -> bool:
    if len(graph) == 0:
        return False
    for comp in connected_components(graph):
        witness = recognize(graph.induced(frozenset(comp)))
        if not witness.has("block_cactus"):
            return False
    return True


def _audit_state(kind: str, graph: GoodsGraph, agents, targets) -> dict:
    return {
        "kind": kind,
        "vertices": list(graph.vertices),
        "agents": [a.id for a in agents],
        "targets": {a.id: targets[a.id] for a in agents},
        "utilities": {a.id: {v: a.utility[v] for v in graph.vertices} for a in agents},
    }


def _as_allocation(frame: BoundedCallFrame, bundles: dict[int, frozenset[str]]) -> Allocation:
    ratios: dict[int, Value] = {}
    for a in frame.agents:
        got = a.value(bundles.get(a.id, frozenset()))
        target = frame.targets[a.id]
        if got < HALF * target:
            raise GuaranteeViolationError(
                f"agent {a.id} received {got}, below half of target {target}"
            )
        ratios[a.id] = Fraction(got) / target if target > 0 else Fraction(1)
    packing = Packing(bundles=tuple((aid, bundles[aid]) for aid in sorted(bundles)))
    return Allocation(packing=packing, target_alpha=HALF, per_agent_ratio=ratios)


def allocate_bounded(frame: BoundedCallFrame, audit: list | None = None) -> Allocation:
    """Serve every frame agent a connected bundle worth half her target.

    The returned bundles are disjoint but need not cover the graph.
    """
    if not frame.agents:
        return Allocation(packing=Packing(bundles=()), target_alpha=HALF, per_agent_ratio={})
    for a in frame.agents:
        if frame.targets[a.id] < 0:
            raise InvalidInputError(f"negative target for agent {a.id}")
    graph = frame.graph
    agents = frame.agents
    targets = frame.targets
    n = len(agents)

    if n == 1:
        return _as_allocation(frame, {agents[0].id: frozenset(graph.vertices)})

    tree = block_cut_tree(graph)

    if len(tree.blocks) == 1:
        if audit is not None:
            audit.append(_audit_state("base", graph, agents, targets))
        alloc = oracle.max_min_ratio_allocation(graph, list(agents), targets)
        return _as_allocation(frame, {a.id: alloc.bundle_of(a.id) for a in agents})

    block_idx = min(tree.terminal_blocks)
    block = tree.blocks[block_idx]
    cuts = block & tree.cut_vertices
    if len(cuts) != 1:
        raise StructuralError(f"terminal block {sorted(block)} has {len(cuts)} cut vertices")
    v = next(iter(cuts))
    rim = block - {v}

    if all(a.value(rim) < targets[a.id] for a in agents):
        # Absorb: fold the rim into the cut vertex and re-run the reduction;
        # folding can make v heavy, and the peel handles exactly that.
        kept = frozenset(graph.vertices) - rim
        sub_graph = graph.induced(kept)
        folded = []
        for a in agents:
            utility = dict(a.utility)
            utility[v] = a.value(block)
            folded.append(Agent(id=a.id, type_id=a.type_id, utility=utility))
        if audit is not None:
            audit.append(_audit_state("absorb", sub_graph, folded, targets))
        records = {
            a.id: oracle.MmsRecord(
                agent_id=a.id,
                n=n,
                value=targets[a.id],
                witness=oracle.mms(sub_graph, a, n).witness,
                kind="target",
            )
            for a in folded
        }
        inner = allocate_reduction(
            Instance(graph=sub_graph, agents=tuple(folded)),
            HALF,
            lambda sub, ts: allocate_bounded(
                BoundedCallFrame(graph=sub.graph, agents=sub.agents, targets=dict(ts)),
                audit,
            ),
            share_records=records,
            audit=audit,
        )
        out = {a.id: inner.bundle_of(a.id) for a in agents}
        for aid, bundle in out.items():
            if v in bundle:
                out[aid] = bundle | rim
                break
        return _as_allocation(frame, out)

    # Carve: someone values the rim at her whole target, so cut bundles off
    # a Hamiltonian path through the block, keeping the cut vertex.
    path = hamiltonian_path_in_block(block, graph, v)
    carve = greedy_prefix_carve(
        path,
        [a.id for a in agents],
        {a.id: HALF * targets[a.id] for a in agents},
        {a.id: a.utility for a in agents},
        reserve_last=True,
    )
    if not carve.assignments:
        raise StructuralError("carve made no progress on a terminal block")
    out: dict[int, frozenset[str]] = {}
    taken: set[str] = set()
    for aid, piece in carve.assignments:
        out[aid] = piece
        taken |= piece
    rest_graph = graph.induced(frozenset(graph.vertices) - frozenset(taken))
    rest_agents = tuple(a for a in agents if a.id not in out)
    if audit is not None:
        audit.append(_audit_state("carve", rest_graph, rest_agents, targets))
    rest = allocate_bounded(
        BoundedCallFrame(graph=rest_graph, agents=rest_agents, targets=targets), audit
    )
    for a in rest_agents:
        out[a.id] = rest.bundle_of(a.id)
    return _as_allocation(frame, out)


def allocate_block_cactus(inst: Instance, audit: list | None = None) -> Allocation:
    """Allocate with guarantee 1/2 of each agent's share over packings.

    The instance graph must be a block-cactus graph (every biconnected block
    a clique or a cycle); disconnected graphs are fine, the reduction routes
    agents into components.
    """
    problems = validate_instance(inst)
    if problems:
        raise InvalidInputError("; ".join(problems))
    if not is_block_cactus_graph(inst.graph):
        raise ClassMismatchError("graph is not a block-cactus graph")

    if inst.n == 1:
        only = inst.agents[0]
        record = oracle.pmms(inst.graph, only, 1)
        if is_connected(inst.graph):
            bundle = frozenset(inst.graph.vertices)
        else:
            bundle = record.witness.bundles[0][1]
        ratio = (
            Fraction(only.value(bundle)) / record.value if record.value > 0 else Fraction(1)
        )
        return Allocation(
            packing=Packing(bundles=((only.id, bundle),)),
            target_alpha=HALF,
            per_agent_ratio={only.id: ratio},
        )

    return allocate_reduction(
        inst,
        HALF,
        lambda sub, ts: allocate_bounded(
            BoundedCallFrame(graph=sub.graph, agents=sub.agents, targets=dict(ts)), audit
        ),
        audit=audit,
    )
