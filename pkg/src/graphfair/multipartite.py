"""Quarter-share allocation on complete multipartite graphs.

The vertex set splits along whole parts into two halves V1, V2 that both
hold at least n vertices; each agent points at the half she values more, so
her half is worth at least half her total, which is at least n/2 times her
target.  Each half is then carved by vertex id at thresholds target/4.  A
carved piece can sit inside a single part and be disconnected, but any one
vertex from the opposite half is adjacent to all of it, so every served
agent receives one such spare.  Boundedness (every single vertex below a
quarter target) keeps pieces small enough that both carves serve everyone
and enough opposite-side vertices survive to act as spares; a failed
assertion here means a bug, not a hard instance.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

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
    Value,
    validate_instance,
)
from .graphs import is_connected, recognize
from .reduction import allocate_reduction
from . import oracle

QUARTER = Fraction(1, 4)


@dataclass(frozen=True)
class BipartSplit:
    """A whole-part bisection of a complete multipartite vertex set.

    V1 takes the ell smallest parts, just enough to reach n vertices; both
    halves then hold at least n vertices and every V1-V2 pair is adjacent.
    N1 holds the agents who weakly prefer V1, N2 the rest.
    """

    v1: frozenset[str]
    v2: frozenset[str]
    n1: tuple[int, ...]
    n2: tuple[int, ...]
    ell: int


def make_bipart_split(
    parts: Sequence[frozenset[str]], agents: Sequence[Agent], n: int
) -> BipartSplit:
    sizes = [len(p) for p in parts]
    cum = 0
    ell = None
    for idx, s in enumerate(sizes):
        cum += s
        if cum >= n:
            ell = idx + 1
            break
    if ell is None or ell == len(parts):
        raise GuaranteeViolationError(
            "no whole-part split leaves n vertices on both sides"
        )
    v1: frozenset[str] = frozenset().union(*parts[:ell])
    v2: frozenset[str] = frozenset().union(*parts[ell:])
    if len(v1) < n or len(v2) < n:
        raise GuaranteeViolationError("half sizes fell below the agent count")
    n1 = tuple(a.id for a in agents if a.value(v1) >= a.value(v2))
    n2 = tuple(a.id for a in agents if a.value(v1) < a.value(v2))
    return BipartSplit(v1=v1, v2=v2, n1=n1, n2=n2, ell=ell)


def _carve_side(
    side: frozenset[str],
    members: list[Agent],
    targets: Mapping[int, Value],
) -> tuple[list[tuple[int, frozenset[str]]], list[str]]:
    """Carve one half by vertex id; check pieces stay below half targets.

    Returns served (agent id, piece) pairs in serving order plus leftover
    vertices.  Raises when a piece reaches half of a then-active agent's
    target or when some agent stays unserved; bounded inputs rule both out.
    """
    order = sorted(side)
    result = greedy_prefix_carve(
        order,
        [a.id for a in members],
        {a.id: QUARTER * targets[a.id] for a in members},
        {a.id: a.utility for a in members},
        reserve_last=False,
    )
    active = sorted(a.id for a in members)
    by_id = {a.id: a for a in members}
    for winner, piece in result.assignments:
        for aid in active:
            if targets[aid] > 0 and 2 * by_id[aid].value(piece) >= targets[aid]:
                raise GuaranteeViolationError(
                    f"carved piece reached half of agent {aid}'s target"
                )
        active.remove(winner)
    if active:
        raise GuaranteeViolationError(f"agents {active} were not served by their half")
    return list(result.assignments), list(result.leftover)


def allocate_bounded_multipartite(
    graph: GoodsGraph,
    parts: Sequence[frozenset[str]],
    agents: Sequence[Agent],
    targets: Mapping[int, Value],
    audit: list | None = None,
) -> Allocation:
    """Serve every agent a connected bundle worth a quarter of her target.

    Preconditions: `parts` witnesses the graph as connected complete
    multipartite, there are at least 5 vertices per agent (single-agent
    calls take the whole graph and skip the split), and every vertex is
    worth less than a quarter target to every agent.  The bundles output
    partition the whole vertex set.
    """
    if not agents:
        return Allocation(packing=Packing(bundles=()), target_alpha=QUARTER, per_agent_ratio={})
    for a in agents:
        if targets[a.id] < 0:
            raise InvalidInputError(f"negative target for agent {a.id}")
    n = len(agents)

    if n == 1:
        return _as_allocation(agents, targets, {agents[0].id: frozenset(graph.vertices)})

    if len(graph) < 5 * n:
        raise GuaranteeViolationError(
            f"need at least {5 * n} vertices for {n} agents, have {len(graph)}"
        )
    split = make_bipart_split(parts, agents, n)
    by_id = {a.id: a for a in agents}
    for side, member_ids in ((split.v1, split.n1), (split.v2, split.n2)):
        for aid in member_ids:
            if 2 * by_id[aid].value(side) < n * targets[aid]:
                raise GuaranteeViolationError(
                    f"agent {aid} values her half below {n}/2 of her target"
                )

    pieces1, left1 = _carve_side(split.v1, [by_id[i] for i in split.n1], targets)
    pieces2, left2 = _carve_side(split.v2, [by_id[i] for i in split.n2], targets)

    bundles: dict[int, set[str]] = {}
    spare_of: dict[int, str] = {}
    for pieces, spare_pool in ((pieces1, left2), (pieces2, left1)):
        for aid, piece in pieces:
            bundles[aid] = set(piece)
            if not spare_pool:
                raise GuaranteeViolationError(f"no spare vertex left for agent {aid}")
            spare = min(spare_pool)
            spare_pool.remove(spare)
            bundles[aid].add(spare)
            spare_of[aid] = spare
    leftovers = sorted(left1 + left2)
    dump = min(bundles)
    bundles[dump].update(leftovers)

    out = {aid: frozenset(b) for aid, b in bundles.items()}
    if audit is not None:
        audit.append(
            {
                "kind": "mp_bounded",
                "v1": sorted(split.v1),
                "v2": sorted(split.v2),
                "n1": list(split.n1),
                "n2": list(split.n2),
                "pieces": [(aid, sorted(p)) for aid, p in pieces1 + pieces2],
                "spares": dict(spare_of),
                "dump": dump,
            }
        )
    return _as_allocation(agents, targets, out)


def _as_allocation(agents, targets, bundles: dict[int, frozenset[str]]) -> Allocation:
    ratios: dict[int, Value] = {}
    for a in agents:
        got = a.value(bundles.get(a.id, frozenset()))
        target = targets[a.id]
        if got < QUARTER * target:
            raise GuaranteeViolationError(
                f"agent {a.id} received {got}, below a quarter of target {target}"
            )
        ratios[a.id] = Fraction(got) / target if target > 0 else Fraction(1)
    packing = Packing(bundles=tuple((aid, bundles[aid]) for aid in sorted(bundles)))
    return Allocation(packing=packing, target_alpha=QUARTER, per_agent_ratio=ratios)


def allocate_multipartite(inst: Instance, audit: list | None = None) -> Allocation:
    """Allocate with guarantee 1/4 of each agent's share over packings.

    The instance graph must be connected complete multipartite with at least
    two parts.
    """
    problems = validate_instance(inst)
    if problems:
        raise InvalidInputError("; ".join(problems))
    witness = recognize(inst.graph) if is_connected(inst.graph) else None
    if witness is None or witness.parts is None or len(witness.parts) < 2:
        raise ClassMismatchError("graph is not connected complete multipartite")

    if inst.n == 1:
        only = inst.agents[0]
        record = oracle.pmms(inst.graph, only, 1)
        bundle = frozenset(inst.graph.vertices)
        ratio = (
            Fraction(only.value(bundle)) / record.value if record.value > 0 else Fraction(1)
        )
        return Allocation(
            packing=Packing(bundles=((only.id, bundle),)),
            target_alpha=QUARTER,
            per_agent_ratio={only.id: ratio},
        )

    def solver(sub: Instance, ts: Mapping[int, Value]) -> Allocation:
        sub_witness = recognize(sub.graph)
        parts = sub_witness.parts if sub_witness.parts is not None else (frozenset(sub.graph.vertices),)
        return allocate_bounded_multipartite(sub.graph, parts, sub.agents, ts, audit)

    return allocate_reduction(inst, QUARTER, solver, audit=audit)
