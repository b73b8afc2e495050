"""Reduce a general instance to bounded connected subproblems.

Two stages.  First a peel: while some agent still values a single unassigned
vertex at alpha times her share, the smallest-id such agent takes her best
such vertex and leaves.  Agents with share 0 accept any vertex, so they peel
whenever goods remain; if they are still active afterwards the pool must be
empty and they receive empty bundles at ratio 1.

Second, the leftover graph splits into components and the remaining agents
are distributed over them by witness counting: f(i, j) counts how many
bundles of agent i's share witness sit entirely inside component j, and
component j serves the k_j agents whose sorted counts stay at or above their
rank.  Each such agent values every leftover vertex below alpha times her
component target, which is exactly the boundedness the per-component solvers
need.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .core import (
    Allocation,
    Instance,
    Packing,
    StructuralError,
    Value,
)
from .graphs import connected_components
from . import oracle

# A connected solver takes a sub-instance (connected graph, the agents to
# serve) plus a target per agent, and returns an Allocation whose bundles
# meet alpha times the targets.
ConnectedSolver = Callable[[Instance, Mapping[int, Value]], Allocation]


@dataclass
class ReductionState:
    """Peel outcome: heavy picks, leftover agents, leftover components.

    heavy lists (vertex, agent) pairs in pick order.  f maps (agent id,
    component index) to the number of witness bundles inside that component;
    it is filled by allocate_reduction, which owns the witnesses.
    """

    heavy: list[tuple[str, int]]
    residual_agents: list[int]
    components: list[frozenset[str]]
    f: dict[tuple[int, int], int] = field(default_factory=dict)


def peel_heavy_vertices(
    inst: Instance, alpha: Value, pmms_values: Mapping[int, Value]
) -> ReductionState:
    """Repeatedly match the smallest-id agent who accepts a single vertex.

    An agent accepts vertex v when u_i(v) >= alpha * pmms_values[i]; she
    takes her highest-valued acceptable vertex, smallest id on ties.  The
    result is maximal: no leftover agent accepts any leftover vertex.
    """
    unmatched = sorted(a.id for a in inst.agents)
    pool = set(inst.graph.vertices)
    heavy: list[tuple[str, int]] = []
    while True:
        matched = None
        for aid in unmatched:
            agent = inst.agent(aid)
            cut = alpha * pmms_values[aid]
            best: str | None = None
            for v in sorted(pool):
                if agent.utility[v] >= cut and (best is None or agent.utility[v] > agent.utility[best]):
                    best = v
            if best is not None:
                matched = (best, aid)
                break
        if matched is None:
            break
        v, aid = matched
        heavy.append((v, aid))
        unmatched.remove(aid)
        pool.discard(v)
    residual = inst.graph.induced(frozenset(pool))
    components = [frozenset(c) for c in connected_components(residual)]
    return ReductionState(
        heavy=heavy,
        residual_agents=unmatched,
        components=components,
    )


def compute_kj(sorted_f: Sequence[int]) -> int:
    """Largest p with sorted_f[p-1] >= p; counts must be nonincreasing."""
    k = 0
    for p, c in enumerate(sorted_f, start=1):
        if c >= p:
            k = p
    return k


def _bundles_inside(witness: Packing, comp: frozenset[str]) -> int:
    return sum(1 for _, b in witness.bundles if b and b <= comp)


def allocate_reduction(
    inst: Instance,
    alpha: Value,
    connected_solver: ConnectedSolver,
    share_records: Mapping[int, oracle.MmsRecord] | None = None,
    audit: list | None = None,
) -> Allocation:
    """Full pipeline: peel, split into components, serve each via the solver.

    Guarantees every agent a connected bundle worth alpha times her share
    (pmms by default; callers may supply their own share records to thread
    externally fixed targets).  Input validation is the caller's job; the
    public allocators do it at entry, so recursive re-entries with partial
    agent sets stay cheap.
    """
    if share_records is None:
        share_records = {
            a.id: oracle.pmms(inst.graph, a, inst.n) for a in inst.agents
        }
    shares = {aid: rec.value for aid, rec in share_records.items()}

    state = peel_heavy_vertices(inst, alpha, shares)

    bundles: dict[int, frozenset[str]] = {aid: frozenset({v}) for v, aid in state.heavy}
    pending = list(state.residual_agents)

    if not state.components:
        # Pool exhausted; every leftover agent has share 0 and takes nothing.
        for aid in pending:
            if shares[aid] > 0:
                raise StructuralError(
                    f"agent {aid} has positive share but the peel consumed all goods"
                )
            bundles[aid] = frozenset()
        pending = []

    # Route agents to components up front so the audit trail exposes the
    # whole plan before any solver runs.
    plan: list[tuple[frozenset[str], int, list[int]]] = []
    for j, comp in enumerate(state.components):
        for aid in state.residual_agents:
            state.f[(aid, j)] = _bundles_inside(share_records[aid].witness, comp)
        if not pending:
            plan.append((comp, 0, []))
            continue
        ranked = sorted(pending, key=lambda aid: (-state.f[(aid, j)], aid))
        k = compute_kj([state.f[(aid, j)] for aid in ranked])
        chosen = ranked[:k]
        plan.append((comp, k, chosen))
        for aid in chosen:
            pending.remove(aid)
    if pending:
        raise StructuralError(
            f"agents {pending} were never routed to a component; "
            f"component capacities were {[k for _, k, _ in plan]}"
        )
    if audit is not None:
        audit.append(
            {
                "kind": "peel",
                "heavy": list(state.heavy),
                "residual": list(state.residual_agents),
                "ks": [k for _, k, _ in plan],
            }
        )

    for comp, k, chosen in plan:
        if k == 0:
            continue
        sub_graph = inst.graph.induced(comp)
        sub_inst = Instance(graph=sub_graph, agents=tuple(inst.agent(aid) for aid in chosen))
        targets = {aid: oracle.mms(sub_graph, inst.agent(aid), k).value for aid in chosen}
        if audit is not None:
            audit.append(
                {
                    "kind": "component",
                    "vertices": sorted(comp),
                    "k": k,
                    "agents": list(chosen),
                    "targets": dict(targets),
                }
            )
        sub_alloc = connected_solver(sub_inst, targets)
        for aid in chosen:
            bundles[aid] = sub_alloc.bundle_of(aid)

    ratios: dict[int, Value] = {}
    for a in inst.agents:
        if shares[a.id] > 0:
            ratios[a.id] = Fraction(a.value(bundles[a.id])) / shares[a.id]
        else:
            ratios[a.id] = Fraction(1)
    packing = Packing(bundles=tuple((aid, bundles[aid]) for aid in sorted(bundles)))
    return Allocation(packing=packing, target_alpha=alpha, per_agent_ratio=ratios)
