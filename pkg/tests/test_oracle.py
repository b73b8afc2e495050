import random
from fractions import Fraction

import pytest

from graphfair import oracle
from graphfair.core import (
    Agent,
    GoodsGraph,
    InvalidInputError,
    SizeLimitError,
    UndefinedMmsError,
)
from graphfair.graphs import is_connected_subset

from naive_oracles import (
    connected_graphs_up_to,
    naive_mms,
    naive_pmms,
    random_profile,
)


def agent_with(util: dict) -> Agent:
    return Agent(id=1, type_id=1, utility={k: Fraction(v) for k, v in util.items()})


def test_two_component_fixture_values():
    g = GoodsGraph.build(["x", "y", "z"], [("x", "y")])
    a = agent_with({"x": 2, "y": 2, "z": 1})
    assert oracle.mms(g, a, 2).value == 1
    assert oracle.pmms(g, a, 2).value == 2
    # with three bundles the isolated vertex gets its own part
    assert oracle.mms(g, a, 3).value == 1
    assert oracle.pmms(g, a, 3).value == 1


def test_mms_undefined_with_too_few_bundles():
    g = GoodsGraph.build(["x", "y", "z"], [("x", "y")])
    a = agent_with({"x": 2, "y": 2, "z": 1})
    with pytest.raises(UndefinedMmsError):
        oracle.mms(g, a, 1)
    # pmms never needs to cover, so it stays defined
    assert oracle.pmms(g, a, 1).value == 4


def test_witnesses_are_valid_packings():
    g = GoodsGraph.build(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")])
    a = agent_with({"a": 3, "b": 1, "c": 2, "d": 2})
    for n in (1, 2, 3):
        rec = oracle.mms(g, a, n)
        assert rec.n == n and rec.agent_id == a.id
        assert len(rec.witness.bundles) == n
        assert rec.witness.structural_problems(g) == []
        assert rec.witness.is_partition_of(g)
        values = [a.value(b) for _, b in rec.witness.bundles if b]
        assert min(values) == rec.value
        for _, b in rec.witness.bundles:
            assert is_connected_subset(g, b)


def test_pmms_witness_may_skip_vertices():
    g = GoodsGraph.build(["x", "y", "z"], [("x", "y")])
    a = agent_with({"x": 2, "y": 2, "z": 1})
    rec = oracle.pmms(g, a, 2)
    assert rec.witness.structural_problems(g) == []
    covered = rec.witness.assigned_vertices
    assert covered <= frozenset(g.vertices)
    assert min(a.value(b) for _, b in rec.witness.bundles) == 2


def test_size_cap():
    names = [f"v{i:02d}" for i in range(15)]
    g = GoodsGraph.build(names, [(names[i], names[i + 1]) for i in range(14)])
    a = agent_with({v: 1 for v in names})
    with pytest.raises(SizeLimitError):
        oracle.mms(g, a, 2)
    # an explicit cap overrides the default
    assert oracle.mms(g, a, 2, max_vertices=15).value == 7


def test_bad_n_rejected():
    g = GoodsGraph.build(["a"], [])
    a = agent_with({"a": 1})
    with pytest.raises(InvalidInputError):
        oracle.mms(g, a, 0)


def test_enumerate_connected_partitions_counts():
    g = GoodsGraph.build(["a", "b", "c"], [("a", "b"), ("b", "c")])
    # P3 into at most 2 bundles: {abc}, {a|bc}, {ab|c}
    parts = list(oracle.enumerate_connected_partitions(g, 2))
    assert len(parts) == 3
    for p in parts:
        assert len(p) == 2
        nonempty = [b for b in p if b]
        assert frozenset().union(*nonempty) == frozenset(g.vertices)
    # {a|c} is not reachable: the middle vertex must join someone
    assert all(frozenset({"a", "c"}) not in p for p in parts)


def test_pmms_matches_naive_on_random_small_graphs():
    rng = random.Random("oracle-cross")
    for gi, graph in enumerate(connected_graphs_up_to(5)):
        a = agent_with(random_profile(rng, graph.vertices))
        for n in (1, 2, 3):
            assert oracle.pmms(graph, a, n).value == naive_pmms(graph, a, n)
            assert oracle.mms(graph, a, n).value == naive_mms(graph, a, n)


def test_pmms_matches_naive_on_disconnected_graphs():
    rng = random.Random("oracle-disc")
    g = GoodsGraph.build(
        ["a", "b", "c", "d", "e"], [("a", "b"), ("b", "c"), ("d", "e")]
    )
    for _ in range(10):
        a = agent_with(random_profile(rng, g.vertices))
        for n in (1, 2, 3, 4):
            assert oracle.pmms(g, a, n).value == naive_pmms(g, a, n)
            expected = naive_mms(g, a, n)
            if expected is None:
                with pytest.raises(UndefinedMmsError):
                    oracle.mms(g, a, n)
            else:
                assert oracle.mms(g, a, n).value == expected


def test_max_min_ratio_allocation_exact():
    g = GoodsGraph.build(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d")])
    a1 = Agent(id=1, type_id=1, utility={"a": Fraction(4), "b": Fraction(1), "c": Fraction(1), "d": Fraction(1)})
    a2 = Agent(id=2, type_id=2, utility={"a": Fraction(1), "b": Fraction(1), "c": Fraction(1), "d": Fraction(4)})
    targets = {1: Fraction(4), 2: Fraction(4)}
    alloc = oracle.max_min_ratio_allocation(g, [a1, a2], targets)
    # opposite ends are worth 4 to each: both can hit their target exactly
    assert alloc.min_ratio >= 1
    assert "a" in alloc.bundle_of(1) and "d" in alloc.bundle_of(2)
    assert alloc.packing.is_partition_of(g)


def test_max_min_ratio_zero_target_unconstrained():
    g = GoodsGraph.build(["a", "b"], [("a", "b")])
    a1 = Agent(id=1, type_id=1, utility={"a": Fraction(1), "b": Fraction(1)})
    a2 = Agent(id=2, type_id=2, utility={"a": Fraction(1), "b": Fraction(1)})
    alloc = oracle.max_min_ratio_allocation(g, [a1, a2], {1: Fraction(2), 2: Fraction(0)})
    assert alloc.per_agent_ratio[2] == 1
    assert alloc.bundle_of(1) == frozenset({"a", "b"})
    with pytest.raises(InvalidInputError):
        oracle.max_min_ratio_allocation(g, [a1, a2], {1: Fraction(1), 2: Fraction(-1)})


def test_max_min_ratio_brute_force_cross_check():
    rng = random.Random("ratio-cross")
    for graph in connected_graphs_up_to(4)[-6:]:
        u1 = random_profile(rng, graph.vertices)
        u2 = random_profile(rng, graph.vertices)
        a1 = Agent(id=1, type_id=1, utility=u1)
        a2 = Agent(id=2, type_id=2, utility=u2)
        targets = {1: Fraction(3), 2: Fraction(5)}
        alloc = oracle.max_min_ratio_allocation(graph, [a1, a2], targets)
        best = None
        for parts in oracle.enumerate_connected_partitions(graph, 2):
            for assign in ((0, 1), (1, 0)):
                r1 = a1.value(parts[assign[0]]) / targets[1]
                r2 = a2.value(parts[assign[1]]) / targets[2]
                cand = min(r1, r2)
                if best is None or cand > best:
                    best = cand
        assert alloc.min_ratio == best


def test_cache_round_trip():
    oracle.clear_cache()
    g = GoodsGraph.build(["a", "b"], [("a", "b")])
    a = agent_with({"a": 1, "b": 2})
    first = oracle.mms(g, a, 2)
    again = oracle.mms(g, a, 2)
    assert first.value == again.value == 1
    oracle.clear_cache()
    assert oracle.mms(g, a, 2).value == 1
