"""Instance parsing, validation, serialization, generators, and metrics."""

from fractions import Fraction

import pytest

from hitsp.instance import (
    CostError,
    EdgeValueError,
    GADGET_BUILDERS,
    GENERATOR_FAMILIES,
    InstanceError,
    MalformedInstanceError,
    build_support_graph,
    generate_instance,
    make_instance,
    metric_closure,
    parse_instance,
    serialize_instance,
    split_vertex_for_eplus,
)

HALF = Fraction(1, 2)


def square_edges():
    return [(0, 1, "1", 1), (1, 2, "1/2", 1), (2, 3, "1", 1), (3, 0, "1/2", 1),
            (1, 3, "1/2", 1), (0, 2, "1/2", 1)]


def test_make_instance_roundtrip_bytes():
    inst = make_instance("square", 4, square_edges(), e_plus=0)
    text = serialize_instance(inst)
    again = parse_instance(text)
    assert serialize_instance(again) == text
    assert again == inst


def test_parse_rejects_float_values():
    inst = make_instance("square", 4, square_edges())
    text = serialize_instance(inst).replace('"1/2"', "0.5")
    with pytest.raises(InstanceError):
        parse_instance(text)


def test_parse_rejects_bad_edge_value():
    with pytest.raises(EdgeValueError):
        make_instance("bad", 4, [(0, 1, "1/3", 1)] + square_edges()[1:])


def test_parse_rejects_negative_cost():
    with pytest.raises(CostError):
        make_instance("bad", 4, [(0, 1, "1", -1)] + square_edges()[1:])


def test_rejects_wrong_degree():
    # dropping an edge breaks the x(delta(v)) == 2 requirement
    with pytest.raises(InstanceError):
        make_instance("bad", 4, square_edges()[:-1])


def test_rejects_self_loop_and_duplicate():
    with pytest.raises(InstanceError):
        make_instance("bad", 4, [(0, 0, "1", 1)] + square_edges()[1:])
    dup = square_edges() + [(1, 2, "1/2", 1)]
    with pytest.raises(InstanceError):
        make_instance("bad", 4, dup)


def test_e_plus_must_be_doubled():
    inst = make_instance("square", 4, square_edges())
    with pytest.raises(MalformedInstanceError):
        inst.with_e_plus(1)  # a half edge
    assert inst.with_e_plus(0).e_plus == 0


def test_lp_cost_square():
    inst = make_instance("square", 4, square_edges())
    # 2 doubled unit edges + 4 half unit edges = 2 + 2
    assert inst.lp_cost() == 4


def test_support_graph_doubling_and_regularity():
    inst = make_instance("square", 4, square_edges(), e_plus=0)
    support = build_support_graph(inst)
    assert support.n == 4
    assert len(support.edges) == 8  # 2 doubled -> 4 copies, 4 half -> 4 copies
    degree = [0] * support.n
    for e in support.edges:
        degree[e.u] += 1
        degree[e.v] += 1
    assert all(d == 4 for d in degree)
    assert support.e_plus_pair is not None
    a, b = support.e_plus_pair
    assert support.endpoints(a) == support.endpoints(b)


def test_pair_members_sizes():
    inst = make_instance("square", 4, square_edges())
    support = build_support_graph(inst)
    for idx, edge in enumerate(inst.edges):
        want = 2 if edge.lp_value == 1 else 1
        assert len(support.pair_members[idx]) == want


def test_split_vertex_adds_one_vertex_when_needed():
    inst = GADGET_BUILDERS["split_k5"]()
    # already split by the builder: idempotent
    again = split_vertex_for_eplus(inst)
    assert again.n == inst.n
    base = generate_instance("k5_degree", 5)
    assert split_vertex_for_eplus(base.with_e_plus(base.doubled_edges()[0])).n == base.n + 1 if base.doubled_edges() else True


def test_metric_closure_triangle_inequality():
    inst = generate_instance("envelope", 2)
    metric = metric_closure(inst)
    n = inst.n
    for u in range(n):
        assert metric.dist[u][u] == 0
        for v in range(n):
            assert metric.dist[u][v] == metric.dist[v][u]
            for w in range(n):
                assert metric.dist[u][w] <= metric.dist[u][v] + metric.dist[v][w]


@pytest.mark.parametrize("family,size", [
    ("cycle_chain", 2), ("cycle_chain", 4),
    ("envelope", 1), ("envelope", 5),
    ("k5_degree", 5), ("k5_degree", 8),
])
def test_generators_produce_valid_instances(family, size):
    inst = generate_instance(family, size)
    support = build_support_graph(inst)
    degree = [0] * support.n
    for e in support.edges:
        degree[e.u] += 1
        degree[e.v] += 1
    assert all(d == 4 for d in degree)


def test_generator_families_constant_is_exhaustive():
    for family in GENERATOR_FAMILIES:
        size = 2 if family in ("envelope", "cycle_chain") else 5
        inst = generate_instance(family, size, seed=0)
        assert inst.n >= 4


def test_unknown_family_raises():
    with pytest.raises(ValueError):
        generate_instance("nosuch", 3)


def test_random_family_is_seed_deterministic():
    a = generate_instance("random_half_integral", 8, seed=11)
    b = generate_instance("random_half_integral", 8, seed=11)
    assert serialize_instance(a) == serialize_instance(b)


@pytest.mark.parametrize("name", sorted(GADGET_BUILDERS))
def test_gadget_builders_validate(name):
    inst = GADGET_BUILDERS[name]()
    support = build_support_graph(inst)
    assert support.n >= 3
    degree = [0] * support.n
    for e in support.edges:
        degree[e.u] += 1
        degree[e.v] += 1
    assert all(d == 4 for d in degree)


def test_duals_certify_lp_cost_when_present():
    inst = generate_instance("cycle_chain", 3)
    if inst.duals is None:
        pytest.skip("generator provides no duals")
    total = sum(inst.duals, Fraction(0))
    assert 2 * total == inst.lp_cost()
