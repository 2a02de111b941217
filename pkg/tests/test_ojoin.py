"""Hierarchical sampling, correction vectors, feasibility, joins, and tours."""

from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest

from hitsp.cuts import boundary_edges, build_hierarchy
from hitsp.instance import (
    GADGET_BUILDERS,
    build_support_graph,
    generate_instance,
    metric_closure,
    split_vertex_for_eplus,
)
from hitsp.ojoin import (
    ChargingParams,
    DEFAULT_TOP_TRUNCATION,
    JoinCalculator,
    bernoulli_unit_keys,
    build_join_vector,
    build_sampling_plan,
    build_tour,
    check_feasible,
    compute_even_at_last_probs,
    odd_vertices,
    prepare_instance,
    run_sample,
    sample_hierarchical_tree,
    sample_rng,
    tree_cost,
    unit_key_for_edge,
)

HALF = Fraction(1, 2)


@pytest.fixture(scope="module")
def chain2():
    return prepare_instance(generate_instance("cycle_chain", 2))


@pytest.fixture(scope="module")
def envelope2():
    return prepare_instance(generate_instance("envelope", 2))


def test_default_params():
    p = ChargingParams()
    assert p.top_truncation == DEFAULT_TOP_TRUNCATION == Fraction(1129032, 10**7)
    assert p.bottom_truncation == Fraction(1, 4)
    assert p.reduction == Fraction(1, 12)


def test_params_validate_range():
    with pytest.raises(ValueError):
        ChargingParams(alpha=Fraction(3, 2))
    with pytest.raises(ValueError):
        ChargingParams(tau=Fraction(-1, 12))


def test_sampled_connector_shape(chain2):
    rng = sample_rng(0, 0)
    support = chain2.support
    for _ in range(25):
        sample = sample_hierarchical_tree(chain2.plan, rng)
        assert len(sample.edges) == support.n
        assert len(set(sample.edges)) == support.n
        # spans: union-find over the chosen edges connects everything
        parent = list(range(support.n))

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        for e in sample.edges:
            u, v = support.endpoints(e)
            parent[find(u)] = find(v)
        assert len({find(v) for v in range(support.n)}) == 1
        # the distinguished doubled pair contributes exactly one copy, always
        a, b = support.e_plus_pair
        assert (a in sample.edges) != (b in sample.edges)
        assert set(sample.bernoulli_uniforms) == set(bernoulli_unit_keys(chain2.plan))


def test_cycle_levels_pick_one_companion_per_class(envelope2):
    rng = sample_rng(3, 1)
    h = envelope2.hierarchy
    for _ in range(10):
        sample = sample_hierarchical_tree(envelope2.plan, rng)
        chosen = set(sample.edges)
        for node in h.cycle_nodes():
            for cls in node.companion_classes:
                assert len(chosen & set(cls)) == 1


def test_sampling_is_seed_deterministic(chain2):
    a = sample_hierarchical_tree(chain2.plan, sample_rng(9, 4))
    b = sample_hierarchical_tree(chain2.plan, sample_rng(9, 4))
    assert a == b
    c = sample_hierarchical_tree(chain2.plan, sample_rng(9, 5))
    assert a != c or a.bernoulli_uniforms != c.bernoulli_uniforms


def test_final_edges_have_unit_even_probability(chain2):
    for e in chain2.hierarchy.final_edges():
        assert chain2.eal_probability[e] == 1


def test_truncation_caps_the_probability(envelope2):
    params = envelope2.params
    for e in range(len(envelope2.support.edges)):
        kind = envelope2.hierarchy.edge_level[e][0]
        cap = params.top_truncation if kind == "top" else params.bottom_truncation
        assert envelope2.truncated[e] == min(cap, envelope2.eal_probability[e])
        assert envelope2.unit_threshold[envelope2.unit_of[e]] >= 0


def test_exact_even_probabilities_match_monte_carlo(chain2):
    approx = compute_even_at_last_probs(
        chain2.plan, mode="monte_carlo", samples=4000, seed=2
    )
    for e, exact in chain2.eal_probability.items():
        assert abs(float(exact) - float(approx[e])) < 0.05


def test_edge_share_sums_to_one_over_charge_groups(envelope2):
    groups = envelope2.hierarchy.charge_groups()
    for side, edges in groups.items():
        total = sum((envelope2.edge_share[side][e] for e in edges), Fraction(0))
        mass = sum((envelope2.truncated[e] for e in edges), Fraction(0))
        if mass:
            assert total == 1
        else:
            assert total == 0


def test_unit_keys_partition_edges(envelope2):
    plan = envelope2.plan
    for e in range(len(envelope2.support.edges)):
        key = unit_key_for_edge(plan, e)
        kind = envelope2.hierarchy.edge_level[e][0]
        assert key[0] == {"top": "top", "bottom": "cycle", "final": "final"}[kind]


def test_vector_values_never_drop_below_reduced_base(chain2):
    floor = chain2.base_value - chain2.params.reduction
    rng = sample_rng(1, 0)
    for _ in range(40):
        sample = sample_hierarchical_tree(chain2.plan, rng)
        vector = build_join_vector(chain2, sample)
        assert all(v >= floor for v in vector.values)
        assert vector.total() == (
            chain2.base_value * len(vector.values)
            - chain2.params.reduction * len(vector.reduced)
            + sum(vector.increases, Fraction(0))
        )


def test_vector_reductions_require_even_last_cuts(chain2):
    support = chain2.support
    h = chain2.hierarchy
    rng = sample_rng(4, 7)
    for _ in range(40):
        sample = sample_hierarchical_tree(chain2.plan, rng)
        vector = build_join_vector(chain2, sample)
        in_tree = set(sample.edges)
        for e in vector.reduced:
            for side in h.edge_last_cuts[e]:
                crossing = len(set(boundary_edges(support, side)) & in_tree)
                assert crossing % 2 == 0


def test_vectors_cover_all_odd_cuts(chain2):
    rng = sample_rng(5, 0)
    for _ in range(60):
        sample = sample_hierarchical_tree(chain2.plan, rng)
        vector = build_join_vector(chain2, sample)
        result = check_feasible(chain2.support, sample.edges, vector.values)
        assert result.feasible, result.witness


def test_check_feasible_finds_a_violation():
    support = build_support_graph(
        split_vertex_for_eplus(GADGET_BUILDERS["doubled_triangle"]())
    )
    # a single edge gives both its endpoints odd degree; zeros cover nothing
    tree = (0,)
    zeros = [Fraction(0)] * len(support.edges)
    result = check_feasible(support, tree, zeros)
    assert not result.feasible
    assert result.witness is not None
    side = result.witness
    crossing = len(set(boundary_edges(support, side)) & set(tree))
    assert crossing % 2 == 1


def test_check_feasible_floor_flag(chain2):
    rng = sample_rng(2, 2)
    sample = sample_hierarchical_tree(chain2.plan, rng)
    vector = build_join_vector(chain2, sample)
    strict = check_feasible(
        chain2.support, sample.edges, vector.values, floor=Fraction(1, 2)
    )
    assert not strict.floor_ok
    loose = check_feasible(
        chain2.support, sample.edges, vector.values, floor=Fraction(1, 6)
    )
    assert loose.floor_ok


def test_odd_vertices_parity(chain2):
    rng = sample_rng(8, 0)
    sample = sample_hierarchical_tree(chain2.plan, rng)
    odd = odd_vertices(chain2.support, sample.edges)
    assert len(odd) % 2 == 0
    degree = [0] * chain2.support.n
    for e in sample.edges:
        u, v = chain2.support.endpoints(e)
        degree[u] += 1
        degree[v] += 1
    assert tuple(v for v in range(chain2.support.n) if degree[v] % 2) == odd


def brute_force_matching_cost(metric, odd):
    best = None

    def rec(rest, acc):
        nonlocal best
        if not rest:
            if best is None or acc < best:
                best = acc
            return
        a = rest[0]
        for i in range(1, len(rest)):
            b = rest[i]
            rec(rest[1:i] + rest[i + 1:], acc + metric.dist[a][b])

    rec(list(odd), Fraction(0))
    return best


def test_join_matching_is_minimum(envelope2):
    metric = envelope2.metric
    joins = JoinCalculator(metric)
    rng = sample_rng(11, 0)
    for _ in range(10):
        sample = sample_hierarchical_tree(envelope2.plan, rng)
        odd = odd_vertices(envelope2.support, sample.edges)
        if len(odd) > 8:
            continue
        pairs, exact = joins.matching(odd)
        assert exact
        cost = sum((metric.dist[u][v] for u, v in pairs), Fraction(0))
        assert cost == brute_force_matching_cost(metric, odd)
        assert sorted(v for pair in pairs for v in pair) == sorted(odd)


def test_join_calculator_handles_empty_and_pairs():
    inst = generate_instance("cycle_chain", 2)
    joins = JoinCalculator(metric_closure(inst))
    pairs, exact = joins.matching(())
    assert pairs == () and exact
    pairs, exact = joins.matching((0, 2))
    assert exact and len(pairs) == 1


def test_tour_is_a_cheap_hamiltonian_cycle(chain2):
    joins = JoinCalculator(chain2.metric)
    rng = sample_rng(6, 0)
    for _ in range(20):
        out = run_sample(chain2, rng, joins, build_vector=False)
        assert out.tour_cost <= out.tree_cost + out.join_cost


def test_build_tour_visits_every_vertex_once(chain2):
    rng = sample_rng(6, 1)
    joins = JoinCalculator(chain2.metric)
    sample = sample_hierarchical_tree(chain2.plan, rng)
    odd = odd_vertices(chain2.support, sample.edges)
    pairs, _ = joins.matching(odd)
    order, cost = build_tour(chain2.support, sample.edges, pairs, chain2.metric)
    assert sorted(order) == list(range(chain2.support.n))
    direct = sum(
        (chain2.metric.dist[order[i]][order[(i + 1) % len(order)]]
         for i in range(len(order))),
        Fraction(0),
    )
    assert cost == direct


def test_tree_cost_charges_instance_edges_once(chain2):
    rng = sample_rng(7, 0)
    sample = sample_hierarchical_tree(chain2.plan, rng)
    cost = tree_cost(chain2.instance, chain2.support, sample.edges)
    by_hand = Fraction(0)
    for e in sample.edges:
        idx = chain2.support.edges[e].instance_edge
        by_hand += chain2.instance.edges[idx].cost
    assert cost == by_hand


def test_sample_rng_is_index_keyed():
    a = sample_rng(13, 2).random(4)
    b = sample_rng(13, 2).random(4)
    c = sample_rng(13, 3).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_run_sample_populates_cut_loads(chain2):
    joins = JoinCalculator(chain2.metric)
    out = run_sample(chain2, sample_rng(0, 0), joins, build_vector=True)
    assert set(out.cut_loads) == set(chain2.cut_sides)
    # same seed, same draw order: rebuilding the vector reproduces every load
    vector = build_join_vector(
        chain2, sample_hierarchical_tree(chain2.plan, sample_rng(0, 0))
    )
    for side in chain2.cut_sides:
        assert out.cut_loads[side] == sum(
            (vector.values[e] for e in chain2.cut_boundary[side]), Fraction(0)
        )
