"""Exhaustive ground truth for the sampling pipeline.

Everything here recomputes pipeline quantities by direct enumeration of the
sampler's outcome space — per-level choice lists multiplied out, Bernoulli
units folded exactly — with no determinant identities or parity
convolutions, so the fast analytic paths can be compared against these
numbers at zero tolerance.  The module also houses the probability-bound
battery, the extremal Bernoulli-configuration search, and a small
dynamic-programming tour solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import prod
from typing import Iterator

import numpy as np

from .cuts import CutHierarchy, boundary_edges, canonical_side, level_tree_problem
from .instance import HalfIntegralInstance, metric_closure
from .maxent import enumerate_spanning_trees
from .ojoin import (
    JoinCalculator,
    PreparedInstance,
    SamplingPlan,
    TreeSample,
    bernoulli_unit_keys,
    build_join_vector,
    build_tour,
    tree_cost,
)

DEFAULT_OUTCOME_CAP = 10**7


class ResourceCapError(RuntimeError):
    """The requested enumeration exceeds the configured outcome budget."""


@dataclass(frozen=True)
class TreeEnumeration:
    """All spanning trees of a weighted multigraph with their probabilities."""

    trees: tuple[tuple[int, ...], ...]
    probabilities: tuple[Fraction, ...]
    total_weight: Fraction


def enumerate_trees(
    n: int,
    edges: list[tuple[int, int]],
    lam: list[Fraction] | None = None,
    cap: int = DEFAULT_OUTCOME_CAP,
) -> TreeEnumeration:
    """List every spanning tree with probability proportional to its weight."""
    weights = [Fraction(w) for w in lam] if lam is not None else None
    try:
        trees = enumerate_spanning_trees(n, edges, cap=cap)
    except ValueError as exc:
        raise ResourceCapError(str(exc)) from exc
    if weights is None:
        tree_weights = [Fraction(1)] * len(trees)
    else:
        tree_weights = [prod((weights[i] for i in t), start=Fraction(1)) for t in trees]
    total = sum(tree_weights, Fraction(0))
    if total == 0:
        raise ValueError("graph has no spanning tree of positive weight")
    return TreeEnumeration(
        trees=tuple(tuple(t) for t in trees),
        probabilities=tuple(w / total for w in tree_weights),
        total_weight=total,
    )


@dataclass(frozen=True)
class LevelOutcomes:
    """One independent sampling level flattened into explicit choices."""

    label: tuple
    choices: tuple[tuple[tuple[int, ...], Fraction], ...]


def level_outcome_table(plan: SamplingPlan) -> tuple[LevelOutcomes, ...]:
    """Flatten every sampling level into (edge set, probability) choices.

    Chain levels multiply out their per-class picks, cut-free levels list
    their spanning trees weighted by the level's exact weights, and the ring
    level multiplies its free classes around the forced edge.
    """
    out: list[LevelOutcomes] = []
    for level in plan.cycle_levels:
        denom = prod(len(cls) for cls in level.classes)
        choices = tuple(
            (tuple(sorted(combo)), Fraction(1, denom))
            for combo in product(*level.classes)
        )
        out.append(LevelOutcomes(("cycle", level.node_id), choices))
    for level in plan.degree_levels:
        enum = enumerate_trees(
            level.vertex_count, list(level.level_edges), list(level.lam_exact)
        )
        choices = tuple(
            (tuple(sorted(level.support_ids[i] for i in t)), p)
            for t, p in zip(enum.trees, enum.probabilities)
        )
        out.append(LevelOutcomes(("degree", level.node_id), choices))
    final = plan.final_level
    pools: list[tuple[tuple[int, ...], ...]] = []
    for idx, cls in enumerate(final.classes):
        if idx == final.forced_class:
            pools.append(((final.forced_edge,),))
        else:
            pools.append(tuple((e,) for e in cls))
    denom = prod(len(pool) for pool in pools)
    choices = tuple(
        (tuple(sorted(e for part in combo for e in part)), Fraction(1, denom))
        for combo in product(*pools)
    )
    out.append(LevelOutcomes(("final",), choices))
    return tuple(out)


def outcome_space_size(plan: SamplingPlan) -> tuple[int, int]:
    """(number of distinct trees, number of Bernoulli units) for the plan."""
    levels = level_outcome_table(plan)
    return (prod(len(lv.choices) for lv in levels), len(bernoulli_unit_keys(plan)))


def subset_joint_distribution(
    levels: tuple[LevelOutcomes, ...], edge_ids: tuple[int, ...]
) -> dict[tuple[int, ...], Fraction]:
    """Exact joint membership law of a few edges, by per-level convolution."""
    law: dict[tuple[int, ...], Fraction] = {(0,) * len(edge_ids): Fraction(1)}
    positions = {e: i for i, e in enumerate(edge_ids)}
    for level in levels:
        collapsed: dict[tuple[int, ...], Fraction] = {}
        for chosen, p in level.choices:
            pos = tuple(sorted(positions[e] for e in chosen if e in positions))
            collapsed[pos] = collapsed.get(pos, Fraction(0)) + p
        if set(collapsed) == {()}:
            continue
        nxt: dict[tuple[int, ...], Fraction] = {}
        for pattern, w in law.items():
            for pos, p in collapsed.items():
                key = list(pattern)
                for i in pos:
                    key[i] = 1
                k = tuple(key)
                nxt[k] = nxt.get(k, Fraction(0)) + w * p
        law = nxt
    return law


def subset_count_distribution(
    levels: tuple[LevelOutcomes, ...], edge_ids: tuple[int, ...]
) -> dict[int, Fraction]:
    """Exact law of how many of the given edges the sampled tree contains."""
    joint = subset_joint_distribution(levels, edge_ids)
    out: dict[int, Fraction] = {}
    for pattern, w in joint.items():
        c = sum(pattern)
        out[c] = out.get(c, Fraction(0)) + w
    return out


@dataclass(frozen=True)
class PipelineExpectations:
    """Exact enumeration results for one prepared instance."""

    tree_outcomes: int
    unit_count: int
    per_edge_marginal: tuple[Fraction, ...]
    per_edge_even: tuple[Fraction, ...]
    per_edge_value: tuple[Fraction, ...]
    cut_even: dict[frozenset, Fraction]
    cut_load: dict[frozenset, Fraction]
    expected_tree_cost: Fraction
    expected_join_cost: Fraction | None
    expected_tour_cost: Fraction | None


def _iterate_outcomes(
    levels: tuple[LevelOutcomes, ...],
    cut_bound: list[tuple[int, ...]],
    edge_count: int,
    edge_cut_indices: list[tuple[int, ...]],
) -> Iterator[tuple[Fraction, tuple[int, ...], int, int]]:
    """Yield (weight, tree, cut-parity bitmask, even-at-last bitmask)."""
    for combo in product(*(lv.choices for lv in levels)):
        weight = prod((p for _, p in combo), start=Fraction(1))
        tree = tuple(sorted(e for chosen, _ in combo for e in chosen))
        in_tree = set(tree)
        parity_mask = 0
        for i, bound in enumerate(cut_bound):
            if sum(1 for f in bound if f in in_tree) % 2 == 1:
                parity_mask |= 1 << i
        eal_mask = 0
        for e in range(edge_count):
            for idx in edge_cut_indices[e]:
                if (parity_mask >> idx) & 1:
                    break
            else:
                eal_mask |= 1 << e
        yield (weight, tree, parity_mask, eal_mask)


def exact_pipeline_expectations(
    prepared: PreparedInstance,
    cap: int = DEFAULT_OUTCOME_CAP,
    include_costs: bool = True,
) -> PipelineExpectations:
    """Enumerate the sampler's outcome space and average the construction.

    Trees come from the product of per-level choice lists; the Bernoulli
    units are folded exactly per tree (they are independent of it).  Join and
    tour costs are averaged when every odd set stays within the exact
    matching range, otherwise reported as None.
    """
    plan = prepared.plan
    support = prepared.support
    hierarchy = prepared.hierarchy
    params = prepared.params
    tau = params.reduction
    m = len(support.edges)
    n = support.n

    levels = level_outcome_table(plan)
    tree_total = prod(len(lv.choices) for lv in levels)
    units = bernoulli_unit_keys(plan)
    if tree_total * (2 ** len(units)) > cap:
        raise ResourceCapError(
            f"outcome space {tree_total} * 2^{len(units)} exceeds cap {cap}"
        )

    cut_list = list(prepared.cut_sides)
    cut_index = {side: i for i, side in enumerate(cut_list)}
    cut_bound = [prepared.cut_boundary[side] for side in cut_list]
    edge_sides = []
    edge_cut_indices = []
    for e in range(m):
        raw = hierarchy.last_cuts(e)
        pairs = tuple((side, cut_index[canonical_side(side, n)]) for side in raw)
        edge_sides.append(pairs)
        edge_cut_indices.append(tuple(idx for _, idx in pairs))
    groups = hierarchy.charge_groups()

    even_weight = [Fraction(0)] * len(cut_list)
    eal_weight = [Fraction(0)] * m
    marginal = [Fraction(0)] * m
    tree_cost_total = Fraction(0)
    joins = JoinCalculator(prepared.metric) if include_costs else None
    join_total: Fraction | None = Fraction(0) if include_costs else None
    tour_total: Fraction | None = Fraction(0) if include_costs else None

    for weight, tree, parity_mask, eal_mask in _iterate_outcomes(
        levels, cut_bound, m, edge_cut_indices
    ):
        for e in tree:
            marginal[e] += weight
        for i in range(len(cut_list)):
            if not (parity_mask >> i) & 1:
                even_weight[i] += weight
        for e in range(m):
            if (eal_mask >> e) & 1:
                eal_weight[e] += weight
        tree_cost_total += weight * tree_cost(prepared.instance, support, tree)
        if join_total is not None:
            degree = [0] * n
            for e in tree:
                u, v = support.endpoints(e)
                degree[u] += 1
                degree[v] += 1
            odd = tuple(v for v in range(n) if degree[v] % 2 == 1)
            if len(odd) > 16:
                join_total = tour_total = None
            else:
                join_total += weight * joins.exact_cost(odd)
                pairs, _ = joins.matching(odd)
                _, cost = build_tour(support, tree, pairs, prepared.metric)
                tour_total += weight * cost

    # Truncations, unit thresholds, and responsibilities recomputed from the
    # enumerated probabilities, independently of the analytic pipeline.
    trunc = []
    for e in range(m):
        kind = hierarchy.edge_level[e][0]
        hi = params.top_truncation if kind == "top" else params.bottom_truncation
        trunc.append(min(hi, eal_weight[e]))
    theta = [
        Fraction(0) if eal_weight[e] == 0 else trunc[e] / eal_weight[e]
        for e in range(m)
    ]
    share: dict[frozenset, dict[int, Fraction]] = {}
    for side, members in groups.items():
        denom = sum((trunc[f] for f in members), Fraction(0))
        if denom > 0:
            share[side] = {f: trunc[f] / denom for f in members}
        else:
            share[side] = {f: Fraction(0) for f in members}

    unit_theta: dict[tuple, Fraction] = {}
    for e in range(m):
        key = prepared.unit_of[e]
        if key in unit_theta and unit_theta[key] != theta[e]:
            raise ValueError(f"edges sharing unit {key} disagree on threshold")
        unit_theta[key] = theta[e]

    fold_memo: dict[tuple, Fraction] = {}

    def fold_expected_increase(
        items_a: tuple[tuple[tuple, int], ...],
        items_b: tuple[tuple[tuple, int], ...],
        share_a: Fraction,
        share_b: Fraction,
        odd_a: int,
        odd_b: int,
    ) -> Fraction:
        key = (items_a, items_b, share_a, share_b, odd_a, odd_b)
        if key in fold_memo:
            return fold_memo[key]
        involved = sorted({u for u, _ in items_a} | {u for u, _ in items_b})
        count_a = dict(items_a)
        count_b = dict(items_b)
        total = Fraction(0)
        for pattern in product((0, 1), repeat=len(involved)):
            p = Fraction(1)
            hits_a = 0
            hits_b = 0
            for u, bit in zip(involved, pattern):
                th = unit_theta.get(u, Fraction(0))
                p *= th if bit else 1 - th
                if bit:
                    hits_a += count_a.get(u, 0)
                    hits_b += count_b.get(u, 0)
            if p == 0:
                continue
            total += p * max(
                share_a * tau * hits_a * odd_a,
                share_b * tau * hits_b * odd_b,
            )
        fold_memo[key] = total
        return total

    edge_value = [Fraction(1, 4) - tau * trunc[e] for e in range(m)]
    final_set = set(hierarchy.final_edges())
    for weight, tree, parity_mask, eal_mask in _iterate_outcomes(
        levels, cut_bound, m, edge_cut_indices
    ):
        # A cut's shortfall counts the reduced edges across its whole
        # boundary, ring edges included.
        cut_items: dict[int, tuple[tuple[tuple, int], ...]] = {}
        for e in range(m):
            if e in final_set:
                continue
            parts = []
            for side, idx in edge_sides[e]:
                my_share = share.get(side, {}).get(e, Fraction(0))
                odd = (parity_mask >> idx) & 1
                items: tuple[tuple[tuple, int], ...] = ()
                if odd and my_share > 0:
                    if idx not in cut_items:
                        counts: dict[tuple, int] = {}
                        for f in cut_bound[idx]:
                            if (eal_mask >> f) & 1:
                                u = prepared.unit_of[f]
                                counts[u] = counts.get(u, 0) + 1
                        cut_items[idx] = tuple(sorted(counts.items()))
                    items = cut_items[idx]
                parts.append((items, my_share, odd))
            (items_a, share_a, odd_a), (items_b, share_b, odd_b) = parts
            if (odd_a and share_a > 0 and items_a) or (
                odd_b and share_b > 0 and items_b
            ):
                edge_value[e] += weight * fold_expected_increase(
                    items_a, items_b, share_a, share_b, odd_a, odd_b
                )

    cut_even = {side: even_weight[i] for i, side in enumerate(cut_list)}
    cut_load = {
        side: sum((edge_value[e] for e in cut_bound[i]), Fraction(0))
        for i, side in enumerate(cut_list)
    }
    return PipelineExpectations(
        tree_outcomes=tree_total,
        unit_count=len(units),
        per_edge_marginal=tuple(marginal),
        per_edge_even=tuple(eal_weight),
        per_edge_value=tuple(edge_value),
        cut_even=cut_even,
        cut_load=cut_load,
        expected_tree_cost=tree_cost_total,
        expected_join_cost=join_total,
        expected_tour_cost=tour_total,
    )


def exact_expectations_by_full_enumeration(
    prepared: PreparedInstance, cap: int = 2 * 10**5
) -> tuple[tuple[Fraction, ...], dict[frozenset, Fraction]]:
    """The dumbest possible route: every (tree, unit pattern) outcome drives
    the per-sample vector builder directly.  Tiny instances only."""
    plan = prepared.plan
    levels = level_outcome_table(plan)
    units = bernoulli_unit_keys(plan)
    tree_total = prod(len(lv.choices) for lv in levels)
    if tree_total * (2 ** len(units)) > cap:
        raise ResourceCapError("full outcome enumeration over cap")
    m = len(prepared.support.edges)
    totals = [Fraction(0)] * m
    loads = {side: Fraction(0) for side in prepared.cut_sides}
    for combo in product(*(lv.choices for lv in levels)):
        tree_weight = prod((p for _, p in combo), start=Fraction(1))
        tree = tuple(sorted(e for chosen, _ in combo for e in chosen))
        for pattern in product((0, 1), repeat=len(units)):
            unit_weight = Fraction(1)
            uniforms = {}
            for key, bit in zip(units, pattern):
                th = prepared.unit_threshold.get(key, Fraction(0))
                unit_weight *= th if bit else 1 - th
                uniforms[key] = 0.0 if bit else 1.0
            if unit_weight == 0:
                continue
            weight = tree_weight * unit_weight
            vector = build_join_vector(
                prepared, TreeSample(edges=tree, bernoulli_uniforms=uniforms)
            )
            for e in range(m):
                totals[e] += weight * vector.values[e]
            for side in prepared.cut_sides:
                loads[side] += weight * sum(
                    (vector.values[e] for e in prepared.cut_boundary[side]),
                    Fraction(0),
                )
    return (tuple(totals), loads)


@dataclass(frozen=True)
class LemmaCheck:
    """One verified probability bound: value `relation` bound on `subject`."""

    name: str
    subject: str
    value: Fraction
    bound: Fraction
    relation: str
    passed: bool


def _check(
    name: str, subject: str, value: Fraction, bound: Fraction, relation: str
) -> LemmaCheck:
    if relation == ">=":
        ok = value >= bound
    elif relation == "==":
        ok = value == bound
    elif relation == "<=":
        ok = value <= bound
    else:
        raise ValueError(f"unknown relation {relation!r}")
    return LemmaCheck(name, subject, value, bound, relation, ok)


def run_lemma_battery(
    prepared: PreparedInstance,
    expectations: PipelineExpectations | None = None,
    cap: int = DEFAULT_OUTCOME_CAP,
) -> tuple[LemmaCheck, ...]:
    """Every verified probability bound on one instance, from enumeration."""
    if expectations is None:
        expectations = exact_pipeline_expectations(
            prepared, cap=cap, include_costs=False
        )
    hierarchy = prepared.hierarchy
    support = prepared.support
    params = prepared.params
    n = support.n
    p = expectations.per_edge_even
    levels = level_outcome_table(prepared.plan)
    checks: list[LemmaCheck] = []

    def trunc(e: int) -> Fraction:
        kind = hierarchy.edge_level[e][0]
        hi = params.top_truncation if kind == "top" else params.bottom_truncation
        return min(hi, p[e])

    # Parity floor on every 4-edge tight cut.
    for side, even in expectations.cut_even.items():
        checks.append(
            _check("cut-even-13-27", f"cut {sorted(side)}", even, Fraction(13, 27), ">=")
        )

    # Cuts that are nobody's last cut never go odd.
    last_sides = set()
    for e in range(len(support.edges)):
        for raw in hierarchy.last_cuts(e):
            last_sides.add(canonical_side(raw, n))
    for side, even in expectations.cut_even.items():
        if side not in last_sides:
            checks.append(
                _check(
                    "spectator-cut-even", f"cut {sorted(side)}", even, Fraction(1), "=="
                )
            )

    # Ring-level edges are always even at last.
    for e in hierarchy.final_edges():
        checks.append(_check("ring-edge-even", f"edge {e}", p[e], Fraction(1), "=="))

    # Edges inside chain-structured nodes clear 1/4.
    for e in hierarchy.bottom_edges():
        checks.append(_check("bottom-edge-1-4", f"edge {e}", p[e], Fraction(1, 4), ">="))

    for node in hierarchy.degree_nodes():
        k, level_edges, _ = level_tree_problem(hierarchy, node.id)
        level_edge_set = set(node.internal_edges)
        child_sides = [
            (c, hierarchy.nodes[c].vertices) for c in node.children
        ]
        ups_by_child = {}
        for child_id, side in child_sides:
            ups_by_child[child_id] = tuple(
                f for f in boundary_edges(support, side) if f not in level_edge_set
            )
        k5_shape = (
            k == 4
            and len(level_edges) == 6
            and len({frozenset((a, b)) for a, b, _ in level_edges}) == 6
            and all(len(ups) == 1 for ups in ups_by_child.values())
        )
        for child_id, side in child_sides:
            boundary = boundary_edges(support, side)
            ups = ups_by_child[child_id]
            inward = tuple(f for f in boundary if f not in ups)
            label = f"node {node.id} child {child_id}"
            if not ups:
                total = sum((p[f] for f in boundary), Fraction(0))
                checks.append(_check("top-cut-4-27", label, total, Fraction(4, 27), ">="))
                worst = min(
                    sum((p[f] for f in w), Fraction(0))
                    for w in combinations(boundary, 3)
                )
                checks.append(
                    _check("top-cut-triple-1-27", label, worst, Fraction(1, 27), ">=")
                )
            else:
                if len(ups) != 1:
                    raise ValueError(
                        f"degree-node child {child_id} has {len(ups)} outward edges"
                    )
                worst_pair = min(
                    sum((p[f] for f in w), Fraction(0))
                    for w in combinations(inward, 2)
                )
                checks.append(
                    _check("top-pair-7-32", label, worst_pair, Fraction(7, 32), ">=")
                )
                gain = sum((trunc(f) for f in boundary), Fraction(0))
                checks.append(
                    _check(
                        "top-cut-min-gain",
                        label,
                        gain,
                        2 * params.top_truncation,
                        ">=",
                    )
                )
                # The child must be reached through its level, so its three
                # inward edges always intersect the tree.
                law = subset_count_distribution(levels, inward)
                covered = sum((w for c, w in law.items() if c >= 1), Fraction(0))
                if covered == 1:
                    checks.append(
                        _check(
                            "three-edge-exactly-one",
                            label,
                            law.get(1, Fraction(0)),
                            Fraction(1, 2),
                            ">=",
                        )
                    )
                    checks.append(
                        _check(
                            "three-edge-exactly-two",
                            label,
                            law.get(2, Fraction(0)),
                            Fraction(3, 8),
                            ">=",
                        )
                    )
        if k5_shape:
            for f in node.internal_edges:
                checks.append(
                    _check("k5-level-edge-1-4", f"edge {f}", p[f], Fraction(1, 4), ">=")
                )

    # Level edges whose endpoint cuts split one-and-zero on outward edges.
    for e in hierarchy.top_edges():
        _, node_id = hierarchy.edge_level[e]
        node = hierarchy.nodes[node_id]
        level_edge_set = set(node.internal_edges)
        up_counts = []
        for side in hierarchy.last_cuts(e):
            ups = tuple(
                f for f in boundary_edges(support, side) if f not in level_edge_set
            )
            up_counts.append(len(ups))
        if sorted(up_counts) == [0, 1]:
            checks.append(
                _check("top-edge-13-54", f"edge {e}", p[e], Fraction(13, 54), ">=")
            )

    # End-window law for chain-structured nodes: an interior doubled edge is
    # even at last exactly when each end window contributes one tree edge.
    for node in hierarchy.cycle_nodes():
        if node.child_order is None or not node.children:
            continue
        outer = set(node.boundary)
        first = hierarchy.nodes[node.child_order[0]].vertices
        last = hierarchy.nodes[node.child_order[-1]].vertices
        window_a = tuple(f for f in boundary_edges(support, first) if f in outer)
        window_b = tuple(f for f in boundary_edges(support, last) if f in outer)
        if len(window_a) != 2 or len(window_b) != 2:
            raise ValueError(f"chain node {node.id} has malformed end windows")
        joint = subset_joint_distribution(levels, window_a + window_b)
        hit = sum(
            (
                w
                for pattern, w in joint.items()
                if pattern[0] + pattern[1] == 1 and pattern[2] + pattern[3] == 1
            ),
            Fraction(0),
        )
        checks.append(
            _check("bottom-window-quarter", f"node {node.id}", hit, Fraction(1, 4), ">=")
        )
        if _matches_window_gadget(joint):
            checks.append(
                _check("bottom-gadget-tight", f"node {node.id}", hit, Fraction(1, 4), "==")
            )
    return tuple(checks)


def _matches_window_gadget(joint: dict[tuple[int, ...], Fraction]) -> bool:
    """Does the 4-edge window law factor as the tight product form?

    The tight form pairs one edge of each window into a uniform either-or
    choice, with the two remaining edges independent fair coins — i.e. the
    eight patterns containing exactly one of the paired edges all carry
    probability 1/8.
    """
    eighth = Fraction(1, 8)
    for a in (0, 1):
        for c in (2, 3):
            ok = True
            for pattern, w in joint.items():
                expected = eighth if pattern[a] + pattern[c] == 1 else Fraction(0)
                if w != expected:
                    ok = False
                    break
            if ok:
                return True
    return False


def k5_parity_census() -> dict[tuple[int, int], int]:
    """Parity census of the 16 uniform trees of the complete 4-vertex graph.

    For the fixed edge (0, 1): counts of (degree parity of 0, parity of 1),
    with 0 meaning even.
    """
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    trees = enumerate_spanning_trees(4, edges)
    census: dict[tuple[int, int], int] = {}
    for t in trees:
        deg = [0, 0, 0, 0]
        for i in t:
            u, v = edges[i]
            deg[u] += 1
            deg[v] += 1
        key = (deg[0] % 2, deg[1] % 2)
        census[key] = census.get(key, 0) + 1
    return census


@dataclass(frozen=True)
class BernoulliConfig:
    """Success probabilities of independent Bernoulli variables."""

    probabilities: tuple[Fraction, ...]

    def count_distribution(self) -> dict[int, Fraction]:
        pmf = {0: Fraction(1)}
        for q in self.probabilities:
            nxt: dict[int, Fraction] = {}
            for c, w in pmf.items():
                if q < 1:
                    nxt[c] = nxt.get(c, Fraction(0)) + w * (1 - q)
                if q > 0:
                    nxt[c + 1] = nxt.get(c + 1, Fraction(0)) + w * q
            pmf = nxt
        return pmf


HOEFFDING_FUNCTIONALS = ("parity_even", "p_delta_bound", "p_W_bound")


def evaluate_functional(name: str, config: BernoulliConfig) -> Fraction:
    """The three lower-bounded functionals over a sum of Bernoullis."""
    pmf = config.count_distribution()
    if name == "parity_even":
        return sum((w for c, w in pmf.items() if c % 2 == 0), Fraction(0))
    one = pmf.get(1, Fraction(0))
    three = pmf.get(3, Fraction(0))
    if name == "p_delta_bound":
        return Fraction(52, 27) - 3 * one - 4 * three
    if name == "p_W_bound":
        return Fraction(13, 9) - Fraction(5, 2) * one - 3 * three
    raise ValueError(f"unknown functional {name!r}")


def hoeffding_extremal(
    m: int, q: Fraction, functional: str
) -> tuple[Fraction, BernoulliConfig]:
    """Minimize a functional over m Bernoullis with fixed success mass q.

    The count being modeled is the tree degree of a contracted vertex, which
    is at least 1 with certainty, so admissible configurations have at least
    one probability equal to 1.  Within that domain the minimum is attained
    on the restricted grid where every probability is 0, 1, or one shared
    interior value; this scans that grid exactly and returns the argmin.
    """
    if m > 6:
        raise ValueError("extremal scan supports at most 6 variables")
    q = Fraction(q)
    if not 1 <= q <= m:
        raise ValueError("total success mass must lie in [1, m]")
    best: tuple[Fraction, BernoulliConfig] | None = None
    for ones in range(1, min(m, int(q)) + 1):
        rest = q - ones
        if rest == 0:
            config = BernoulliConfig(
                tuple([Fraction(1)] * ones + [Fraction(0)] * (m - ones))
            )
            value = evaluate_functional(functional, config)
            if best is None or value < best[0]:
                best = (value, config)
            continue
        for k in range(ones + 1, m + 1):
            x = rest / (k - ones)
            if not 0 < x <= 1:
                continue
            config = BernoulliConfig(
                tuple([Fraction(1)] * ones + [x] * (k - ones) + [Fraction(0)] * (m - k))
            )
            value = evaluate_functional(functional, config)
            if best is None or value < best[0]:
                best = (value, config)
    if best is None:
        raise ValueError("no feasible configuration")
    return best


def hoeffding_random_minimum(
    m: int, q: Fraction, functional: str, count: int, seed: int
) -> Fraction:
    """Minimum functional value over random admissible configurations.

    Each configuration pins one probability to 1 (the count is a tree degree,
    never zero) and spreads the remaining mass q - 1 in random proportions,
    rejecting draws that push any entry above 1.  Arithmetic is exact, so
    every sampled configuration has success mass q precisely.
    """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    q = Fraction(q)
    if not 1 <= q <= m:
        raise ValueError("total success mass must lie in [1, m]")
    rest = q - 1
    best: Fraction | None = None
    produced = 0
    while produced < count:
        raw = [Fraction(float(v)) for v in rng.random(m - 1)]
        total = sum(raw, Fraction(0))
        if total == 0:
            continue
        probs = [v * rest / total for v in raw]
        if any(v > 1 for v in probs):
            continue
        config = BernoulliConfig(tuple([Fraction(1)] + probs))
        value = evaluate_functional(functional, config)
        if best is None or value < best:
            best = value
        produced += 1
    assert best is not None
    return best


def optimal_tour_cost(instance: HalfIntegralInstance, cap: int = 13) -> Fraction:
    """Exact optimal metric tour cost by subset dynamic programming."""
    n = instance.n
    if n > cap:
        raise ResourceCapError(f"tour solver limited to {cap} vertices")
    dist = metric_closure(instance).dist
    full = 1 << (n - 1)
    best: list[list[Fraction | None]] = [[None] * (n - 1) for _ in range(full)]
    for v in range(n - 1):
        best[1 << v][v] = dist[n - 1][v]
    for mask in range(full):
        row = best[mask]
        for v in range(n - 1):
            cur = row[v]
            if cur is None or not (mask >> v) & 1:
                continue
            for w in range(n - 1):
                if (mask >> w) & 1:
                    continue
                nxt = mask | (1 << w)
                cand = cur + dist[v][w]
                if best[nxt][w] is None or cand < best[nxt][w]:
                    best[nxt][w] = cand
    answer = None
    for v in range(n - 1):
        value = best[full - 1][v]
        if value is None:
            continue
        total = value + dist[v][n - 1]
        if answer is None or total < answer:
            answer = total
    if answer is None:
        raise ValueError("no tour found")
    return answer
