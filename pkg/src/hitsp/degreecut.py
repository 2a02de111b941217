"""The variant pipeline for instances whose only minimum cuts are vertex cuts.

Applies to all-half instances (every edge value 1/2, support 4-regular) where
no proper vertex set induces a 4-edge cut.  The pipeline decomposes a
fractional matching target into maximum matchings, samples one, and samples a
spanning tree whose marginals are 1 on the matching (except one zeroed edge,
which is added back afterwards so the whole matching always rides along),
5/12 at the unmatched root vertex for odd orders, and 1/3 elsewhere.  The
correction vector starts at 1/2 on matched edges, 1/4 at the root, 1/6
elsewhere; a matched edge away from the root's neighborhood drops from 1/2 to
1/6 whenever both its endpoints get even tree degree.

The tree marginal vector can sit on proper faces of the spanning tree
polytope (tight sets), so sampling decomposes recursively: any vertex set
whose internal marginal mass equals its size minus one is split off and
sampled independently of the contracted remainder.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from ._simplex import solve_equalities_nonneg
from .instance import (
    HALF,
    HalfIntegralInstance,
    SupportGraph,
    build_support_graph,
    metric_closure,
)
from .maxent import (
    fit_lambda,
    joint_distribution,
    parity_pair_distribution,
    sample_tree,
    tree_marginals,
)
from .ojoin import JoinCalculator, build_tour, check_feasible, odd_vertices


class DegreeCutError(ValueError):
    """The instance does not qualify for the variant pipeline."""


@dataclass(frozen=True)
class MatchingDecomposition:
    """A convex combination of maximum matchings hitting the target exactly.

    ``weights[i]`` pairs an exact weight with a matching (frozenset of edge
    ids); weights are positive and sum to 1.  ``method`` records whether
    proportional fitting ("ipf") or the exact simplex fallback ("simplex")
    produced it.
    """

    weights: tuple[tuple[Fraction, frozenset[int]], ...]
    method: str

    def marginals(self, m: int) -> list[Fraction]:
        out = [Fraction(0)] * m
        for w, matching in self.weights:
            for e in matching:
                out[e] += w
        return out


def degree_cut_witness(instance: HalfIntegralInstance):
    """None when the instance qualifies; otherwise what disqualifies it.

    Returns ("value-one-edge", edge_id) or ("proper-min-cut", vertex_tuple).
    """
    for idx, e in enumerate(instance.edges):
        if e.lp_value != HALF:
            return ("value-one-edge", idx)
    support = build_support_graph(instance)
    from .cuts import enumerate_min_cuts

    for cut in enumerate_min_cuts(support):
        size = len(cut.vertices)
        if 2 <= size <= instance.n - 2:
            return ("proper-min-cut", tuple(sorted(cut.vertices)))
    return None


def require_degree_cut(instance: HalfIntegralInstance) -> None:
    witness = degree_cut_witness(instance)
    if witness is not None:
        kind, detail = witness
        raise DegreeCutError(f"not a degree-cut instance: {kind} {detail}")


def matching_size(n: int) -> int:
    return n // 2


def fractional_matching_target(instance: HalfIntegralInstance) -> list[Fraction]:
    """The per-edge matching marginals: (n-1)/(4n) for odd orders, 1/4 even."""
    n = instance.n
    if n % 2 == 1:
        value = Fraction(n - 1, 4 * n)
    else:
        value = Fraction(1, 4)
    return [value] * len(instance.edges)


def enumerate_maximum_matchings(instance: HalfIntegralInstance) -> list[frozenset[int]]:
    """All matchings of maximum size (perfect, or near-perfect for odd n)."""
    n = instance.n
    target = matching_size(n)
    incident: list[list[int]] = [[] for _ in range(n)]
    for idx, e in enumerate(instance.edges):
        incident[e.u].append(idx)
        incident[e.v].append(idx)
    out: list[frozenset[int]] = []
    covered = [False] * n
    budget = n - 2 * target  # how many vertices may stay uncovered

    def extend(vertex: int, chosen: list[int], skipped: int) -> None:
        if len(chosen) == target:
            out.append(frozenset(chosen))
            return
        if vertex == n:
            return
        if covered[vertex]:
            extend(vertex + 1, chosen, skipped)
            return
        for idx in incident[vertex]:
            e = instance.edges[idx]
            other = e.v if e.u == vertex else e.u
            if other < vertex or covered[other]:
                continue
            covered[vertex] = covered[other] = True
            chosen.append(idx)
            extend(vertex + 1, chosen, skipped)
            chosen.pop()
            covered[vertex] = covered[other] = False
        if skipped < budget:
            extend(vertex + 1, chosen, skipped + 1)

    extend(0, [], 0)
    return sorted(out, key=lambda m: tuple(sorted(m)))


def decompose_matching(
    instance: HalfIntegralInstance,
    max_iterations: int = 20_000,
    tolerance: float = 1e-12,
) -> MatchingDecomposition:
    """Write the fractional matching target as a convex matching combination.

    Proportional fitting over all maximum matchings, snapped to small exact
    rationals and verified; if the snap misses, an exact simplex solve over
    the same matchings provides the decomposition.
    """
    target = fractional_matching_target(instance)
    matchings = enumerate_maximum_matchings(instance)
    if not matchings:
        raise DegreeCutError("instance has no maximum matching of expected size")
    m = len(instance.edges)
    k = len(matchings)
    member = np.zeros((m, k))
    for j, matching in enumerate(matchings):
        for e in matching:
            member[e, j] = 1.0
    weights = np.full(k, 1.0 / k)
    target_f = np.array([float(t) for t in target])
    for _ in range(max_iterations):
        marg = member @ weights
        if np.max(np.abs(marg - target_f)) < tolerance:
            break
        for e in range(m):
            if marg[e] <= 0:
                continue
            factor = target_f[e] / marg[e]
            sel = member[e] > 0
            weights[sel] *= factor
            weights /= weights.sum()
            marg = member @ weights

    snapped = [Fraction(float(w)).limit_denominator(10**6) for w in weights]
    if _verify_decomposition(snapped, matchings, target, m):
        pairs = tuple(
            (w, matching) for w, matching in zip(snapped, matchings) if w > 0
        )
        return MatchingDecomposition(weights=pairs, method="ipf")

    rows = [[Fraction(int(e in matching)) for matching in matchings] for e in range(m)]
    rows.append([Fraction(1)] * k)
    rhs = list(target) + [Fraction(1)]
    solution = solve_equalities_nonneg(rows, rhs)
    if solution is None:
        raise DegreeCutError("matching decomposition infeasible")
    pairs = tuple((w, matching) for w, matching in zip(solution, matchings) if w > 0)
    return MatchingDecomposition(weights=pairs, method="simplex")


def _verify_decomposition(
    weights: Sequence[Fraction],
    matchings: Sequence[frozenset[int]],
    target: Sequence[Fraction],
    m: int,
) -> bool:
    if any(w < 0 for w in weights):
        return False
    if sum(weights, Fraction(0)) != 1:
        return False
    marg = [Fraction(0)] * m
    for w, matching in zip(weights, matchings):
        for e in matching:
            marg[e] += w
    return all(marg[e] == target[e] for e in range(m))


@dataclass(frozen=True)
class TreeLevel:
    """One independent sub-sampling problem of the face decomposition.

    ``edge_ids`` are original instance edge ids; ``level_edges`` their
    endpoints relabeled to 0..vertex_count-1.  ``lam_exact`` is the weight
    vector all exact computations use (unit weights when those already hit
    the targets exactly, otherwise a rationalized fit).
    """

    vertex_count: int
    level_edges: tuple[tuple[int, int], ...]
    edge_ids: tuple[int, ...]
    lam_float: tuple[float, ...]
    lam_exact: tuple[Fraction, ...]


def build_tree_levels(
    n: int,
    edges: Sequence[tuple[int, int]],
    targets: Sequence[Fraction],
) -> tuple[tuple[int, ...], tuple[int, ...], tuple[TreeLevel, ...]]:
    """Decompose a tree-polytope point into independently samplable levels.

    Edges with target 1 are pinned (in every tree), target 0 deleted.  Any
    vertex set whose internal target mass equals its size minus one confines
    exactly that many tree edges, so the tree law factorizes: the set's
    interior and its contraction are independent problems.  Recursing on
    inclusion-minimal tight sets yields levels with targets strictly inside
    their spanning-tree polytopes, where a weight fit converges.
    """
    pinned = tuple(i for i, t in enumerate(targets) if t == 1)
    deleted = tuple(i for i, t in enumerate(targets) if t == 0)

    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in pinned:
        u, v = edges[i]
        ru, rv = find(u), find(v)
        if ru == rv:
            raise DegreeCutError("pinned tree edges contain a cycle")
        parent[ru] = rv
    roots = sorted({find(v) for v in range(n)})
    relabel = {r: i for i, r in enumerate(roots)}
    live = []
    for i in range(len(edges)):
        if i in pinned or i in deleted:
            continue
        u, v = relabel[find(edges[i][0])], relabel[find(edges[i][1])]
        if u == v:
            raise DegreeCutError(f"edge {i} has positive target but is a self-loop")
        live.append((i, u, v))

    levels: list[TreeLevel] = []

    def split(nq: int, items: list[tuple[int, int, int]], tvals: dict) -> None:
        if nq <= 1:
            if items:
                raise DegreeCutError("leftover edges on a single vertex")
            return
        tight = None
        for size in range(2, nq):
            for subset in combinations(range(nq), size):
                sset = set(subset)
                inside = [it for it in items if it[1] in sset and it[2] in sset]
                mass = sum((tvals[it[0]] for it in inside), Fraction(0))
                if mass == size - 1:
                    tight = (sset, inside)
                    break
            if tight:
                break
        if tight is None:
            _emit_level(nq, items, tvals, levels)
            return
        sset, inside = tight
        order = {v: i for i, v in enumerate(sorted(sset))}
        split(
            len(sset),
            [(idx, order[u], order[v]) for idx, u, v in inside],
            tvals,
        )
        merged = min(sset)
        outer_order = {}
        nxt = 0
        for v in range(nq):
            if v in sset and v != merged:
                continue
            outer_order[v] = nxt
            nxt += 1
        inside_ids = {it[0] for it in inside}
        outside = []
        for idx, u, v in items:
            if idx in inside_ids:
                continue
            uu = merged if u in sset else u
            vv = merged if v in sset else v
            if uu == vv:
                raise DegreeCutError(f"edge {idx} trapped inside a tight set")
            outside.append((idx, outer_order[uu], outer_order[vv]))
        split(nxt, outside, tvals)

    tvals = {i: Fraction(targets[i]) for i, _, _ in live}
    split(len(roots), live, tvals)
    return (pinned, deleted, tuple(levels))


def _emit_level(
    nq: int,
    items: list[tuple[int, int, int]],
    tvals: dict,
    levels: list[TreeLevel],
) -> None:
    level_edges = tuple((u, v) for _, u, v in items)
    edge_ids = tuple(idx for idx, _, _ in items)
    targets = [tvals[idx] for idx in edge_ids]
    unit = [Fraction(1)] * len(level_edges)
    if tree_marginals(nq, level_edges, unit).values == tuple(targets):
        lam_float = tuple(1.0 for _ in level_edges)
        lam_exact = tuple(Fraction(1) for _ in level_edges)
    else:
        fit = fit_lambda(nq, list(level_edges), [float(t) for t in targets], tol=1e-10)
        if fit.forced or fit.deleted:
            raise DegreeCutError("level fit pinned edges unexpectedly")
        lam_float = fit.values
        lam_exact = tuple(Fraction(v).limit_denominator(10**12) for v in fit.values)
    levels.append(
        TreeLevel(
            vertex_count=nq,
            level_edges=level_edges,
            edge_ids=edge_ids,
            lam_float=lam_float,
            lam_exact=lam_exact,
        )
    )


@dataclass(frozen=True)
class MatchingContext:
    """Everything derived from one sampled matching.

    ``root`` is the unmatched vertex (None for even orders), ``terminals``
    its matched neighbors, ``normal_edges`` the matched edges with no
    terminal endpoint.  ``forced_edge`` (the lowest-id matched edge) has tree
    target 0 but is appended to every sampled tree, so the whole matching is
    always present; ``pinned`` are the other matched edges.  ``levels`` is
    the face decomposition of the remaining marginals.
    """

    matching: frozenset[int]
    root: int | None
    terminals: frozenset[int]
    normal_edges: tuple[int, ...]
    forced_edge: int
    pinned: tuple[int, ...]
    levels: tuple[TreeLevel, ...]
    tree_values: tuple[Fraction, ...]


def tree_target_vector(
    instance: HalfIntegralInstance, matching: frozenset[int]
) -> tuple[tuple[Fraction, ...], int, int | None]:
    """The spanning-tree marginal vector for one matching.

    Matched edges carry 1 except the lowest-id one which carries 0; edges at
    the unmatched root carry 5/12; all others 1/3.  Returns (vector, dropped
    edge, root vertex).
    """
    n = instance.n
    covered = set()
    for e in matching:
        covered.add(instance.edges[e].u)
        covered.add(instance.edges[e].v)
    root = None
    if n % 2 == 1:
        missing = [v for v in range(n) if v not in covered]
        if len(missing) != 1:
            raise DegreeCutError(f"matching misses {len(missing)} vertices")
        root = missing[0]
    forced = min(matching)
    values = []
    for idx, e in enumerate(instance.edges):
        if idx == forced:
            values.append(Fraction(0))
        elif idx in matching:
            values.append(Fraction(1))
        elif root is not None and root in (e.u, e.v):
            values.append(Fraction(5, 12))
        else:
            values.append(Fraction(1, 3))
    return (tuple(values), forced, root)


def build_matching_context(
    instance: HalfIntegralInstance, matching: frozenset[int]
) -> MatchingContext:
    values, forced, root = tree_target_vector(instance, matching)
    total = sum(values, Fraction(0))
    if total != instance.n - 1:
        raise DegreeCutError(f"tree targets sum to {total}, expected {instance.n - 1}")
    terminals = frozenset()
    if root is not None:
        terminals = frozenset(
            e.v if e.u == root else e.u
            for e in instance.edges
            if root in (e.u, e.v)
        )
    normal = tuple(
        sorted(
            e
            for e in matching
            if instance.edges[e].u not in terminals
            and instance.edges[e].v not in terminals
        )
    )
    edges = [(e.u, e.v) for e in instance.edges]
    pinned, deleted, levels = build_tree_levels(instance.n, edges, values)
    if set(deleted) != {forced}:
        raise DegreeCutError("expected exactly the dropped matched edge at target 0")
    # Every level together with the pinned edges must account for a spanning tree.
    covered_count = len(pinned) + sum(lv.vertex_count - 1 for lv in levels)
    if covered_count != instance.n - 1:
        raise DegreeCutError("face decomposition does not assemble a spanning tree")
    return MatchingContext(
        matching=matching,
        root=root,
        terminals=terminals,
        normal_edges=normal,
        forced_edge=forced,
        pinned=pinned,
        levels=levels,
        tree_values=values,
    )


def sample_matching_tree(
    instance: HalfIntegralInstance, context: MatchingContext, rng: np.random.Generator
) -> tuple[int, ...]:
    """One connector: pinned matching edges, independent level trees, plus
    the dropped matched edge added back (n edges total, one cycle)."""
    chosen = list(context.pinned)
    for level in context.levels:
        picked = sample_tree(
            level.vertex_count, list(level.level_edges), level.lam_float, rng
        )
        chosen.extend(level.edge_ids[i] for i in picked)
    chosen.append(context.forced_edge)
    return tuple(sorted(chosen))


def base_correction_values(
    instance: HalfIntegralInstance, context: MatchingContext
) -> list[Fraction]:
    """The pre-reduction vector: 1/2 on matched, 1/4 at the root, 1/6 else."""
    values = []
    for idx, e in enumerate(instance.edges):
        if idx in context.matching:
            values.append(Fraction(1, 2))
        elif context.root is not None and context.root in (e.u, e.v):
            values.append(Fraction(1, 4))
        else:
            values.append(Fraction(1, 6))
    return values


def correction_vector(
    instance: HalfIntegralInstance,
    context: MatchingContext,
    tree_edges: Iterable[int],
) -> tuple[list[Fraction], list[int]]:
    """Apply the even-degree reduction to normal matched edges.

    Returns (values, reduced normal edges).  A normal matched edge drops from
    1/2 to 1/6 when both of its endpoints have even degree in the connector.
    """
    tree = set(tree_edges)
    degree = [0] * instance.n
    for e in tree:
        degree[instance.edges[e].u] += 1
        degree[instance.edges[e].v] += 1
    values = base_correction_values(instance, context)
    reduced = []
    for e in context.normal_edges:
        u, v = instance.edges[e].u, instance.edges[e].v
        if degree[u] % 2 == 0 and degree[v] % 2 == 0:
            values[e] = Fraction(1, 6)
            reduced.append(e)
    return (values, reduced)


def _always_in_tree(context: MatchingContext) -> set[int]:
    return set(context.pinned) | {context.forced_edge}


def normal_even_probability(
    instance: HalfIntegralInstance, context: MatchingContext, edge: int
) -> Fraction:
    """P[both endpoints of a matched edge get even connector degree], exactly.

    The matched edge itself is always present, so an endpoint is even exactly
    when an odd number of its three other edges enter; those live in the
    independent levels, whose parity laws convolve.
    """
    e = instance.edges[edge]
    certain = _always_in_tree(context)

    def certain_degree(v: int) -> int:
        return sum(
            1
            for i in certain
            if v in (instance.edges[i].u, instance.edges[i].v)
        )

    law = {(0, 0): Fraction(1)}
    for level in context.levels:
        focus_u = [
            pos
            for pos, idx in enumerate(level.edge_ids)
            if e.u in (instance.edges[idx].u, instance.edges[idx].v)
        ]
        focus_v = [
            pos
            for pos, idx in enumerate(level.edge_ids)
            if e.v in (instance.edges[idx].u, instance.edges[idx].v)
        ]
        if not focus_u and not focus_v:
            continue
        level_law = parity_pair_distribution(
            level.vertex_count,
            list(level.level_edges),
            list(level.lam_exact),
            focus_u,
            focus_v,
        )
        nxt: dict[tuple[int, int], Fraction] = {}
        for (p1, q1), w1 in law.items():
            for (p2, q2), w2 in level_law.items():
                if w2 == 0:
                    continue
                key = (p1 ^ p2, q1 ^ q2)
                nxt[key] = nxt.get(key, Fraction(0)) + w1 * w2
        law = nxt
    want_u = certain_degree(e.u) % 2
    want_v = certain_degree(e.v) % 2
    return law.get((want_u, want_v), Fraction(0))


def exactly_one_each_probability(
    instance: HalfIntegralInstance, context: MatchingContext, edge: int
) -> Fraction:
    """P[exactly one other edge enters at each endpoint of a matched edge].

    Counts (not parities): the joint law of how many of the three non-matched
    edges at each endpoint enter the tree, convolved across levels.
    """
    e = instance.edges[edge]
    side_u = [
        i
        for i, f in enumerate(instance.edges)
        if i != edge and e.u in (f.u, f.v)
    ]
    side_v = [
        i
        for i, f in enumerate(instance.edges)
        if i != edge and e.v in (f.u, f.v)
    ]
    certain = _always_in_tree(context)
    base_u = sum(1 for i in side_u if i in certain)
    base_v = sum(1 for i in side_v if i in certain)
    law = {(base_u, base_v): Fraction(1)}
    for level in context.levels:
        focus = [
            pos
            for pos, idx in enumerate(level.edge_ids)
            if idx in side_u or idx in side_v
        ]
        if not focus:
            continue
        joint = joint_distribution(
            level.vertex_count,
            list(level.level_edges),
            list(level.lam_exact),
            focus,
        )
        level_law: dict[tuple[int, int], Fraction] = {}
        for pattern, prob in joint.probabilities.items():
            cu = sum(
                1
                for pos, bit in zip(focus, pattern)
                if bit and level.edge_ids[pos] in side_u
            )
            cv = sum(
                1
                for pos, bit in zip(focus, pattern)
                if bit and level.edge_ids[pos] in side_v
            )
            key = (cu, cv)
            level_law[key] = level_law.get(key, Fraction(0)) + prob
        nxt: dict[tuple[int, int], Fraction] = {}
        for (a1, b1), w1 in law.items():
            for (a2, b2), w2 in level_law.items():
                key = (a1 + a2, b1 + b2)
                nxt[key] = nxt.get(key, Fraction(0)) + w1 * w2
        law = nxt
    return law.get((1, 1), Fraction(0))


def expected_edge_vector(
    instance: HalfIntegralInstance, context: MatchingContext
) -> list[Fraction]:
    """E[y_e] for one matching: base values minus the reduction mass."""
    values = base_correction_values(instance, context)
    for e in context.normal_edges:
        values[e] -= Fraction(1, 3) * normal_even_probability(instance, context, e)
    return values


def expected_vertex_values(
    instance: HalfIntegralInstance,
    decomposition: MatchingDecomposition,
    contexts: dict,
) -> list[Fraction]:
    """E[y(delta(u))] per vertex over matchings and trees, exactly."""
    out = [Fraction(0)] * instance.n
    for w, matching in decomposition.weights:
        per_edge = expected_edge_vector(instance, contexts[matching])
        for idx, e in enumerate(instance.edges):
            out[e.u] += w * per_edge[idx]
            out[e.v] += w * per_edge[idx]
    return out


def expected_edge_values(
    instance: HalfIntegralInstance, decomposition: MatchingDecomposition
) -> list[Fraction]:
    """E[z_e] over the matching draw: matched 1, root-incident 5/12, else 1/3.

    This is the connector membership probability per edge (the dropped edge
    returns to every tree), and it equals exactly 1/2 everywhere whenever the
    decomposition hits the target.
    """
    m = len(instance.edges)
    out = [Fraction(0)] * m
    for w, matching in decomposition.weights:
        covered = set()
        for e in matching:
            covered.add(instance.edges[e].u)
            covered.add(instance.edges[e].v)
        root = None
        if instance.n % 2 == 1:
            root = next(v for v in range(instance.n) if v not in covered)
        for idx, edge in enumerate(instance.edges):
            if idx in matching:
                out[idx] += w
            elif root is not None and root in (edge.u, edge.v):
                out[idx] += w * Fraction(5, 12)
            else:
                out[idx] += w * Fraction(1, 3)
    return out


@dataclass(frozen=True)
class DegreeCutSample:
    matching: frozenset[int]
    tree_edges: tuple[int, ...]
    tree_cost: Fraction
    join_cost: Fraction
    tour_cost: Fraction
    reduced_normal: tuple[int, ...]
    vector_total: Fraction
    feasible: bool | None


@dataclass(frozen=True)
class DegreeCutReport:
    instance_name: str
    n: int
    lp_cost: Fraction
    decomposition_method: str
    matching_count: int
    expected_edge_value: Fraction
    expected_tree_cost: Fraction
    per_vertex_expected_max: Fraction
    samples: int
    mean_tour_ratio: float
    tour_ratio_std: float
    mean_vector_total: float
    normal_even_rate: float | None
    feasible_failures: int


def sample_degree_cut(
    instance: HalfIntegralInstance,
    decomposition: MatchingDecomposition,
    contexts: dict,
    rng: np.random.Generator,
    joins: JoinCalculator,
    support: SupportGraph,
    metric,
    check_vector: bool = False,
) -> DegreeCutSample:
    """One end-to-end sample: matching, connector, vector, matching-join tour."""
    weights = np.array([float(w) for w, _ in decomposition.weights])
    idx = int(rng.choice(len(weights), p=weights / weights.sum()))
    matching = decomposition.weights[idx][1]
    context = contexts[matching]
    tree = sample_matching_tree(instance, context, rng)
    values, reduced = correction_vector(instance, context, tree)
    odd = odd_vertices(support, tree)
    pairs, _ = joins.matching(odd)
    join_cost = sum((metric.dist[u][v] for u, v in pairs), Fraction(0))
    _, tour = build_tour(support, tree, pairs, metric)
    cost = sum((instance.edges[e].cost for e in tree), Fraction(0))
    feasible = None
    if check_vector:
        result = check_feasible(support, tree, values, floor=Fraction(1, 6))
        feasible = result.feasible and result.floor_ok
    return DegreeCutSample(
        matching=matching,
        tree_edges=tree,
        tree_cost=cost,
        join_cost=join_cost,
        tour_cost=tour,
        reduced_normal=tuple(reduced),
        vector_total=sum(values, Fraction(0)),
        feasible=feasible,
    )


def run_degree_cut(
    instance: HalfIntegralInstance,
    samples: int,
    seed: int,
    check_vectors: bool = False,
) -> DegreeCutReport:
    """Decompose, build per-matching contexts, then sample end to end."""
    require_degree_cut(instance)
    decomposition = decompose_matching(instance)
    contexts = {
        matching: build_matching_context(instance, matching)
        for _, matching in decomposition.weights
    }
    support = build_support_graph(instance)
    metric = metric_closure(instance)
    joins = JoinCalculator(metric)

    expected_edges = expected_edge_values(instance, decomposition)
    expected_tree = sum(
        (instance.edges[i].cost * expected_edges[i] for i in range(len(instance.edges))),
        Fraction(0),
    )
    vertex_values = expected_vertex_values(instance, decomposition, contexts)
    per_vertex_max = max(vertex_values)

    lp = instance.lp_cost()
    ratios = []
    totals = []
    normal_hits = 0
    normal_draws = 0
    failures = 0
    for i in range(samples):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(i,)))
        out = sample_degree_cut(
            instance, decomposition, contexts, rng, joins, support, metric,
            check_vector=check_vectors,
        )
        ratios.append(float(out.tour_cost / lp))
        totals.append(float(out.vector_total))
        context = contexts[out.matching]
        if context.normal_edges:
            normal_draws += len(context.normal_edges)
            normal_hits += len(out.reduced_normal)
        if out.feasible is False:
            failures += 1
    mean_ratio = float(np.mean(ratios)) if ratios else 0.0
    ratio_std = float(np.std(ratios, ddof=1)) if len(ratios) > 1 else 0.0
    mean_total = float(np.mean(totals)) if totals else 0.0
    rate = (normal_hits / normal_draws) if normal_draws else None
    uniform_edge = expected_edges[0]
    if any(v != uniform_edge for v in expected_edges):
        uniform_edge = Fraction(
            sum(expected_edges, Fraction(0)), len(expected_edges)
        )
    return DegreeCutReport(
        instance_name=instance.name,
        n=instance.n,
        lp_cost=lp,
        decomposition_method=decomposition.method,
        matching_count=len(decomposition.weights),
        expected_edge_value=uniform_edge,
        expected_tree_cost=expected_tree,
        per_vertex_expected_max=per_vertex_max,
        samples=samples,
        mean_tour_ratio=mean_ratio,
        tour_ratio_std=ratio_std,
        mean_vector_total=mean_total,
        normal_even_rate=rate,
        feasible_failures=failures,
    )
