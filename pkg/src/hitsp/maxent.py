"""Weighted spanning-tree distributions: counting, marginals, fitting, sampling.

A distribution over spanning trees of a multigraph is described by one weight
per edge; a tree's probability is proportional to the product of its edge
weights.  This module provides exact (rational-arithmetic) and float routines
for tree counts, single-edge marginals, small joint laws and parity laws, a
multiplicative fixed-point fitter that finds weights realizing prescribed
marginals, and a loop-erased random-walk sampler.

Graphs are given as ``(n, edges)`` with ``edges`` a sequence of ``(u, v)``
pairs over vertices ``0..n-1``; parallel edges are distinct entries and edge
identity is positional.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class LambdaWeights:
    """Per-edge tree weights, aligned with the graph's edge list."""

    values: tuple

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class MarginalVector:
    """Per-edge tree membership probabilities, aligned with the edge list."""

    values: tuple

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class JointDistribution:
    """Exact joint law of tree membership over a small edge subset.

    ``probabilities`` maps bit patterns (aligned with ``edges``) to their
    probability; patterns with probability zero are omitted.
    """

    edges: tuple[int, ...]
    probabilities: dict

    def probability(self, pattern: Sequence[int]) -> Fraction:
        return self.probabilities.get(tuple(pattern), Fraction(0))

    def marginal(self, position: int):
        total = None
        for pattern, prob in self.probabilities.items():
            if pattern[position]:
                total = prob if total is None else total + prob
        return Fraction(0) if total is None else total


class FitConvergenceError(RuntimeError):
    """The marginal fitter did not reach tolerance; carries the best error."""

    def __init__(self, message: str, error: float):
        super().__init__(message)
        self.error = error


@dataclass(frozen=True)
class LambdaFit:
    """Result of fitting weights to target marginals.

    ``values`` has one float per edge (placeholders for pinned edges);
    ``forced`` lists edges with target 1 (in every tree), ``deleted`` edges
    with target 0 (in no tree).  ``error`` is the final max marginal error.
    """

    values: tuple[float, ...]
    forced: tuple[int, ...]
    deleted: tuple[int, ...]
    error: float
    iterations: int


def _determinant(matrix: list[list], exact: bool):
    """Determinant by Gaussian elimination; exact path keeps Fractions."""
    size = len(matrix)
    if size == 0:
        return Fraction(1) if exact else 1.0
    m = [row[:] for row in matrix]
    det = Fraction(1) if exact else 1.0
    for col in range(size):
        pivot_row = None
        if exact:
            for r in range(col, size):
                if m[r][col] != 0:
                    pivot_row = r
                    break
        else:
            best = 0.0
            for r in range(col, size):
                if abs(m[r][col]) > best:
                    best = abs(m[r][col])
                    pivot_row = r
        if pivot_row is None or m[pivot_row][col] == 0:
            return Fraction(0) if exact else 0.0
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            det = -det
        pivot = m[col][col]
        det *= pivot
        inv = (Fraction(1) / pivot) if exact else (1.0 / pivot)
        for r in range(col + 1, size):
            factor = m[r][col] * inv
            if factor == 0:
                continue
            row_r = m[r]
            row_c = m[col]
            for c in range(col, size):
                row_r[c] -= factor * row_c[c]
    return det


def _is_exact(lam: Sequence) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in lam)


def count_weighted_trees(n: int, edges: Sequence[tuple[int, int]], lam: Sequence):
    """Total tree weight: sum over spanning trees of the product of weights.

    Exact when all weights are ints/Fractions (they may be negative, which is
    what the parity identities exploit); float otherwise.
    """
    exact = _is_exact(lam)
    if n == 1:
        return Fraction(1) if exact else 1.0
    zero = Fraction(0) if exact else 0.0
    lap = [[zero for _ in range(n)] for _ in range(n)]
    for (u, v), w in zip(edges, lam):
        if u == v:
            continue
        w = Fraction(w) if exact else float(w)
        lap[u][u] += w
        lap[v][v] += w
        lap[u][v] -= w
        lap[v][u] -= w
    minor = [row[1:] for row in lap[1:]]
    return _determinant(minor, exact)


def _contract(
    n: int, edges: Sequence[tuple[int, int]], merge: Sequence[tuple[int, int]]
) -> tuple[int, list[tuple[int, int]], bool]:
    """Merge vertex pairs; returns (new n, remapped edges, had_cycle).

    ``had_cycle`` reports that some requested merge was already identified,
    i.e. the contracted edge set contained a cycle.
    """
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    had_cycle = False
    for u, v in merge:
        ru, rv = find(u), find(v)
        if ru == rv:
            had_cycle = True
        else:
            parent[ru] = rv
    roots = sorted({find(v) for v in range(n)})
    index = {r: i for i, r in enumerate(roots)}
    remapped = [(index[find(u)], index[find(v)]) for u, v in edges]
    return (len(roots), remapped, had_cycle)


def tree_marginals(n: int, edges: Sequence[tuple[int, int]], lam: Sequence) -> MarginalVector:
    """Per-edge membership probabilities under the weighted tree distribution."""
    exact = _is_exact(lam)
    if exact:
        total = count_weighted_trees(n, edges, lam)
        if total == 0:
            raise ValueError("graph has no spanning tree")
        out = []
        for idx, (u, v) in enumerate(edges):
            if u == v:
                out.append(Fraction(0))
                continue
            cn, cedges, _ = _contract(n, edges, [(u, v)])
            rest = [e for i, e in enumerate(cedges) if i != idx]
            rest_lam = [w for i, w in enumerate(lam) if i != idx]
            out.append(Fraction(lam[idx]) * count_weighted_trees(cn, rest, rest_lam) / total)
        return MarginalVector(values=tuple(out))
    return MarginalVector(values=tuple(_float_marginals(n, edges, [float(v) for v in lam])))


def _float_marginals(n: int, edges: Sequence[tuple[int, int]], lam: Sequence[float]) -> list[float]:
    """Fast float marginals via effective resistances on the grounded Laplacian."""
    lap = np.zeros((n, n))
    for (u, v), w in zip(edges, lam):
        if u == v:
            continue
        lap[u, u] += w
        lap[v, v] += w
        lap[u, v] -= w
        lap[v, u] -= w
    grounded = lap[1:, 1:]
    inv = np.linalg.inv(grounded)
    out = []
    for (u, v), w in zip(edges, lam):
        if u == v:
            out.append(0.0)
            continue
        resistance = 0.0
        if u > 0:
            resistance += inv[u - 1, u - 1]
        if v > 0:
            resistance += inv[v - 1, v - 1]
        if u > 0 and v > 0:
            resistance -= 2.0 * inv[u - 1, v - 1]
        out.append(w * resistance)
    return out


def fit_lambda(
    n: int,
    edges: Sequence[tuple[int, int]],
    targets: Sequence,
    tol: float = 1e-8,
    max_iterations: int = 100_000,
) -> LambdaFit:
    """Find weights whose tree marginals match the targets (multiplicatively).

    Targets must lie in [0, 1] and sum to n-1 (a spanning-tree polytope
    point).  Edges with target 1 are contracted, target 0 deleted; the rest
    are fitted by the update ``weight *= target / marginal`` with halving
    damping when the error oscillates.  Weights are normalized so the first
    free edge has weight 1.  Raises FitConvergenceError on failure.
    """
    targets = [float(t) for t in targets]
    if len(targets) != len(edges):
        raise ValueError("one target per edge required")
    if any(t < -1e-12 or t > 1 + 1e-12 for t in targets):
        raise ValueError("targets must lie in [0, 1]")
    total = sum(targets)
    if abs(total - (n - 1)) > 1e-9:
        raise ValueError(f"targets sum to {total}, expected n-1 = {n - 1}")
    forced = tuple(i for i, t in enumerate(targets) if t >= 1 - 1e-12)
    deleted = tuple(i for i, t in enumerate(targets) if t <= 1e-12)
    free = [i for i in range(len(edges)) if i not in forced and i not in deleted]

    cn, cedges, had_cycle = _contract(n, edges, [edges[i] for i in forced])
    if had_cycle:
        raise ValueError("target-1 edges contain a cycle")
    sub_edges = [cedges[i] for i in free]
    sub_targets = [targets[i] for i in free]
    values = [1.0] * len(edges)
    for i in deleted:
        values[i] = 0.0
    if not free:
        return LambdaFit(tuple(values), forced, deleted, 0.0, 0)

    lam = [1.0] * len(sub_edges)
    error = float("inf")
    previous_error = float("inf")
    damping = 1.0
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        marg = _float_marginals(cn, sub_edges, lam)
        error = max(abs(m - t) for m, t in zip(marg, sub_targets))
        if error <= tol:
            break
        if error > previous_error:
            damping = max(0.5 * damping, 1e-3)
        previous_error = error
        for j in range(len(lam)):
            ratio = sub_targets[j] / max(marg[j], 1e-300)
            lam[j] *= ratio**damping
    else:
        raise FitConvergenceError(
            f"marginal fit stalled at error {error:.3e} after {max_iterations} iterations",
            error,
        )
    scale = lam[0]
    lam = [v / scale for v in lam]
    for j, i in enumerate(free):
        values[i] = lam[j]
    return LambdaFit(tuple(values), forced, deleted, error, iterations)


def sample_tree(
    n: int,
    edges: Sequence[tuple[int, int]],
    lam: Sequence,
    rng: np.random.Generator,
) -> tuple[int, ...]:
    """One spanning tree via loop-erased random walks, weight-proportional.

    Returns the sorted edge indices of the sampled tree.  Parallel edges are
    handled individually, so multigraph levels sample correctly.
    """
    if n == 1:
        return ()
    incident: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for idx, (u, v) in enumerate(edges):
        if u == v:
            continue
        w = float(lam[idx])
        if w <= 0:
            continue
        incident[u].append((v, idx))
        incident[v].append((u, idx))
    buckets = []
    for v in range(n):
        if not incident[v]:
            raise ValueError(f"vertex {v} has no positive-weight edge")
        weights = np.array([float(lam[i]) for (_, i) in incident[v]])
        buckets.append(np.cumsum(weights))
    in_tree = [False] * n
    in_tree[0] = True
    next_hop: list[tuple[int, int] | None] = [None] * n
    tree: list[int] = []
    for start in range(1, n):
        u = start
        while not in_tree[u]:
            cum = buckets[u]
            r = rng.random() * cum[-1]
            choice = int(np.searchsorted(cum, r, side="right"))
            choice = min(choice, len(incident[u]) - 1)
            v, idx = incident[u][choice]
            next_hop[u] = (idx, v)
            u = v
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            idx, v = next_hop[u]
            tree.append(idx)
            u = v
    return tuple(sorted(tree))


def sample_tree_with_forced(
    n: int,
    edges: Sequence[tuple[int, int]],
    fit: LambdaFit,
    rng: np.random.Generator,
) -> tuple[int, ...]:
    """Sample from a LambdaFit: forced edges always in, deleted never."""
    cn, cedges, had_cycle = _contract(n, edges, [edges[i] for i in fit.forced])
    if had_cycle:
        raise ValueError("forced edges contain a cycle")
    keep = [
        i
        for i in range(len(edges))
        if i not in fit.forced and i not in fit.deleted and cedges[i][0] != cedges[i][1]
    ]
    sub = sample_tree(
        cn, [cedges[i] for i in keep], [fit.values[i] for i in keep], rng
    )
    chosen = sorted(set(fit.forced) | {keep[j] for j in sub})
    return tuple(chosen)


def joint_distribution(
    n: int,
    edges: Sequence[tuple[int, int]],
    lam: Sequence,
    focus: Sequence[int],
) -> JointDistribution:
    """Exact joint membership law over up to 10 focus edges.

    Each pattern's probability is a contraction/deletion tree count: focus
    edges marked 1 are contracted (weight factored out), marked 0 deleted.
    """
    focus = tuple(focus)
    if len(focus) > 10:
        raise ValueError("joint_distribution supports at most 10 focus edges")
    if not _is_exact(lam):
        lam = [Fraction(v).limit_denominator(10**12) for v in lam]
    total = count_weighted_trees(n, edges, lam)
    if total == 0:
        raise ValueError("graph has no spanning tree")
    focus_set = set(focus)
    probabilities: dict[tuple[int, ...], Fraction] = {}
    for r in range(len(focus) + 1):
        for inside in combinations(range(len(focus)), r):
            member = [focus[i] for i in inside]
            pattern = tuple(1 if i in inside else 0 for i in range(len(focus)))
            cn, cedges, had_cycle = _contract(n, edges, [edges[e] for e in member])
            if had_cycle:
                continue
            keep = [
                i
                for i in range(len(edges))
                if i not in focus_set and cedges[i][0] != cedges[i][1]
            ]
            weight = Fraction(1)
            for e in member:
                weight *= Fraction(lam[e])
            count = count_weighted_trees(
                cn, [cedges[i] for i in keep], [lam[i] for i in keep]
            )
            prob = weight * count / total
            if prob != 0:
                probabilities[pattern] = prob
    return JointDistribution(edges=focus, probabilities=probabilities)


def parity_distribution(
    n: int,
    edges: Sequence[tuple[int, int]],
    lam: Sequence,
    focus: Sequence[int],
):
    """P[|T ∩ focus| is even], exactly, via the signed-weight tree count.

    Flipping the sign of the focus edges' weights turns the tree sum into the
    expectation of (-1)^{|T ∩ focus|}; no enumeration over patterns needed.
    """
    if not _is_exact(lam):
        lam = [Fraction(v).limit_denominator(10**12) for v in lam]
    total = count_weighted_trees(n, edges, lam)
    if total == 0:
        raise ValueError("graph has no spanning tree")
    focus_set = set(focus)
    signed = [(-Fraction(v) if i in focus_set else Fraction(v)) for i, v in enumerate(lam)]
    ratio = count_weighted_trees(n, edges, signed) / total
    return (1 + ratio) / 2


def parity_pair_distribution(
    n: int,
    edges: Sequence[tuple[int, int]],
    lam: Sequence,
    focus_a: Sequence[int],
    focus_b: Sequence[int],
) -> dict[tuple[int, int], Fraction]:
    """Exact joint law of (|T∩A| mod 2, |T∩B| mod 2) via four signed counts.

    The characters of Z2 x Z2 diagonalize the parity law, so four signed
    tree counts recover all four probabilities.
    """
    if not _is_exact(lam):
        lam = [Fraction(v).limit_denominator(10**12) for v in lam]
    total = count_weighted_trees(n, edges, lam)
    if total == 0:
        raise ValueError("graph has no spanning tree")
    set_a, set_b = set(focus_a), set(focus_b)
    char: dict[tuple[int, int], Fraction] = {}
    for a_bit in (0, 1):
        for b_bit in (0, 1):
            signed = []
            for i, v in enumerate(lam):
                sign = 1
                if a_bit and i in set_a:
                    sign = -sign
                if b_bit and i in set_b:
                    sign = -sign
                signed.append(sign * Fraction(v))
            char[(a_bit, b_bit)] = count_weighted_trees(n, edges, signed) / total
    law: dict[tuple[int, int], Fraction] = {}
    for p in (0, 1):
        for q in (0, 1):
            acc = Fraction(0)
            for a_bit in (0, 1):
                for b_bit in (0, 1):
                    sign = -1 if (a_bit * p + b_bit * q) % 2 else 1
                    acc += sign * char[(a_bit, b_bit)]
            law[(p, q)] = acc / 4
    return law


def enumerate_spanning_trees(
    n: int, edges: Sequence[tuple[int, int]], cap: int = 10_000_000
) -> list[tuple[int, ...]]:
    """All spanning trees as sorted edge-index tuples (backtracking search).

    Raises ValueError when the count would exceed ``cap``.
    """
    m = len(edges)
    out: list[tuple[int, ...]] = []

    def extend(start: int, chosen: list[int], parent: list[int], count: int) -> None:
        if count == n - 1:
            out.append(tuple(chosen))
            if len(out) > cap:
                raise ValueError(f"spanning tree count exceeds cap {cap}")
            return
        if m - start < (n - 1) - count:
            return
        for idx in range(start, m):
            u, v = edges[idx]

            def find(a: int) -> int:
                while parent[a] != a:
                    a = parent[a]
                return a

            ru, rv = find(u), find(v)
            if ru == rv:
                continue
            snapshot = parent[:]
            parent[ru] = rv
            chosen.append(idx)
            extend(idx + 1, chosen, parent, count + 1)
            chosen.pop()
            parent[:] = snapshot

    extend(0, [], list(range(n)), 0)
    return out
