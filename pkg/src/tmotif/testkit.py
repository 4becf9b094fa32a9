"""Ground-truth oracle, input generators, and the clique-to-star instance builder.

The brute-force oracle enumerates every time-ordered edge sequence within
the window and applies the instance definition verbatim; it shares no
logic with the production counters, so agreement between the two is
meaningful evidence.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from .core import (
    UNBOUNDED_DELTA,
    Motif,
    TemporalGraph,
    is_delta_instance,
)
from .exact import DurationHistogram

DEFAULT_WORK_BUDGET = 20_000_000


class EnumerationBudgetError(RuntimeError):
    """The oracle refused: the instance is too large to enumerate."""


def brute_force_instances(
    g: TemporalGraph, m: Motif, delta: int, work_budget: int = DEFAULT_WORK_BUDGET
) -> Iterator[tuple[int, ...]]:
    """Yield every delta-instance of ``m`` as a tuple of edge indices.

    Enumerates all strictly increasing edge-index sequences whose
    timestamps fit in the window, then tests each full candidate with
    :func:`is_delta_instance`; no structural pruning happens during
    enumeration.  Refuses (raises) once ``work_budget`` sequence
    extensions have been made.
    """
    num_edges = g.num_edges
    l = m.l
    ts = g.ts
    visited = 0
    chain: list[int] = []

    def charge() -> None:
        nonlocal visited
        visited += 1
        if visited > work_budget:
            raise EnumerationBudgetError(
                f"enumeration exceeded work budget {work_budget}"
            )

    def extend(start: int, t_limit: int) -> Iterator[tuple[int, ...]]:
        for i in range(start, num_edges):
            if ts[i] > t_limit:
                break
            charge()
            chain.append(i)
            if len(chain) == l:
                if is_delta_instance(chain, m, delta, g):
                    yield tuple(chain)
            else:
                yield from extend(i + 1, t_limit)
            chain.pop()

    for first in range(num_edges):
        charge()
        chain.append(first)
        if l == 1:
            if is_delta_instance(chain, m, delta, g):
                yield tuple(chain)
        else:
            yield from extend(first + 1, ts[first] + delta)
        chain.pop()


def brute_force_count(
    g: TemporalGraph, m: Motif, delta: int, work_budget: int = DEFAULT_WORK_BUDGET
) -> DurationHistogram:
    """Duration histogram of all delta-instances by direct enumeration."""
    hist = DurationHistogram()
    ts = g.ts
    for inst in brute_force_instances(g, m, delta, work_budget):
        hist.add(ts[inst[-1]] - ts[inst[0]])
    return hist


def random_temporal_graph(
    num_nodes: int, num_edges: int, t_range: int, seed: int
) -> TemporalGraph:
    """Uniform random temporal graph: endpoints and timestamps independent.

    Self-loops and duplicate timestamps are allowed; the result is
    deterministic per seed.
    """
    if num_nodes < 1:
        raise ValueError("need at least one node")
    if num_edges < 0:
        raise ValueError("edge count must be nonnegative")
    rng = random.Random(seed)
    src = [rng.randrange(num_nodes) for _ in range(num_edges)]
    dst = [rng.randrange(num_nodes) for _ in range(num_edges)]
    ts = [rng.randrange(t_range) for _ in range(num_edges)]
    return TemporalGraph(src, dst, ts, num_nodes=num_nodes)


@dataclass(frozen=True)
class CliqueInstance:
    """An undirected simple graph on nodes 1..n and a target clique size."""

    num_nodes: int
    edges: frozenset[tuple[int, int]]
    k: int

    def __post_init__(self):
        for u, v in self.edges:
            if not (1 <= u < v <= self.num_nodes):
                raise ValueError(f"edge ({u}, {v}) not 1 <= u < v <= n")
        if not 1 <= self.k <= self.num_nodes:
            raise ValueError("clique size must be in 1..n")

    @classmethod
    def from_edges(cls, num_nodes: int, edges, k: int) -> "CliqueInstance":
        norm = frozenset(
            (u, v) if u < v else (v, u) for u, v in edges if u != v
        )
        return cls(num_nodes, norm, k)


def has_k_clique(inst: CliqueInstance) -> bool:
    """Exhaustive clique search over all k-subsets (the reduction's oracle)."""
    edges = inst.edges
    for subset in combinations(range(1, inst.num_nodes + 1), inst.k):
        if all(
            (a, b) in edges for a, b in combinations(subset, 2)
        ):
            return True
    return False


def random_clique_instance(
    num_nodes: int, k: int, edge_prob: float, seed: int
) -> CliqueInstance:
    rng = random.Random(seed)
    edges = [
        (u, v)
        for u, v in combinations(range(1, num_nodes + 1), 2)
        if rng.random() < edge_prob
    ]
    return CliqueInstance.from_edges(num_nodes, edges, k)


def clique_reduction_instance(
    inst: CliqueInstance,
) -> tuple[TemporalGraph, Motif, int]:
    """Build a temporal graph and star motif whose instance existence is
    equivalent to a k-clique in the source graph.

    The time axis is split into one block of ``n + 2`` timestamps per
    source node.  Block u is fenced by two leaf-to-center "bookend" edges;
    each undirected edge (u, v) plants a center-to-u edge inside block v
    and a center-to-v edge inside block u.  A node can therefore only
    contribute an edge inside another node's block if the two are
    adjacent.  The star motif demands, for each of k blocks in order, a
    bookend, then center-to-leaf edges for the k-1 other leaves (in leaf
    order), then the closing bookend, with an unbounded time window; any
    match forces pairwise adjacency of the k matched nodes.

    Node ids in the returned graph: center is 0, source node u keeps id u.
    """
    n = inst.num_nodes
    block = n + 2
    edges: list[tuple[int, int, int]] = []
    for u, v in sorted(inst.edges):
        edges.append((0, u, (v - 1) * block + u + 1))
        edges.append((0, v, (u - 1) * block + v + 1))
    for u in range(1, n + 1):
        edges.append((u, 0, (u - 1) * block + 1))
        edges.append((u, 0, u * block))

    k = inst.k
    motif_edges: list[tuple[int, int]] = []
    for i in range(1, k + 1):
        motif_edges.append((i, 0))
        for j in range(1, k + 1):
            if j != i:
                motif_edges.append((0, j))
        motif_edges.append((i, 0))

    graph = TemporalGraph.from_edges(edges, num_nodes=n + 1)
    return graph, Motif(tuple(motif_edges)), UNBOUNDED_DELTA
