"""Temporal graph and motif data model: ingestion, ordering, and instance semantics.

A temporal graph is a multiset of directed timestamped edges.  Edges are
totally ordered by ``(t, seq)`` where ``seq`` is the ingestion ordinal, so
graphs with duplicate timestamps still have a deterministic edge order (the
order degenerates to plain timestamp order when timestamps are unique).
"""

from __future__ import annotations

import io
from bisect import bisect_left
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Iterator, NamedTuple, Sequence

#: Sentinel for an unbounded time window (largest signed 64-bit time delta).
UNBOUNDED_DELTA = 2**63 - 1

_COMMENT_PREFIXES = ("#", "%")


class ParseError(ValueError):
    """Malformed edge-list or motif input."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class TemporalEdge(NamedTuple):
    src: int
    dst: int
    t: int
    seq: int


class TemporalGraph:
    """Immutable, time-sorted multiset of directed timestamped edges.

    Storage is four parallel lists (``src``, ``dst``, ``ts``, ``seq``) sorted
    ascending by ``(t, seq)``; the position in these lists is the total order
    every counter uses.  Instances are safe to share across threads.
    """

    __slots__ = ("src", "dst", "ts", "seq", "num_nodes", "node_labels")

    def __init__(
        self,
        src: Sequence[int],
        dst: Sequence[int],
        ts: Sequence[int],
        seq: Sequence[int] | None = None,
        num_nodes: int | None = None,
        node_labels: Sequence[str] | None = None,
        presorted: bool = False,
    ):
        m = len(ts)
        if not (len(src) == len(dst) == m):
            raise ValueError("src/dst/ts lengths differ")
        if seq is None:
            seq = range(m)
        src, dst, ts, seq = list(src), list(dst), list(ts), list(seq)
        if not presorted and any(
            (ts[i], seq[i]) > (ts[i + 1], seq[i + 1]) for i in range(m - 1)
        ):
            order = sorted(range(m), key=lambda i: (ts[i], seq[i]))
            src = [src[i] for i in order]
            dst = [dst[i] for i in order]
            ts = [ts[i] for i in order]
            seq = [seq[i] for i in order]
        self.src = src
        self.dst = dst
        self.ts = ts
        self.seq = seq
        if num_nodes is None:
            num_nodes = 1 + max(max(src, default=-1), max(dst, default=-1))
        self.num_nodes = num_nodes
        self.node_labels = list(node_labels) if node_labels is not None else None

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int, int]],
        num_nodes: int | None = None,
        node_labels: Sequence[str] | None = None,
    ) -> "TemporalGraph":
        """Build a graph from ``(src, dst, t)`` triples; input order sets ``seq``."""
        src, dst, ts = [], [], []
        for u, v, t in edges:
            src.append(u)
            dst.append(v)
            ts.append(t)
        return cls(src, dst, ts, num_nodes=num_nodes, node_labels=node_labels)

    @property
    def num_edges(self) -> int:
        return len(self.ts)

    def __len__(self) -> int:
        return len(self.ts)

    @property
    def t_min(self) -> int:
        return self.ts[0] if self.ts else 0

    @property
    def t_max(self) -> int:
        return self.ts[-1] if self.ts else 0

    def edge(self, i: int) -> TemporalEdge:
        return TemporalEdge(self.src[i], self.dst[i], self.ts[i], self.seq[i])

    @property
    def edges(self) -> list[TemporalEdge]:
        return [self.edge(i) for i in range(len(self.ts))]

    def __iter__(self) -> Iterator[TemporalEdge]:
        return (self.edge(i) for i in range(len(self.ts)))

    def time_range_indices(self, lo: int, hi: int) -> tuple[int, int]:
        """Half-open index range of edges with ``lo <= t <= hi``."""
        return bisect_left(self.ts, lo), bisect_left(self.ts, hi + 1)

    def time_slice(self, lo: int, hi: int) -> "TemporalGraph":
        """Subgraph of edges with ``lo <= t <= hi`` (node ids unchanged)."""
        a, b = self.time_range_indices(lo, hi)
        return TemporalGraph(
            self.src[a:b],
            self.dst[a:b],
            self.ts[a:b],
            self.seq[a:b],
            num_nodes=self.num_nodes,
            node_labels=self.node_labels,
            presorted=True,
        )

    def label_of(self, node: int) -> str:
        if self.node_labels is not None:
            return self.node_labels[node]
        return str(node)

    def __repr__(self) -> str:
        return (
            f"TemporalGraph(num_nodes={self.num_nodes}, "
            f"num_edges={self.num_edges})"
        )


def load_temporal_graph(source: str | Path | IO) -> TemporalGraph:
    """Parse a whitespace-separated ``src dst t`` edge list.

    Node tokens may be arbitrary strings; they are densely relabeled
    0..n-1 in first-appearance order and the original labels are kept.
    Lines starting with ``#`` or ``%`` and blank lines are skipped.
    Empty input yields an empty graph.

    Raises:
        ParseError: on a malformed line (with its 1-based line number).
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            return load_temporal_graph(fh)
    if isinstance(source, (bytes, bytearray)):
        return load_temporal_graph(io.StringIO(source.decode("utf-8")))
    raw = source.read()
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")

    labels: dict[str, int] = {}
    label_list: list[str] = []
    src: list[int] = []
    dst: list[int] = []
    ts: list[int] = []
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(_COMMENT_PREFIXES):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ParseError(
                f"expected 'src dst t', got {len(parts)} tokens", lineno
            )
        u_tok, v_tok, t_tok = parts
        try:
            t = int(t_tok)
        except ValueError:
            raise ParseError(f"timestamp {t_tok!r} is not an integer", lineno) from None
        for tok in (u_tok, v_tok):
            if tok not in labels:
                labels[tok] = len(label_list)
                label_list.append(tok)
        src.append(labels[u_tok])
        dst.append(labels[v_tok])
        ts.append(t)
    return TemporalGraph(src, dst, ts, node_labels=label_list)


def normalize_timestamps(g: TemporalGraph) -> TemporalGraph:
    """Shift all timestamps so the earliest becomes 0 (empty graph: no-op)."""
    if not g.ts or g.t_min == 0:
        return g
    t0 = g.t_min
    return TemporalGraph(
        g.src,
        g.dst,
        [t - t0 for t in g.ts],
        g.seq,
        num_nodes=g.num_nodes,
        node_labels=g.node_labels,
        presorted=True,
    )


@dataclass(frozen=True)
class Motif:
    """An ordered multigraph edge sequence: the pattern template.

    ``edges[i] = (u, v)`` uses node ids 0..k-1; the list order is the
    required temporal order of matched edges.
    """

    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if not self.edges:
            raise ValueError("motif needs at least one edge")
        seen = {n for e in self.edges for n in e}
        k = max(seen) + 1
        if seen != set(range(k)):
            raise ValueError("motif node ids must be dense 0..k-1")

    @property
    def k(self) -> int:
        return 1 + max(n for e in self.edges for n in e)

    @property
    def l(self) -> int:
        return len(self.edges)

    def __str__(self) -> str:
        return ",".join(f"{u}->{v}" for u, v in self.edges)


MOTIF_SHORTCUTS: dict[str, tuple[tuple[int, int], ...]] = {
    # two nodes, three alternating-then-repeating edges
    "m23": ((0, 1), (1, 0), (0, 1)),
    # two sources each pointing at the same two sinks
    "bifan": ((0, 2), (0, 3), (1, 2), (1, 3)),
}


def parse_motif(text: str) -> Motif:
    """Parse a motif from a named shortcut or ``u v`` lines.

    Line order defines the edge order; labels are arbitrary strings and are
    densely mapped in first-appearance order.  Blank and ``#``/``%`` comment
    lines are skipped.
    """
    name = text.strip()
    if name in MOTIF_SHORTCUTS:
        return Motif(MOTIF_SHORTCUTS[name])
    labels: dict[str, int] = {}
    edges: list[tuple[int, int]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(_COMMENT_PREFIXES):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(
                f"expected 'u v', got {len(parts)} tokens", lineno
            )
        pair = []
        for tok in parts:
            if tok not in labels:
                labels[tok] = len(labels)
            pair.append(labels[tok])
        edges.append((pair[0], pair[1]))
    if not edges:
        raise ParseError("motif has no edges")
    return Motif(tuple(edges))


class MotifInstance(NamedTuple):
    """Indices into ``TemporalGraph`` edges, strictly increasing in (t, seq)."""

    edge_indices: tuple[int, ...]


def duration(inst: MotifInstance | Sequence[int], g: TemporalGraph) -> int:
    """Last minus first timestamp of an instance's edges."""
    indices = inst.edge_indices if isinstance(inst, MotifInstance) else inst
    return g.ts[indices[-1]] - g.ts[indices[0]]


def is_delta_instance(
    candidate: Sequence[int], m: Motif, delta: int, g: TemporalGraph
) -> bool:
    """Check whether ordered edge indices form a delta-instance of ``m``.

    True iff the candidate has exactly ``m.l`` edges, strictly increasing in
    (t, seq), a node bijection onto the motif exists edge by edge, and the
    last-minus-first timestamp span is at most ``delta``.
    """
    if len(candidate) != m.l:
        return False
    for a, b in zip(candidate, candidate[1:]):
        if (g.ts[a], g.seq[a]) >= (g.ts[b], g.seq[b]):
            return False
    node_to_motif: dict[int, int] = {}
    motif_to_node: dict[int, int] = {}
    for (mu, mv), idx in zip(m.edges, candidate):
        for motif_node, data_node in ((mu, g.src[idx]), (mv, g.dst[idx])):
            if motif_to_node.setdefault(motif_node, data_node) != data_node:
                return False
            if node_to_motif.setdefault(data_node, motif_node) != motif_node:
                return False
    return g.ts[candidate[-1]] - g.ts[candidate[0]] <= delta


@dataclass(frozen=True)
class StaticGraph:
    """Distinct directed node pairs of a temporal graph with multiplicities."""

    multiplicities: dict[tuple[int, int], int]
    num_nodes: int

    @property
    def num_edges(self) -> int:
        return len(self.multiplicities)

    def pairs(self) -> list[tuple[int, int]]:
        return sorted(self.multiplicities)

    def items(self) -> list[tuple[tuple[int, int], int]]:
        return sorted(self.multiplicities.items())


def static_projection(g: TemporalGraph) -> StaticGraph:
    """Collapse temporal edges onto distinct directed pairs with counts."""
    mult: dict[tuple[int, int], int] = {}
    for u, v in zip(g.src, g.dst):
        key = (u, v)
        mult[key] = mult.get(key, 0) + 1
    return StaticGraph(mult, g.num_nodes)
