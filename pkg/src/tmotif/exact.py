"""Exact motif counters that report per-duration instance counts.

Two counters are provided.  ``count_backtracking`` matches any motif by
scanning edges chronologically and extending a partial node mapping one
motif edge at a time.  ``count_two_node`` is a specialized quadratic-time
counter for 2-node, 3-edge patterns that fixes the first and last edge of
each instance on a per-pair timeline and counts compatible middle edges
with a running counter.

Both emit a :class:`DurationHistogram`, the count-by-duration contract the
sampling layer consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

from .core import Motif, TemporalGraph

#: Counts are checked against the signed 64-bit range; Python ints never
#: wrap, so exceeding the range raises instead of silently truncating.
COUNT_LIMIT = 2**63 - 1


class CountOverflowError(OverflowError):
    """A histogram count or total exceeded the 64-bit contract."""


class DurationHistogram:
    """Instance counts keyed by duration (last minus first timestamp)."""

    __slots__ = ("pairs",)

    def __init__(self, pairs: dict[int, int] | None = None):
        self.pairs: dict[int, int] = {}
        if pairs:
            for d, c in pairs.items():
                self.add(d, c)

    def add(self, dur: int, count: int = 1) -> None:
        if count == 0:
            return
        new = self.pairs.get(dur, 0) + count
        if new > COUNT_LIMIT:
            raise CountOverflowError(f"count for duration {dur} exceeds 2**63-1")
        self.pairs[dur] = new

    def merge(self, other: "DurationHistogram") -> None:
        for d, c in other.pairs.items():
            self.add(d, c)

    def total(self) -> int:
        tot = sum(self.pairs.values())
        if tot > COUNT_LIMIT:
            raise CountOverflowError("histogram total exceeds 2**63-1")
        return tot

    def items_sorted(self) -> list[tuple[int, int]]:
        return sorted(self.pairs.items())

    def to_json_dict(self) -> dict:
        return {
            "durations": {str(d): c for d, c in self.items_sorted()},
            "total": self.total(),
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, DurationHistogram):
            return NotImplemented
        return self.pairs == other.pairs

    def __bool__(self) -> bool:
        return bool(self.pairs)

    def __repr__(self) -> str:
        return f"DurationHistogram({dict(self.items_sorted())!r})"


def total_count(h: DurationHistogram) -> int:
    """Sum of all counts in a histogram (overflow-checked)."""
    return h.total()


#: Signature every exact counter used by the sampling layer must honor.
ExactCounter = Callable[[TemporalGraph, Motif, int], DurationHistogram]


class PairTimeline(NamedTuple):
    """All temporal edges between one unordered node pair, time-sorted.

    ``dirs[i]`` is 0 for u->v and 1 for v->u with u <= v (self-loop
    timelines use direction 0 throughout).
    """

    u: int
    v: int
    times: list[int]
    dirs: list[int]
    seqs: list[int]

    @property
    def num_events(self) -> int:
        return len(self.times)


def pair_timelines(g: TemporalGraph) -> list[PairTimeline]:
    """One timeline per unordered node pair with at least one edge.

    Timelines are returned sorted by (u, v); together their events
    partition the edge multiset.
    """
    grouped: dict[tuple[int, int], PairTimeline] = {}
    for i in range(g.num_edges):
        a, b = g.src[i], g.dst[i]
        if a <= b:
            key, direction = (a, b), 0
        else:
            key, direction = (b, a), 1
        tl = grouped.get(key)
        if tl is None:
            tl = PairTimeline(key[0], key[1], [], [], [])
            grouped[key] = tl
        tl.times.append(g.ts[i])
        tl.dirs.append(direction)
        tl.seqs.append(g.seq[i])
    return [grouped[key] for key in sorted(grouped)]


@dataclass(frozen=True)
class ThreeEdgePattern:
    """Directions of a 2-node, 3-edge motif relative to its first edge.

    The first edge is the reference ("f" by construction); ``middle`` and
    ``last`` are "f" if they point the same way as the first edge, "b" if
    reversed.
    """

    middle: str
    last: str

    FIRST = "f"

    def __post_init__(self):
        for d in (self.middle, self.last):
            if d not in ("f", "b"):
                raise ValueError(f"direction must be 'f' or 'b', got {d!r}")

    @classmethod
    def from_string(cls, s: str) -> "ThreeEdgePattern":
        if len(s) != 3 or s[0] != "f":
            raise ValueError(f"pattern must look like 'f??', got {s!r}")
        return cls(s[1], s[2])

    def to_string(self) -> str:
        return "f" + self.middle + self.last

    def to_motif(self) -> Motif:
        edges = [(0, 1)]
        for d in (self.middle, self.last):
            edges.append((0, 1) if d == "f" else (1, 0))
        return Motif(tuple(edges))


def all_three_edge_patterns() -> tuple[ThreeEdgePattern, ...]:
    return tuple(
        ThreeEdgePattern(m, l) for m in ("f", "b") for l in ("f", "b")
    )


def pattern_from_motif(m: Motif) -> ThreeEdgePattern | None:
    """The direction pattern of a 2-node, 3-edge motif, else None."""
    if m.k != 2 or m.l != 3:
        return None
    first = m.edges[0]
    if first[0] == first[1]:
        return None
    rev = (first[1], first[0])
    dirs = []
    for e in m.edges[1:]:
        if e == first:
            dirs.append("f")
        elif e == rev:
            dirs.append("b")
        else:
            return None
    return ThreeEdgePattern(dirs[0], dirs[1])


def _group_pair_events(
    g: TemporalGraph, lo: int, hi: int
) -> dict[int, tuple[list[int], list[int]]]:
    """Group edges at positions [lo, hi) by unordered pair, skipping self-loops.

    Keys encode the pair as min*n + max; values are parallel (times, dirs)
    lists in graph order with dir 0 = low->high.
    """
    n = g.num_nodes
    src, dst, ts = g.src, g.dst, g.ts
    grouped: dict[int, tuple[list[int], list[int]]] = {}
    get = grouped.get
    for i in range(lo, hi):
        a = src[i]
        b = dst[i]
        if a == b:
            continue
        if a < b:
            key = a * n + b
            d = 0
        else:
            key = b * n + a
            d = 1
        entry = get(key)
        if entry is None:
            entry = ([], [])
            grouped[key] = entry
        entry[0].append(ts[i])
        entry[1].append(d)
    return grouped


def _count_pattern_on_events(
    times: list[int],
    dirs: list[int],
    middle_rev: int,
    last_rev: int,
    delta: int,
    hist: dict[int, int],
) -> None:
    """Accumulate pattern instances on one pair timeline into ``hist``.

    Every event is a candidate first edge and defines the forward
    direction; later events are classified relative to it.  Each instance
    is therefore produced exactly once, at its first edge, for symmetric
    and asymmetric patterns alike.
    """
    n = len(times)
    for i in range(n - 2):
        ti = times[i]
        di = dirs[i]
        limit = ti + delta
        want_mid = di ^ middle_rev
        want_last = di ^ last_rev
        middles = 0
        for j in range(i + 1, n):
            tj = times[j]
            if tj > limit:
                break
            dj = dirs[j]
            # record before counting j as a middle: the middle edge must
            # lie strictly between the first and last edges
            if dj == want_last and middles:
                d = tj - ti
                hist[d] = hist.get(d, 0) + middles
            if dj == want_mid:
                middles += 1


def count_two_node(
    g: TemporalGraph, pattern: ThreeEdgePattern, delta: int
) -> DurationHistogram:
    """Exact counts of a 2-node, 3-edge pattern, keyed by duration.

    Runs in O(sum over pairs of k^2) where k is the number of temporal
    edges between a pair, with the inner loop cut off at the ``delta``
    window.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    middle_rev = 1 if pattern.middle == "b" else 0
    last_rev = 1 if pattern.last == "b" else 0
    raw: dict[int, int] = {}
    for times, dirs in _group_pair_events(g, 0, g.num_edges).values():
        if len(times) >= 3:
            _count_pattern_on_events(times, dirs, middle_rev, last_rev, delta, raw)
    return DurationHistogram(raw)


def count_two_node_motif(g: TemporalGraph, m: Motif, delta: int) -> DurationHistogram:
    """Adapter matching the :data:`ExactCounter` signature.

    Raises:
        ValueError: if ``m`` is not a 2-node, 3-edge pattern.
    """
    pattern = pattern_from_motif(m)
    if pattern is None:
        raise ValueError(f"motif {m} is not a 2-node, 3-edge pattern")
    return count_two_node(g, pattern, delta)


def count_backtracking(g: TemporalGraph, m: Motif, delta: int) -> DurationHistogram:
    """Exact counts of any motif via chronological backtracking.

    Each edge is tried as the instance's first edge; the search extends
    over strictly later edges within the first edge's ``delta`` window,
    maintaining the node mapping in both directions so it stays injective.
    The branch is cut as soon as the next edge's timestamp leaves the
    window.
    """
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    num_edges = g.num_edges
    l = m.l
    if num_edges < l:
        return DurationHistogram()
    src, dst, ts = g.src, g.dst, g.ts
    motif_edges = m.edges
    raw: dict[int, int] = {}

    motif_to_node: dict[int, int] = {}
    node_to_motif: dict[int, int] = {}

    def try_assign(motif_node: int, data_node: int, undo: list) -> bool:
        bound = motif_to_node.get(motif_node)
        if bound is not None:
            return bound == data_node
        if data_node in node_to_motif:
            return False
        motif_to_node[motif_node] = data_node
        node_to_motif[data_node] = motif_node
        undo.append((motif_node, data_node))
        return True

    def extend(pos: int, start: int, t_first: int, limit: int) -> None:
        mu, mv = motif_edges[pos]
        last = pos == l - 1
        for j in range(start, num_edges):
            tj = ts[j]
            if tj > limit:
                break
            undo: list[tuple[int, int]] = []
            if try_assign(mu, src[j], undo) and try_assign(mv, dst[j], undo):
                if last:
                    d = tj - t_first
                    raw[d] = raw.get(d, 0) + 1
                else:
                    extend(pos + 1, j + 1, t_first, limit)
            for motif_node, data_node in undo:
                del motif_to_node[motif_node]
                del node_to_motif[data_node]

    mu0, mv0 = motif_edges[0]
    for i in range(num_edges - l + 1):
        t_first = ts[i]
        undo: list[tuple[int, int]] = []
        if try_assign(mu0, src[i], undo) and try_assign(mv0, dst[i], undo):
            if l == 1:
                raw[0] = raw.get(0, 0) + 1
            else:
                extend(1, i + 1, t_first, t_first + delta)
        for motif_node, data_node in undo:
            del motif_to_node[motif_node]
            del node_to_motif[data_node]
    return DurationHistogram(raw)
