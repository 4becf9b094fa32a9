"""Importance-sampled estimation of motif counts over shifted interval grids.

The estimator tiles the time axis into disjoint intervals of width
``window_factor * delta`` at a random shift, runs an exact counter on a
random subset of intervals, and reweights each counted instance by the
reciprocal of its containment probability ``1 - duration/width`` and by
the interval's inclusion probability.  Averaging over several shifts
reduces the variance.  All randomness is a pure function of (seed, shift
index, interval index), so results are identical for any worker count and
for the streaming and in-memory execution modes.
"""

from __future__ import annotations

import math
import random
import statistics
import struct
import time
from bisect import bisect_left
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from hashlib import blake2b
from typing import Iterable, Sequence

from .core import Motif, TemporalGraph
from .exact import DurationHistogram, ExactCounter

_MASK64 = 2**64 - 1
_TWO64 = float(2**64)


class ConfigurationError(ValueError):
    """Invalid sampling parameters or probability vector."""


class EstimatorContractError(RuntimeError):
    """An exact counter emitted values outside its contract, or the
    accumulator became non-finite."""


class StreamOrderError(ValueError):
    """The edge stream violated its time-sorted precondition."""


@dataclass(frozen=True)
class SamplingConfig:
    """Estimator parameters.

    ``window_factor`` multiplies ``delta`` to give the interval width and
    must be at least 2 so every instance weight stays finite.
    ``rate_scale`` scales the per-interval edge fraction into an inclusion
    probability (clamped at 1).
    """

    window_factor: int = 32
    num_shifts: int = 8
    rate_scale: float = 32.0
    seed: int = 0
    target_rel_error: float | None = None

    def __post_init__(self):
        if not isinstance(self.window_factor, int) or self.window_factor < 2:
            raise ConfigurationError("window_factor must be an integer >= 2")
        if self.num_shifts < 1:
            raise ConfigurationError("num_shifts must be >= 1")
        if not self.rate_scale > 0:
            raise ConfigurationError("rate_scale must be positive")


@dataclass(frozen=True)
class IntervalGrid:
    """Disjoint width-aligned intervals tiling the time axis at one shift.

    Interval ``j`` (0-based) spans ``[shift + j*width, shift + (j+1)*width - 1]``;
    ``shift`` lies in ``{-width+1, ..., 0}`` so the grid covers ``[0, t_max]``.
    """

    shift: int
    width: int
    num_intervals: int

    def __post_init__(self):
        if self.width < 1:
            raise ConfigurationError("interval width must be >= 1")
        if not (-self.width < self.shift <= 0):
            raise ConfigurationError("shift must lie in {-width+1, ..., 0}")
        if self.num_intervals < 1:
            raise ConfigurationError("grid needs at least one interval")

    def bounds(self, j: int) -> tuple[int, int]:
        lo = self.shift + j * self.width
        return lo, lo + self.width - 1

    def interval_index(self, t: int) -> int:
        return (t - self.shift) // self.width

    def contains_window(self, t_first: int, t_last: int) -> bool:
        """True if [t_first, t_last] falls inside a single interval."""
        return (t_first - self.shift) // self.width == (
            t_last - self.shift
        ) // self.width


def num_intervals_for(t_max: int, width: int) -> int:
    if t_max < 0:
        raise ConfigurationError("t_max must be nonnegative")
    return 1 + (t_max + width - 1) // width


def build_interval_grid(
    g: TemporalGraph, window_factor: int, delta: int, shift_draw: random.Random
) -> IntervalGrid:
    """Draw a uniformly shifted grid for ``g``.

    Raises:
        ConfigurationError: if ``delta <= 0`` or ``window_factor < 2``.
    """
    if delta <= 0:
        raise ConfigurationError("delta must be >= 1")
    if window_factor < 2:
        raise ConfigurationError("window_factor must be >= 2")
    width = window_factor * delta
    shift = -shift_draw.randrange(width)
    return IntervalGrid(shift, width, num_intervals_for(g.t_max, width))


def instance_weight(dur: int, window_factor: int, delta: int) -> Fraction:
    """Reciprocal containment probability of an instance of duration ``dur``.

    An instance spans a single grid interval for exactly ``width - dur`` of
    the ``width`` possible shifts, so the weight is ``width/(width - dur)``.

    Raises:
        ValueError: if ``dur`` is negative or exceeds ``delta`` (the exact
            counter's contract guarantees durations within the window).
    """
    if window_factor < 2:
        raise ConfigurationError("window_factor must be >= 2")
    if dur < 0 or dur > delta:
        raise ValueError(f"duration {dur} outside [0, delta={delta}]")
    width = window_factor * delta
    return Fraction(width, width - dur)


def _interval_cuts(g: TemporalGraph, grid: IntervalGrid) -> list[int]:
    """Edge-array cut points: edges of interval j occupy [cuts[j], cuts[j+1])."""
    ts = g.ts
    shift, width = grid.shift, grid.width
    return [
        bisect_left(ts, shift + j * width) for j in range(grid.num_intervals + 1)
    ]


def heuristic_probabilities(
    g: TemporalGraph, grid: IntervalGrid, rate_scale: float
) -> list[float]:
    """Inclusion probabilities proportional to per-interval edge counts.

    ``q_j = min(1, rate_scale * m_j / m)`` where ``m_j`` counts edges in
    interval ``j``; empty intervals get 0, which is safe because they
    cannot contain an instance.
    """
    if not rate_scale > 0:
        raise ConfigurationError("rate_scale must be positive")
    m = g.num_edges
    if m == 0:
        return [0.0] * grid.num_intervals
    cuts = _interval_cuts(g, grid)
    return [
        min(1.0, rate_scale * (cuts[j + 1] - cuts[j]) / m)
        for j in range(grid.num_intervals)
    ]


def _inclusion_uniform(seed: int, shift_idx: int, interval_idx: int) -> float:
    """Deterministic uniform [0, 1) draw for one (shift, interval) cell."""
    payload = struct.pack(
        "<QQQ", seed & _MASK64, shift_idx & _MASK64, interval_idx & _MASK64
    )
    digest = blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "little") / _TWO64


def _interval_contribution(
    hist: DurationHistogram, width: int, delta: int, q: float
) -> float:
    """Weighted, inclusion-corrected count for one sampled interval.

    Iterates durations in sorted order so the floating-point sum is
    identical across execution modes.
    """
    total = 0.0
    for dur, count in sorted(hist.pairs.items()):
        if dur < 0 or dur > delta:
            raise EstimatorContractError(
                f"exact counter reported duration {dur} outside [0, {delta}]"
            )
        total += count * width / ((width - dur) * q)
    return total


@dataclass
class IntervalCounts:
    """Per-interval weighted instance counts for one grid (the full vector)."""

    values: list

    def __len__(self) -> int:
        return len(self.values)

    def l1(self):
        return sum(self.values)

    def sum_squares(self):
        return sum(v * v for v in self.values)

    def scaled(self, probabilities: Sequence[float]) -> list[float]:
        """Values divided by sqrt of their inclusion probabilities."""
        if len(probabilities) != len(self.values):
            raise ValueError("probability/count vector length mismatch")
        out = []
        for q, y in zip(probabilities, self.values):
            if q == 0:
                if y != 0:
                    raise ValueError("zero probability with nonzero count")
                out.append(0.0)
            else:
                out.append(float(y) / math.sqrt(q))
        return out


def interval_count_vector(
    g: TemporalGraph,
    grid: IntervalGrid,
    m: Motif,
    delta: int,
    algo: ExactCounter,
    exact: bool = False,
) -> IntervalCounts:
    """Run the exact counter on every interval and weight each instance.

    With ``exact=True`` the weights are rationals, for identity checks;
    otherwise double precision.
    """
    cuts = _interval_cuts(g, grid)
    width = grid.width
    values = []
    for j in range(grid.num_intervals):
        a, b = cuts[j], cuts[j + 1]
        if b - a < m.l:
            values.append(Fraction(0) if exact else 0.0)
            continue
        sub = _slice_graph(g, a, b)
        total = Fraction(0) if exact else 0.0
        for dur, count in algo(sub, m, delta).items_sorted():
            if dur < 0 or dur > delta:
                raise EstimatorContractError(
                    f"exact counter reported duration {dur} outside [0, {delta}]"
                )
            if exact:
                total += count * Fraction(width, width - dur)
            else:
                total += count * width / (width - dur)
        values.append(total)
    return IntervalCounts(values)


def _slice_graph(g: TemporalGraph, a: int, b: int) -> TemporalGraph:
    return TemporalGraph(
        g.src[a:b],
        g.dst[a:b],
        g.ts[a:b],
        g.seq[a:b],
        num_nodes=g.num_nodes,
        presorted=True,
    )


@dataclass
class Estimate:
    """Estimator output with per-shift components and diagnostics."""

    value: float
    per_shift: list[float]
    sampled_interval_count: int
    sampled_edge_fraction: float
    rho: float | None
    config: SamplingConfig
    threads: int
    streaming: bool
    peak_retained_edges: int | None
    wall_time_ms: float

    def to_json_dict(self, include_timing: bool = True) -> dict:
        out = {
            "value": self.value,
            "per_shift": list(self.per_shift),
            "sampled_interval_count": self.sampled_interval_count,
            "sampled_edge_fraction": self.sampled_edge_fraction,
            "rho": self.rho,
            "config": {
                "c": self.config.window_factor,
                "b": self.config.num_shifts,
                "r": self.config.rate_scale,
                "seed": self.config.seed,
                "threads": self.threads,
                "streaming": self.streaming,
            },
        }
        if self.peak_retained_edges is not None:
            out["peak_retained_edges"] = self.peak_retained_edges
        if include_timing:
            out["wall_time_ms"] = self.wall_time_ms
        return out


def _draw_shifts(cfg: SamplingConfig, width: int) -> list[int]:
    rng = random.Random(cfg.seed)
    return [-rng.randrange(width) for _ in range(cfg.num_shifts)]


def _interval_probability(
    probabilities: Sequence[float] | None,
    cfg: SamplingConfig,
    j: int,
    m_j: int,
    num_edges: int,
    min_edges: int,
) -> float:
    """Inclusion probability for interval j, validating custom vectors.

    A custom probability of 0 is only legal for intervals that cannot
    contain an instance (fewer than ``min_edges`` edges); anything else
    would bias the estimator.
    """
    if probabilities is None:
        return min(1.0, cfg.rate_scale * m_j / num_edges)
    q = probabilities[j]
    if q <= 0.0 and m_j >= min_edges:
        raise ConfigurationError(
            f"probability 0 for interval {j} holding {m_j} >= {min_edges} edges"
        )
    if q < 0.0 or q > 1.0:
        raise ConfigurationError(f"probability {q} for interval {j} not in [0, 1]")
    return q


def _empty_estimate(cfg: SamplingConfig, threads: int, streaming: bool, t0: float):
    return Estimate(
        value=0.0,
        per_shift=[0.0] * cfg.num_shifts,
        sampled_interval_count=0,
        sampled_edge_fraction=0.0,
        rho=None,
        config=cfg,
        threads=threads,
        streaming=streaming,
        peak_retained_edges=0 if streaming else None,
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
    )


def estimate(
    g: TemporalGraph,
    m: Motif,
    delta: int,
    cfg: SamplingConfig,
    algo: ExactCounter,
    threads: int = 1,
    probabilities: Sequence[float] | None = None,
) -> Estimate:
    """Estimate the number of delta-instances of ``m`` in ``g``.

    For each of ``cfg.num_shifts`` shifted grids, each interval is included
    by an independent deterministic Bernoulli draw; the exact counter runs
    on the included intervals and every reported instance is reweighted by
    its containment and inclusion probabilities.  The result is the mean of
    the per-shift sums and is identical for any ``threads`` value.
    """
    t0 = time.perf_counter()
    if delta <= 0:
        raise ConfigurationError("delta must be >= 1")
    if g.num_edges == 0:
        return _empty_estimate(cfg, threads, False, t0)
    if g.t_min < 0:
        raise ConfigurationError("graph has negative timestamps; normalize first")

    width = cfg.window_factor * delta
    num_intervals = num_intervals_for(g.t_max, width)
    if probabilities is not None and len(probabilities) != num_intervals:
        raise ConfigurationError(
            f"probability vector has {len(probabilities)} entries, "
            f"grid has {num_intervals}"
        )
    shifts = _draw_shifts(cfg, width)
    num_edges = g.num_edges
    min_edges = m.l

    tasks: list[tuple[int, int, int, int, float]] = []
    sampled_edges = 0
    for k, shift in enumerate(shifts):
        grid = IntervalGrid(shift, width, num_intervals)
        cuts = _interval_cuts(g, grid)
        for j in range(num_intervals):
            m_j = cuts[j + 1] - cuts[j]
            q = _interval_probability(probabilities, cfg, j, m_j, num_edges, min_edges)
            if m_j == 0 or q <= 0.0:
                continue
            if _inclusion_uniform(cfg.seed, k, j) <= q:
                tasks.append((k, j, cuts[j], cuts[j + 1], q))
                sampled_edges += m_j

    def run_task(task: tuple[int, int, int, int, float]) -> float:
        k, j, a, b, q = task
        hist = algo(_slice_graph(g, a, b), m, delta)
        return _interval_contribution(hist, width, delta, q)

    if threads > 1 and len(tasks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_task, tasks))
    else:
        results = [run_task(t) for t in tasks]

    # reduce in ascending (shift, interval) order: bit-identical floats
    # for any worker count
    per_shift = [0.0] * cfg.num_shifts
    for (k, _, _, _, _), contribution in zip(tasks, results):
        per_shift[k] += contribution
    value = sum(per_shift) / cfg.num_shifts
    if not math.isfinite(value):
        raise EstimatorContractError("estimate accumulated a non-finite value")
    return Estimate(
        value=value,
        per_shift=per_shift,
        sampled_interval_count=len(tasks),
        sampled_edge_fraction=sampled_edges / num_edges,
        rho=None,
        config=cfg,
        threads=threads,
        streaming=False,
        peak_retained_edges=None,
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
    )


def estimate_streaming(
    edge_stream: Iterable[tuple[int, int, int]],
    num_edges: int,
    t_max: int,
    m: Motif,
    delta: int,
    cfg: SamplingConfig,
    algo: ExactCounter,
    probabilities: Sequence[float] | None = None,
) -> Estimate:
    """One-pass estimator over a time-sorted ``(src, dst, t)`` stream.

    Produces bit-for-bit the same Estimate as :func:`estimate` for the same
    seed and configuration, while only retaining the edges of each shift's
    current interval.  ``num_edges`` and ``t_max`` must describe the full
    stream (they normalize the inclusion probabilities and size the grid).

    Raises:
        StreamOrderError: on a timestamp running backwards or below 0.
    """
    t0 = time.perf_counter()
    if delta <= 0:
        raise ConfigurationError("delta must be >= 1")
    if num_edges == 0:
        return _empty_estimate(cfg, 1, True, t0)

    width = cfg.window_factor * delta
    num_intervals = num_intervals_for(t_max, width)
    if probabilities is not None and len(probabilities) != num_intervals:
        raise ConfigurationError(
            f"probability vector has {len(probabilities)} entries, "
            f"grid has {num_intervals}"
        )
    shifts = _draw_shifts(cfg, width)
    b = cfg.num_shifts
    min_edges = m.l

    per_shift = [0.0] * b
    current = [0] * b
    buf_src: list[list[int]] = [[] for _ in range(b)]
    buf_dst: list[list[int]] = [[] for _ in range(b)]
    buf_ts: list[list[int]] = [[] for _ in range(b)]
    sampled_edges = 0
    sampled_count = 0
    retained = 0
    peak_retained = 0

    def flush(k: int, j: int) -> None:
        nonlocal sampled_edges, sampled_count, retained
        m_j = len(buf_ts[k])
        if m_j == 0:
            return
        retained -= m_j
        q = _interval_probability(probabilities, cfg, j, m_j, num_edges, min_edges)
        if q > 0.0 and _inclusion_uniform(cfg.seed, k, j) <= q:
            sub = TemporalGraph(
                buf_src[k], buf_dst[k], buf_ts[k], presorted=True
            )
            per_shift[k] += _interval_contribution(
                algo(sub, m, delta), width, delta, q
            )
            sampled_edges += m_j
            sampled_count += 1
        buf_src[k] = []
        buf_dst[k] = []
        buf_ts[k] = []

    seen = 0
    prev_t = None
    for u, v, t in edge_stream:
        if prev_t is not None and t < prev_t:
            raise StreamOrderError(f"timestamp {t} arrived after {prev_t}")
        if t < 0:
            raise StreamOrderError("negative timestamp; normalize the stream first")
        prev_t = t
        seen += 1
        for k in range(b):
            j = (t - shifts[k]) // width
            if j != current[k]:
                flush(k, current[k])
                current[k] = j
            buf_src[k].append(u)
            buf_dst[k].append(v)
            buf_ts[k].append(t)
        retained += b
        if retained > peak_retained:
            peak_retained = retained
    for k in range(b):
        flush(k, current[k])

    if seen != num_edges:
        raise StreamOrderError(
            f"stream yielded {seen} edges but num_edges={num_edges}"
        )
    value = sum(per_shift) / b
    if not math.isfinite(value):
        raise EstimatorContractError("estimate accumulated a non-finite value")
    return Estimate(
        value=value,
        per_shift=per_shift,
        sampled_interval_count=sampled_count,
        sampled_edge_fraction=sampled_edges / num_edges,
        rho=None,
        config=cfg,
        threads=1,
        streaming=True,
        peak_retained_edges=peak_retained,
        wall_time_ms=(time.perf_counter() - t0) * 1000.0,
    )


def exhaustive_expectation(
    g: TemporalGraph, m: Motif, delta: int, window_factor: int, algo: ExactCounter
) -> Fraction:
    """Mean of the weighted count over every possible shift, exactly.

    Uses rational arithmetic throughout; the result equals the true
    instance count for any window factor >= 2 (the estimator's expectation
    identity as an equation, not a statistic).  Intended for small graphs.
    """
    if delta <= 0:
        raise ConfigurationError("delta must be >= 1")
    if window_factor < 2:
        raise ConfigurationError("window_factor must be >= 2")
    if g.num_edges == 0:
        return Fraction(0)
    width = window_factor * delta
    num_intervals = num_intervals_for(g.t_max, width)
    acc = Fraction(0)
    for shift in range(-width + 1, 1):
        grid = IntervalGrid(shift, width, num_intervals)
        vec = interval_count_vector(g, grid, m, delta, algo, exact=True)
        acc += vec.l1()
    return acc / width


def correlation_diagnostic(
    probabilities: Sequence[float], counts: IntervalCounts | Sequence
) -> float:
    """Pearson correlation of inclusion probabilities and interval counts.

    Returns 0.0 when either vector is constant (instead of NaN).
    """
    values = counts.values if isinstance(counts, IntervalCounts) else list(counts)
    if len(probabilities) != len(values):
        raise ValueError("probability/count vector length mismatch")
    if len(values) < 2:
        raise ValueError("need at least two intervals")
    xs = [float(q) for q in probabilities]
    ys = [float(y) for y in values]
    try:
        return statistics.correlation(xs, ys)
    except statistics.StatisticsError:
        return 0.0


def variance_upper_bound(total: int, window_factor: int) -> Fraction:
    """Worst-case variance of the all-shifts weighted count: total^2/(wf - 1)."""
    if window_factor < 2:
        raise ConfigurationError("window_factor must be >= 2")
    return Fraction(total * total, window_factor - 1)


def conditional_variance(
    probabilities: Sequence, counts: IntervalCounts | Sequence
):
    """Closed-form variance of the estimator given a fixed grid.

    Equals ``sum_j y_j^2 (1 - q_j)/q_j``; exact if both inputs are exact.

    Raises:
        ValueError: if some interval has probability 0 but a nonzero count.
    """
    values = counts.values if isinstance(counts, IntervalCounts) else list(counts)
    if len(probabilities) != len(values):
        raise ValueError("probability/count vector length mismatch")
    acc = 0
    for q, y in zip(probabilities, values):
        if q == 0:
            if y != 0:
                raise ValueError("zero probability with nonzero count")
            continue
        acc = acc + y * y * (1 - q) / q
    return acc


def sparsity_measure(counts: IntervalCounts | Sequence):
    """Concentration of the interval count vector.

    ``(num_intervals - 1) * ||y||_2^2 / ||y||_1^2``: close to
    ``num_intervals - 1`` for a one-hot vector, at most 1 for a uniform
    vector.  Sparse vectors need larger sampling probabilities for the
    same accuracy.

    Raises:
        ValueError: for an all-zero vector.
    """
    values = counts.values if isinstance(counts, IntervalCounts) else list(counts)
    l1 = sum(values)
    if l1 == 0:
        raise ValueError("sparsity of a zero vector is undefined")
    sq = sum(v * v for v in values)
    return (len(values) - 1) * sq / (l1 * l1)


def tradeoff_report(
    probabilities: Sequence[float],
    counts: IntervalCounts | Sequence,
    window_factor: int,
    num_shifts: int,
) -> dict:
    """Report the error-budget terms implied by one pilot grid pass.

    ``sampling_term`` is the conditional variance divided by the squared
    count estimate; ``window_term`` is ``1/(window_factor - 1)``; their sum
    divided by the shift count bounds the expected squared relative error.
    """
    values = counts.values if isinstance(counts, IntervalCounts) else list(counts)
    total = sum(values)
    if total == 0:
        raise ValueError("pilot pass found no instances; terms undefined")
    cond_var = conditional_variance(probabilities, values)
    sampling_term = float(cond_var) / float(total) ** 2
    window_term = 1.0 / (window_factor - 1)
    return {
        "sampling_term": sampling_term,
        "window_term": window_term,
        "implied_rel_error": math.sqrt((sampling_term + window_term) / num_shifts),
        "sparsity": float(sparsity_measure(values)),
        "rho": correlation_diagnostic(probabilities, values)
        if len(values) >= 2
        else 0.0,
    }
