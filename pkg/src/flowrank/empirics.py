"""Empirical influence estimation from broadcast activity logs.

The pipeline mirrors how influence is measured on real
submission/rebroadcast data over a follower graph: ingest an event log,
drop robotic items by activity entropy, estimate each submitter's local
influence (follower rebroadcasts early in an item's life) or global
influence (triggered cascade size), screen local estimates against a
hypergeometric chance model, and correlate the surviving cohort's
influence with centrality scores.

Graph semantics: an edge (a, b) means "a follows b", so broadcasts by u
reach the in-neighbors of u, and the accounts u follows are its
out-neighbors. User ids in logs are graph node ids.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from . import centrality as _centrality
from .dynamics import cascade_rounds
from .errors import InputFormatError, NumericalError
from .graph import DirectedGraph
from .rng import SLOT_EDGE_BASE, stream_value, trial_base, unit_float

MODES = ("digg", "twitter")
EVENT_LOG_HEADER = ("item_id", "user_id", "timestamp", "kind")

_MEASURE_ALIASES = {"nalpha": "normalized_alpha"}


@dataclass(frozen=True)
class ItemEvents:
    """One item's history: the submit event plus sorted rebroadcasts.

    rebroadcast_users/rebroadcast_times are parallel arrays ordered by
    (timestamp, user_id); the submit event is stored apart so windowed
    counts are unambiguous.
    """

    item_id: str
    submitter: int
    submit_time: int
    rebroadcast_users: np.ndarray
    rebroadcast_times: np.ndarray


class EventLog:
    """Validated per-item event records in first-seen item order."""

    def __init__(self, items, mode: str):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.mode = mode
        self._items: dict[str, ItemEvents] = {}
        for item in items:
            if item.item_id in self._items:
                raise ValueError(f"duplicate item {item.item_id!r}")
            self._items[item.item_id] = item

    def __len__(self) -> int:
        return len(self._items)

    def item_ids(self) -> list[str]:
        return list(self._items)

    def get(self, item_id: str) -> ItemEvents:
        try:
            return self._items[item_id]
        except KeyError:
            raise ValueError(f"unknown item {item_id!r}") from None

    def items(self):
        return self._items.values()

    def user_ids(self) -> np.ndarray:
        """Distinct user ids appearing anywhere in the log, ascending."""
        parts = [np.asarray([it.submitter for it in self._items.values()], dtype=np.int64)]
        parts.extend(it.rebroadcast_users for it in self._items.values())
        if not parts:
            return np.empty(0, dtype=np.int64)
        return np.unique(np.concatenate(parts))

    def restrict(self, item_ids) -> "EventLog":
        """Sub-log with only the given items, in original log order."""
        keep = set(item_ids)
        return EventLog((it for it in self._items.values() if it.item_id in keep), self.mode)


class _LogBuilder:
    # Incremental validation shared by from_records and the CSV reader.
    def __init__(self, mode: str):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        self.mode = mode
        self.order: list[str] = []
        self.submit: dict[str, tuple[int, int]] = {}
        self.events: dict[str, list[tuple[int, int]]] = {}
        self.last_time: dict[str, int] = {}
        self.seen_users: dict[str, set[int]] = {}

    def add(self, item_id: str, user_id: int, timestamp: int, kind: str) -> None:
        if kind not in ("submit", "rebroadcast"):
            raise ValueError(f"unknown kind {kind!r}")
        if user_id < 0:
            raise ValueError("negative user id")
        if kind == "submit":
            if item_id in self.submit:
                raise ValueError(f"second submit for item {item_id!r}")
            self.order.append(item_id)
            self.submit[item_id] = (user_id, timestamp)
            self.events[item_id] = []
            self.last_time[item_id] = timestamp
            self.seen_users[item_id] = {user_id}
            return
        if item_id not in self.submit:
            raise ValueError(f"rebroadcast before submit for item {item_id!r}")
        if timestamp < self.last_time[item_id]:
            raise ValueError(f"timestamps decrease within item {item_id!r}")
        if self.mode == "digg" and user_id in self.seen_users[item_id]:
            raise ValueError(f"duplicate vote by user {user_id} on item {item_id!r}")
        self.seen_users[item_id].add(user_id)
        self.last_time[item_id] = timestamp
        self.events[item_id].append((user_id, timestamp))

    def build(self) -> EventLog:
        items = []
        for item_id in self.order:
            submitter, t0 = self.submit[item_id]
            ev = self.events[item_id]
            users = np.asarray([u for u, _ in ev], dtype=np.int64)
            times = np.asarray([t for _, t in ev], dtype=np.int64)
            order = np.lexsort((users, times))
            items.append(ItemEvents(item_id=item_id, submitter=submitter, submit_time=t0,
                                    rebroadcast_users=users[order],
                                    rebroadcast_times=times[order]))
        return EventLog(items, self.mode)


def from_records(records, mode: str = "digg") -> EventLog:
    """Build a log from (item_id, user_id, timestamp, kind) tuples."""
    builder = _LogBuilder(mode)
    for item_id, user_id, timestamp, kind in records:
        builder.add(str(item_id), int(user_id), int(timestamp), str(kind))
    return builder.build()


def read_event_log(path, mode: str = "digg") -> EventLog:
    """Read the CSV event-log format (header item_id,user_id,timestamp,kind)."""
    builder = _LogBuilder(mode)
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise InputFormatError("empty event log", path=str(path)) from None
            if tuple(h.strip() for h in header) != EVENT_LOG_HEADER:
                raise InputFormatError(
                    f"expected header {','.join(EVENT_LOG_HEADER)}", path=str(path), line=1)
            for lineno, row in enumerate(reader, 2):
                if not row:
                    continue
                if len(row) != 4:
                    raise InputFormatError("expected 4 fields", path=str(path), line=lineno)
                item_id, user_s, time_s, kind = (f.strip() for f in row)
                try:
                    user_id = int(user_s)
                    timestamp = int(time_s)
                except ValueError:
                    raise InputFormatError("user_id and timestamp must be integers",
                                           path=str(path), line=lineno) from None
                try:
                    builder.add(item_id, user_id, timestamp, kind)
                except ValueError as exc:
                    raise InputFormatError(str(exc), path=str(path), line=lineno) from None
    except OSError as exc:
        raise InputFormatError(str(exc), path=str(path)) from exc
    return builder.build()


def write_event_log(log: EventLog, path) -> None:
    """Serialize a log back to the CSV format read_event_log accepts."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(EVENT_LOG_HEADER)
        for item in log.items():
            writer.writerow([item.item_id, item.submitter, item.submit_time, "submit"])
            for user, ts in zip(item.rebroadcast_users, item.rebroadcast_times):
                writer.writerow([item.item_id, int(user), int(ts), "rebroadcast"])


@dataclass(frozen=True)
class InfluenceEstimate:
    """A submitter's empirical influence over its qualifying items.

    `local` is the mean count of follower rebroadcasts inside the early
    window; `global_` the mean size of the cascades the items trigger.
    Whichever was not computed stays None.
    """

    user_id: int
    n_items: int
    local: float | None = None
    global_: float | None = None
    significance_p: float | None = None


@dataclass(frozen=True)
class Cascade:
    """Follower-connected closure of an item's rebroadcasts."""

    item_id: str
    members: frozenset[int]
    edges: tuple[tuple[int, int], ...]

    @property
    def size(self) -> int:
        return len(self.members)


def _check_log_users(log: EventLog, g: DirectedGraph) -> None:
    users = log.user_ids()
    bad = users[(users < 0) | (users >= g.node_count)]
    if bad.size:
        shown = ", ".join(str(int(u)) for u in bad[:10])
        more = f" (+{bad.size - 10} more)" if bad.size > 10 else ""
        raise ValueError(f"unknown user ids in log: {shown}{more}")


def _qualifying_by_submitter(log: EventLog, min_rebroadcasts: int) -> dict[int, list[ItemEvents]]:
    out: dict[int, list[ItemEvents]] = {}
    for item in log.items():
        if item.rebroadcast_users.size >= min_rebroadcasts:
            out.setdefault(item.submitter, []).append(item)
    return out


def local_influence(log: EventLog, g: DirectedGraph, window: int = 100,
                    min_items: int = 2, min_rebroadcasts: int = 0) -> dict[int, InfluenceEstimate]:
    """Mean follower rebroadcasts within each item's first `window` rebroadcasts.

    Followers of the submitter are its in-neighbors. Only submitters
    with at least `min_items` qualifying items get an estimate; the
    result maps user id to estimate in ascending user order.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    _check_log_users(log, g)
    estimates: dict[int, InfluenceEstimate] = {}
    groups = _qualifying_by_submitter(log, min_rebroadcasts)
    for user in sorted(groups):
        items = groups[user]
        if len(items) < min_items:
            continue
        followers = g.in_neighbors(user)
        counts = [int(np.isin(item.rebroadcast_users[:window], followers).sum())
                  for item in items]
        estimates[user] = InfluenceEstimate(user_id=user, n_items=len(items),
                                            local=float(np.mean(counts)))
    return estimates


def extract_cascade(log: EventLog, g: DirectedGraph, item_id: str) -> Cascade:
    """Follower-connected spread of one item, replayed in event order.

    A rebroadcaster joins when it follows at least one member that is
    already in the cascade at its event time; all followed members
    present earlier are recorded as parents. Rebroadcasters connected to
    no member stay out.
    """
    item = log.get(item_id)
    _check_log_users(log.restrict([item_id]), g)
    members = {item.submitter}
    edges: list[tuple[int, int]] = []
    for user in item.rebroadcast_users:
        user = int(user)
        if user in members:
            continue
        parents = [int(p) for p in g.out_neighbors(user) if int(p) in members]
        if parents:
            members.add(user)
            edges.extend((p, user) for p in parents)
    return Cascade(item_id=item_id, members=frozenset(members), edges=tuple(edges))


def global_influence(log: EventLog, g: DirectedGraph, min_items: int = 2,
                     min_rebroadcasts: int = 0) -> dict[int, InfluenceEstimate]:
    """Mean size of the cascades each submitter's qualifying items trigger."""
    _check_log_users(log, g)
    estimates: dict[int, InfluenceEstimate] = {}
    groups = _qualifying_by_submitter(log, min_rebroadcasts)
    for user in sorted(groups):
        items = groups[user]
        if len(items) < min_items:
            continue
        sizes = [extract_cascade(log, g, item.item_id).size for item in items]
        estimates[user] = InfluenceEstimate(user_id=user, n_items=len(items),
                                            global_=float(np.mean(sizes)))
    return estimates


def _log_choose(a: int, b: int) -> float:
    if b < 0 or b > a:
        return -math.inf
    return math.lgamma(a + 1) - math.lgamma(b + 1) - math.lgamma(a - b + 1)


def hypergeometric_pmf(k: int, K: int, N: int, n: int) -> float:
    """P(X = k) drawing n without replacement from N with K marked.

    Computed in log space, so N in the tens of thousands stays exact to
    double precision instead of overflowing factorials. k below the
    support floor max(0, n-(N-K)) is a combinatorial zero.
    """
    for name, value in (("k", k), ("K", K), ("N", N), ("n", n)):
        if int(value) != value:
            raise ValueError(f"{name} must be an integer")
    k, K, N, n = int(k), int(K), int(N), int(n)
    if N < 0 or K < 0 or n < 0 or K > N or n > N:
        raise ValueError("require 0 <= K <= N and 0 <= n <= N")
    if k < 0 or k > min(K, n):
        raise ValueError("require 0 <= k <= min(K, n)")
    log_p = _log_choose(K, k) + _log_choose(N - K, n - k) - _log_choose(N, n)
    return math.exp(log_p) if log_p > -math.inf else 0.0


def significance_screen(estimates: dict[int, InfluenceEstimate], g: DirectedGraph,
                        N: int, n: int, p_cut: float = 0.05) -> dict[int, InfluenceEstimate]:
    """Keep estimates whose local influence beats the urn chance model.

    Under the null, the k follower rebroadcasts among an item's first n
    are a hypergeometric draw: n draws from N active users of whom
    K = follower count are marked. The observed mean rounds (and clamps)
    to the nearest supported k; users with chance probability below
    p_cut survive, annotated with that probability.
    """
    if not 0.0 < p_cut <= 1.0:
        raise ValueError("p_cut must be in (0, 1]")
    kept: dict[int, InfluenceEstimate] = {}
    for user, est in estimates.items():
        if est.local is None:
            raise ValueError("significance screening requires local estimates")
        K = int(g.in_degree[user])
        lo = max(0, n - (N - K))
        hi = min(K, n)
        k = min(max(int(round(est.local)), lo), hi)
        p = hypergeometric_pmf(k, K, N, n)
        if p < p_cut:
            kept[user] = replace(est, significance_p=p)
    return kept


def _entropy_bits(counts: np.ndarray) -> float:
    total = counts.sum()
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def activity_entropies(log: EventLog, item_id: str) -> tuple[float, float]:
    """User entropy and interval entropy (bits) of one item's rebroadcasts.

    User entropy is over the per-user rebroadcast counts; interval
    entropy is over log2-binned gaps between successive rebroadcasts
    (bin = floor(log2(1 + dt))), the scale-free binning suited to
    activity spanning seconds to days. A single rebroadcast has no
    intervals; its interval entropy is 0.
    """
    item = log.get(item_id)
    if item.rebroadcast_users.size < 1:
        raise ValueError(f"undefined entropy: item {item_id!r} has a single event")
    user_entropy = _entropy_bits(np.unique(item.rebroadcast_users, return_counts=True)[1])
    gaps = np.diff(item.rebroadcast_times)
    if gaps.size == 0:
        interval_entropy = 0.0
    else:
        bins = np.floor(np.log2(1.0 + gaps.astype(np.float64)))
        interval_entropy = _entropy_bits(np.unique(bins, return_counts=True)[1])
    return user_entropy, interval_entropy


def spam_filter(log: EventLog, threshold: float = 3.0) -> list[str]:
    """Item ids whose user and interval entropies both exceed the threshold.

    Items without enough events to define the entropies are dropped.
    """
    kept = []
    for item in log.items():
        if item.rebroadcast_users.size < 1:
            continue
        user_h, interval_h = activity_entropies(log, item.item_id)
        if user_h > threshold and interval_h > threshold:
            kept.append(item.item_id)
    return kept


def pearson_correlation(x, y) -> float:
    """Sample Pearson r between two equal-length sequences."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.ndim != 1 or xv.shape != yv.shape:
        raise ValueError("inputs must be equal-length 1-d sequences")
    if xv.size < 3:
        raise ValueError("need at least 3 points")
    xd = xv - xv.mean()
    yd = yv - yv.mean()
    sx = float((xd * xd).sum())
    sy = float((yd * yd).sum())
    if sx == 0.0 or sy == 0.0:
        raise NumericalError("degenerate cohort")
    return float((xd * yd).sum() / math.sqrt(sx * sy))


@dataclass(frozen=True)
class CorrelationEntry:
    alpha: float
    measure: str
    influence_kind: str
    pearson_r: float
    cohort_size: int


@dataclass(frozen=True)
class CorrelationReport:
    """Pearson r of centrality vs empirical influence across an alpha grid."""

    alpha_grid: tuple[float, ...]
    influence_kind: str
    cohort_users: tuple[int, ...]
    entries: tuple[CorrelationEntry, ...]


def _measure_scores(g: DirectedGraph, measure: str, alpha: float) -> np.ndarray:
    if measure == "pagerank":
        return _centrality.pagerank(g, alpha=alpha, tol=1e-12).values
    if measure == "alpha":
        return _centrality.alpha_centrality(g, alpha=alpha, tol=1e-12).values
    if measure == "normalized_alpha":
        return _centrality.normalized_alpha_centrality(g, alpha=alpha, tol=1e-12).values
    if measure == "eigenvector":
        return _centrality.eigenvector_centrality(g).values
    if measure == "indegree":
        return _centrality.degree_centrality(g, "in").values
    if measure == "outdegree":
        return _centrality.degree_centrality(g, "out").values
    raise ValueError(f"unknown measure {measure!r}")


def correlation_sweep(g: DirectedGraph, log: EventLog, measures, alpha_grid,
                      influence_kind: str, *, window: int = 100, min_items: int = 2,
                      min_rebroadcasts: int = 100, p_cut: float = 0.05,
                      entropy_threshold: float = 3.0, active_users: int | None = None,
                      apply_spam_filter: bool = True,
                      apply_significance: bool = True) -> CorrelationReport:
    """Correlate centrality scores with empirical influence over an alpha grid.

    The cohort is built once: spam-filter the items, estimate influence
    for submitters meeting the item/rebroadcast thresholds, and (for
    local influence) keep only the statistically significant users. Each
    (alpha, measure) pair then contributes one Pearson r over the
    cohort. Pairs where the measure is undefined at that alpha, or where
    its cohort scores carry no variance, are skipped; zero variance in
    the influence values themselves is an error.
    """
    if influence_kind not in ("local", "global"):
        raise ValueError("influence_kind must be 'local' or 'global'")
    measures = [_MEASURE_ALIASES.get(m, m) for m in measures]
    for m in measures:
        if m not in _centrality.MEASURES:
            raise ValueError(f"unknown measure {m!r}")
    alpha_grid = tuple(float(a) for a in alpha_grid)

    if active_users is None:
        active_users = int(log.user_ids().size)
    flog = log.restrict(spam_filter(log, entropy_threshold)) if apply_spam_filter else log
    if influence_kind == "local":
        estimates = local_influence(flog, g, window=window, min_items=min_items,
                                    min_rebroadcasts=min_rebroadcasts)
        if apply_significance:
            estimates = significance_screen(estimates, g, N=active_users, n=window,
                                            p_cut=p_cut)
        values_of = {u: e.local for u, e in estimates.items()}
    else:
        estimates = global_influence(flog, g, min_items=min_items,
                                     min_rebroadcasts=min_rebroadcasts)
        values_of = {u: e.global_ for u, e in estimates.items()}

    cohort = sorted(values_of)
    if len(cohort) < 3:
        raise NumericalError(f"cohort too small: {len(cohort)} users after screening, need >= 3")
    cohort_idx = np.asarray(cohort, dtype=np.int64)
    influence = np.asarray([values_of[u] for u in cohort], dtype=np.float64)
    if np.ptp(influence) == 0.0:
        raise NumericalError("degenerate cohort")

    entries = []
    for alpha in alpha_grid:
        for measure in measures:
            try:
                scores = _measure_scores(g, measure, alpha)[cohort_idx]
            except NumericalError:
                continue
            if np.ptp(scores) == 0.0:
                continue
            r = pearson_correlation(scores, influence)
            entries.append(CorrelationEntry(alpha=alpha, measure=measure,
                                            influence_kind=influence_kind,
                                            pearson_r=r, cohort_size=len(cohort)))
    return CorrelationReport(alpha_grid=alpha_grid, influence_kind=influence_kind,
                             cohort_users=tuple(cohort), entries=tuple(entries))


def synthesize_event_log(g: DirectedGraph, submitters, items_per_submitter: int,
                         transmissibility: float, rng_seed: int, *, mode: str = "digg",
                         start_time: int = 1_000_000, item_spacing: int = 10_000_000,
                         max_gap_exp: float = 16.0) -> EventLog:
    """Generate an event log by broadcasting cascades over the graph.

    Each item seeds an independent cascade at its submitter; because
    broadcasts travel from the followed account to its followers, the
    cascade runs on the reversed graph. Members are serialized as
    rebroadcasts in (round, user id) order with log-uniform integer gaps
    drawn from the same trial stream (slots past the edge coins), so an
    entire log is a pure function of (graph, submitters, seed).
    """
    rev = g.reverse()
    slot_floor = SLOT_EDGE_BASE + rev.edge_count
    items = []
    trial = 0
    for submitter in submitters:
        submitter = int(submitter)
        for _ in range(items_per_submitter):
            rounds = cascade_rounds(rev, {submitter}, transmissibility, rng_seed, trial)
            infected = np.flatnonzero(rounds >= 0)
            others = infected[infected != submitter]
            others = others[np.lexsort((others, rounds[others]))]
            base = trial_base(rng_seed, trial)
            t0 = start_time + len(items) * item_spacing
            t = t0
            times = np.empty(others.size, dtype=np.int64)
            for j in range(others.size):
                u01 = unit_float(stream_value(base, slot_floor + j))
                t += 1 + int(2.0 ** (u01 * max_gap_exp))
                times[j] = t
            items.append(ItemEvents(item_id=f"item{trial:04d}", submitter=submitter,
                                    submit_time=t0,
                                    rebroadcast_users=others.astype(np.int64),
                                    rebroadcast_times=times))
            trial += 1
    return EventLog(items, mode)
