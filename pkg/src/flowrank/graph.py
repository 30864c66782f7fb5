"""Sparse directed graphs and the linear operators built on them.

Storage is CSR in both directions (grouped by source and by destination)
so left vector-matrix products against A, the column-stochastic transfer
matrix, and the replication matrix are single gather passes. Graphs are
immutable after construction.

Edge direction convention: an edge (a, b) points a -> b. Row vectors act
from the left, so (x @ A)[j] sums x over the in-neighbors of j.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import InputFormatError

_INT_TOKEN = re.compile(r"[+-]?\d+\Z")


class DanglingPolicy(enum.Enum):
    """What the transfer matrix does with mass on zero-out-degree nodes.

    UNIFORM_TELEPORT spreads it evenly over all nodes (the PageRank
    convention); SELF_RETAIN leaves it in place, which keeps raw
    conservative trajectories interpretable as mass that stopped moving.
    """

    UNIFORM_TELEPORT = "uniform-teleport"
    SELF_RETAIN = "self-retain"


@dataclass(frozen=True, eq=False)
class DirectedGraph:
    """Immutable directed graph in dual-CSR form.

    out_indptr/out_indices group edge targets by source (targets sorted);
    in_indptr/in_indices group edge sources by destination (sources
    sorted). Both views describe the same edge set.
    """

    node_count: int
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray
    out_degree: np.ndarray
    in_degree: np.ndarray

    @property
    def edge_count(self) -> int:
        return int(self.out_indices.shape[0])

    def out_neighbors(self, node: int) -> np.ndarray:
        return self.out_indices[self.out_indptr[node]:self.out_indptr[node + 1]]

    def in_neighbors(self, node: int) -> np.ndarray:
        return self.in_indices[self.in_indptr[node]:self.in_indptr[node + 1]]

    def edges(self) -> np.ndarray:
        """Edge array of shape (E, 2), sorted by (source, target)."""
        src = np.repeat(np.arange(self.node_count, dtype=np.int64), np.diff(self.out_indptr))
        return np.column_stack((src, self.out_indices))

    def reverse(self) -> "DirectedGraph":
        """Graph with every edge flipped; shares the stored arrays."""
        return DirectedGraph(
            node_count=self.node_count,
            out_indptr=self.in_indptr,
            out_indices=self.in_indices,
            in_indptr=self.out_indptr,
            in_indices=self.out_indices,
            out_degree=self.in_degree,
            in_degree=self.out_degree,
        )


def build_graph(edges, node_count: int | None = None) -> DirectedGraph:
    """Build an immutable graph from an iterable of (src, dst) pairs.

    Duplicate edges collapse to one, self-loops are dropped, and ids must
    be nonnegative. With `node_count` unset the graph spans 0..max id;
    ids at or above an explicit `node_count` are an error.
    """
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be (src, dst) pairs")
    if arr.size and arr.min() < 0:
        raise ValueError("negative node id")
    arr = arr[arr[:, 0] != arr[:, 1]]
    if node_count is None:
        if arr.size == 0:
            raise ValueError("empty graph")
        node_count = int(arr.max()) + 1
    elif node_count <= 0:
        raise ValueError("empty graph")
    elif arr.size and int(arr.max()) >= node_count:
        raise ValueError(f"node id {int(arr.max())} out of range for node_count={node_count}")

    arr = np.unique(arr, axis=0) if arr.size else arr
    src, dst = arr[:, 0], arr[:, 1]
    out_degree = np.bincount(src, minlength=node_count).astype(np.int64)
    in_degree = np.bincount(dst, minlength=node_count).astype(np.int64)

    out_indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(out_degree, out=out_indptr[1:])
    # unique() already sorted rows by (src, dst): targets are grouped and sorted
    out_indices = dst.copy()

    in_indptr = np.zeros(node_count + 1, dtype=np.int64)
    np.cumsum(in_degree, out=in_indptr[1:])
    order = np.lexsort((src, dst))
    in_indices = src[order]

    return DirectedGraph(
        node_count=node_count,
        out_indptr=out_indptr,
        out_indices=out_indices,
        in_indptr=in_indptr,
        in_indices=in_indices,
        out_degree=out_degree,
        in_degree=in_degree,
    )


def _as_weight_vector(g: DirectedGraph, x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] != g.node_count:
        raise ValueError(f"weight vector must have length {g.node_count}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite values in weight vector")
    return arr


def adjacency_apply(g: DirectedGraph, x) -> np.ndarray:
    """y = x @ A: each node collects the weight of its in-neighbors."""
    xv = _as_weight_vector(g, x)
    return _kernels.gather_sum(g.in_indptr, g.in_indices, xv)


def transfer_apply(g: DirectedGraph, x, delta: float,
                   dangling: DanglingPolicy = DanglingPolicy.UNIFORM_TELEPORT) -> np.ndarray:
    """y = x @ T with T = delta*I + (1-delta) * D^-1 A.

    Column sums of T are exactly 1 once the chosen dangling policy
    reassigns the mass of zero-out-degree nodes, so total weight is
    conserved to rounding.
    """
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must be in [0, 1]")
    xv = _as_weight_vector(g, x)
    inv_out = np.zeros(g.node_count, dtype=np.float64)
    live = g.out_degree > 0
    inv_out[live] = 1.0 / g.out_degree[live]
    y = _kernels.gather_sum(g.in_indptr, g.in_indices, xv * inv_out)
    sunk = ~live
    if sunk.any():
        if dangling is DanglingPolicy.UNIFORM_TELEPORT:
            y += xv[sunk].sum() / g.node_count
        else:
            y[sunk] += xv[sunk]
    if delta != 0.0:
        return delta * xv + (1.0 - delta) * y
    return y


def replication_apply(g: DirectedGraph, x, delta: float, alpha: float) -> np.ndarray:
    """y = x @ R with R = (delta/alpha)*I + A.

    The diagonal term is the retained-copy rate per unit of attenuation;
    delta > 0 with alpha = 0 leaves R undefined.
    """
    if delta < 0.0 or alpha < 0.0:
        raise ValueError("delta and alpha must be >= 0")
    if delta > 0.0 and alpha == 0.0:
        raise ValueError("undefined self-replication: delta > 0 requires alpha > 0")
    xv = _as_weight_vector(g, x)
    y = _kernels.gather_sum(g.in_indptr, g.in_indices, xv)
    if delta != 0.0:
        y += (delta / alpha) * xv
    return y


def indegree_vector(g: DirectedGraph) -> np.ndarray:
    """In-degree of every node as a float vector (x0 = e @ A)."""
    return g.in_degree.astype(np.float64)


def load_edge_list(path, *, mapping_path=None) -> tuple[DirectedGraph, list[str] | None]:
    """Read a TSV edge list (src<TAB>dst per line, '#' comment lines).

    If every token is a decimal integer the ids are used directly
    (gaps become isolated nodes). Otherwise tokens are treated as string
    labels, mapped to dense ids in sorted order, and the mapping is
    written next to the input as <input>.nodemap.tsv (label<TAB>index),
    or to `mapping_path` when given. Returns (graph, labels or None).
    """
    path = Path(path)
    rows: list[tuple[int, str, str]] = []
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.rstrip("\r\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise InputFormatError(
                        f"expected src<TAB>dst, got {line!r}", path=str(path), line=lineno)
                a, b = parts[0].strip(), parts[1].strip()
                if not a or not b:
                    raise InputFormatError("empty node field", path=str(path), line=lineno)
                rows.append((lineno, a, b))
    except OSError as exc:
        raise InputFormatError(str(exc), path=str(path)) from exc
    if not rows:
        raise InputFormatError("empty graph", path=str(path))

    tokens = [t for _, a, b in rows for t in (a, b)]
    if all(_INT_TOKEN.match(t) for t in tokens):
        labels = None
        try:
            pairs = [(int(a), int(b)) for _, a, b in rows]
        except ValueError as exc:  # pragma: no cover - regex already filtered
            raise InputFormatError(str(exc), path=str(path)) from exc
        if min(min(p) for p in pairs) < 0:
            bad = next(ln for ln, a, b in rows if int(a) < 0 or int(b) < 0)
            raise InputFormatError("negative node id", path=str(path), line=bad)
    else:
        labels = sorted(set(tokens))
        index = {lab: i for i, lab in enumerate(labels)}
        pairs = [(index[a], index[b]) for _, a, b in rows]
        mpath = Path(mapping_path) if mapping_path is not None else Path(str(path) + ".nodemap.tsv")
        with open(mpath, "w", encoding="utf-8") as fh:
            for i, lab in enumerate(labels):
                fh.write(f"{lab}\t{i}\n")

    try:
        graph = build_graph(pairs)
    except ValueError as exc:
        raise InputFormatError(str(exc), path=str(path)) from exc
    return graph, labels


def write_edge_list(path, edges) -> None:
    """Write integer (src, dst) pairs as the TSV format load_edge_list reads."""
    arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    with open(path, "w", encoding="utf-8") as fh:
        for a, b in arr:
            fh.write(f"{int(a)}\t{int(b)}\n")
