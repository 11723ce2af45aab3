"""Undirected weighted graphs, Laplacians, synthetic generators, and file I/O.

Vertex indices are 0-based everywhere. Each edge is stored once per
unordered pair as (i, j) with i < j and a strictly positive weight, so the
implied adjacency matrix is symmetric with an empty diagonal. The
combinatorial Laplacian is the degree matrix minus the adjacency matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = [
    "Graph",
    "GraphFormatError",
    "laplacian",
    "gen_erdos_renyi",
    "gen_ring",
    "gen_sensor",
    "gen_community",
    "gen_sbm",
    "sbm_epsilon_c",
    "community_count",
    "community_sizes",
    "load_graph",
    "save_graph",
]

EDGE_LIST = "edge-list"
MATRIX_MARKET = "matrix-market"
_FORMATS = (EDGE_LIST, MATRIX_MARKET)


class GraphFormatError(ValueError):
    """A graph file cannot be parsed; carries the offending line number."""

    def __init__(self, message, path=None, line=None):
        loc = ""
        if path is not None:
            loc += f"{path}:"
        if line is not None:
            loc += f"line {line}:"
        super().__init__(f"{loc} {message}" if loc else message)
        self.path = path
        self.line = line


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected weighted graph with strictly positive edge weights.

    Attributes
    ----------
    n : int
        Number of vertices.
    edges : ndarray of shape (m, 2)
        One row (i, j) per edge with i < j, sorted lexicographically.
    weights : ndarray of shape (m,)
        Positive edge weights, aligned with ``edges``.

    Construction canonicalizes edge order, rejects self-loops, duplicate
    pairs, out-of-range indices and non-positive weights, and freezes the
    arrays, so instances are immutable.
    """

    n: int
    edges: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        n = int(self.n)
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(self.weights, dtype=np.float64).reshape(-1)
        if edges.shape[0] != weights.shape[0]:
            raise ValueError("edges and weights must have matching lengths")
        if np.any(weights <= 0.0) or not np.all(np.isfinite(weights)):
            raise ValueError("edge weights must be strictly positive and finite")
        if edges.size:
            if edges.min() < 0 or edges.max() >= n:
                raise ValueError("vertex index out of range")
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            if np.any(lo == hi):
                raise ValueError("self-loops are not allowed")
            order = np.lexsort((hi, lo))
            lo, hi, weights = lo[order], hi[order], weights[order]
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                raise ValueError("duplicate edge")
            edges = np.column_stack([lo, hi])
        edges.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.edges, other.edges)
            and np.array_equal(self.weights, other.weights)
        )

    @property
    def num_edges(self):
        return int(self.edges.shape[0])

    def degrees(self):
        """Weighted degree of each vertex."""
        deg = np.zeros(self.n)
        np.add.at(deg, self.edges[:, 0], self.weights)
        np.add.at(deg, self.edges[:, 1], self.weights)
        return deg

    def adjacency(self):
        """Dense symmetric weighted adjacency matrix."""
        w = np.zeros((self.n, self.n))
        i, j = self.edges[:, 0], self.edges[:, 1]
        w[i, j] = self.weights
        w[j, i] = self.weights
        return w


def laplacian(g: Graph) -> np.ndarray:
    """Dense combinatorial Laplacian: degree matrix minus adjacency matrix.

    Rows sum to zero exactly up to rounding, and the matrix is symmetric
    positive semi-definite for any valid graph.
    """
    return np.diag(g.degrees()) - g.adjacency()


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------

def _pair_indices(n):
    return np.triu_indices(n, 1)


def gen_erdos_renyi(n: int, p: float, seed: int = 0) -> Graph:
    """Uniform random graph: each pair is an edge with probability p, weight 1."""
    if n <= 0:
        raise ValueError("n must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    ii, jj = _pair_indices(n)
    hit = rng.random(ii.size) < p
    edges = np.column_stack([ii[hit], jj[hit]])
    return Graph(n, edges, np.ones(edges.shape[0]))


def gen_ring(n: int) -> Graph:
    """Cycle graph on n >= 3 vertices with unit weights."""
    if n < 3:
        raise ValueError("a ring needs at least 3 vertices")
    i = np.arange(n - 1)
    edges = np.vstack([np.column_stack([i, i + 1]), [[0, n - 1]]])
    return Graph(n, edges, np.ones(n))


def default_sensor_threshold(n: int) -> float:
    """Connectivity-regime radius sqrt(2 log(n) / n) for n uniform points."""
    return math.sqrt(2.0 * math.log(n) / n)


def gen_sensor(n: int, threshold: float | None = None, seed: int = 0) -> Graph:
    """Random geometric graph on the unit square with Gaussian kernel weights.

    Vertices are placed uniformly at random; two vertices are joined when
    their distance d is strictly below ``threshold`` and the edge weight is
    exp(-d^2 / (2 sigma^2)) with sigma = threshold / 2. The default
    threshold is sqrt(2 log(n) / n).
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if threshold is None:
        threshold = default_sensor_threshold(n)
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    rng = np.random.default_rng(seed)
    pts = rng.random((n, 2))
    ii, jj = _pair_indices(n)
    diff = pts[ii] - pts[jj]
    d2 = np.einsum("ij,ij->i", diff, diff)
    hit = d2 < threshold * threshold
    edges = np.column_stack([ii[hit], jj[hit]])
    if threshold > 0:
        w = np.exp(-d2[hit] / (0.5 * threshold * threshold))
    else:
        w = np.ones(0)
    return Graph(n, edges, w)


def community_count(n: int) -> int:
    """Number of communities used by gen_community: floor(sqrt(n) / 2)."""
    return math.isqrt(n) // 2


def _community_sizes(rng, n):
    q = community_count(n)
    sizes = rng.multinomial(n, np.full(q, 1.0 / q))
    # every community keeps at least one vertex
    while np.any(sizes == 0):
        sizes[int(np.argmax(sizes))] -= 1
        sizes[int(np.argmin(sizes))] += 1
    return sizes


def community_sizes(n: int, seed: int = 0) -> np.ndarray:
    """Community sizes drawn by gen_community for the same (n, seed)."""
    if n < 16:
        raise ValueError("n must be at least 16")
    return _community_sizes(np.random.default_rng(seed), n)


def gen_community(n: int, seed: int = 0) -> Graph:
    """Clustered random graph: geometric communities plus sparse cross links.

    The vertex set is split into floor(sqrt(n) / 2) communities of random
    sizes. Each community is an independent geometric graph on the unit
    disk (radius sqrt(2 log(m) / m) for size m, Gaussian kernel weights,
    sigma = radius / 2). Every cross-community pair is connected with
    probability 1/n with unit weight.
    """
    if n < 16:
        raise ValueError("n must be at least 16")
    rng = np.random.default_rng(seed)
    sizes = _community_sizes(rng, n)
    rows, cols, ws = [], [], []
    offset = 0
    for m in sizes:
        m = int(m)
        rad = np.sqrt(rng.random(m))
        ang = 2.0 * np.pi * rng.random(m)
        pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        if m >= 2:
            thr = math.sqrt(2.0 * math.log(m) / m)
            ii, jj = _pair_indices(m)
            diff = pts[ii] - pts[jj]
            d2 = np.einsum("ij,ij->i", diff, diff)
            hit = d2 < thr * thr
            rows.append(ii[hit] + offset)
            cols.append(jj[hit] + offset)
            ws.append(np.exp(-d2[hit] / (0.5 * thr * thr)))
        offset += m
    blocks = np.repeat(np.arange(sizes.size), sizes)
    ii, jj = _pair_indices(n)
    cross = blocks[ii] != blocks[jj]
    hit = cross & (rng.random(ii.size) < 1.0 / n)
    rows.append(ii[hit])
    cols.append(jj[hit])
    ws.append(np.ones(int(hit.sum())))
    edges = np.column_stack([np.concatenate(rows), np.concatenate(cols)])
    return Graph(n, edges, np.concatenate(ws))


def sbm_epsilon_c(avg_degree: float, q: int) -> float:
    """Community-detectability threshold for the ratio p_out / p_in.

    For a planted-partition model with q equal blocks and expected degree
    d, block structure is detectable below
    epsilon_c = (d - sqrt(d)) / (d + sqrt(d) (q - 1)).
    """
    if avg_degree <= 0 or q < 2:
        raise ValueError("need avg_degree > 0 and q >= 2")
    rt = math.sqrt(avg_degree)
    return (avg_degree - rt) / (avg_degree + rt * (q - 1))


def gen_sbm(n: int, q: int, avg_degree: float, epsilon: float, seed: int = 0) -> Graph:
    """Planted-partition graph with q equal blocks and unit weights.

    ``epsilon`` is the ratio p_out / p_in between the cross-block and
    in-block edge probabilities; the pair (p_in, p_out) is solved so the
    expected degree equals ``avg_degree``. Raises when q does not divide n
    or when the requested degree forces p_in above 1.
    """
    if n <= 0 or q <= 0 or n % q != 0:
        raise ValueError("q must divide n")
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if avg_degree <= 0:
        raise ValueError("avg_degree must be positive")
    m = n // q
    denom = (m - 1) + epsilon * (n - m)
    if denom <= 0:
        raise ValueError("infeasible parameters: no pairs to connect")
    p_in = avg_degree / denom
    if p_in > 1.0:
        raise ValueError("infeasible parameters: in-block probability exceeds 1")
    p_out = epsilon * p_in
    rng = np.random.default_rng(seed)
    blocks = np.arange(n) // m
    ii, jj = _pair_indices(n)
    prob = np.where(blocks[ii] == blocks[jj], p_in, p_out)
    hit = rng.random(ii.size) < prob
    edges = np.column_stack([ii[hit], jj[hit]])
    return Graph(n, edges, np.ones(edges.shape[0]))


# ---------------------------------------------------------------------------
# file I/O
# ---------------------------------------------------------------------------

def _infer_format(path):
    if Path(path).suffix.lower() in (".mtx", ".mm"):
        return MATRIX_MARKET
    return EDGE_LIST


def save_graph(g: Graph, path, format: str | None = None) -> None:
    """Write a graph as an edge-list text file or Matrix Market file."""
    fmt = format or _infer_format(path)
    if fmt not in _FORMATS:
        raise ValueError(f"unknown graph format: {fmt!r}")
    lines = []
    if fmt == EDGE_LIST:
        lines.append("# undirected weighted edge list: i j w (0-based)")
        lines.append(f"#n {g.n}")
        for (i, j), w in zip(g.edges, g.weights):
            lines.append(f"{i} {j} {float(w)!r}")
    else:
        lines.append("%%MatrixMarket matrix coordinate real symmetric")
        lines.append("% weighted adjacency, lower triangle, 1-based")
        lines.append(f"{g.n} {g.n} {g.num_edges}")
        for (i, j), w in zip(g.edges, g.weights):
            lines.append(f"{j + 1} {i + 1} {float(w)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_graph(path, format: str | None = None) -> Graph:
    """Read a graph written by save_graph (or compatible external files)."""
    fmt = format or _infer_format(path)
    if fmt not in _FORMATS:
        raise ValueError(f"unknown graph format: {fmt!r}")
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise
    if fmt == EDGE_LIST:
        return _parse_edge_list(text, path)
    return _parse_matrix_market(text, path)


def _parse_edge_list(text, path):
    declared_n = None
    seen = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n ") or body.startswith("n\t"):
                try:
                    declared_n = int(body.split()[1])
                except (IndexError, ValueError):
                    raise GraphFormatError("malformed '#n' header", path, lineno)
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise GraphFormatError("expected 'i j w'", path, lineno)
        try:
            i, j = int(tokens[0]), int(tokens[1])
            w = float(tokens[2])
        except ValueError:
            raise GraphFormatError(f"cannot parse edge {line!r}", path, lineno)
        if i < 0 or j < 0:
            raise GraphFormatError("negative vertex index", path, lineno)
        if i == j:
            raise GraphFormatError("self-loop", path, lineno)
        if w <= 0 or not math.isfinite(w):
            raise GraphFormatError("non-positive weight", path, lineno)
        key = (min(i, j), max(i, j))
        if key in seen:
            if seen[key] == w:
                raise GraphFormatError(f"duplicate edge {key}", path, lineno)
            raise GraphFormatError(
                f"asymmetric weights for edge {key}", path, lineno
            )
        seen[key] = w
    max_idx = max((k[1] for k in seen), default=-1)
    n = declared_n if declared_n is not None else max_idx + 1
    if max_idx >= n:
        raise GraphFormatError(
            f"vertex index {max_idx} exceeds declared count {n}", path
        )
    edges = np.array(sorted(seen), dtype=np.int64).reshape(-1, 2)
    weights = np.array([seen[tuple(e)] for e in edges])
    return Graph(n, edges, weights)


def _parse_matrix_market(text, path):
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty file", path, 1)
    banner = lines[0].split()
    if len(banner) < 5 or banner[0].lower() != "%%matrixmarket":
        raise GraphFormatError("missing MatrixMarket banner", path, 1)
    kind, layout, field, sym = (t.lower() for t in banner[1:5])
    if kind != "matrix" or layout != "coordinate":
        raise GraphFormatError("only coordinate matrices are supported", path, 1)
    if field not in ("real", "integer"):
        raise GraphFormatError(f"unsupported field type {field!r}", path, 1)
    if sym != "symmetric":
        raise GraphFormatError("matrix must be declared symmetric", path, 1)
    it = ((no, ln) for no, ln in enumerate(lines[1:], start=2) if ln.strip())
    dims = None
    for lineno, line in it:
        if line.lstrip().startswith("%"):
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise GraphFormatError("expected 'rows cols nnz'", path, lineno)
        try:
            nrows, ncols, nnz = (int(t) for t in tokens)
        except ValueError:
            raise GraphFormatError("malformed size line", path, lineno)
        if nrows != ncols:
            raise GraphFormatError("matrix must be square", path, lineno)
        dims = (nrows, nnz)
        break
    if dims is None:
        raise GraphFormatError("missing size line", path)
    n, nnz = dims
    seen = {}
    count = 0
    for lineno, line in it:
        if line.lstrip().startswith("%"):
            continue
        tokens = line.split()
        if len(tokens) != 3:
            raise GraphFormatError("expected 'i j w'", path, lineno)
        try:
            r, c = int(tokens[0]), int(tokens[1])
            w = float(tokens[2])
        except ValueError:
            raise GraphFormatError(f"cannot parse entry {line!r}", path, lineno)
        count += 1
        if count > nnz:
            raise GraphFormatError("more entries than declared", path, lineno)
        if not (1 <= r <= n and 1 <= c <= n):
            raise GraphFormatError("index out of range", path, lineno)
        if r == c:
            raise GraphFormatError("self-loop (diagonal entry)", path, lineno)
        if w <= 0 or not math.isfinite(w):
            raise GraphFormatError("non-positive weight", path, lineno)
        key = (min(r, c) - 1, max(r, c) - 1)
        if key in seen:
            raise GraphFormatError(f"duplicate entry for pair {key}", path, lineno)
        seen[key] = w
    if count < nnz:
        raise GraphFormatError(
            f"truncated file: {count} entries, {nnz} declared", path
        )
    edges = np.array(sorted(seen), dtype=np.int64).reshape(-1, 2)
    weights = np.array([seen[tuple(e)] for e in edges])
    return Graph(n, edges, weights)
