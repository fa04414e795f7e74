"""Attack-graph container, edge-list ingestion, and block structure.

The attack structure is a directed or undirected graph on nodes
``0 .. n-1`` where an edge ``u -> v`` means a compromised ``u`` can attack
``v`` directly.  It is stored as in-neighbor lists in CSR form (``indptr``,
``indices``): the dynamics only ever consumes in-neighborhoods, and the
spectral routines express their matrix-vector products over the same two
arrays.

``frobenius_decompose`` partitions the node set into strongly connected
blocks ordered so that every edge runs from a later block into an earlier
one, i.e. the adjacency matrix is block upper-triangular under the block
ordering.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

__all__ = [
    "AttackGraph",
    "FrobeniusDecomposition",
    "EdgeListFormatError",
    "load_edge_list",
    "write_edge_list",
    "frobenius_decompose",
    "row_products",
    "row_sums",
]


class EdgeListFormatError(ValueError):
    """Malformed edge-list input.  Carries the offending 1-based line number."""

    def __init__(self, message: str, line_number: int | None = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


def _as_readonly(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


class AttackGraph:
    """Immutable directed/undirected attack structure.

    Parameters
    ----------
    in_neighbors : sequence of int sequences
        ``in_neighbors[v]`` lists the nodes ``u`` with an edge ``u -> v``.
        Lists must be free of self-loops, duplicates, and out-of-range ids.
    directed : bool
        If False, the in-neighbor lists must be symmetric
        (``u in N_v`` iff ``v in N_u``) and ``edge_count`` counts each
        undirected edge once.
    node_ids : array-like of int, optional
        Original labels for relabeled graphs; ``node_ids[v]`` is the label
        node ``v`` carried in the source file.

    Attributes
    ----------
    n : int
        Node count.
    indptr, indices : ndarray
        CSR arrays of the in-neighbor lists; the in-neighbors of ``v`` are
        ``indices[indptr[v]:indptr[v + 1]]``, sorted ascending.
    edge_count : int
        Number of edges (undirected edges counted once).
    """

    __slots__ = (
        "n",
        "directed",
        "indptr",
        "indices",
        "edge_count",
        "node_ids",
        "dropped_self_loops",
        "collapsed_duplicates",
    )

    def __init__(
        self,
        in_neighbors: Sequence[Sequence[int]],
        directed: bool,
        node_ids: Sequence[int] | None = None,
    ):
        n = len(in_neighbors)
        if n <= 0:
            raise ValueError("graph must have at least one node")
        lengths = np.fromiter((len(row) for row in in_neighbors), dtype=np.int64, count=n)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        if indptr[-1]:
            indices = np.concatenate(
                [np.sort(np.asarray(row, dtype=np.int64)) for row in in_neighbors if len(row)]
            )
        else:
            indices = np.zeros(0, dtype=np.int64)

        if indices.size:
            if indices.min() < 0 or indices.max() >= n:
                raise ValueError("neighbor index out of range [0, n)")
            rows = np.repeat(np.arange(n, dtype=np.int64), lengths)
            if np.any(rows == indices):
                raise ValueError("self-loops are not allowed")
            # sorted rows make duplicate detection a single adjacent compare
            dup = (indices[1:] == indices[:-1]) & (rows[1:] == rows[:-1])
            if np.any(dup):
                raise ValueError("duplicate in-neighbor entries")

        self.n = n
        self.directed = bool(directed)
        self.indptr = _as_readonly(indptr)
        self.indices = _as_readonly(indices)
        if not directed:
            self._check_symmetry()
            self.edge_count = int(indices.size // 2)
        else:
            self.edge_count = int(indices.size)
        if node_ids is not None:
            ids = np.asarray(node_ids, dtype=np.int64)
            if ids.shape != (n,):
                raise ValueError("node_ids must have one entry per node")
            self.node_ids = _as_readonly(ids)
        else:
            self.node_ids = None
        self.dropped_self_loops = 0
        self.collapsed_duplicates = 0

    def _check_symmetry(self) -> None:
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        fwd = set(zip(rows.tolist(), self.indices.tolist()))
        for u, v in fwd:
            if (v, u) not in fwd:
                raise ValueError(
                    f"undirected graph is not symmetric: {u} in N_{v} but {v} not in N_{u}"
                )

    # -- queries -----------------------------------------------------------

    def in_neighbors(self, v: int) -> np.ndarray:
        """In-neighbors of node ``v`` as a sorted array (read-only view)."""
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    @property
    def in_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def max_in_degree(self) -> int:
        return int(self.in_degrees.max()) if self.n else 0

    def out_csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Successor lists (transpose of the in-neighbor CSR)."""
        return _transpose_csr(self.n, self.indptr, self.indices)

    def edges(self) -> np.ndarray:
        """All directed edges as an (m, 2) array of (u, v) pairs, v-major."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), np.diff(self.indptr))
        return np.column_stack([self.indices, rows])

    def summary(self) -> dict:
        """Structural summary: {n, edge_count, directed, max_in_degree, scc_count}."""
        return {
            "n": self.n,
            "edge_count": self.edge_count,
            "directed": self.directed,
            "max_in_degree": self.max_in_degree,
            "scc_count": len(frobenius_decompose(self).blocks),
        }

    def __eq__(self, other) -> bool:
        if not isinstance(other, AttackGraph):
            return NotImplemented
        return (
            self.n == other.n
            and self.directed == other.directed
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash((self.n, self.directed, self.indices.tobytes()))

    def __repr__(self) -> str:
        kind = "directed" if self.directed else "undirected"
        return f"AttackGraph(n={self.n}, edges={self.edge_count}, {kind})"

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        edges: Iterable[tuple[int, int]],
        n: int | None = None,
        directed: bool = True,
    ) -> "AttackGraph":
        """Build from (u, v) pairs meaning ``u`` attacks ``v``.

        Node count defaults to ``1 + max id``.  Undirected mode inserts both
        orientations.
        """
        pairs = [(int(u), int(v)) for u, v in edges]
        if n is None:
            n = 1 + max((max(u, v) for u, v in pairs), default=-1)
        rows: list[list[int]] = [[] for _ in range(n)]
        seen = set()
        for u, v in pairs:
            if not directed and (v, u) in seen:
                continue
            if (u, v) in seen:
                continue
            seen.add((u, v))
            rows[v].append(u)
            if not directed:
                rows[u].append(v)
        return cls(rows, directed=directed)

    @classmethod
    def cycle(cls, n: int, directed: bool = False) -> "AttackGraph":
        """Cycle on ``n`` nodes; ``cycle(2)`` is the single undirected edge."""
        if n < 2:
            raise ValueError("cycle needs at least 2 nodes")
        if directed:
            return cls.from_edges([(v, (v + 1) % n) for v in range(n)], n=n, directed=True)
        if n == 2:
            return cls.from_edges([(0, 1)], n=2, directed=False)
        return cls.from_edges([(v, (v + 1) % n) for v in range(n)], n=n, directed=False)

    @classmethod
    def complete(cls, n: int) -> "AttackGraph":
        return cls.from_edges(
            [(u, v) for u in range(n) for v in range(u + 1, n)], n=n, directed=False
        )

    @classmethod
    def erdos_renyi(
        cls, n: int, p: float, seed: int, directed: bool = False
    ) -> "AttackGraph":
        """G(n, p) with a seeded generator; isolated nodes are kept."""
        rng = np.random.default_rng(seed)
        mask = rng.random((n, n)) < p
        if directed:
            np.fill_diagonal(mask, False)
            src, dst = np.nonzero(mask)
        else:
            iu = np.triu_indices(n, k=1)
            keep = mask[iu]
            src, dst = iu[0][keep], iu[1][keep]
        return cls.from_edges(zip(src.tolist(), dst.tolist()), n=n, directed=directed)


def load_edge_list(source: IO[str] | str | Path, directed: bool) -> AttackGraph:
    """Parse whitespace-separated ``u v`` edge lines into an :class:`AttackGraph`.

    Lines starting with ``#`` are comments.  Node ids may be sparse or
    arbitrary; they are relabeled to the dense range ``[0, n)`` (ascending by
    original id) and the mapping is kept on ``node_ids``.  Duplicate edges
    collapse to one and self-loops are dropped; both counts are recorded on
    the returned graph.

    Raises
    ------
    EdgeListFormatError
        On a non-integer or non-2-token line (with its line number), or when
        no edges remain after cleaning.
    """
    if isinstance(source, (str, Path)):
        with open(source, "rt", encoding="utf-8") as fh:
            return load_edge_list(fh, directed)

    raw_edges: list[tuple[int, int]] = []
    self_loops = 0
    for lineno, line in enumerate(source, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        tokens = stripped.split()
        if len(tokens) != 2:
            raise EdgeListFormatError(
                f"expected two node ids, got {len(tokens)} tokens", lineno
            )
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListFormatError(
                f"non-integer node id in {stripped!r}", lineno
            ) from None
        if u == v:
            self_loops += 1
            continue
        raw_edges.append((u, v))

    if not raw_edges:
        raise EdgeListFormatError("edge list contains no usable edges")

    ids = sorted({u for u, _ in raw_edges} | {v for _, v in raw_edges})
    dense = {orig: k for k, orig in enumerate(ids)}
    relabeled = [(dense[u], dense[v]) for u, v in raw_edges]

    unique = set()
    for u, v in relabeled:
        key = (u, v) if directed else (min(u, v), max(u, v))
        unique.add(key)
    duplicates = len(relabeled) - len(unique)

    g = AttackGraph.from_edges(sorted(unique), n=len(ids), directed=directed)
    g.dropped_self_loops = self_loops
    g.collapsed_duplicates = duplicates
    g.node_ids = _as_readonly(np.asarray(ids, dtype=np.int64))
    return g


def write_edge_list(g: AttackGraph, stream: IO[str]) -> None:
    """Emit ``u v`` lines (dense ids); undirected edges are written once."""
    for u, v in g.edges():
        if not g.directed and u > v:
            continue
        stream.write(f"{u} {v}\n")


# -- in-neighbor segment kernels ---------------------------------------------


def row_products(indptr: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Per-row product of ``values`` over CSR segments; empty rows give 1."""
    n = len(indptr) - 1
    out = np.ones(n, dtype=np.float64)
    starts = indptr[:-1]
    nonempty = starts < indptr[1:]
    if values.size:
        # consecutive nonempty starts partition the value array exactly
        out[nonempty] = np.multiply.reduceat(values, starts[nonempty])
    return out


def row_sums(indptr: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Per-row sum of ``values`` over CSR segments; empty rows give 0."""
    n = len(indptr) - 1
    out = np.zeros(n, dtype=np.float64)
    starts = indptr[:-1]
    nonempty = starts < indptr[1:]
    if values.size:
        out[nonempty] = np.add.reduceat(values, starts[nonempty])
    return out


def _transpose_csr(n: int, indptr: np.ndarray, indices: np.ndarray):
    counts = np.bincount(indices, minlength=n)
    t_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=t_indptr[1:])
    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    order = np.argsort(indices, kind="stable")
    return t_indptr, rows[order]


# -- strongly connected components ---------------------------------------------


def _tarjan_scc(n: int, out_indptr: np.ndarray, out_indices: np.ndarray) -> list[np.ndarray]:
    """Strongly connected components, iterative Tarjan over successor CSR.

    Returned components are unordered here; ordering is applied separately.
    """
    UNVISITED = -1
    index = np.full(n, UNVISITED, dtype=np.int64)
    lowlink = np.zeros(n, dtype=np.int64)
    on_stack = np.zeros(n, dtype=bool)
    stack: list[int] = []
    components: list[np.ndarray] = []
    counter = 0

    for root in range(n):
        if index[root] != UNVISITED:
            continue
        # explicit call stack of (node, next successor offset)
        work = [(root, out_indptr[root])]
        index[root] = lowlink[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, ptr = work[-1]
            if ptr < out_indptr[v + 1]:
                work[-1] = (v, ptr + 1)
                w = out_indices[ptr]
                if index[w] == UNVISITED:
                    index[w] = lowlink[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, out_indptr[w]))
                elif on_stack[w]:
                    if index[w] < lowlink[v]:
                        lowlink[v] = index[w]
            else:
                work.pop()
                if work:
                    parent = work[-1][0]
                    if lowlink[v] < lowlink[parent]:
                        lowlink[parent] = lowlink[v]
                if lowlink[v] == index[v]:
                    comp = []
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp.append(w)
                        if w == v:
                            break
                    components.append(np.sort(np.asarray(comp, dtype=np.int64)))
    return components


@dataclass(frozen=True)
class FrobeniusDecomposition:
    """Strongly-connected-block partition in block upper-triangular order.

    ``blocks`` are ordered so that any edge from block ``k`` into block ``j``
    has ``j <= k`` (edges flow from later blocks to earlier ones).  The
    ordering is the reverse topological order of the condensation with ties
    broken by the smallest node id contained in a block.

    Attributes
    ----------
    blocks : tuple of ndarray
        Node sets ``V_1 .. V_p``, each sorted ascending.
    block_of : ndarray
        Block index (0-based) per node.
    is_trivial_sink : ndarray of bool
        Per block: a singleton with no internal edge.
    no_in_edges : ndarray of bool
        Per block: no edge enters the block from any later block (hence from
        anywhere outside it).
    """

    blocks: tuple[np.ndarray, ...]
    block_of: np.ndarray
    is_trivial_sink: np.ndarray
    no_in_edges: np.ndarray

    @property
    def p(self) -> int:
        return len(self.blocks)


def frobenius_decompose(g: AttackGraph) -> FrobeniusDecomposition:
    """Partition ``g`` into ordered strongly connected blocks.

    A strongly connected input yields a single block; an undirected graph
    decomposes into its connected components.
    """
    out_indptr, out_indices = g.out_csr()
    components = _tarjan_scc(g.n, out_indptr, out_indices)
    order = _order_components(g.n, g.indptr, g.indices, components)
    blocks = tuple(components[k] for k in order)

    block_of = np.zeros(g.n, dtype=np.int64)
    for j, block in enumerate(blocks):
        block_of[block] = j

    rows = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    src_blocks = block_of[g.indices]
    dst_blocks = block_of[rows]
    cross = src_blocks != dst_blocks
    has_in = np.zeros(len(blocks), dtype=bool)
    has_in[dst_blocks[cross]] = True

    trivial = np.fromiter((len(b) == 1 for b in blocks), dtype=bool, count=len(blocks))
    return FrobeniusDecomposition(
        blocks=blocks,
        block_of=_as_readonly(block_of),
        is_trivial_sink=_as_readonly(trivial),
        no_in_edges=_as_readonly(~has_in),
    )


def _order_components(
    n: int, indptr: np.ndarray, indices: np.ndarray, components: list[np.ndarray]
) -> list[int]:
    """Reverse topological order of the condensation, sinks first.

    ``indptr`` / ``indices`` are in-neighbor CSR arrays.  Ties (several
    blocks simultaneously emittable) go to the block containing the smallest
    node id, which makes the ordering deterministic.
    """
    p = len(components)
    comp_of = np.zeros(n, dtype=np.int64)
    for k, comp in enumerate(components):
        comp_of[comp] = k

    rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(indptr))
    src = comp_of[indices]
    dst = comp_of[rows]
    cond_edges = {(int(a), int(b)) for a, b in zip(src, dst) if a != b}

    out_degree = [0] * p
    preds: list[list[int]] = [[] for _ in range(p)]
    for a, b in cond_edges:  # condensation edge a -> b
        out_degree[a] += 1
        preds[b].append(a)

    min_id = [int(comp.min()) for comp in components]
    heap = [(min_id[k], k) for k in range(p) if out_degree[k] == 0]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        _, k = heapq.heappop(heap)
        order.append(k)
        for a in preds[k]:
            out_degree[a] -= 1
            if out_degree[a] == 0:
                heapq.heappush(heap, (min_id[a], a))
    assert len(order) == p, "condensation ordering failed to cover all blocks"
    return order
