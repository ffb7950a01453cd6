"""Undirected simple graphs: representation, scale-free generation, and I/O.

Randomness convention: every generator in this package draws from
``numpy.random.Generator(numpy.random.PCG64(seed))`` and uses only
``Generator.integers``, so a seed pins the produced graph bit-for-bit.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

from .errors import EdgeListParseError, ParameterError


@dataclass(frozen=True)
class Network:
    """Immutable undirected simple graph over nodes ``0..node_count-1``.

    ``adjacency[i]`` is the sorted tuple of neighbors of node ``i``;
    symmetry, absence of self-loops, and absence of duplicates are enforced
    at construction.
    """

    node_count: int
    adjacency: tuple[tuple[int, ...], ...]
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        n = self.node_count
        if n < 1:
            raise ParameterError(f"node_count must be positive; got {n}")
        if len(self.adjacency) != n:
            raise ParameterError("adjacency length must equal node_count")
        seen = set()
        for i, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise ParameterError(f"neighbor list of {i} is not sorted/unique")
            for j in nbrs:
                if j == i:
                    raise ParameterError(f"self-loop at node {i}")
                if not 0 <= j < n:
                    raise ParameterError(f"neighbor {j} of node {i} out of range")
                seen.add((min(i, j), max(i, j)))
        for u, v in seen:
            if u not in self.adjacency[v] or v not in self.adjacency[u]:
                raise ParameterError(f"edge {u}-{v} is not symmetric")

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[tuple[int, int]],
                   meta: dict | None = None) -> "Network":
        adj: list[set[int]] = [set() for _ in range(node_count)]
        for u, v in edges:
            if u == v:
                raise ParameterError(f"self-loop at node {u}")
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise ParameterError(f"edge {u}-{v} out of range")
            adj[u].add(v)
            adj[v].add(u)
        return cls(node_count, tuple(tuple(sorted(s)) for s in adj),
                   meta or {})

    def neighbors(self, i: int) -> tuple[int, ...]:
        return self.adjacency[i]

    def degree(self, i: int) -> int:
        return len(self.adjacency[i])

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(nbrs) for nbrs in self.adjacency)

    @property
    def edge_count(self) -> int:
        return sum(len(nbrs) for nbrs in self.adjacency) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield each edge once as (u, v) with u < v, lexicographically."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    @cached_property
    def _connected(self) -> bool:
        n = self.node_count
        seen = bytearray(n)
        seen[0] = 1
        queue = deque([0])
        count = 1
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if not seen[v]:
                    seen[v] = 1
                    count += 1
                    queue.append(v)
        return count == n

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """(indptr, indices) arrays for vectorized traversal."""
        degs = np.fromiter((len(a) for a in self.adjacency), dtype=np.int64,
                           count=self.node_count)
        indptr = np.zeros(self.node_count + 1, dtype=np.int64)
        np.cumsum(degs, out=indptr[1:])
        flat = [j for nbrs in self.adjacency for j in nbrs]
        indices = np.asarray(flat, dtype=np.int64)
        return indptr, indices


def generate_ba(n: int, m: int, seed: int) -> Network:
    """Grow a scale-free network by preferential attachment.

    The seed component is a complete graph on nodes ``0..m-1``; every later
    node attaches to ``m`` distinct existing nodes, each chosen with
    probability proportional to current degree (repeated uniform draws from
    a degree-weighted endpoint list, rejecting duplicates).  Identical
    ``(n, m, seed)`` always produce the identical edge set.
    """
    if m < 1:
        raise ParameterError(f"m must be at least 1; got {m}")
    if m >= n:
        raise ParameterError(f"m must be smaller than n; got m={m}, n={n}")
    rng = np.random.Generator(np.random.PCG64(seed))

    edges: list[tuple[int, int]] = [(i, j) for i in range(m) for j in range(i + 1, m)]
    # Endpoint list: node id repeated once per unit of degree.
    repeated: list[int] = [i for i in range(m) for _ in range(m - 1)]
    for v in range(m, n):
        if v == m:
            # Only m nodes exist, so the m distinct targets are forced.
            targets = list(range(m))
        else:
            chosen: set[int] = set()
            while len(chosen) < m:
                pick = repeated[int(rng.integers(0, len(repeated)))]
                chosen.add(pick)
            targets = sorted(chosen)
        for t in targets:
            edges.append((t, v))
        repeated.extend(targets)
        repeated.extend([v] * m)

    meta = {
        "generator": "preferential-attachment",
        "n": n,
        "m": m,
        "seed": seed,
        "core": "complete-graph-on-m-nodes",
        "rng": "numpy-pcg64",
    }
    return Network.from_edges(n, edges, meta)


def is_connected(net: Network) -> bool:
    """True iff every pair of nodes is joined by a path."""
    return net._connected


def load_edge_list(text: str) -> Network:
    """Parse an edge-list document into a Network.

    Lines hold whitespace-separated ``u v`` integer pairs; blank lines and
    ``#`` comments are ignored.  Nodes are ``0..max_index``; duplicate edges
    collapse; self-loops, negative indices, and non-integer tokens raise
    :class:`EdgeListParseError` with the 1-based line number.
    """
    edges: set[tuple[int, int]] = set()
    max_index = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise EdgeListParseError(
                f"expected two tokens, got {len(tokens)}: {raw!r}", lineno)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise EdgeListParseError(f"non-integer token in {raw!r}", lineno)
        if u < 0 or v < 0:
            raise EdgeListParseError(f"negative node index in {raw!r}", lineno)
        if u == v:
            raise EdgeListParseError(f"self-loop {u}-{v}", lineno)
        edges.add((min(u, v), max(u, v)))
        max_index = max(max_index, u, v)
    if max_index < 0:
        raise EdgeListParseError("document contains no edges", 1)
    return Network.from_edges(max_index + 1, edges)


def dump_edge_list(net: Network, header: bool = False) -> str:
    """Canonical edge-list text: one ``u v`` per line, u < v, sorted.

    With ``header=True``, generator metadata is emitted as ``#`` comments,
    which :func:`load_edge_list` ignores on the way back in.
    """
    lines = []
    if header and net.meta:
        for key in sorted(net.meta):
            lines.append(f"# {key}: {net.meta[key]}")
    lines.extend(f"{u} {v}" for u, v in net.edges())
    return "\n".join(lines) + "\n"
