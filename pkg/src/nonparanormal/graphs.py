"""Undirected graphs on vertices ``0..p-1``."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GraphSpec:
    """Vertex count plus a set of unordered edges stored as ``(j, k)``, ``j < k``."""

    p: int
    edges: frozenset = frozenset()

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("a graph needs at least one vertex")
        normalized = set()
        for j, k in self.edges:
            j, k = int(j), int(k)
            if j == k:
                raise ValueError(f"self-loop at vertex {j}")
            if not (0 <= j < self.p and 0 <= k < self.p):
                raise ValueError(f"edge ({j}, {k}) out of range for p={self.p}")
            normalized.add((min(j, k), max(j, k)))
        object.__setattr__(self, "edges", frozenset(normalized))

    def __len__(self):
        return len(self.edges)

    @property
    def max_edges(self):
        return self.p * (self.p - 1) // 2

    def degrees(self):
        deg = np.zeros(self.p, dtype=int)
        for j, k in self.edges:
            deg[j] += 1
            deg[k] += 1
        return deg

    def adjacency(self):
        adj = np.zeros((self.p, self.p), dtype=bool)
        for j, k in self.edges:
            adj[j, k] = adj[k, j] = True
        return adj

    def sorted_edges(self):
        return sorted(self.edges)

    def relabel(self, perm):
        """Graph with vertex ``v`` renamed ``perm[v]``."""
        return GraphSpec(self.p, frozenset((perm[j], perm[k]) for j, k in self.edges))

    @classmethod
    def from_adjacency(cls, adj):
        adj = np.asarray(adj)
        rows, cols = np.nonzero(np.triu(adj, 1))
        return cls(adj.shape[0], frozenset(zip(rows.tolist(), cols.tolist())))
