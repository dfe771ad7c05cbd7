"""Immutable undirected simple graph with dense internal ids.

Node ids are re-mapped to 0..n-1 on construction (first-seen order); the
original labels are kept so files round-trip. Edges are stored as (u, v)
tuples with u < v in internal ids.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .util import log


@dataclass(frozen=True)
class Graph:
    n: int
    edges: frozenset[tuple[int, int]]
    adj: tuple[tuple[int, ...], ...]
    labels: tuple[int, ...]  # internal id -> original label

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, a: int) -> int:
        return len(self.adj[self._check(a)])

    def _check(self, a: int) -> int:
        if not 0 <= a < self.n:
            raise ValueError(f"node id {a} out of range for graph with n={self.n}")
        return a

    def label_index(self) -> dict[int, int]:
        """Original label -> internal id."""
        return {lab: i for i, lab in enumerate(self.labels)}

    def edge_labels(self) -> set[tuple[int, int]]:
        """Edge set over original labels, each pair sorted ascending."""
        out = set()
        for u, v in self.edges:
            lu, lv = self.labels[u], self.labels[v]
            out.add((lu, lv) if lu < lv else (lv, lu))
        return out


def build_graph(n: int, edge_pairs, labels=None) -> Graph:
    """Construct a Graph from internal-id pairs, dropping self-loops/duplicates."""
    if labels is None:
        labels = tuple(range(n))
    else:
        labels = tuple(labels)
        if len(labels) != n:
            raise ValueError("labels length must equal n")
    edges = set()
    for u, v in edge_pairs:
        if u == v:
            continue
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) references node outside 0..{n - 1}")
        edges.add((u, v) if u < v else (v, u))
    neigh: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        neigh[u].append(v)
        neigh[v].append(u)
    adj = tuple(tuple(sorted(ns)) for ns in neigh)
    return Graph(n=n, edges=frozenset(edges), adj=adj, labels=labels)


def load_edge_list(path: str | os.PathLike) -> Graph:
    """Read a SNAP-style edge list: one 'u v' pair per line, '#' comments ignored.

    Original ids are compacted to 0..n-1 in first-seen order. Self-loops and
    duplicate edges are dropped (counts reported at info level). Malformed
    lines raise with their line number.
    """
    label_to_id: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    self_loops = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) != 2:
                raise ValueError(f"{path}:{lineno}: expected two tokens, got {len(tokens)}")
            try:
                lu, lv = int(tokens[0]), int(tokens[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer node id") from exc
            if lu == lv:
                self_loops += 1
                continue
            for lab in (lu, lv):
                if lab not in label_to_id:
                    label_to_id[lab] = len(label_to_id)
            pairs.append((label_to_id[lu], label_to_id[lv]))
    n = len(label_to_id)
    labels = tuple(label_to_id)  # dict preserves first-seen order
    dedup = set((u, v) if u < v else (v, u) for u, v in pairs)
    dropped_dupes = len(pairs) - len(dedup)
    if self_loops or dropped_dupes:
        log.info("%s: dropped %d self-loops and %d duplicate edges", path, self_loops, dropped_dupes)
    return build_graph(n, dedup, labels)


def write_edge_list(g: Graph, path: str | os.PathLike, header_lines=()) -> None:
    """Write 'u v' rows with u < v in original labels, sorted; '#' header first."""
    rows = sorted(g.edge_labels())
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for u, v in rows:
            fh.write(f"{u} {v}\n")


def neighbors(g: Graph, a: int) -> set[int]:
    """Adjacency of node a as a set; never contains a itself."""
    return set(g.adj[g._check(a)])


def k_hop_frontier(g: Graph, a: int, k: int) -> set[int]:
    """Nodes at shortest-path distance exactly k from a, for k in {1, 2}."""
    g._check(a)
    if k == 1:
        return set(g.adj[a])
    if k != 2:
        raise ValueError(f"unsupported hop count {k}; expected 1 or 2")
    one_hop = set(g.adj[a])
    frontier: set[int] = set()
    for b in one_hop:
        frontier.update(g.adj[b])
    frontier -= one_hop
    frontier.discard(a)
    return frontier
