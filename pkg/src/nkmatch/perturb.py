"""Experiment input generation: noise-perturbed graph copies, partially
overlapping graph pairs, and synthetic base graphs (ER / BA / WS).

All randomness is drawn from numpy's PCG64 via an explicit integer seed, so
every output is bit-reproducible across runs and platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph, build_graph


@dataclass(frozen=True)
class NoiseSpec:
    """Edge-rewiring noise: delete r = round(noise * M) edges, insert r new ones."""

    noise: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError(f"noise must be in [0, 1], got {self.noise}")


@dataclass(frozen=True)
class OverlapSpec:
    """Fraction of nodes shared between the two sampled subgraphs."""

    overlap: float
    seed: int

    def __post_init__(self):
        if not 0.0 < self.overlap <= 1.0:
            raise ValueError(f"overlap must be in (0, 1], got {self.overlap}")


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def perturb(g: Graph, spec: NoiseSpec) -> Graph:
    """Delete r random edges, then insert r random absent pairs.

    r = round(noise * M). Insertions never recreate an edge deleted by this
    call, so the candidate pool is exactly the non-edges of the input graph;
    node set and edge count are unchanged. Errors out when the graph has
    fewer than r non-edges to insert into.
    """
    r = _round_half_up(spec.noise * g.m)
    if r == 0:
        return g
    total_pairs = g.n * (g.n - 1) // 2
    free = total_pairs - g.m
    if free < r:
        raise ValueError(
            f"cannot insert {r} edges: only {free} non-edges available (no re-insertion of deleted edges)"
        )
    rng = np.random.default_rng(spec.seed)
    ordered = sorted(g.edges)
    delete_idx = rng.choice(g.m, size=r, replace=False)
    deleted = {ordered[i] for i in delete_idx}
    kept = set(g.edges) - deleted

    # uniform sample of r distinct non-edges of the original graph
    inserted: set[tuple[int, int]] = set()
    if free <= 4 * r or g.n <= 64:
        non_edges = [
            (u, v)
            for u in range(g.n)
            for v in range(u + 1, g.n)
            if (u, v) not in g.edges
        ]
        pick = rng.choice(len(non_edges), size=r, replace=False)
        inserted = {non_edges[i] for i in pick}
    else:
        while len(inserted) < r:
            u = int(rng.integers(g.n))
            v = int(rng.integers(g.n))
            if u == v:
                continue
            e = (u, v) if u < v else (v, u)
            if e in g.edges or e in inserted:
                continue
            inserted.add(e)
    return build_graph(g.n, kept | inserted, g.labels)


def generate_overlapping_pair(g: Graph, spec: OverlapSpec) -> tuple[Graph, Graph, dict[int, int]]:
    """Sample two induced subgraphs sharing round(overlap * n) nodes.

    The shared set is drawn uniformly; the remaining nodes are split evenly
    (first half private to the first graph). Returns both subgraphs plus the
    identity ground-truth mapping over the shared original labels.
    """
    if g.n < 2:
        raise ValueError("need at least 2 nodes to build an overlapping pair")
    rng = np.random.default_rng(spec.seed)
    k = _round_half_up(spec.overlap * g.n)
    k = max(1, min(k, g.n))
    perm = rng.permutation(g.n)
    shared = sorted(int(x) for x in perm[:k])
    rest = [int(x) for x in perm[k:]]
    half = (len(rest) + 1) // 2
    p1 = rest[:half]
    p2 = rest[half:]
    ga = _induced(g, sorted(shared + p1))
    gu = _induced(g, sorted(shared + p2))
    truth = {g.labels[a]: g.labels[a] for a in shared}
    return ga, gu, truth


def _induced(g: Graph, nodes: list[int]) -> Graph:
    index = {old: new for new, old in enumerate(nodes)}
    edges = [
        (index[u], index[v])
        for u, v in g.edges
        if u in index and v in index
    ]
    labels = [g.labels[a] for a in nodes]
    return build_graph(len(nodes), edges, labels)


def er_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """Erdős–Rényi G(n, p); pairs examined in upper-triangle row-major order."""
    if n < 0 or not 0.0 <= p <= 1.0:
        raise ValueError("ER needs n >= 0 and p in [0, 1]")
    edges = []
    if n >= 2 and p > 0.0:
        iu, iv = np.triu_indices(n, k=1)
        mask = rng.random(iu.size) < p
        edges = list(zip(iu[mask].tolist(), iv[mask].tolist()))
    return build_graph(n, edges)


def ba_graph(n: int, m: int, rng: np.random.Generator) -> Graph:
    """Barabási–Albert preferential attachment.

    Starts from a clique on the first m nodes, then attaches each new node
    to m distinct existing nodes sampled proportionally to degree; gives
    exactly (n - m) * m + m * (m - 1) / 2 edges.
    """
    if m < 1 or n <= m:
        raise ValueError("BA needs 1 <= m < n")
    edges = [(u, v) for u in range(m) for v in range(u + 1, m)]
    # endpoint list realizes degree-proportional sampling
    stubs: list[int] = [u for e in edges for u in e]
    if not stubs:  # m == 1: seed node has degree 0, attach uniformly at first
        stubs = [0]
    for a in range(m, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(stubs[int(rng.integers(len(stubs)))])
        for b in targets:
            edges.append((b, a))
            stubs.extend((a, b))
    return build_graph(n, edges)


def ws_graph(n: int, k: int, p: float, rng: np.random.Generator) -> Graph:
    """Watts–Strogatz ring lattice (k nearest neighbors) with rewiring probability p."""
    if k < 2 or k % 2 != 0 or k >= n:
        raise ValueError("WS needs even k with 2 <= k < n")
    if not 0.0 <= p <= 1.0:
        raise ValueError("rewiring probability must be in [0, 1]")
    edges = set()
    for a in range(n):
        for off in range(1, k // 2 + 1):
            b = (a + off) % n
            edges.add((a, b) if a < b else (b, a))
    rewired = set(edges)
    for a, b in sorted(edges):
        if rng.random() >= p:
            continue
        # rewire the far endpoint, keeping the graph simple
        for _ in range(8 * n):
            c = int(rng.integers(n))
            e = (a, c) if a < c else (c, a)
            if c != a and e not in rewired:
                rewired.discard((a, b))
                rewired.add(e)
                break
    return build_graph(n, rewired)


def generate_synthetic(kind: str, params: dict, seed: int) -> Graph:
    """Build a named synthetic graph; deterministic given seed.

    kinds: "er" (n, p), "ba" (n, m), "ws" (n, k, p).
    """
    rng = np.random.default_rng(seed)
    kind = kind.lower()
    if kind in ("er", "erdos-renyi"):
        return er_graph(int(params["n"]), float(params["p"]), rng)
    if kind in ("ba", "barabasi-albert"):
        return ba_graph(int(params["n"]), int(params["m"]), rng)
    if kind in ("ws", "watts-strogatz"):
        return ws_graph(int(params["n"]), int(params["k"]), float(params["p"]), rng)
    raise ValueError(f"unknown synthetic model {kind!r}")


def write_truth_tsv(truth: dict[int, int], path, header_lines=()) -> None:
    """Ground-truth mapping as anon_label<TAB>aux_label rows."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for a in sorted(truth):
            fh.write(f"{a}\t{truth[a]}\n")


def load_truth_tsv(path) -> dict[int, int]:
    truth: dict[int, int] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            tokens = line.split()
            if len(tokens) < 2:
                raise ValueError(f"{path}:{lineno}: expected two labels")
            truth[int(tokens[0])] = int(tokens[1])
    return truth
