"""Per-iteration candidate construction: popularity and structure scores,
group selection, cosine similarity, and the variance-based row transform
that stretches similarity gaps before re-ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Graph

VAR_FLOOR = 1e-9


@dataclass
class MatchState:
    """One-to-one set of accepted (anon, aux) node pairs, plus the iteration count."""

    anon_to_aux: dict[int, int] = field(default_factory=dict)
    aux_to_anon: dict[int, int] = field(default_factory=dict)
    iteration: int = 0

    @classmethod
    def from_pairs(cls, pairs) -> "MatchState":
        state = cls()
        state.add(pairs)
        return state

    def add(self, pairs) -> None:
        for a, b in pairs:
            if a in self.anon_to_aux or b in self.aux_to_anon:
                raise ValueError(f"pair ({a}, {b}) reuses an already-matched node")
            self.anon_to_aux[a] = b
            self.aux_to_anon[b] = a

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return list(self.anon_to_aux.items())

    def side_nodes(self, side: str) -> set[int]:
        if side == "anon":
            return set(self.anon_to_aux)
        if side == "aux":
            return set(self.aux_to_anon)
        raise ValueError(f"side must be 'anon' or 'aux', got {side!r}")


@dataclass
class CandidatePair:
    """A scored (anon, aux) pairing as it flows through ranking and re-ranking."""

    a: int
    b: int
    sim: float
    s: float
    conf: float | None = None
    s_hat: float | None = None


def popularity_score(g: Graph, a: int, state: MatchState, side: str) -> float:
    """Jaccard similarity between N(a) and the matched nodes on this side."""
    matched = state.side_nodes(side)
    neigh = set(g.adj[g._check(a)])
    union = len(matched | neigh)
    if union == 0:
        return 0.0
    return len(matched & neigh) / union


def popularity_vector(g: Graph, state: MatchState, side: str) -> np.ndarray:
    matched = state.side_nodes(side)
    out = np.zeros(g.n)
    if not matched:
        return out
    k = len(matched)
    for a in range(g.n):
        neigh = g.adj[a]
        inter = sum(1 for b in neigh if b in matched)
        union = k + len(neigh) - inter
        if union:
            out[a] = inter / union
    return out


def structure_score(ds: float, ps: float, c: float) -> float:
    """Combined node score: diversity plus c-weighted popularity."""
    return ds + c * ps


def select_groups(anon_scores, aux_scores, state: MatchState, n_group: int):
    """Pick the n_group highest-scoring unmatched nodes on each side.

    Ties break by ascending node id; fewer nodes are returned when fewer
    remain unmatched. With an empty matched set the scores reduce to the
    diversity score alone, which is exactly the first-round rule.
    """
    if n_group < 1:
        raise ValueError("n_group must be >= 1")

    def top(scores, matched: set[int]) -> list[int]:
        scores = np.asarray(scores, dtype=np.float64)
        candidates = [a for a in range(scores.size) if a not in matched]
        candidates.sort(key=lambda a: (-scores[a], a))
        return candidates[:n_group]

    return top(anon_scores, state.side_nodes("anon")), top(aux_scores, state.side_nodes("aux"))


def cosine_similarity(va, vb) -> float:
    """Cosine of two equal-dimension non-negative vectors; 0 if either is zero."""
    va = np.asarray(va, dtype=np.float64)
    vb = np.asarray(vb, dtype=np.float64)
    if va.shape != vb.shape:
        raise ValueError(f"dimension mismatch: {va.shape} vs {vb.shape}")
    na = np.linalg.norm(va)
    nb = np.linalg.norm(vb)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.clip(float(va @ vb) / (na * nb), 0.0, 1.0))


def cosine_matrix(va: np.ndarray, vb: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarities, rows of va against rows of vb."""
    if va.shape[1] != vb.shape[1]:
        raise ValueError("feature dimensions differ between the two sides")
    norm_a = np.linalg.norm(va, axis=1, keepdims=True)
    norm_b = np.linalg.norm(vb, axis=1, keepdims=True)
    safe_a = np.where(norm_a > 0.0, norm_a, 1.0)
    safe_b = np.where(norm_b > 0.0, norm_b, 1.0)
    sim = (va / safe_a) @ (vb / safe_b).T
    sim[norm_a[:, 0] == 0.0, :] = 0.0
    sim[:, norm_b[:, 0] == 0.0] = 0.0
    return np.clip(sim, 0.0, 1.0)


def transform_similarity(row) -> np.ndarray:
    """Stretch a row of similarities: S = max - (max - sim) / var(row).

    An affine increasing map for var >= VAR_FLOOR (so the row's ordering is
    preserved exactly); near-constant rows pass through unchanged since they
    carry no ranking signal. Population variance; results may be negative.
    """
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1 or row.size < 2:
        raise ValueError("similarity row must be 1-D with length >= 2")
    var = float(np.var(row))
    if var < VAR_FLOOR:
        return row.copy()
    mx = float(row.max())
    return mx - (mx - row) / var


def transform_rows(sim: np.ndarray) -> np.ndarray:
    """Apply transform_similarity to each row of a similarity matrix."""
    if sim.shape[1] < 2:
        return sim.copy()
    var = sim.var(axis=1)
    mx = sim.max(axis=1, keepdims=True)
    out = np.where(
        (var >= VAR_FLOOR)[:, None],
        mx - (mx - sim) / np.where(var >= VAR_FLOOR, var, 1.0)[:, None],
        sim,
    )
    return out
