"""Per-node structural features: degree, binned degree histograms of the
1-hop neighborhood and the 2-hop frontier, and the entropy-based diversity
score that ranks how distinctive each node's neighborhood looks.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .graph import Graph, k_hop_frontier

DS_DRIFT_TOL = 1e-12


@dataclass(frozen=True)
class BinningScheme:
    """Logarithmic degree buckets shared by the 1-hop and 2-hop histograms.

    Bucket 0 covers degrees {0, 1}; bucket i >= 1 covers [2^i, 2^(i+1));
    the last bucket is open-ended. Fixed bucket count keeps every node's
    feature vector the same dimension across graphs, which the cosine
    ranking requires.
    """

    b: int = 16

    def __post_init__(self):
        if self.b < 2:
            raise ValueError("bucket count must be >= 2")

    @property
    def boundaries(self) -> np.ndarray:
        """Upper-exclusive thresholds between consecutive buckets (strictly increasing)."""
        return 2 ** np.arange(1, self.b, dtype=np.int64)

    def bucket_of(self, degrees) -> np.ndarray:
        """Map degree(s) to bucket indices in 0..b-1."""
        return np.searchsorted(self.boundaries, np.asarray(degrees, dtype=np.int64), side="right")

    @property
    def dim(self) -> int:
        """Dimension of the concatenated feature vector [degree | nk1 | nk2]."""
        return 1 + 2 * self.b


@dataclass(frozen=True)
class NKFeature:
    nk0: int
    nk1: np.ndarray
    nk2: np.ndarray
    raw: np.ndarray
    ds: float


def diversity_score(raw) -> float:
    """Normalized Shannon entropy of a non-negative feature vector.

    The vector is normalized onto the probability simplex (p = raw / sum)
    and scored as -sum(p log p) / log(dim), so a uniform vector scores 1,
    a one-hot vector 0, and the zero vector 0 by convention. Invariant to
    positive scaling of the input.
    """
    v = np.asarray(raw, dtype=np.float64)
    if v.ndim != 1 or v.size < 2:
        raise ValueError("feature vector must be 1-D with dimension >= 2")
    total = v.sum()
    if total <= 0.0:
        return 0.0
    p = v / total
    nz = p[p > 0.0]
    score = float(-(nz * np.log(nz)).sum() / np.log(v.size))
    # clamp only floating-point drift, never a real out-of-range value
    if -DS_DRIFT_TOL <= score < 0.0:
        score = 0.0
    elif 1.0 < score <= 1.0 + DS_DRIFT_TOL:
        score = 1.0
    return score


def extract_features(g: Graph, scheme: BinningScheme) -> list[NKFeature]:
    """Compute the structural feature vector for every node of g.

    For node a: nk0 is its degree, nk1 the bucketed degree histogram of its
    neighbors, nk2 the bucketed degree histogram of its distance-2 frontier.
    Results are a pure function of the graph, independent of node order.
    """
    degrees = np.array([len(ns) for ns in g.adj], dtype=np.int64)
    buckets = scheme.bucket_of(degrees) if g.n else np.zeros(0, dtype=np.int64)
    out: list[NKFeature] = []
    for a in range(g.n):
        nk1 = np.bincount(buckets[list(g.adj[a])], minlength=scheme.b).astype(np.float64)
        frontier = k_hop_frontier(g, a, 2)
        nk2 = np.bincount(buckets[list(frontier)], minlength=scheme.b).astype(np.float64)
        raw = np.concatenate(([float(degrees[a])], nk1, nk2))
        out.append(NKFeature(nk0=int(degrees[a]), nk1=nk1, nk2=nk2, raw=raw, ds=diversity_score(raw)))
    return out


def feature_matrix(feats: list[NKFeature]) -> np.ndarray:
    """Stack raw vectors into an (n, dim) array."""
    if not feats:
        return np.zeros((0, 0))
    return np.stack([f.raw for f in feats])


def ds_vector(feats: list[NKFeature]) -> np.ndarray:
    return np.array([f.ds for f in feats], dtype=np.float64)


def write_features_csv(g: Graph, feats: list[NKFeature], scheme: BinningScheme,
                       path: str | os.PathLike, header_lines=()) -> None:
    """Dump one row per node keyed by original label."""
    cols = ["node", "nk0"]
    cols += [f"nk1_{i}" for i in range(scheme.b)]
    cols += [f"nk2_{i}" for i in range(scheme.b)]
    cols.append("ds")
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(cols) + "\n")
        for a, f in enumerate(feats):
            row = [str(g.labels[a]), str(f.nk0)]
            row += [str(int(c)) for c in f.nk1]
            row += [str(int(c)) for c in f.nk2]
            row.append(f"{f.ds:.12g}")
            fh.write(",".join(row) + "\n")
