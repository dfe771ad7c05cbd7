"""Pseudo-relevance-feedback re-ranking with a soft-margin linear SVM.

Each round self-labels the extremes of the current ranking, trains a hinge
classifier on pair features, converts hyperplane distance to a confidence
in [0, 1], and fuses it with the transformed similarity; rounds repeat
until the positive/negative split stabilizes.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .matching import CandidatePair

CONF_DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class SvmHyper:
    """Regularization strength, epoch cap, and seed echo for reproducibility."""

    lam: float = 1e-3
    epochs: int = 400
    seed: int = 0

    def __post_init__(self):
        if self.lam <= 0.0 or self.epochs < 1:
            raise ValueError("need lam > 0 and epochs >= 1")


@dataclass
class SvmModel:
    w: np.ndarray
    bias: float
    hyper: SvmHyper

    def decision(self, x: np.ndarray) -> np.ndarray:
        return x @ self.w + self.bias


def simplex_normalize(raw: np.ndarray) -> np.ndarray:
    """Rows scaled to sum 1; all-zero rows stay zero."""
    totals = raw.sum(axis=1, keepdims=True)
    return raw / np.where(totals > 0.0, totals, 1.0)


@dataclass
class PairSet:
    """All candidate (anon, aux) pairings of one group pair, column-wise.

    Pair features are materialized lazily in blocks: the per-pair vector is
    [ |normalized nK difference| , cosine similarity , |diversity gap| ],
    dimension nK-dim + 2.
    """

    pa_norm: np.ndarray  # (na, dim) simplex-normalized anon features
    pb_norm: np.ndarray  # (nu, dim)
    ds_a: np.ndarray
    ds_b: np.ndarray
    a_nodes: np.ndarray  # graph node ids per group position
    b_nodes: np.ndarray
    a_pos: np.ndarray  # (npairs,) positions into the group arrays
    b_pos: np.ndarray
    sim: np.ndarray  # (npairs,)
    s: np.ndarray  # (npairs,) transformed similarity

    @classmethod
    def from_product(cls, pa_norm, ds_a, a_nodes, pb_norm, ds_b, b_nodes,
                     sim_matrix, s_matrix) -> "PairSet":
        na, nu = sim_matrix.shape
        a_pos = np.repeat(np.arange(na, dtype=np.int32), nu)
        b_pos = np.tile(np.arange(nu, dtype=np.int32), na)
        return cls(
            pa_norm=pa_norm, pb_norm=pb_norm,
            ds_a=np.asarray(ds_a, dtype=np.float64), ds_b=np.asarray(ds_b, dtype=np.float64),
            a_nodes=np.asarray(a_nodes, dtype=np.int64), b_nodes=np.asarray(b_nodes, dtype=np.int64),
            a_pos=a_pos, b_pos=b_pos,
            sim=sim_matrix.reshape(-1).astype(np.float64),
            s=s_matrix.reshape(-1).astype(np.float64),
        )

    def __len__(self) -> int:
        return self.sim.size

    @property
    def feature_dim(self) -> int:
        return self.pa_norm.shape[1] + 2

    def pair_nodes(self):
        """(anon node ids, aux node ids), one entry per pair."""
        return self.a_nodes[self.a_pos], self.b_nodes[self.b_pos]

    def candidate(self, idx: int, conf=None, s_hat=None) -> CandidatePair:
        """Record view of one pair, for inspection and reporting."""
        return CandidatePair(
            a=int(self.a_nodes[self.a_pos[idx]]),
            b=int(self.b_nodes[self.b_pos[idx]]),
            sim=float(self.sim[idx]),
            s=float(self.s[idx]),
            conf=None if conf is None else float(conf[idx]),
            s_hat=None if s_hat is None else float(s_hat[idx]),
        )

    def features(self, idx) -> np.ndarray:
        ia = self.a_pos[idx]
        ib = self.b_pos[idx]
        diff = np.abs(self.pa_norm[ia] - self.pb_norm[ib])
        dsgap = np.abs(self.ds_a[ia] - self.ds_b[ib])
        return np.concatenate([diff, self.sim[idx, None], dsgap[:, None]], axis=1)

    def decision_values(self, model: SvmModel, block: int = 1 << 16) -> np.ndarray:
        """Hyperplane decision value for every pair, computed block-wise."""
        n = len(self)
        out = np.empty(n)
        for start in range(0, n, block):
            sel = np.arange(start, min(start + block, n))
            out[sel] = model.decision(self.features(sel))
        return out


def primal_objective(w: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray, lam: float) -> float:
    """(lam/2) ||w||^2 + mean hinge loss."""
    margins = y * (x @ w + bias)
    return 0.5 * lam * float(w @ w) + float(np.maximum(0.0, 1.0 - margins).mean())


def train_svm(x: np.ndarray, y: np.ndarray, hyper: SvmHyper = SvmHyper()) -> SvmModel:
    """Fit a soft-margin linear classifier by deterministic subgradient descent.

    Minimizes (lam/2)||w||^2 + mean hinge loss over the full batch, with a
    backtracking step size (halve on non-decrease, grow gently on success)
    and a plateau stop, capped at hyper.epochs descent steps. The bias is
    unregularized. Fully deterministic: no randomness enters the solver, and
    duplicating every sample leaves the trajectory unchanged because every
    update uses dataset means.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.shape[0]:
        raise ValueError("x must be (n, d) with one label per row")
    if np.isnan(x).any() or np.isnan(y).any():
        raise ValueError("NaN in training data")
    classes = np.unique(y)
    if not np.array_equal(classes, [-1.0, 1.0]):
        raise ValueError(f"need both classes labeled -1/+1, got {classes.tolist()}")

    n, d = x.shape
    w = np.zeros(d)
    bias = 0.0
    eta = 1.0
    f = primal_objective(w, bias, x, y, hyper.lam)
    for _ in range(hyper.epochs):
        margins = y * (x @ w + bias)
        viol = margins < 1.0
        if viol.any():
            gw = hyper.lam * w - (y[viol, None] * x[viol]).sum(axis=0) / n
            gb = -float(y[viol].sum()) / n
        else:
            gw = hyper.lam * w
            gb = 0.0
        accepted = False
        while eta >= 1e-14:
            w2 = w - eta * gw
            b2 = bias - eta * gb
            f2 = primal_objective(w2, b2, x, y, hyper.lam)
            if f2 < f:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break  # no descent along the subgradient at any step size
        converged = (f - f2) < 1e-10 * max(abs(f2), 1e-12)
        w, bias, f = w2, b2, f2
        eta = min(eta * 1.2, 1e9)
        if converged:
            break
    return SvmModel(w=w, bias=bias, hyper=hyper)


def build_training_set(pairs: PairSet, n_train: int, rank_scores=None):
    """Self-label the ranking extremes: top n_train -> +1, bottom n_train -> -1.

    Ranking uses rank_scores (the transformed similarity by default), ties
    broken by (anon id, aux id). When 2 * n_train exceeds the pair count the
    take shrinks to floor(count / 2) per side so the halves never overlap.
    """
    count = len(pairs)
    if count < 2:
        raise ValueError("need at least 2 pairs to build a training set")
    scores = pairs.s if rank_scores is None else np.asarray(rank_scores, dtype=np.float64)
    an, bn = pairs.pair_nodes()
    order = np.lexsort((bn, an, -scores))
    k = n_train if 2 * n_train <= count else count // 2
    top = order[:k]
    bottom = order[-k:]
    x = np.concatenate([pairs.features(top), pairs.features(bottom)])
    y = np.concatenate([np.ones(k), -np.ones(k)])
    return x, y


def confidence_from_decisions(dis: np.ndarray) -> np.ndarray:
    """Linearly normalize |decision| over the scored set into [0, 1].

    A degenerate spread (all |decision| equal) maps to confidence 1 for
    every pair, which is neutral under the score fusion.
    """
    if dis.size == 0:
        raise ValueError("empty pair set")
    mag = np.abs(dis)
    lo = mag.min()
    span = mag.max() - lo
    if span < CONF_DEGENERATE_TOL:
        return np.ones_like(mag)
    return (mag - lo) / span


def confidence(model: SvmModel, pairs: PairSet) -> np.ndarray:
    return confidence_from_decisions(pairs.decision_values(model))


def rerank(pairs: PairSet, conf: np.ndarray, alpha: float):
    """Fuse scores as s_hat = s * conf**alpha and sort descending.

    alpha = 0 disables re-ranking (s_hat == s, 0**0 := 1). Returns the
    fused scores and the pair ordering (ties by anon id, then aux id).
    """
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    s_hat = pairs.s * conf ** alpha
    an, bn = pairs.pair_nodes()
    order = np.lexsort((bn, an, -s_hat))
    return s_hat, order


@dataclass
class PrfResult:
    order: np.ndarray  # pair indices, best first
    positive: np.ndarray  # classifier label per pair
    s_hat: np.ndarray
    conf: np.ndarray
    model: SvmModel
    rounds: int


def prf_loop(pairs: PairSet, n_train: int, alpha: float, max_rounds: int = 10,
             delta: float = 0.01, hyper: SvmHyper = SvmHyper()) -> PrfResult:
    """Iterate label -> train -> score -> re-rank until the split stabilizes.

    Training-set selection ranks by the transformed similarity on the first
    round and by the fused score thereafter; the fusion itself always uses
    the original transformed similarity so confidence never compounds.
    Stops once the positively-classified set changes by a fraction below
    delta, or after max_rounds.
    """
    if len(pairs) < 2:
        raise ValueError("need at least 2 pairs")
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    rank_scores = pairs.s
    prev_positive = None
    for round_no in range(1, max_rounds + 1):
        x, y = build_training_set(pairs, n_train, rank_scores)
        model = train_svm(x, y, hyper)
        dis = pairs.decision_values(model)
        conf = confidence_from_decisions(dis)
        s_hat = pairs.s * conf ** alpha
        positive = dis > 0.0
        if prev_positive is not None and float(np.mean(positive != prev_positive)) < delta:
            break
        prev_positive = positive
        rank_scores = s_hat
    an, bn = pairs.pair_nodes()
    order = np.lexsort((bn, an, -s_hat))
    return PrfResult(order=order, positive=positive, s_hat=s_hat, conf=conf,
                     model=model, rounds=round_no)


def write_model_dump(model: SvmModel, path: str | os.PathLike, header_lines=()) -> None:
    """Plain-text dump (dimension, bias, one weight per line, 17 significant digits)."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(f"dim {model.w.size}\n")
        fh.write(f"bias {model.bias:.17g}\n")
        for wi in model.w:
            fh.write(f"{wi:.17g}\n")
