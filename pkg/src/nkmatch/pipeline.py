"""End-to-end attack orchestration: feature extraction, iterative group
selection, similarity ranking, PRF-SVM re-ranking, greedy one-to-one match
extraction, and the accuracy metric.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, asdict

from .features import BinningScheme, ds_vector, extract_features, feature_matrix, write_features_csv
from .graph import Graph
from .matching import MatchState, cosine_matrix, popularity_vector, select_groups, transform_rows
from .prf import PairSet, SvmHyper, prf_loop, simplex_normalize, write_model_dump
from .util import __version__, config_hash, log

SEED_SCORE = math.inf  # a-priori matches carry certainty, not a computed score


@dataclass(frozen=True)
class AttackConfig:
    c: float = 2.0
    n_group: int = 1000
    n_train: int = 1250
    alpha: float = 1.0
    bins: int = 16
    prf_max_rounds: int = 10
    prf_delta: float = 0.01
    tau: float = 0.0
    seed: int = 0
    svm_lambda: float = 1e-3
    svm_epochs: int = 400

    def __post_init__(self):
        if self.c < 0 or self.alpha < 0 or self.tau < 0:
            raise ValueError("c, alpha and tau must be >= 0")
        if min(self.n_group, self.n_train, self.prf_max_rounds, self.svm_epochs) < 1:
            raise ValueError("counts must be >= 1")
        if self.bins < 2:
            raise ValueError("bins must be >= 2")
        if self.prf_delta < 0 or self.svm_lambda <= 0:
            raise ValueError("need prf_delta >= 0 and svm_lambda > 0")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class IterationStats:
    iteration: int
    group_a: int
    group_u: int
    pairs: int
    prf_rounds: int
    accepted: int


@dataclass
class AttackResult:
    mapping: list[tuple[int, int, float]]  # (anon label, aux label, score)
    iterations: list[IterationStats]
    config: dict
    seed: int

    def mapping_dict(self) -> dict[int, int]:
        return {a: b for a, b, _ in self.mapping}


def _validate_seeds(ga: Graph, gu: Graph, seeds) -> list[tuple[int, int]]:
    out = []
    seen_a: set[int] = set()
    seen_b: set[int] = set()
    for a, b in seeds:
        if not (0 <= a < ga.n and 0 <= b < gu.n):
            raise ValueError(f"seed pair ({a}, {b}) references an unknown node")
        if a in seen_a or b in seen_b:
            raise ValueError(f"seed pair ({a}, {b}) duplicates an endpoint")
        seen_a.add(a)
        seen_b.add(b)
        out.append((int(a), int(b)))
    return out


def run_attack(ga: Graph, gu: Graph, cfg: AttackConfig = AttackConfig(),
               seeds=None, debug_dir: str | os.PathLike | None = None) -> AttackResult:
    """Run the full iterative matching attack of ga against gu.

    Seeds (internal node-id pairs), when given, populate the matched set
    before the first iteration and are echoed in the final mapping. Each
    iteration selects the highest structure-score unmatched nodes on both
    sides, ranks all cross pairs by transformed cosine similarity, re-ranks
    them with the PRF-SVM loop, then greedily accepts positively-classified
    pairs by descending fused score (one-to-one, score >= tau). Stops when
    an iteration accepts nothing or a side runs out of unmatched nodes.
    Deterministic given the config.
    """
    if ga.n == 0 or gu.n == 0:
        raise ValueError("both graphs must be non-empty")
    seed_pairs = _validate_seeds(ga, gu, seeds or [])

    scheme = BinningScheme(cfg.bins)
    feats_a = extract_features(ga, scheme)
    feats_u = extract_features(gu, scheme)
    raw_a = feature_matrix(feats_a)
    raw_u = feature_matrix(feats_u)
    norm_a = simplex_normalize(raw_a)
    norm_u = simplex_normalize(raw_u)
    ds_a = ds_vector(feats_a)
    ds_u = ds_vector(feats_u)

    hyper = SvmHyper(lam=cfg.svm_lambda, epochs=cfg.svm_epochs, seed=cfg.seed)
    state = MatchState.from_pairs(seed_pairs)
    accepted_log: list[tuple[int, int, float]] = []
    stats: list[IterationStats] = []

    debug_header = [f"nkmatch {__version__}", f"config {config_hash(cfg.as_dict())}", f"seed {cfg.seed}"]
    if debug_dir is not None:
        os.makedirs(debug_dir, exist_ok=True)
        write_features_csv(ga, feats_a, scheme, os.path.join(str(debug_dir), "features_anon.csv"), debug_header)
        write_features_csv(gu, feats_u, scheme, os.path.join(str(debug_dir), "features_aux.csv"), debug_header)

    while True:
        if len(state.anon_to_aux) >= ga.n or len(state.aux_to_anon) >= gu.n:
            break
        ss_a = ds_a + cfg.c * popularity_vector(ga, state, "anon")
        ss_u = ds_u + cfg.c * popularity_vector(gu, state, "aux")
        group_a, group_u = select_groups(ss_a, ss_u, state, cfg.n_group)
        if not group_a or not group_u or len(group_a) * len(group_u) < 2:
            break

        sim = cosine_matrix(raw_a[group_a], raw_u[group_u])
        s_mat = transform_rows(sim)
        pairs = PairSet.from_product(norm_a[group_a], ds_a[group_a], group_a,
                                     norm_u[group_u], ds_u[group_u], group_u,
                                     sim, s_mat)
        prf = prf_loop(pairs, cfg.n_train, cfg.alpha, cfg.prf_max_rounds,
                       cfg.prf_delta, hyper)

        if debug_dir is not None:
            _dump_iteration(debug_dir, state.iteration, ga, gu, group_a, group_u, sim, prf, debug_header)

        pair_a, pair_b = pairs.pair_nodes()
        used_a: set[int] = set()
        used_b: set[int] = set()
        accepted: list[tuple[int, int, float]] = []
        for idx in prf.order:
            score = float(prf.s_hat[idx])
            if score < cfg.tau:
                break  # ordering is score-descending; nothing below tau qualifies
            if not prf.positive[idx]:
                continue
            a, b = int(pair_a[idx]), int(pair_b[idx])
            if a in used_a or b in used_b:
                continue
            used_a.add(a)
            used_b.add(b)
            accepted.append((a, b, score))

        stats.append(IterationStats(
            iteration=state.iteration, group_a=len(group_a), group_u=len(group_u),
            pairs=len(pairs), prf_rounds=prf.rounds, accepted=len(accepted),
        ))
        if not accepted:
            break
        state.add((a, b) for a, b, _ in accepted)
        accepted_log.extend(accepted)
        state.iteration += 1
        log.info("iteration %d: accepted %d matches (%d total)",
                 state.iteration, len(accepted), len(state.anon_to_aux))

    mapping = [(ga.labels[a], gu.labels[b], SEED_SCORE) for a, b in sorted(seed_pairs)]
    mapping += [(ga.labels[a], gu.labels[b], score) for a, b, score in accepted_log]
    return AttackResult(mapping=mapping, iterations=stats, config=cfg.as_dict(), seed=cfg.seed)


def accuracy(result: AttackResult, truth: dict[int, int], va_labels, vu_labels) -> float:
    """Correct matches over the node overlap, all in original labels.

    Empty overlap scores 0 (and is reported as undefined in the log).
    """
    overlap = set(va_labels) & set(vu_labels)
    if not overlap:
        log.info("accuracy undefined: the two graphs share no labels")
        return 0.0
    correct = sum(1 for a, b, _ in result.mapping if truth.get(a) == b)
    return correct / len(overlap)


def _fmt_score(score: float) -> str:
    return "inf" if math.isinf(score) else f"{score:.17g}"


def write_mapping_tsv(result: AttackResult, path: str | os.PathLike, header_lines=()) -> None:
    """anon_label<TAB>aux_label<TAB>score rows."""
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        for a, b, score in result.mapping:
            fh.write(f"{a}\t{b}\t{_fmt_score(score)}\n")


def write_iteration_log(result: AttackResult, path: str | os.PathLike, header_lines=()) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("iter,group_a,group_u,pairs,prf_rounds,accepted\n")
        for it in result.iterations:
            fh.write(f"{it.iteration},{it.group_a},{it.group_u},{it.pairs},{it.prf_rounds},{it.accepted}\n")


def _dump_iteration(debug_dir, iteration, ga, gu, group_a, group_u, sim, prf, header_lines) -> None:
    sim_path = os.path.join(str(debug_dir), f"iter{iteration:03d}_sim.csv")
    with open(sim_path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("anon\\aux," + ",".join(str(gu.labels[b]) for b in group_u) + "\n")
        for row, a in enumerate(group_a):
            fh.write(str(ga.labels[a]) + "," + ",".join(f"{v:.8g}" for v in sim[row]) + "\n")
    write_model_dump(prf.model, os.path.join(str(debug_dir), f"iter{iteration:03d}_model.txt"), header_lines)
