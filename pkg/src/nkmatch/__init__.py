"""Structure-based blind graph de-anonymization toolkit."""

from .features import BinningScheme, NKFeature, diversity_score, extract_features
from .graph import Graph, build_graph, k_hop_frontier, load_edge_list, neighbors, write_edge_list
from .matching import (CandidatePair, MatchState, cosine_similarity, popularity_score,
                       select_groups, structure_score, transform_similarity)
from .perturb import (NoiseSpec, OverlapSpec, generate_overlapping_pair,
                      generate_synthetic, perturb)
from .pipeline import AttackConfig, AttackResult, accuracy, run_attack
from .prf import (PairSet, SvmHyper, SvmModel, build_training_set, confidence,
                  prf_loop, rerank, train_svm)
from .report import RunReport, SweepSpec, run_sweep
from .util import __version__

__all__ = [
    "AttackConfig", "AttackResult", "BinningScheme", "CandidatePair", "Graph",
    "MatchState", "NKFeature", "NoiseSpec", "OverlapSpec", "PairSet", "RunReport",
    "SvmHyper", "SvmModel", "SweepSpec", "__version__", "accuracy", "build_graph",
    "build_training_set", "confidence", "cosine_similarity", "diversity_score",
    "extract_features", "generate_overlapping_pair", "generate_synthetic",
    "k_hop_frontier", "load_edge_list", "neighbors", "perturb", "popularity_score",
    "prf_loop", "rerank", "run_attack", "run_sweep", "select_groups",
    "structure_score", "train_svm", "transform_similarity", "write_edge_list",
]
