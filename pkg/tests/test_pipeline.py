import pytest

from nkmatch.features import BinningScheme, extract_features, feature_matrix
from nkmatch.perturb import generate_synthetic
from nkmatch.pipeline import (AttackConfig, AttackResult, accuracy, run_attack,
                              write_iteration_log, write_mapping_tsv)

from oracles import unique_vector_fraction

CFG = AttackConfig(seed=101, n_group=100, n_train=50)


def small_ba(n=50, seed=31):
    return generate_synthetic("ba", {"n": n, "m": 2}, seed=seed)


def test_self_attack_perfect_on_distinct_features():
    g = small_ba()
    raw = feature_matrix(extract_features(g, BinningScheme()))
    uniqueness = unique_vector_fraction(raw)
    assert uniqueness > 0.5  # precondition for a meaningful check
    res = run_attack(g, g, CFG)
    accepted = [(a, b) for a, b, _ in res.mapping]
    correct = sum(1 for a, b in accepted if a == b)
    assert correct / len(accepted) >= uniqueness


def test_attack_is_deterministic():
    g = small_ba()
    res1 = run_attack(g, g, CFG)
    res2 = run_attack(g, g, CFG)
    assert res1.mapping == res2.mapping
    assert res1.iterations == res2.iterations
    assert res1.config == res2.config


def test_attack_mapping_one_to_one():
    g = small_ba(40)
    h = small_ba(40, seed=32)
    res = run_attack(g, h, CFG)
    anon = [a for a, _, _ in res.mapping]
    aux = [b for _, b, _ in res.mapping]
    assert len(set(anon)) == len(anon)
    assert len(set(aux)) == len(aux)
    assert len(res.mapping) <= min(g.n, h.n)


def test_fully_seeded_terminates_immediately():
    g = small_ba(20)
    seeds = [(a, a) for a in range(g.n)]
    res = run_attack(g, g, CFG, seeds=seeds)
    assert res.iterations == []
    assert sorted((a, b) for a, b, _ in res.mapping) == [(g.labels[a], g.labels[a]) for a in range(g.n)]
    assert all(score == float("inf") for _, _, score in res.mapping)


def test_seeds_present_in_final_mapping():
    g = small_ba(40)
    seeds = [(0, 0), (1, 1), (2, 2)]
    res = run_attack(g, g, CFG, seeds=seeds)
    mapped = {(a, b) for a, b, _ in res.mapping}
    for a, b in seeds:
        assert (g.labels[a], g.labels[b]) in mapped


def test_invalid_seeds_rejected():
    g = small_ba(10)
    with pytest.raises(ValueError, match="unknown node"):
        run_attack(g, g, CFG, seeds=[(0, 99)])
    with pytest.raises(ValueError, match="duplicates"):
        run_attack(g, g, CFG, seeds=[(0, 1), (0, 2)])
    with pytest.raises(ValueError, match="duplicates"):
        run_attack(g, g, CFG, seeds=[(0, 1), (2, 1)])


def test_empty_graph_rejected():
    from nkmatch.graph import build_graph
    g = build_graph(0, [])
    h = small_ba(10)
    with pytest.raises(ValueError, match="non-empty"):
        run_attack(g, h, CFG)


def test_attack_config_validation():
    with pytest.raises(ValueError):
        AttackConfig(alpha=-1)
    with pytest.raises(ValueError):
        AttackConfig(n_group=0)
    with pytest.raises(ValueError):
        AttackConfig(svm_lambda=0.0)
    with pytest.raises(ValueError):
        AttackConfig(bins=1)


def test_accuracy_examples():
    cfg = AttackConfig()
    mapping = [(i, i, 1.0) for i in range(5)] + [(i, i + 100, 1.0) for i in range(5, 10)]
    res = AttackResult(mapping=mapping, iterations=[], config=cfg.as_dict(), seed=0)
    truth = {i: i for i in range(10)}
    labels = list(range(10))
    assert accuracy(res, truth, labels, labels) == pytest.approx(0.5)
    empty = AttackResult(mapping=[], iterations=[], config=cfg.as_dict(), seed=0)
    assert accuracy(empty, truth, labels, labels) == 0.0
    full = AttackResult(mapping=[(i, i, 1.0) for i in range(10)], iterations=[],
                        config=cfg.as_dict(), seed=0)
    assert accuracy(full, truth, labels, labels) == 1.0
    assert accuracy(full, truth, [], labels) == 0.0  # empty overlap


def test_artifact_writers(tmp_path):
    g = small_ba(30)
    res = run_attack(g, g, CFG, seeds=[(0, 0)])
    mapping_path = tmp_path / "mapping.tsv"
    iter_path = tmp_path / "iterations.csv"
    write_mapping_tsv(res, mapping_path, header_lines=["h1", "h2"])
    write_iteration_log(res, iter_path, header_lines=["h1"])
    mlines = mapping_path.read_text().splitlines()
    assert mlines[0] == "# h1" and mlines[1] == "# h2"
    assert mlines[2].split("\t")[2] == "inf"
    assert len(mlines) == 2 + len(res.mapping)
    ilines = iter_path.read_text().splitlines()
    assert ilines[1] == "iter,group_a,group_u,pairs,prf_rounds,accepted"
    assert len(ilines) == 2 + len(res.iterations)


def test_tau_gate_blocks_low_scores():
    g = small_ba(30)
    strict = AttackConfig(seed=CFG.seed, n_group=CFG.n_group, n_train=CFG.n_train, tau=1e9)
    res = run_attack(g, g, strict)
    assert res.mapping == []
