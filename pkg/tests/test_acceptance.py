"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines; every tolerance is pinned here, nothing is deferred.
"""

import time

import numpy as np

from nkmatch.cli import main as cli_main
from nkmatch.features import BinningScheme, diversity_score, extract_features, feature_matrix
from nkmatch.graph import build_graph, k_hop_frontier
from nkmatch.matching import MatchState, cosine_matrix, popularity_vector, transform_similarity
from nkmatch.perturb import NoiseSpec, generate_synthetic, perturb
from nkmatch.pipeline import AttackConfig, accuracy, run_attack
from nkmatch.prf import SvmHyper, confidence_from_decisions, primal_objective, train_svm
from nkmatch.report import run_single
from nkmatch.util import stable_seed

from oracles import (bfs_frontier, nk_histograms, random_er_edges, separable_blobs,
                     unique_vector_fraction)

SCHEME = BinningScheme()


def report(number: int, name: str, ok: bool, detail: str = ""):
    status = "PASS" if ok else "FAIL"
    print(f"[criterion {number:2d}] {status}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"criterion {number} failed: {name} {detail}"


def er_corpus():
    rng = np.random.default_rng(20240501)
    graphs = []
    for i in range(50):
        n = int(rng.integers(10, 51))
        p = float(rng.choice([0.05, 0.1, 0.3]))
        edges = random_er_edges(n, p, rng)
        graphs.append((n, edges, build_graph(n, edges)))
    return graphs


def test_criterion_1_frontier_oracle():
    start = time.perf_counter()
    for n, edges, g in er_corpus():
        for a in range(n):
            assert k_hop_frontier(g, a, 2) == bfs_frontier(n, edges, a, 2)
    elapsed = time.perf_counter() - start
    report(1, "2-hop frontiers match brute-force BFS oracle", elapsed < 5.0, f"{elapsed:.2f}s")


def test_criterion_2_histogram_oracle():
    start = time.perf_counter()
    for n, edges, g in er_corpus():
        feats = extract_features(g, SCHEME)
        for a in range(n):
            nk1, nk2 = nk_histograms(n, edges, a, SCHEME.b)
            assert np.array_equal(feats[a].nk1, nk1)
            assert np.array_equal(feats[a].nk2, nk2)
    elapsed = time.perf_counter() - start
    report(2, "nK histograms match degree-multiset oracle", elapsed < 5.0, f"{elapsed:.2f}s")


def test_criterion_3_score_ranges():
    start = time.perf_counter()
    rng = np.random.default_rng(7)

    for _ in range(10):  # 10 x 1000 randomized diversity scores
        vecs = rng.integers(0, 40, size=(1000, 33)).astype(float)
        ds = np.array([diversity_score(v) for v in vecs])
        assert np.all((ds >= 0.0) & (ds <= 1.0))

    g = build_graph(60, random_er_edges(60, 0.1, rng))
    for _ in range(200):  # 200 states x 60 nodes = 12000 popularity scores
        k = int(rng.integers(0, 30))
        anon = rng.choice(60, size=k, replace=False)
        aux = rng.choice(60, size=k, replace=False)
        state = MatchState.from_pairs(list(zip(anon.tolist(), aux.tolist())))
        ps = popularity_vector(g, state, "anon")
        assert np.all((ps >= 0.0) & (ps <= 1.0))

    va = rng.integers(0, 9, size=(200, 33)).astype(float)
    vb = rng.integers(0, 9, size=(100, 33)).astype(float)
    sim = cosine_matrix(va, vb)  # 20000 similarities
    assert np.all((sim >= 0.0) & (sim <= 1.0))

    for _ in range(20):  # 20 x 500 confidences, plus degenerate spreads
        dis = rng.normal(scale=3.0, size=500)
        conf = confidence_from_decisions(dis)
        assert np.all((conf >= 0.0) & (conf <= 1.0))
    assert np.all(confidence_from_decisions(np.full(10, 2.5)) == 1.0)

    assert abs(diversity_score(np.ones(33)) - 1.0) < 1e-9
    one_hot = np.zeros(33)
    one_hot[7] = 3.0
    assert abs(diversity_score(one_hot)) < 1e-9
    elapsed = time.perf_counter() - start
    report(3, "DS/PS/Sim/conf stay in [0,1]; DS endpoints exact", elapsed < 5.0, f"{elapsed:.2f}s")


def test_criterion_4_transform_order_preservation():
    start = time.perf_counter()
    rng = np.random.default_rng(11)
    checked = 0
    while checked < 1000:
        length = int(rng.integers(3, 40))
        row = rng.random(length)
        if np.var(row) < 1e-6:
            continue
        out = transform_similarity(row)
        assert np.array_equal(np.argsort(out, kind="stable"), np.argsort(row, kind="stable"))
        checked += 1
    elapsed = time.perf_counter() - start
    report(4, "similarity transform preserves within-row order", elapsed < 1.0, f"{elapsed:.2f}s")


def test_criterion_5_relabeling_invariance():
    start = time.perf_counter()
    rng = np.random.default_rng(13)
    for _ in range(20):
        n = int(rng.integers(8, 40))
        edges = random_er_edges(n, float(rng.choice([0.1, 0.2, 0.3])), rng)
        g = build_graph(n, edges)
        perm = rng.permutation(n)
        g2 = build_graph(n, [(int(perm[u]), int(perm[v])) for u, v in edges])
        feats = extract_features(g, SCHEME)
        feats2 = extract_features(g2, SCHEME)
        for a in range(n):
            assert np.array_equal(feats[a].raw, feats2[int(perm[a])].raw)
            assert feats[a].ds == feats2[int(perm[a])].ds
    elapsed = time.perf_counter() - start
    report(5, "features are relabeling-invariant (exact)", elapsed < 5.0, f"{elapsed:.2f}s")


def test_criterion_6_perturbation_contract():
    start = time.perf_counter()
    g = generate_synthetic("ba", {"n": 500, "m": 3}, seed=404)
    for noise in (0.0, 0.1, 0.3):
        out = perturb(g, NoiseSpec(noise, seed=55))
        r = int(np.floor(noise * g.m + 0.5))
        assert out.m == g.m
        assert out.n == g.n
        assert len(g.edges ^ out.edges) == 2 * r
        if noise == 0.0:
            assert out.edges == g.edges
    elapsed = time.perf_counter() - start
    report(6, "perturbation keeps M, symmetric difference exactly 2r", elapsed < 2.0, f"{elapsed:.2f}s")


def test_criterion_7_svm_sanity():
    start = time.perf_counter()
    x, y = separable_blobs(np.random.default_rng(2024))
    hyper = SvmHyper()
    model = train_svm(x, y, hyper)
    acc = float(np.mean(np.sign(model.decision(x)) == y))
    doubled = train_svm(x, y, SvmHyper(lam=hyper.lam, epochs=2 * hyper.epochs, seed=hyper.seed))
    f1 = primal_objective(model.w, model.bias, x, y, hyper.lam)
    f2 = primal_objective(doubled.w, doubled.bias, x, y, hyper.lam)
    rel = abs(f1 - f2) / max(abs(f2), 1e-12)
    elapsed = time.perf_counter() - start
    report(7, "separable blobs: accuracy 1.0, objective stable under 2x epochs",
           acc == 1.0 and rel < 0.01 and elapsed < 5.0,
           f"acc={acc}, rel_obj_change={rel:.2e}, {elapsed:.2f}s")


def test_criterion_8_self_attack_consistency():
    start = time.perf_counter()
    g = generate_synthetic("ba", {"n": 300, "m": 3}, seed=42)
    raw = feature_matrix(extract_features(g, SCHEME))
    unique_fraction = unique_vector_fraction(raw)
    res = run_attack(g, g, AttackConfig(seed=1))
    assert res.mapping, "self-attack accepted nothing"
    correct = sum(1 for a, b, _ in res.mapping if a == b)
    acc_on_accepted = correct / len(res.mapping)
    elapsed = time.perf_counter() - start
    report(8, "self-attack accuracy on accepted >= nK-uniqueness fraction",
           acc_on_accepted >= unique_fraction and elapsed < 60.0,
           f"acc={acc_on_accepted:.4f} >= unique={unique_fraction:.4f}, {elapsed:.1f}s")


def test_criterion_9_noise_monotonicity():
    start = time.perf_counter()
    base = generate_synthetic("ba", {"n": 1000, "m": 3}, seed=77)
    means = {}
    for li, level in enumerate((0.05, 0.20)):
        accs = []
        for rep in range(5):
            run_seed = stable_seed(2718, li, rep)
            cfg = AttackConfig(seed=run_seed)
            _, acc = run_single(base, level, run_seed, cfg)
            accs.append(acc)
        means[level] = float(np.mean(accs))
    elapsed = time.perf_counter() - start
    report(9, "mean accuracy at noise 0.05 >= at noise 0.20",
           means[0.05] >= means[0.20] and elapsed < 600.0,
           f"{means[0.05]:.4f} vs {means[0.20]:.4f}, {elapsed:.0f}s")


def test_criterion_10_seed_contract():
    start = time.perf_counter()
    base = generate_synthetic("ba", {"n": 300, "m": 3}, seed=42)
    master = 11
    ga = perturb(base, NoiseSpec(0.05, stable_seed(master, 1)))
    gu = perturb(base, NoiseSpec(0.05, stable_seed(master, 2)))
    truth = {lab: lab for lab in base.labels}
    cfg = AttackConfig(seed=master)
    seedless = run_attack(ga, gu, cfg)
    acc0 = accuracy(seedless, truth, ga.labels, gu.labels)

    index_u = gu.label_index()
    hubs = sorted(range(ga.n), key=lambda a: -ga.degree(a))[:10]
    seeds = [(a, index_u[ga.labels[a]]) for a in hubs]
    seeded = run_attack(ga, gu, cfg, seeds=seeds)
    acc1 = accuracy(seeded, truth, ga.labels, gu.labels)
    mapped = {(a, b) for a, b, _ in seeded.mapping}
    all_present = all((ga.labels[a], gu.labels[b]) in mapped for a, b in seeds)
    elapsed = time.perf_counter() - start
    report(10, "10 correct seeds all kept; seeded accuracy >= seedless",
           all_present and acc1 >= acc0 and elapsed < 120.0,
           f"seeded={acc1:.4f} >= seedless={acc0:.4f}, {elapsed:.0f}s")


def test_criterion_11_sweep_determinism(tmp_path):
    args = ["sweep", "--model", "ba", "--n", "120", "--m", "3", "--noise", "0.0,0.1",
            "--repeats", "2", "--n-group", "150", "--n-train", "120", "--seed", "90210"]
    d1, d2 = tmp_path / "s1", tmp_path / "s2"
    assert cli_main(args + ["--out-dir", str(d1)]) == 0
    assert cli_main(args + ["--out-dir", str(d2)]) == 0
    rels = ["report.csv", "accuracy.svg"] + [f"runs/level{li}_rep{r}.mapping.tsv"
                                             for li in range(2) for r in range(2)]
    identical = all((d1 / rel).read_bytes() == (d2 / rel).read_bytes() for rel in rels)
    report(11, "sweep rerun reproduces byte-identical artifacts", identical,
           f"{len(rels)} files compared")
