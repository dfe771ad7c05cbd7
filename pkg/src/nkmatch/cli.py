"""Command-line front end: gen, perturb, attack, sweep.

Exit codes: 0 success, 1 usage error, 2 input-data error, 3 internal error.
Config precedence: CLI flags > --config file (flat key=value) > defaults.
Every artifact starts with a comment header carrying the tool version, a
hash of the effective config, and the master seed.
"""

from __future__ import annotations

import argparse
import os
import sys

from .graph import load_edge_list, write_edge_list
from .perturb import (NoiseSpec, OverlapSpec, generate_overlapping_pair,
                      generate_synthetic, load_truth_tsv, perturb, write_truth_tsv)
from .pipeline import AttackConfig, accuracy, run_attack, write_iteration_log, write_mapping_tsv
from .report import SweepSpec, run_sweep
from .util import __version__, config_hash, configure_logging, stable_seed


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 1
        raise UsageError(message)


ATTACK_KEYS = ("c", "n_group", "n_train", "alpha", "bins", "tau", "seed",
               "prf_max_rounds", "prf_delta", "svm_lambda", "svm_epochs")
SWEEP_KEYS = ATTACK_KEYS + ("noise", "overlap", "repeats")


def load_config_file(path: str, allowed: tuple[str, ...]) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            key = key.strip().replace("-", "_")
            if key not in allowed:
                raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = value.strip()
    return values


def merge_config(args: argparse.Namespace, allowed: tuple[str, ...]) -> None:
    """Fill argparse Nones from the config file; leave real flags alone."""
    if not getattr(args, "config", None):
        return
    for key, raw in load_config_file(args.config, allowed).items():
        if getattr(args, key, None) is None:
            setattr(args, key, raw)


def build_attack_config(args: argparse.Namespace) -> AttackConfig:
    defaults = AttackConfig()
    kwargs = {}
    for key in ATTACK_KEYS:
        value = getattr(args, key, None)
        if value is None:
            kwargs[key] = getattr(defaults, key)
        else:
            base = getattr(defaults, key)
            kwargs[key] = type(base)(value)
    try:
        return AttackConfig(**kwargs)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def header_for(cfg_echo: dict, seed: int) -> list[str]:
    return [f"nkmatch {__version__}", f"config {config_hash(cfg_echo)}", f"seed {seed}"]


def add_attack_flags(sub) -> None:
    sub.add_argument("--c", type=float, default=None, help="structure-score balance weight")
    sub.add_argument("--n-group", dest="n_group", type=int, default=None, help="group size per iteration")
    sub.add_argument("--n-train", dest="n_train", type=int, default=None, help="self-labeled pairs per class")
    sub.add_argument("--alpha", type=float, default=None, help="confidence exponent in score fusion")
    sub.add_argument("--bins", type=int, default=None, help="degree-histogram bucket count")
    sub.add_argument("--tau", type=float, default=None, help="acceptance threshold on the fused score")
    sub.add_argument("--seed", type=int, default=None, help="master seed")
    sub.add_argument("--prf-max-rounds", dest="prf_max_rounds", type=int, default=None)
    sub.add_argument("--prf-delta", dest="prf_delta", type=float, default=None)
    sub.add_argument("--svm-lambda", dest="svm_lambda", type=float, default=None)
    sub.add_argument("--svm-epochs", dest="svm_epochs", type=int, default=None)
    sub.add_argument("--config", default=None, help="flat key=value config file")
    sub.add_argument("--out-dir", dest="out_dir", default=".", help="artifact directory")
    sub.add_argument("--debug-dumps", dest="debug_dumps", action="store_true",
                     help="dump per-iteration similarity matrices and SVM models")


def build_parser() -> _Parser:
    parser = _Parser(prog="nkmatch", description=__doc__)
    parser.add_argument("--version", action="version", version=f"nkmatch {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate a synthetic graph file")
    gen.add_argument("--model", required=True, choices=("er", "ba", "ws"))
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, default=None, help="edge/rewire probability (er, ws)")
    gen.add_argument("--m", type=int, default=None, help="attachment count (ba)")
    gen.add_argument("--k", type=int, default=None, help="ring degree (ws)")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("-o", "--out", required=True)

    pert = commands.add_parser("perturb", help="perturb a graph and emit ground truth")
    pert.add_argument("input", help="edge-list file")
    pert.add_argument("--noise", type=float, default=None, help="fraction of edges to rewire")
    pert.add_argument("--overlap", type=float, default=None, help="fraction of shared nodes")
    pert.add_argument("--seed", type=int, default=0)
    pert.add_argument("--out-dir", dest="out_dir", default=".")

    attack = commands.add_parser("attack", help="match an anonymized graph against an auxiliary graph")
    attack.add_argument("--anon", required=True, help="anonymized edge-list file")
    attack.add_argument("--aux", required=True, help="auxiliary edge-list file")
    attack.add_argument("--truth", default=None, help="ground-truth TSV for accuracy reporting")
    attack.add_argument("--seeds", default=None, help="known-correct pair TSV to start from")
    add_attack_flags(attack)

    sweep = commands.add_parser("sweep", help="accuracy-versus-noise experiment grid")
    source = sweep.add_mutually_exclusive_group(required=True)
    source.add_argument("--base", default=None, help="base graph edge-list file")
    source.add_argument("--model", choices=("er", "ba", "ws"), default=None)
    sweep.add_argument("--n", type=int, default=None)
    sweep.add_argument("--p", type=float, default=None)
    sweep.add_argument("--m", type=int, default=None)
    sweep.add_argument("--k", type=int, default=None)
    sweep.add_argument("--noise", default=None, help="comma-separated noise levels")
    sweep.add_argument("--repeats", type=int, default=None)
    sweep.add_argument("--overlap", type=float, default=None)
    add_attack_flags(sweep)
    return parser


def _model_params(args) -> dict:
    params = {"n": args.n}
    if args.model == "er":
        if args.p is None:
            raise UsageError("--model er requires --p")
        params["p"] = args.p
    elif args.model == "ba":
        if args.m is None:
            raise UsageError("--model ba requires --m")
        params["m"] = args.m
    else:
        if args.k is None or args.p is None:
            raise UsageError("--model ws requires --k and --p")
        params["k"] = args.k
        params["p"] = args.p
    if args.n is None:
        raise UsageError(f"--model {args.model} requires --n")
    return params


def cmd_gen(args) -> int:
    params = _model_params(args)
    try:
        g = generate_synthetic(args.model, params, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    echo = {"command": "gen", "model": args.model, "seed": args.seed, **params}
    write_edge_list(g, args.out, header_for(echo, args.seed))
    print(f"generated {args.model} graph: n={g.n} M={g.m} -> {args.out}")
    return 0


def cmd_perturb(args) -> int:
    if args.noise is None and args.overlap is None:
        raise UsageError("perturb requires --noise and/or --overlap")
    g = load_edge_list(args.input)
    os.makedirs(args.out_dir, exist_ok=True)
    echo = {"command": "perturb", "input": os.path.basename(args.input),
            "noise": args.noise, "overlap": args.overlap, "seed": args.seed}
    header = header_for(echo, args.seed)

    if args.overlap is not None:
        ga, gu, truth = generate_overlapping_pair(g, OverlapSpec(args.overlap, stable_seed(args.seed, 0)))
        if args.noise is not None:
            ga = perturb(ga, NoiseSpec(args.noise, stable_seed(args.seed, 1)))
            gu = perturb(gu, NoiseSpec(args.noise, stable_seed(args.seed, 2)))
        write_edge_list(ga, os.path.join(args.out_dir, "anon.txt"), header)
        write_edge_list(gu, os.path.join(args.out_dir, "aux.txt"), header)
        write_truth_tsv(truth, os.path.join(args.out_dir, "truth.tsv"), header)
        print(f"overlap={args.overlap:g}: shared {len(truth)} of {g.n} nodes; "
              f"anon n={ga.n} M={ga.m}, aux n={gu.n} M={gu.m} -> {args.out_dir}")
    else:
        out = perturb(g, NoiseSpec(args.noise, stable_seed(args.seed, 1)))
        removed = len(g.edges - out.edges)
        write_edge_list(out, os.path.join(args.out_dir, "perturbed.txt"), header)
        write_truth_tsv({lab: lab for lab in g.labels},
                        os.path.join(args.out_dir, "truth.tsv"), header)
        print(f"noise={args.noise:g}: altered r={removed} of M={g.m} edges -> {args.out_dir}")
    return 0


def _load_seeds(path: str, ga, gu) -> list[tuple[int, int]]:
    index_a = ga.label_index()
    index_u = gu.label_index()
    pairs = []
    for la, lu in load_truth_tsv(path).items():
        if la not in index_a:
            raise ValueError(f"seed label {la} not present in the anonymized graph")
        if lu not in index_u:
            raise ValueError(f"seed label {lu} not present in the auxiliary graph")
        pairs.append((index_a[la], index_u[lu]))
    return pairs


def cmd_attack(args) -> int:
    merge_config(args, ATTACK_KEYS)
    cfg = build_attack_config(args)
    ga = load_edge_list(args.anon)
    gu = load_edge_list(args.aux)
    seeds = _load_seeds(args.seeds, ga, gu) if args.seeds else None
    os.makedirs(args.out_dir, exist_ok=True)
    debug_dir = os.path.join(args.out_dir, "debug") if args.debug_dumps else None

    result = run_attack(ga, gu, cfg, seeds=seeds, debug_dir=debug_dir)
    header = header_for(result.config, cfg.seed)
    write_mapping_tsv(result, os.path.join(args.out_dir, "mapping.tsv"), header)
    write_iteration_log(result, os.path.join(args.out_dir, "iterations.csv"), header)
    print(f"matched {len(result.mapping)} pairs in {len(result.iterations)} iterations "
          f"-> {args.out_dir}")
    if args.truth:
        truth = load_truth_tsv(args.truth)
        acc = accuracy(result, truth, ga.labels, gu.labels)
        print(f"accuracy {acc:.6g}")
    return 0


def cmd_sweep(args) -> int:
    merge_config(args, SWEEP_KEYS)
    cfg = build_attack_config(args)
    if args.noise is None:
        raise UsageError("sweep requires --noise")
    try:
        levels = tuple(float(tok) for tok in str(args.noise).split(",") if tok.strip() != "")
    except ValueError as exc:
        raise UsageError(f"bad --noise list: {args.noise!r}") from exc
    repeats = int(args.repeats) if args.repeats is not None else 1
    overlap = float(args.overlap) if args.overlap is not None else None
    try:
        spec = SweepSpec(noise_levels=levels, repeats=repeats, overlap=overlap)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc

    if args.base is not None:
        base = load_edge_list(args.base)
        source = {"base": os.path.basename(args.base)}
    else:
        params = _model_params(args)
        try:
            base = generate_synthetic(args.model, params, stable_seed(cfg.seed, 0xBA5E))
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        source = {"model": args.model, **params}

    os.makedirs(args.out_dir, exist_ok=True)
    echo = {**cfg.as_dict(), **source, "noise_levels": levels, "repeats": repeats,
            "overlap": overlap}
    header = header_for(echo, cfg.seed)
    report = run_sweep(base, spec, cfg, cfg.seed, args.out_dir, header)
    for level, mean, std in report.summary:
        print(f"noise={level:g}: mean accuracy {mean:.6g} (stddev {std:.6g}, {spec.repeats} runs)")
    print(f"report -> {os.path.join(args.out_dir, 'report.csv')}")
    return 0


def main(argv=None) -> int:
    try:
        try:
            configure_logging()
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        parser = build_parser()
        args = parser.parse_args(argv)
        handler = {"gen": cmd_gen, "perturb": cmd_perturb,
                   "attack": cmd_attack, "sweep": cmd_sweep}[args.command]
        return handler(args)
    except UsageError as exc:
        print(f"nkmatch: usage error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"nkmatch: input error: {exc}", file=sys.stderr)
        return 2
    except SystemExit:
        raise
    except Exception as exc:  # invariant violation or bug
        print(f"nkmatch: internal error: {exc!r}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
