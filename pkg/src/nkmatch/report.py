"""Experiment sweeps over noise levels and report emission (CSV + SVG).

Artifacts are byte-identical across reruns with the same master seed: all
run seeds derive from it, and wall-clock timings stay out of the files.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .perturb import NoiseSpec, OverlapSpec, generate_overlapping_pair, perturb
from .pipeline import AttackConfig, accuracy, run_attack, write_mapping_tsv
from .util import log, stable_seed


@dataclass(frozen=True)
class SweepSpec:
    noise_levels: tuple[float, ...]
    repeats: int = 1
    overlap: float | None = None

    def __post_init__(self):
        if not self.noise_levels:
            raise ValueError("at least one noise level is required")
        if any(not 0.0 <= x <= 1.0 for x in self.noise_levels):
            raise ValueError("noise levels must lie in [0, 1]")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if self.overlap is not None and not 0.0 < self.overlap <= 1.0:
            raise ValueError("overlap must be in (0, 1]")


@dataclass
class RunReport:
    config: dict
    master_seed: int
    rows: list[tuple[float, int, float, float]]  # (noise, repeat, accuracy, wall_clock)
    summary: list[tuple[float, float, float]]  # (noise, mean, stddev)


def run_single(base: Graph, noise: float, run_seed: int, cfg: AttackConfig,
               overlap: float | None = None):
    """One experiment cell: derive the pair, attack, score against ground truth."""
    if overlap is not None:
        g1, g2, truth = generate_overlapping_pair(base, OverlapSpec(overlap, stable_seed(run_seed, 0)))
    else:
        g1, g2 = base, base
        truth = {lab: lab for lab in base.labels}
    ga = perturb(g1, NoiseSpec(noise, stable_seed(run_seed, 1)))
    gu = perturb(g2, NoiseSpec(noise, stable_seed(run_seed, 2)))
    result = run_attack(ga, gu, cfg)
    acc = accuracy(result, truth, ga.labels, gu.labels)
    return result, acc


def run_sweep(base: Graph, spec: SweepSpec, cfg: AttackConfig, master_seed: int,
              out_dir: str | os.PathLike, header_lines=()) -> RunReport:
    """Run every (noise level, repeat) cell and write report.csv, accuracy.svg,
    and one mapping TSV per run under out_dir/runs/."""
    out_dir = str(out_dir)
    runs_dir = os.path.join(out_dir, "runs")
    os.makedirs(runs_dir, exist_ok=True)

    rows: list[tuple[float, int, float, float]] = []
    for li, level in enumerate(spec.noise_levels):
        for rep in range(spec.repeats):
            run_seed = stable_seed(master_seed, li, rep)
            run_cfg = AttackConfig(**{**cfg.as_dict(), "seed": run_seed})
            t0 = time.perf_counter()
            result, acc = run_single(base, level, run_seed, run_cfg, spec.overlap)
            wall = time.perf_counter() - t0
            rows.append((level, rep, acc, wall))
            mapping_path = os.path.join(runs_dir, f"level{li}_rep{rep}.mapping.tsv")
            write_mapping_tsv(result, mapping_path, header_lines)
            log.info("noise=%g repeat=%d accuracy=%.4f (%.2fs)", level, rep, acc, wall)

    summary = []
    for level in spec.noise_levels:
        accs = np.array([acc for lv, _, acc, _ in rows if lv == level])
        summary.append((level, float(accs.mean()), float(accs.std())))

    report = RunReport(config=cfg.as_dict(), master_seed=master_seed, rows=rows, summary=summary)
    write_report_csv(report, os.path.join(out_dir, "report.csv"), header_lines)
    render_accuracy_svg(report, os.path.join(out_dir, "accuracy.svg"), header_lines)
    return report


def write_report_csv(report: RunReport, path: str | os.PathLike, header_lines=()) -> None:
    """Data rows (one per run) followed by one summary row per noise level.

    The repeat column holds the repeat index for data rows and the word
    "mean" for summary rows; timings are deliberately excluded so reruns
    are byte-identical.
    """
    with open(path, "w", encoding="utf-8") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write("noise,repeat,accuracy,stddev\n")
        for level, rep, acc, _ in report.rows:
            fh.write(f"{level:.12g},{rep},{acc:.12g},\n")
        for level, mean, std in report.summary:
            fh.write(f"{level:.12g},mean,{mean:.12g},{std:.12g}\n")


def render_accuracy_svg(report: RunReport, path: str | os.PathLike, header_lines=()) -> None:
    """Hand-emitted line plot: noise on x, mean accuracy on y, stddev error bars."""
    width, height = 640, 420
    left, right, top, bottom = 70, 610, 30, 370
    levels = [s[0] for s in report.summary]
    means = [s[1] for s in report.summary]
    stds = [s[2] for s in report.summary]

    x_lo, x_hi = min(levels), max(levels)
    span = x_hi - x_lo

    def sx(v: float) -> float:
        if span <= 0:
            return (left + right) / 2
        return left + (v - x_lo) / span * (right - left)

    def sy(v: float) -> float:
        v = min(max(v, 0.0), 1.0)
        return bottom - v * (bottom - top)

    parts = ['<?xml version="1.0" encoding="UTF-8"?>']
    for line in header_lines:
        parts.append(f"<!-- {line} -->")
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    parts.append(f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>')
    parts.append(f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>')
    parts.append(f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>')
    parts.append(
        f'<text x="{(left + right) / 2:.6g}" y="{height - 8}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="14">noise</text>'
    )
    parts.append(
        f'<text x="16" y="{(top + bottom) / 2:.6g}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14" transform="rotate(-90 16 {(top + bottom) / 2:.6g})">mean accuracy</text>'
    )
    for i in range(6):  # y ticks at 0, 0.2, ..., 1
        v = i / 5
        y = sy(v)
        parts.append(f'<line x1="{left - 5}" y1="{y:.6g}" x2="{left}" y2="{y:.6g}" stroke="black"/>')
        parts.append(
            f'<text x="{left - 9}" y="{y + 4:.6g}" text-anchor="end" '
            f'font-family="sans-serif" font-size="12">{v:.6g}</text>'
        )
    for v in levels:
        x = sx(v)
        parts.append(f'<line x1="{x:.6g}" y1="{bottom}" x2="{x:.6g}" y2="{bottom + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{x:.6g}" y="{bottom + 20}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="12">{v:.6g}</text>'
        )
    for v, mean, std in zip(levels, means, stds):
        x = sx(v)
        y_lo, y_hi = sy(mean - std), sy(mean + std)
        parts.append(f'<line x1="{x:.6g}" y1="{y_lo:.6g}" x2="{x:.6g}" y2="{y_hi:.6g}" stroke="gray"/>')
        for y in (y_lo, y_hi):
            parts.append(f'<line x1="{x - 4:.6g}" y1="{y:.6g}" x2="{x + 4:.6g}" y2="{y:.6g}" stroke="gray"/>')
    if len(levels) > 1:
        pts = " ".join(f"{sx(v):.6g},{sy(m):.6g}" for v, m in zip(levels, means))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="2"/>')
    for v, mean in zip(levels, means):
        parts.append(f'<circle cx="{sx(v):.6g}" cy="{sy(mean):.6g}" r="3.5" fill="steelblue"/>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
